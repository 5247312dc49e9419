//! Acceptance criteria 1–10. Runs without the libtest harness so that every
//! criterion prints exactly one PASS/FAIL line; exits nonzero on any FAIL.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use conevol::checker::{check_all_facets, check_direction, CheckOptions, Classification};
use conevol::exact_poly::{build_fg, rat, ratio};
use conevol::reduction::{compare, find_balanced};
use conevol::shapes::{cube, cube_vertices, prism, random_hull, regular_simplex};
use conevol::symmetrization::{profile, unit_ball_volume};
use conevol::truncated_cone::{psi, psi_gradient, xy_of_ratio, TruncatedConeParams};
use conevol::vector::Vector;
use conevol::{Polytope64, TruncatedCone64};
use conevol_cli::audit::{run_audit, AuditConfig, AuditSummary, Generator};
use conevol_cli::Thresholds;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

type Outcome = Result<String, String>;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_conevol"))
}

fn ensure(ok: bool, detail: impl Into<String>) -> Outcome {
    if ok {
        Ok(String::new())
    } else {
        Err(detail.into())
    }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let out = bin()
        .args(["verify-lemmas", "--n-min", "3", "--n-max", "10", "--method", "both"])
        .output()
        .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let certs: Vec<Value> = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    let mut problems = Vec::new();
    if out.status.code() != Some(0) {
        problems.push(format!("exit code {:?}", out.status.code()));
    }
    if elapsed > Duration::from_secs(60) {
        problems.push(format!("took {elapsed:?}"));
    }
    for n in 3..=10u64 {
        let of = |target: &str| {
            certs
                .iter()
                .find(|c| c["n"].as_u64() == Some(n) && c["target"] == target)
                .cloned()
        };
        for target in ["f1", "f2", "g", "h", "p1", "F-G"] {
            match of(target) {
                Some(c) if c["status"] != "failed" => {}
                Some(c) => problems.push(format!("n={n} {target}: {}", c["failed_stage"])),
                None => problems.push(format!("n={n} {target}: missing")),
            }
        }
        let Some(p1) = of("p1") else { continue };
        let checks = p1["witness"]["checks"].as_array().cloned().unwrap_or_default();
        let holds = |name: &str| checks.iter().any(|c| c["name"] == name && c["holds"] == true);
        for m in 0..=2 {
            if !holds(&format!("p1^({m})(1) = 0")) {
                problems.push(format!("n={n}: p1^({m})(1) != 0"));
            }
        }
        for m in 0..=4 {
            if !holds(&format!("p2^({m})(1) = 0")) {
                problems.push(format!("n={n}: p2^({m})(1) != 0"));
            }
        }
        for v in p1["witness"]["values"].as_array().cloned().unwrap_or_default() {
            if v["matches_expected"] == false {
                problems.push(format!("n={n}: {} = {} but expected {}", v["name"], v["value"], v["expected"]));
            }
        }
        if n == 3 {
            let p3 = p1["witness"]["values"].as_array().unwrap().iter().find(|v| v["name"] == "p3^(0)(1)").cloned();
            if p3.map(|v| v["value"] != "80640").unwrap_or(true) {
                problems.push("n=3: p3(1) != 80640".into());
            }
        }
    }
    if problems.is_empty() {
        Ok(format!("{} certificates in {elapsed:.1?}", certs.len()))
    } else {
        Err(format!("{} problem(s): {}", problems.len(), problems.join("; ")))
    }
}

fn criterion_2() -> Outcome {
    let (f, g) = build_fg(2).map_err(|e| e.to_string())?;
    let d = &f - &g;
    ensure(d.is_zero(), format!("F - G = {d}"))?;
    ensure(f.coeffs() == g.coeffs(), "coefficient lists differ")?;
    let out = bin()
        .args(["verify-lemmas", "--n-min", "2", "--n-max", "2", "--allow-n2"])
        .output()
        .map_err(|e| e.to_string())?;
    let certs: Vec<Value> = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    let id = certs.iter().find(|c| c["target"] == "F-G").ok_or("no F-G certificate")?;
    ensure(id["status"] == "proven-identity", format!("status {}", id["status"]))?;
    Ok(format!("F and G agree in all {} coefficients", f.coeffs().len()))
}

/// Composite Simpson on the radius profile of the frustum with radii 1 and t.
fn frustum_quadrature(n: usize, t: f64) -> (f64, f64) {
    let w = unit_ball_volume::<f64>(n - 1).unwrap();
    let panels = 50_000;
    let h = (t - 1.0) / (2 * panels) as f64;
    let (mut v, mut m) = (0.0, 0.0);
    for k in 0..=2 * panels {
        let z = 1.0 + h * k as f64;
        let c = match k {
            0 => 1.0,
            k if k == 2 * panels => 1.0,
            k if k % 2 == 1 => 4.0,
            _ => 2.0,
        };
        let a = w * z.powi(n as i32 - 1);
        v += c * a;
        m += c * z * a;
    }
    v *= h / 3.0;
    m *= h / 3.0;
    let c = m / v;
    let nf = n as f64;
    ((t - c) * w * t.powi(n as i32 - 1) / (nf * v), (c - 1.0) * w / (nf * v))
}

fn criterion_3() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in [3, 4, 5] {
        for t in [1.1, 2.0, 5.0, 20.0] {
            let (x, y) = xy_of_ratio(&TruncatedCone64::finite(n, t).unwrap());
            let (ox, oy) = frustum_quadrature(n, t);
            worst = worst.max((x - ox).abs()).max((y - oy).abs());
        }
    }
    ensure(worst <= 1e-9, format!("max deviation {worst:e}"))?;
    let (x, y) = xy_of_ratio(&TruncatedConeParams::finite(3, rat(2)).unwrap());
    ensure(x == ratio(11, 49) && y == ratio(17, 196), format!("(3, 2) gives x={x}, y={y}"))?;
    let out = bin()
        .args(["cone-table", "--n", "3", "--t", "2"])
        .output()
        .map_err(|e| e.to_string())?;
    let text = String::from_utf8_lossy(&out.stdout);
    ensure(text.lines().nth(1).is_some_and(|l| l.starts_with("3,2,11/49,17/196,")), format!("cone-table row: {text}"))?;
    Ok(format!("max deviation {worst:.1e}; x=11/49, y=17/196"))
}

struct Audits {
    dim3: AuditSummary,
    dim4: AuditSummary,
}

fn audits() -> &'static Result<Audits, String> {
    static CELL: std::sync::OnceLock<Result<Audits, String>> = std::sync::OnceLock::new();
    CELL.get_or_init(|| {
        let run = |dim, count| {
            let config = AuditConfig {
                dim,
                count,
                generator: Generator::RandomHull,
                seed: 2024,
                resolution: 512,
                amplitude: 0.05,
            };
            run_audit(&config, &Thresholds::default(), false).map_err(|e| format!("{e:#}"))
        };
        Ok(Audits {
            dim3: run(3, 1000)?,
            dim4: run(4, 300)?,
        })
    })
}

fn criterion_4() -> Outcome {
    let a = audits().as_ref().map_err(Clone::clone)?;
    let mut problems = Vec::new();
    for s in [&a.dim3, &a.dim4] {
        let d = s.config.dim;
        if s.max_psi > 1.0 + 1e-7 {
            problems.push(format!("dim {d}: max psi {}", s.max_psi));
        }
        if s.max_scc_value > 1.0 + 1e-7 {
            problems.push(format!("dim {d}: max scc {}", s.max_scc_value));
        }
        for f in &s.failures {
            problems.push(format!("dim {d} item {}: {}", f.input.index, f.report.failures.join(", ")));
        }
    }
    ensure(problems.is_empty(), problems.join("; "))?;
    Ok(format!(
        "{} + {} bodies, {} + {} facet reports, min slack {:.3e} / {:.3e}",
        a.dim3.bodies, a.dim4.bodies, a.dim3.reports, a.dim4.reports, a.dim3.min_slack, a.dim4.min_slack
    ))
}

fn criterion_5() -> Outcome {
    let opts = CheckOptions::default();
    let all = check_all_facets(&cube::<f64>(3, 1.0), &opts).map_err(|e| e.to_string())?;
    ensure(
        all.len() == 3
            && all
                .iter()
                .all(|r| (r.psi - 1.0).abs() <= 1e-9 && r.classification == Classification::PrismEquality),
        format!("cube: {all:?}"),
    )?;
    let all = check_all_facets(&regular_simplex::<f64>(3), &opts).map_err(|e| e.to_string())?;
    ensure(
        all.len() == 4
            && all
                .iter()
                .all(|r| (r.psi - 1.0).abs() <= 1e-9 && r.classification == Classification::ConeEquality),
        format!("tetrahedron: {all:?}"),
    )?;
    let base = cube_vertices::<f64>(2);
    let oblique = prism(&base, &Vector::from_f64(&[0.6, -0.4, 1.5]))
        .map_err(|e| e.to_string())?
        .translate_to_centroid();
    let r = check_direction(&oblique, &Vector::axis(3, 2), &opts).map_err(|e| e.to_string())?;
    ensure(r.classification == Classification::PrismEquality, format!("oblique prism: {r:?}"))?;
    let mut pts: Vec<Vector<f64>> = base.iter().map(|b| Vector::from_f64(&[b[0], b[1], -1.0])).collect();
    pts.extend(base.iter().map(|b| Vector::from_f64(&[b[0], b[1], 1.0])));
    pts[5] = Vector::from_f64(&[pts[5][0], pts[5][1] + 1e-2, pts[5][2]]);
    let bent = Polytope64::from_vertices(3, &pts).map_err(|e| e.to_string())?.translate_to_centroid();
    let all = check_all_facets(&bent, &opts).map_err(|e| e.to_string())?;
    ensure(
        all.iter().all(|r| r.classification == Classification::Strict) && all[0].slack > 0.0,
        format!("perturbed prism: {:?}", all.iter().map(|r| (r.slack, r.classification)).collect::<Vec<_>>()),
    )?;
    Ok(format!("perturbed prism min slack {:.3e}", all[0].slack))
}

fn criterion_6() -> Outcome {
    let config = AuditConfig {
        dim: 3,
        count: 100,
        generator: Generator::RandomHull,
        seed: 6,
        resolution: 2048,
        amplitude: 0.05,
    };
    let s = run_audit(&config, &Thresholds::default(), false).map_err(|e| format!("{e:#}"))?;
    ensure(
        s.max_volume_rel <= 1e-6 && s.max_centroid_rel <= 1e-6 && s.max_mass_rel <= 1e-8,
        format!(
            "volume {:e}, centroid {:e}, masses {:e}",
            s.max_volume_rel, s.max_centroid_rel, s.max_mass_rel
        ),
    )?;
    Ok(format!(
        "worst volume {:.1e}, centroid {:.1e}, masses {:.1e}",
        s.max_volume_rel, s.max_centroid_rel, s.max_mass_rel
    ))
}

fn criterion_7() -> Outcome {
    let a = audits().as_ref().map_err(Clone::clone)?;
    let worst = a.dim3.max_closure_residual.max(a.dim4.max_closure_residual);
    ensure(worst <= 1e-10, format!("closure residual {worst:e}"))?;
    Ok(format!("worst closure residual {worst:.1e}"))
}

fn criterion_8() -> Outcome {
    let a = audits().as_ref().map_err(Clone::clone)?;
    let worst = a.dim3.max_concavity_defect.max(a.dim4.max_concavity_defect);
    ensure(worst <= 1e-8, format!("concavity defect {worst:e}"))?;
    Ok(format!("worst concavity defect {worst:.1e}"))
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst_c: f64 = 0.0;
    let mut worst_gap = f64::NEG_INFINITY;
    for i in 0..100 {
        let p: Polytope64 = random_hull(&mut rng, 3).translate_to_centroid();
        let u = loop {
            let v: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
            if let Some(u) = Vector::new(v).normalized() {
                break u;
            }
        };
        let prof = profile(&p, &u, 1024).map_err(|e| e.to_string())?;
        let h = prof.height();
        let b = find_balanced(&prof).map_err(|e| format!("profile {i}: {e}"))?;
        ensure(b.centroid_u.abs() <= 1e-9 * h, format!("profile {i}: |c.u| = {:e}", b.centroid_u))?;
        ensure(
            b.centroid_k0 >= -1e-9 * h && b.centroid_k1 <= 1e-9 * h,
            format!("profile {i}: endpoints {} {}", b.centroid_k0, b.centroid_k1),
        )?;
        let r = compare(&prof, &b, 1e-9).map_err(|e| e.to_string())?;
        ensure(
            r.psi_prime <= r.psi_closed_form + 1e-9 && r.psi_closed_form <= 1.0 + 1e-9,
            format!("profile {i}: {r:?}"),
        )?;
        worst_c = worst_c.max(b.centroid_u.abs() / h);
        worst_gap = worst_gap.max(r.psi_prime - r.psi_closed_form);
    }
    Ok(format!("worst |c.u|/height {worst_c:.1e}, max psi' - psi_t {worst_gap:.2e}"))
}

fn criterion_10() -> Outcome {
    let h = 1e-6;
    let mut worst: f64 = 0.0;
    for n in [3, 4, 5] {
        let side = 1.0 / (n as f64 + 1.0);
        for i in 0..20 {
            for j in 0..20 {
                let x = side * (i as f64 + 0.5) / 20.0;
                let y = side * (j as f64 + 0.5) / 20.0;
                let (gx, gy) = psi_gradient(&x, &y, n);
                let dx = (psi(&(x + h), &y, n) - psi(&(x - h), &y, n)) / (2.0 * h);
                let dy = (psi(&x, &(y + h), n) - psi(&x, &(y - h), n)) / (2.0 * h);
                worst = worst.max((gx - dx).abs() / gx.abs()).max((gy - dy).abs() / gy.abs());
            }
        }
    }
    ensure(worst <= 1e-6, format!("max relative error {worst:e}"))?;
    Ok(format!("max relative error {worst:.1e}"))
}

fn main() {
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("lemma certification", criterion_1),
        ("n=2 identity", criterion_2),
        ("closed form vs quadrature oracle", criterion_3),
        ("random polytope audit", criterion_4),
        ("equality cases", criterion_5),
        ("symmetrization invariants", criterion_6),
        ("Minkowski closure", criterion_7),
        ("Brunn-Minkowski concavity", criterion_8),
        ("reduction pipeline", criterion_9),
        ("gradient check", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {:>2} PASS [{secs:.1}s] {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL [{secs:.1}s] {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
