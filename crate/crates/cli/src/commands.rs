use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use conevol::checker::{check_all_facets, check_directions, facet_axes, CheckOptions, Classification};
use conevol::exact_poly::{
    build_p1, lemma1_chain, n2_identity, verify_lemma2, verify_lemma2_with, Certificate, RationalPoly, Route,
};
use conevol::measures::{cone_volume_measure, lp_surface_measure, surface_area_measure};
use conevol::reduction::{compare, find_balanced, Family};
use conevol::symmetrization::{profile, verify_prop1, DEFAULT_RESOLUTION};
use conevol::truncated_cone::{key_ratio, psi, range_check, BaseRatio, TruncatedConeParams};
use conevol::vector::Vector;
use conevol::{BigRational, Measure64, Polytope64, Vector64};
use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::audit::{in_pool, replay, run_audit, AuditConfig, FailureRecord, Generator};
use crate::format::{self, sig17, vector_field, Csv, OutputFormat};
use crate::io::{self, PolytopeFile};
use crate::{Outcome, Thresholds, EXIT_CERTIFICATE, EXIT_OK, EXIT_VIOLATION};

#[derive(Debug, Parser)]
#[command(name = "conevol", version, about = "Cone-volume measures and the refined logarithmic Minkowski condition")]
pub struct Cli {
    /// Output format; json by default, csv for cone-table and symmetrize.
    #[arg(long, global = true, value_enum)]
    pub output: Option<OutputFormat>,
    /// Samples per profile.
    #[arg(long, global = true)]
    pub resolution: Option<usize>,
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    /// Threshold overrides, e.g. `--tol eq=1e-9,violate=1e-7`.
    #[arg(long = "tol", global = true, value_name = "KEY=VALUE")]
    pub tol: Vec<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Direction(pub Vec<f64>);

impl FromStr for Direction {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let v: std::result::Result<Vec<f64>, _> = s.split([',', ' ']).filter(|w| !w.is_empty()).map(str::parse).collect();
        match v {
            Ok(v) if !v.is_empty() && v.iter().all(|x| x.is_finite()) => Ok(Direction(v)),
            _ => Err(format!("expected comma-separated finite coordinates, got {s:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Chain,
    Sturm,
    Both,
}

impl From<MethodArg> for Route {
    fn from(m: MethodArg) -> Route {
        match m {
            MethodArg::Chain => Route::Chain,
            MethodArg::Sturm => Route::Sturm,
            MethodArg::Both => Route::Both,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Surface area, L_p surface area and cone-volume measures.
    Measure {
        file: PathBuf,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        p: f64,
    },
    /// Evaluate the refined condition on facet axes or given directions.
    Check {
        file: PathBuf,
        /// Translate the centroid to the origin first.
        #[arg(long)]
        center: bool,
        #[arg(long)]
        direction: Vec<Direction>,
    },
    /// Section-area profile t, A(t), r(t) along a direction.
    Symmetrize {
        file: PathBuf,
        #[arg(long)]
        center: bool,
        #[arg(long)]
        direction: Option<Direction>,
    },
    /// x, y, Ψ and range slacks of truncated cones.
    ConeTable {
        #[arg(long, value_delimiter = ',', default_values_t = [2usize, 3, 4, 5, 6])]
        n: Vec<usize>,
        /// Base-radius ratios ≥ 1; rationals `p/q`, decimals, or `inf`.
        #[arg(long, value_delimiter = ',', default_values_t = ["1", "11/10", "3/2", "2", "3", "5", "10", "100", "inf"].map(String::from))]
        t: Vec<String>,
        /// Float arithmetic instead of exact rationals.
        #[arg(long)]
        float: bool,
    },
    /// Balanced frustum of the reduction family along a direction.
    Reduce {
        file: PathBuf,
        #[arg(long)]
        center: bool,
        #[arg(long)]
        direction: Option<Direction>,
    },
    /// Seeded random audit of the condition and the reduction pipeline.
    Audit {
        #[arg(long, default_value_t = 3)]
        dim: usize,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, value_enum, default_value_t = Generator::RandomHull)]
        generator: Generator,
        #[arg(long, default_value_t = 0.05)]
        amplitude: f64,
        /// Include every item report in the output.
        #[arg(long)]
        items: bool,
        /// Write failure records here for `--replay`.
        #[arg(long)]
        failure_file: Option<PathBuf>,
        /// Recompute the reports of a failure file.
        #[arg(long, conflicts_with_all = ["failure_file", "items"])]
        replay: Option<PathBuf>,
    },
    /// Exact certificates for the polynomial inequalities.
    VerifyLemmas {
        #[arg(long, default_value_t = 3)]
        n_min: usize,
        #[arg(long, default_value_t = 10)]
        n_max: usize,
        #[arg(long, value_enum, default_value_t = MethodArg::Both)]
        method: MethodArg,
        /// Allow n = 2, where the quotient is identically one.
        #[arg(long)]
        allow_n2: bool,
        /// Test hook: add one to this coefficient of p₁.
        #[arg(long, hide = true)]
        corrupt_p1: Option<usize>,
    },
}

pub fn run(cli: Cli) -> Result<Outcome> {
    let th = Thresholds::default().with_overrides(&cli.tol)?;
    let out = cli.output;
    if cli.resolution == Some(0) {
        bail!("--resolution must be positive");
    }
    let res = cli.resolution;
    match cli.command {
        Command::Measure { file, p } => measure(&io::load(&file)?, p, out.unwrap_or(OutputFormat::Json)),
        Command::Check { file, center, direction } => check(
            &io::load(&file)?,
            center,
            &direction,
            &th,
            res.unwrap_or(CheckOptions::default().resolution),
            out.unwrap_or(OutputFormat::Json),
        ),
        Command::Symmetrize { file, center, direction } => symmetrize(
            &io::load(&file)?,
            center,
            direction.as_ref(),
            res.unwrap_or(DEFAULT_RESOLUTION),
            out.unwrap_or(OutputFormat::Csv),
        ),
        Command::ConeTable { n, t, float } => cone_table(&n, &t, float, out.unwrap_or(OutputFormat::Csv)),
        Command::Reduce { file, center, direction } => reduce(
            &io::load(&file)?,
            center,
            direction.as_ref(),
            &th,
            res.unwrap_or(DEFAULT_RESOLUTION),
            out.unwrap_or(OutputFormat::Json),
        ),
        Command::Audit {
            dim,
            count,
            generator,
            amplitude,
            items,
            failure_file,
            replay: replay_file,
        } => {
            if let Some(path) = replay_file {
                return replay_cmd(&path, out.unwrap_or(OutputFormat::Json));
            }
            let config = AuditConfig {
                dim,
                count,
                generator,
                seed: cli.seed,
                resolution: res.unwrap_or(DEFAULT_RESOLUTION),
                amplitude,
            };
            audit(&config, &th, items, failure_file.as_ref(), out.unwrap_or(OutputFormat::Json))
        }
        Command::VerifyLemmas {
            n_min,
            n_max,
            method,
            allow_n2,
            corrupt_p1,
        } => verify_lemmas(n_min, n_max, method.into(), allow_n2, corrupt_p1, out.unwrap_or(OutputFormat::Json)),
    }
}

fn unit(dim: usize, d: &Direction) -> Result<Vector64> {
    if d.0.len() != dim {
        bail!("direction has {} coordinates, the body has dimension {dim}", d.0.len());
    }
    Vector::new(d.0.clone())
        .normalized()
        .ok_or_else(|| anyhow!("direction must be nonzero"))
}

fn body(file: &PolytopeFile, center: bool) -> Result<Polytope64> {
    let p = file.to_polytope()?;
    Ok(if center { p.translate_to_centroid() } else { p })
}

fn require_centered(p: &Polytope64) -> Result<()> {
    let off = p.centroid().norm();
    if off > 1e-9 * p.diameter() {
        bail!("precondition violated: centroid is {off} away from the origin; pass --center");
    }
    Ok(())
}

#[derive(Serialize)]
struct MeasureOut<'a> {
    #[serde(skip_serializing_if = "Option::is_none")]
    p: Option<f64>,
    atoms: &'a [conevol::measures::Atom<f64>],
    total: f64,
    closure_residual: f64,
}

impl<'a> MeasureOut<'a> {
    fn of(m: &'a Measure64, p: Option<f64>) -> Self {
        MeasureOut {
            p,
            atoms: &m.atoms,
            total: m.total(),
            closure_residual: m.closure_residual(),
        }
    }
}

pub fn measure(file: &PolytopeFile, p: f64, out: OutputFormat) -> Result<Outcome> {
    let poly = file.to_polytope()?;
    let surface = surface_area_measure(&poly);
    let lp = lp_surface_measure(&poly, p)?;
    let cone = if poly.origin_interior() {
        Some(cone_volume_measure(&poly)?)
    } else {
        None
    };
    let text = match out {
        OutputFormat::Json => format::json(&json!({
            "name": file.name,
            "dim": poly.dim(),
            "volume": poly.volume(),
            "centroid": poly.centroid(),
            "origin_interior": poly.origin_interior(),
            "surface": MeasureOut::of(&surface, None),
            "lp": MeasureOut::of(&lp, Some(p)),
            "cone_volume": cone.as_ref().map(|m| MeasureOut::of(m, None)),
        })),
        OutputFormat::Csv => {
            let mut csv = Csv::new(&["measure", "index", "mass", "direction"]);
            let mut add = |name: &str, m: &Measure64| {
                for (i, a) in m.atoms.iter().enumerate() {
                    csv.row([name.into(), i.to_string(), sig17(a.mass), vector_field(&a.direction.to_f64())]);
                }
            };
            add("surface", &surface);
            add("lp", &lp);
            if let Some(c) = &cone {
                add("cone_volume", c);
            }
            csv.finish()
        }
    };
    Ok(Outcome::ok(text))
}

pub fn check(
    file: &PolytopeFile,
    center: bool,
    directions: &[Direction],
    th: &Thresholds,
    resolution: usize,
    out: OutputFormat,
) -> Result<Outcome> {
    let p = body(file, center)?;
    let opts = CheckOptions {
        tol: th.check(),
        resolution,
    };
    let reports = if directions.is_empty() {
        check_all_facets(&p, &opts)?
    } else {
        let us = directions.iter().map(|d| unit(p.dim(), d)).collect::<Result<Vec<_>>>()?;
        check_directions(&p, &us, &opts)?
    };
    let violated = reports.iter().any(|r| r.classification == Classification::Violated);
    let text = match out {
        OutputFormat::Json => format::json(&reports),
        OutputFormat::Csv => {
            let mut csv = Csv::new(&[
                "direction",
                "x",
                "y",
                "psi",
                "slack",
                "scc_value",
                "gap",
                "classification",
                "note",
            ]);
            for r in &reports {
                csv.row([
                    vector_field(&r.direction.to_f64()),
                    sig17(r.x),
                    sig17(r.y),
                    sig17(r.psi),
                    sig17(r.slack),
                    sig17(r.scc_value),
                    sig17(r.gap),
                    format!("{:?}", r.classification),
                    r.note.clone().unwrap_or_default(),
                ]);
            }
            csv.finish()
        }
    };
    Ok(Outcome {
        stdout: text,
        code: if violated { EXIT_VIOLATION } else { EXIT_OK },
    })
}

fn direction_or_first_axis(p: &Polytope64, d: Option<&Direction>) -> Result<Vector64> {
    match d {
        Some(d) => unit(p.dim(), d),
        None => Ok(facet_axes(p)[0].clone()),
    }
}

pub fn symmetrize(
    file: &PolytopeFile,
    center: bool,
    direction: Option<&Direction>,
    resolution: usize,
    out: OutputFormat,
) -> Result<Outcome> {
    let p = body(file, center)?;
    let u = direction_or_first_axis(&p, direction)?;
    let prof = profile(&p, &u, resolution)?;
    let rows = prof.rows();
    let text = match out {
        OutputFormat::Csv => {
            let mut csv = Csv::new(&["t", "area", "radius"]);
            for (t, a, r) in &rows {
                csv.row([sig17(*t), sig17(*a), sig17(*r)]);
            }
            csv.finish()
        }
        OutputFormat::Json => {
            let prop1 = if center { Some(verify_prop1(&p, &u, resolution)?) } else { None };
            format::json(&json!({
                "direction": u,
                "t_lo": prof.t_lo,
                "t_hi": prof.t_hi,
                "volume": prof.volume(),
                "centroid_u": prof.centroid_u(),
                "concavity": prof.concavity_defect(),
                "prop1": prop1,
                "rows": rows.iter().map(|(t, a, r)| json!({"t": t, "area": a, "radius": r})).collect::<Vec<_>>(),
            }))
        }
    };
    Ok(Outcome::ok(text))
}

/// Exact rational from `p/q`, an integer or a plain decimal.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || anyhow!("not a rational number: {s:?}");
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            bail!("zero denominator in {s:?}");
        }
        return Ok(BigRational::new(p, q));
    }
    let (mantissa, exp) = match s.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (int, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if frac.chars().any(|c| !c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: BigInt = format!("{int}{frac}").parse().map_err(|_| bad())?;
    let scale = exp - frac.len() as i32;
    let ten = BigRational::from_integer(10.into());
    let factor = if scale >= 0 {
        num_traits::pow(ten, scale as usize)
    } else {
        BigRational::one() / num_traits::pow(ten, (-scale) as usize)
    };
    Ok(BigRational::from_integer(digits) * factor)
}

#[derive(Debug, Clone)]
enum TValue {
    Exact(BaseRatio<BigRational>),
    Float(BaseRatio<f64>),
}

fn parse_t(s: &str, float: bool) -> Result<TValue> {
    let infinite = matches!(s.trim().to_ascii_lowercase().as_str(), "inf" | "infinity");
    let v = if float {
        TValue::Float(if infinite {
            BaseRatio::Infinite
        } else {
            let exact = parse_rational(s)?;
            BaseRatio::Finite(exact.to_f64().ok_or_else(|| anyhow!("t = {s} does not fit in f64"))?)
        })
    } else {
        TValue::Exact(if infinite { BaseRatio::Infinite } else { BaseRatio::Finite(parse_rational(s)?) })
    };
    let below_one = match &v {
        TValue::Exact(BaseRatio::Finite(t)) => *t < BigRational::one(),
        TValue::Float(BaseRatio::Finite(t)) => *t < 1.0,
        _ => false,
    };
    if below_one {
        bail!("t must be at least 1, got {s}");
    }
    Ok(v)
}

fn is_one_exact(r: &BaseRatio<BigRational>) -> bool {
    matches!(r, BaseRatio::Finite(t) if t.is_one())
}

/// One cone-table row as display strings, plus the JSON values.
fn table_row(n: usize, t_text: &str, t: &TValue) -> Result<(Vec<String>, Value)> {
    let names = ["x", "y", "psi", "key_ratio", "x_bound_slack", "y_bound_slack", "sum_bound_slack"];
    let (cells, values): (Vec<String>, Vec<Value>) = match t {
        TValue::Exact(r) => {
            let params = TruncatedConeParams::new(n, r.clone())?;
            let rc = range_check(&params, &BigRational::zero());
            let value = psi(&rc.x, &rc.y, n);
            let kr = if is_one_exact(r) {
                if n == 2 { "1".into() } else { "inf".into() }
            } else {
                key_ratio(n, r)?.to_string()
            };
            let cells = vec![
                rc.x.to_string(),
                rc.y.to_string(),
                value.to_string(),
                kr,
                rc.x_bound_slack.to_string(),
                rc.y_bound_slack.to_string(),
                rc.sum_bound_slack.to_string(),
            ];
            let values = cells.iter().cloned().map(Value::String).collect();
            (cells, values)
        }
        TValue::Float(r) => {
            let params = TruncatedConeParams::new(n, r.clone())?;
            let rc = range_check(&params, &0.0);
            let value = psi(&rc.x, &rc.y, n);
            let kr = match r {
                BaseRatio::Finite(t) if *t == 1.0 => {
                    if n == 2 { 1.0 } else { f64::INFINITY }
                }
                _ => key_ratio(n, r)?,
            };
            let nums = [rc.x, rc.y, value, kr, rc.x_bound_slack, rc.y_bound_slack, rc.sum_bound_slack];
            let cells = nums.iter().map(|v| sig17(*v)).collect();
            let values = nums
                .iter()
                .map(|v| serde_json::Number::from_f64(*v).map(Value::Number).unwrap_or(Value::String(sig17(*v))))
                .collect();
            (cells, values)
        }
    };
    let mut row = vec![n.to_string(), t_text.to_string()];
    row.extend(cells);
    let mut obj = serde_json::Map::new();
    obj.insert("n".into(), json!(n));
    obj.insert("t".into(), json!(t_text));
    for (k, v) in names.iter().zip(values) {
        obj.insert(k.to_string(), v);
    }
    Ok((row, Value::Object(obj)))
}

pub fn cone_table(ns: &[usize], ts: &[String], float: bool, out: OutputFormat) -> Result<Outcome> {
    if let Some(n) = ns.iter().find(|&&n| n < 2) {
        bail!("n must be at least 2, got {n}");
    }
    let parsed = ts
        .iter()
        .map(|s| Ok((s.trim().to_string(), parse_t(s, float)?)))
        .collect::<Result<Vec<_>>>()?;
    let mut csv = Csv::new(&[
        "n",
        "t",
        "x",
        "y",
        "psi",
        "key_ratio",
        "x_bound_slack",
        "y_bound_slack",
        "sum_bound_slack",
    ]);
    let mut rows = Vec::new();
    for &n in ns {
        for (text, t) in &parsed {
            let (cells, value) = table_row(n, text, t)?;
            csv.row(cells);
            rows.push(value);
        }
    }
    Ok(Outcome::ok(match out {
        OutputFormat::Csv => csv.finish(),
        OutputFormat::Json => format::json(&rows),
    }))
}

pub fn reduce(
    file: &PolytopeFile,
    center: bool,
    direction: Option<&Direction>,
    th: &Thresholds,
    resolution: usize,
    out: OutputFormat,
) -> Result<Outcome> {
    let p = body(file, center)?;
    require_centered(&p)?;
    let u = direction_or_first_axis(&p, direction)?;
    let prof = profile(&p, &u, resolution)?;
    let family = Family::from_profile(&prof)?;
    let balanced = find_balanced(&prof)?;
    let cmp = compare(&prof, &balanced, th.compare)?;
    let ok = cmp.x_ok && cmp.y_ok && cmp.psi_ok && cmp.bound_ok;
    let text = match out {
        OutputFormat::Json => format::json(&json!({
            "direction": u,
            "family": family,
            "balanced": balanced,
            "compare": cmp,
            "ok": ok,
        })),
        OutputFormat::Csv => {
            let mut csv = Csv::new(&[
                "s_star",
                "r_lo",
                "r_hi",
                "centroid_u",
                "x_prime",
                "y_prime",
                "psi_prime",
                "x_frustum",
                "y_frustum",
                "psi_frustum",
                "psi_closed_form",
                "ok",
            ]);
            let f = &balanced.frustum;
            csv.row(
                [
                    balanced.s_star,
                    f.r_lo,
                    f.r_hi,
                    balanced.centroid_u,
                    cmp.x_prime,
                    cmp.y_prime,
                    cmp.psi_prime,
                    cmp.x_frustum,
                    cmp.y_frustum,
                    cmp.psi_frustum,
                    cmp.psi_closed_form,
                ]
                .iter()
                .map(|v| sig17(*v))
                .chain([ok.to_string()]),
            );
            csv.finish()
        }
    };
    Ok(Outcome {
        stdout: text,
        code: if ok { EXIT_OK } else { EXIT_VIOLATION },
    })
}

pub fn audit(
    config: &AuditConfig,
    th: &Thresholds,
    items: bool,
    failure_file: Option<&PathBuf>,
    out: OutputFormat,
) -> Result<Outcome> {
    let summary = run_audit(config, th, items || out == OutputFormat::Csv)?;
    if let Some(path) = failure_file {
        if !summary.failures.is_empty() {
            std::fs::write(path, format::json(&summary.failures))
                .with_context(|| format!("writing {}", path.display()))?;
        }
    }
    let text = match out {
        OutputFormat::Json => format::json(&summary),
        OutputFormat::Csv => {
            let mut csv = Csv::new(&[
                "index",
                "ratio",
                "min_slack",
                "max_psi",
                "max_scc_value",
                "closure_residual",
                "concavity_defect",
                "failures",
            ]);
            for r in &summary.items {
                csv.row([
                    r.index.to_string(),
                    r.ratio.map(sig17).unwrap_or_default(),
                    sig17(r.min_slack),
                    sig17(r.max_psi),
                    sig17(r.max_scc_value),
                    sig17(r.closure_residual),
                    r.profile.as_ref().map(|p| sig17(p.concavity_defect)).unwrap_or_default(),
                    r.failures.join("; "),
                ]);
            }
            csv.finish()
        }
    };
    Ok(Outcome {
        stdout: text,
        code: if summary.failures.is_empty() { EXIT_OK } else { EXIT_VIOLATION },
    })
}

pub fn replay_cmd(path: &PathBuf, out: OutputFormat) -> Result<Outcome> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let records: Vec<FailureRecord> = match serde_json::from_str::<Vec<FailureRecord>>(&text) {
        Ok(r) => r,
        Err(_) => vec![serde_json::from_str::<FailureRecord>(&text)
            .map_err(|e| anyhow!("{}: line {}, column {}: {e}", path.display(), e.line(), e.column()))?],
    };
    let reports = replay(&records);
    let failing = reports.iter().any(|r| !r.failures.is_empty());
    let text = match out {
        OutputFormat::Json => format::json(&reports),
        OutputFormat::Csv => {
            let mut csv = Csv::new(&["index", "min_slack", "identical", "failures"]);
            for (rec, r) in records.iter().zip(&reports) {
                csv.row([
                    r.index.to_string(),
                    sig17(r.min_slack),
                    (r == &rec.report).to_string(),
                    r.failures.join("; "),
                ]);
            }
            csv.finish()
        }
    };
    Ok(Outcome {
        stdout: text,
        code: if failing { EXIT_VIOLATION } else { EXIT_OK },
    })
}

fn corrupt(p1: &RationalPoly, k: usize) -> RationalPoly {
    let mut c = p1.coeffs().to_vec();
    if c.len() <= k {
        c.resize(k + 1, BigRational::zero());
    }
    c[k] += BigRational::one();
    RationalPoly::new(c)
}

fn certificates_for(n: usize, route: Route, corrupt_p1: Option<usize>) -> Result<Vec<Certificate>> {
    let mut out = lemma1_chain(n)?;
    if n == 2 {
        out.push(n2_identity());
        return Ok(out);
    }
    out.extend(match corrupt_p1 {
        Some(k) => verify_lemma2_with(n, &corrupt(&build_p1(n)?, k), route)?,
        None => verify_lemma2(n, route)?,
    });
    Ok(out)
}

pub fn verify_lemmas(
    n_min: usize,
    n_max: usize,
    route: Route,
    allow_n2: bool,
    corrupt_p1: Option<usize>,
    out: OutputFormat,
) -> Result<Outcome> {
    let floor = if allow_n2 { 2 } else { 3 };
    if n_min < floor || n_min > n_max {
        bail!("need {floor} <= n-min <= n-max, got {n_min}..{n_max}");
    }
    let per_n: Vec<Result<Vec<Certificate>>> =
        in_pool(|| (n_min..=n_max).into_par_iter().map(|n| certificates_for(n, route, corrupt_p1)).collect())?;
    let mut certs = Vec::new();
    for c in per_n {
        certs.extend(c?);
    }
    let all = certs.iter().all(Certificate::proven);
    let text = match out {
        OutputFormat::Json => format::json(&certs),
        OutputFormat::Csv => {
            let mut csv = Csv::new(&["n", "target", "method", "status", "failed_stage", "closed_form_mismatches"]);
            for c in &certs {
                csv.row([
                    c.n.to_string(),
                    c.target.clone(),
                    serde_json::to_value(c.method).unwrap().as_str().unwrap().to_string(),
                    serde_json::to_value(c.status).unwrap().as_str().unwrap().to_string(),
                    c.failed_stage.clone().unwrap_or_default(),
                    c.witness.closed_form_mismatches.join(" "),
                ]);
            }
            csv.finish()
        }
    };
    Ok(Outcome {
        stdout: text,
        code: if all { EXIT_OK } else { EXIT_CERTIFICATE },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("11/10").unwrap(), conevol::exact_poly::ratio(11, 10));
        assert_eq!(parse_rational("1.1").unwrap(), conevol::exact_poly::ratio(11, 10));
        assert_eq!(parse_rational("2").unwrap(), conevol::exact_poly::rat(2));
        assert_eq!(parse_rational("2.5e1").unwrap(), conevol::exact_poly::rat(25));
        assert_eq!(parse_rational("-0.25").unwrap(), conevol::exact_poly::ratio(-1, 4));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1.x").is_err());
    }

    #[test]
    fn directions() {
        assert_eq!("1,0,-2".parse::<Direction>().unwrap(), Direction(vec![1.0, 0.0, -2.0]));
        assert!("1,a".parse::<Direction>().is_err());
        assert!("".parse::<Direction>().is_err());
    }

    #[test]
    fn cone_row_three_two() {
        let o = cone_table(&[3], &["2".into()], false, OutputFormat::Csv).unwrap();
        let line = o.stdout.lines().nth(1).unwrap();
        assert!(line.starts_with("3,2,11/49,17/196,"), "{line}");
    }
}
