//! Seeded Monte Carlo exercise of the refined condition and its proof
//! pipeline. Item `i` draws from ChaCha8 stream `i` of the seed, so any item
//! can be regenerated, and every failure carries enough to replay it.

use anyhow::{bail, Result};
use clap::ValueEnum;
use conevol::checker::{check_all_facets, facet_axes, CheckOptions, Classification};
use conevol::measures::surface_area_measure;
use conevol::reduction::{centroid_u, compare, find_balanced, FrustumSpec};
use conevol::shapes::{perturbed_cone, perturbed_prism, random_hull};
use conevol::symmetrization::{profile, unit_ball_volume, verify_prop1_with, SliceProfile};
use conevol::truncated_cone::psi;
use conevol::vector::Vector;
use conevol::{Polytope64, Profile64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::io::PolytopeFile;
use crate::Thresholds;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Generator {
    RandomHull,
    PerturbedPrism,
    PerturbedCone,
    Frustum,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AuditConfig {
    pub dim: usize,
    pub count: usize,
    pub generator: Generator,
    pub seed: u64,
    pub resolution: usize,
    /// Vertex noise for the perturbed generators.
    pub amplitude: f64,
}

impl AuditConfig {
    pub fn validate(&self) -> Result<()> {
        if self.count == 0 {
            bail!("count must be at least 1");
        }
        if !(3..=6).contains(&self.dim) {
            bail!("dim must lie in 3..=6, got {}", self.dim);
        }
        if !(self.amplitude >= 0.0 && self.amplitude < 0.5) {
            bail!("amplitude must lie in [0, 0.5), got {}", self.amplitude);
        }
        Ok(())
    }
}

/// Everything needed to recompute one item without the generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemInput {
    pub index: u64,
    pub generator: Generator,
    pub dim: usize,
    /// Uncentered body, for polytope generators.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub body: Option<PolytopeFile>,
    /// Facet axis used for the profile checks.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axis: Option<usize>,
    /// Base-radius ratio and orientation, for the frustum generator.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wide_top: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileChecks {
    pub volume_rel: f64,
    pub centroid_rel: f64,
    pub mass_rel: f64,
    pub concavity_defect: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionChecks {
    pub s_star: f64,
    /// |c·u| / height of the balanced frustum.
    pub centroid_rel: f64,
    pub centroid_k0_rel: f64,
    pub centroid_k1_rel: f64,
    pub psi_prime: f64,
    pub psi_frustum: f64,
    pub psi_closed_form: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemReport {
    pub index: u64,
    pub directions: usize,
    pub min_slack: f64,
    pub max_psi: f64,
    pub max_scc_value: f64,
    pub closure_residual: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<ProfileChecks>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reduction: Option<ReductionChecks>,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureRecord {
    pub config: AuditConfig,
    pub thresholds: Thresholds,
    pub input: ItemInput,
    pub report: ItemReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditSummary {
    pub config: AuditConfig,
    pub bodies: usize,
    pub reports: usize,
    pub min_slack: f64,
    pub min_slack_index: u64,
    pub max_psi: f64,
    pub max_scc_value: f64,
    pub max_closure_residual: f64,
    pub max_concavity_defect: f64,
    pub max_volume_rel: f64,
    pub max_centroid_rel: f64,
    pub max_mass_rel: f64,
    pub max_balanced_centroid_rel: f64,
    pub failures: Vec<FailureRecord>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub items: Vec<ItemReport>,
}

pub fn item_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub fn make_input(config: &AuditConfig, index: u64) -> Result<ItemInput> {
    let mut rng = item_rng(config.seed, index);
    let dim = config.dim;
    let body: Option<Polytope64> = match config.generator {
        Generator::RandomHull => Some(random_hull(&mut rng, dim)),
        Generator::PerturbedPrism => Some(perturbed_prism(&mut rng, dim, config.amplitude)),
        Generator::PerturbedCone => Some(perturbed_cone(&mut rng, dim, config.amplitude)),
        Generator::Frustum => None,
    };
    let mut input = ItemInput {
        index,
        generator: config.generator,
        dim,
        body: None,
        axis: None,
        ratio: None,
        wide_top: None,
    };
    match body {
        Some(p) => {
            let file = PolytopeFile::from_vertices(Some(format!("{:?}-{index}", config.generator)), &p);
            // pick the axis on the body as it will be rebuilt on replay
            let axes = facet_axes(&file.to_polytope()?).len();
            input.axis = Some(rng.gen_range(0..axes));
            input.body = Some(file);
        }
        None => {
            // log-uniform on [1, 1e6] reaches both equality ends
            let ratio = 10f64.powf(rng.gen_range(0.0..6.0));
            input.ratio = Some(ratio);
            input.wide_top = Some(rng.gen_bool(0.5));
        }
    }
    Ok(input)
}

/// Section profile of a centered solid of revolution with radii 1 and
/// `ratio` at its ends.
pub fn frustum_profile(dim: usize, ratio: f64, wide_top: bool, resolution: usize) -> Result<Profile64> {
    let (r_lo, r_hi) = if wide_top { (1.0, ratio) } else { (ratio, 1.0) };
    let spec = FrustumSpec::new(dim, 0.0, 1.0, r_lo, r_hi)?;
    let c = centroid_u(&spec);
    let w = unit_ball_volume::<f64>(dim - 1)?;
    let u = Vector::axis(dim, dim - 1);
    let p = SliceProfile::sample(dim, u, -c, 1.0 - c, &[], resolution, |h| {
        let s = h + c;
        w * (r_lo + (r_hi - r_lo) * s).powi(dim as i32 - 1)
    })?;
    Ok(p)
}

fn reduction_checks(prof: &Profile64, th: &Thresholds, failures: &mut Vec<String>) -> Result<ReductionChecks> {
    let b = find_balanced(prof)?;
    let height = prof.height();
    let r = compare(prof, &b, th.compare)?;
    let checks = ReductionChecks {
        s_star: b.s_star,
        centroid_rel: b.centroid_u.abs() / height,
        centroid_k0_rel: b.centroid_k0 / height,
        centroid_k1_rel: b.centroid_k1 / height,
        psi_prime: r.psi_prime,
        psi_frustum: r.psi_frustum,
        psi_closed_form: r.psi_closed_form,
        ok: r.x_ok && r.y_ok && r.psi_ok && r.bound_ok,
    };
    if checks.centroid_rel > th.balanced {
        failures.push(format!("balanced frustum centroid off by {:e} of the height", checks.centroid_rel));
    }
    if !checks.ok {
        failures.push(format!("reduction comparison failed: {r:?}"));
    }
    Ok(checks)
}

fn profile_checks(prof: &Profile64, th: &Thresholds, failures: &mut Vec<String>) -> f64 {
    let defect = prof.concavity_defect().concavity_defect;
    if defect > th.concavity {
        failures.push(format!("concavity defect {defect:e}"));
    }
    defect
}

fn polytope_item(input: &ItemInput, resolution: usize, th: &Thresholds) -> Result<ItemReport> {
    let Some(file) = input.body.as_ref() else {
        bail!("item {} has no body", input.index);
    };
    let p = file.to_polytope()?.translate_to_centroid();
    let mut failures = Vec::new();
    let opts = CheckOptions {
        tol: th.check(),
        resolution,
    };
    let reports = check_all_facets(&p, &opts)?;
    let min_slack = reports.iter().map(|r| r.slack).fold(f64::INFINITY, f64::min);
    let max_psi = reports.iter().map(|r| r.psi).fold(f64::NEG_INFINITY, f64::max);
    let max_scc_value = reports.iter().map(|r| r.scc_value).fold(f64::NEG_INFINITY, f64::max);
    for r in reports.iter().filter(|r| r.classification == Classification::Violated) {
        failures.push(format!("psi = {} along {:?}", r.psi, r.direction.to_f64()));
    }
    if max_scc_value > 1.0 + th.violate {
        failures.push(format!("subspace concentration value {max_scc_value} exceeds 1"));
    }
    let closure_residual = surface_area_measure(&p).closure_residual();
    if closure_residual > th.closure {
        failures.push(format!("closure residual {closure_residual:e}"));
    }
    let axes = facet_axes(&p);
    let u = &axes[input.axis.unwrap_or(0) % axes.len()];
    let prof = profile(&p, u, resolution)?;
    let pr = verify_prop1_with(&p, &prof)?;
    let v = p.volume();
    let mass_dev = |d: &conevol::symmetrization::Deviation<f64>| {
        if d.expected > 0.0 {
            d.rel
        } else {
            d.abs / v
        }
    };
    let mass_rel = mass_dev(&pr.mass_top).max(mass_dev(&pr.mass_bottom));
    if pr.volume.rel > th.volume {
        failures.push(format!("profile volume off by {:e}", pr.volume.rel));
    }
    if pr.centroid_u.rel > th.centroid {
        failures.push(format!("profile centroid off by {:e} of the diameter", pr.centroid_u.rel));
    }
    if mass_rel > th.mass {
        failures.push(format!("endpoint masses off by {mass_rel:e}"));
    }
    let concavity_defect = profile_checks(&prof, th, &mut failures);
    let reduction = reduction_checks(&prof, th, &mut failures)?;
    Ok(ItemReport {
        index: input.index,
        directions: reports.len(),
        min_slack,
        max_psi,
        max_scc_value,
        closure_residual,
        ratio: None,
        profile: Some(ProfileChecks {
            volume_rel: pr.volume.rel,
            centroid_rel: pr.centroid_u.rel,
            mass_rel,
            concavity_defect,
        }),
        reduction: Some(reduction),
        failures,
    })
}

fn frustum_item(input: &ItemInput, resolution: usize, th: &Thresholds) -> Result<ItemReport> {
    let (ratio, wide_top) = match (input.ratio, input.wide_top) {
        (Some(r), Some(w)) => (r, w),
        _ => bail!("frustum item {} lacks ratio/orientation", input.index),
    };
    let prof = frustum_profile(input.dim, ratio, wide_top, resolution)?;
    let mut failures = Vec::new();
    let concavity_defect = profile_checks(&prof, th, &mut failures);
    let reduction = reduction_checks(&prof, th, &mut failures)?;
    let value = reduction.psi_closed_form;
    if value > 1.0 + th.violate {
        failures.push(format!("psi = {value} at ratio {ratio}"));
    }
    let n = input.dim as f64;
    let nv = prof.volume() * n;
    let (x, y) = (prof.t_hi * prof.area_hi() / nv, -prof.t_lo * prof.area_lo() / nv);
    Ok(ItemReport {
        index: input.index,
        directions: 1,
        min_slack: 1.0 - value,
        max_psi: value.max(psi(&x, &y, input.dim)),
        max_scc_value: n * (x + y),
        closure_residual: 0.0,
        ratio: Some(ratio),
        profile: Some(ProfileChecks {
            volume_rel: 0.0,
            centroid_rel: (prof.first_moment() / prof.volume()).abs() / prof.height(),
            mass_rel: 0.0,
            concavity_defect,
        }),
        reduction: Some(reduction),
        failures,
    })
}

/// Runs one item; construction errors become failures rather than aborts.
pub fn run_item(input: &ItemInput, resolution: usize, th: &Thresholds) -> ItemReport {
    let out = match input.generator {
        Generator::Frustum => frustum_item(input, resolution, th),
        _ => polytope_item(input, resolution, th),
    };
    out.unwrap_or_else(|e| failed_report(input, format!("error: {e:#}")))
}

fn failed_report(input: &ItemInput, why: String) -> ItemReport {
    ItemReport {
        index: input.index,
        directions: 0,
        min_slack: f64::NAN,
        max_psi: f64::NAN,
        max_scc_value: f64::NAN,
        closure_residual: f64::NAN,
        ratio: input.ratio,
        profile: None,
        reduction: None,
        failures: vec![why],
    }
}

/// Thread count from `CONEVOL_THREADS`, if set.
pub fn thread_cap() -> Result<Option<usize>> {
    match std::env::var("CONEVOL_THREADS") {
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => bail!("CONEVOL_THREADS must be a positive integer, got {s:?}"),
        },
        Err(_) => Ok(None),
    }
}

pub fn in_pool<R: Send>(f: impl FnOnce() -> R + Send) -> Result<R> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_cap()? {
        builder = builder.num_threads(n);
    }
    Ok(builder.build()?.install(f))
}

fn fold_max(it: impl Iterator<Item = f64>) -> f64 {
    it.fold(0.0, f64::max)
}

pub fn run_audit(config: &AuditConfig, th: &Thresholds, keep_items: bool) -> Result<AuditSummary> {
    config.validate()?;
    let results: Vec<(ItemInput, ItemReport)> = in_pool(|| {
        (0..config.count as u64)
            .into_par_iter()
            .map(|i| match make_input(config, i) {
                Ok(input) => {
                    let report = run_item(&input, config.resolution, th);
                    (input, report)
                }
                Err(e) => {
                    let input = ItemInput {
                        index: i,
                        generator: config.generator,
                        dim: config.dim,
                        body: None,
                        axis: None,
                        ratio: None,
                        wide_top: None,
                    };
                    let report = failed_report(&input, format!("generation failed: {e:#}"));
                    (input, report)
                }
            })
            .collect()
    })?;
    let reports: Vec<&ItemReport> = results.iter().map(|r| &r.1).collect();
    let (min_slack, min_slack_index) = reports
        .iter()
        .filter(|r| !r.min_slack.is_nan())
        .map(|r| (r.min_slack, r.index))
        .fold((f64::INFINITY, 0), |a, b| if b.0 < a.0 { b } else { a });
    let profiles = || reports.iter().filter_map(|r| r.profile.as_ref());
    let summary = AuditSummary {
        config: *config,
        bodies: reports.len(),
        reports: reports.iter().map(|r| r.directions).sum(),
        min_slack,
        min_slack_index,
        max_psi: reports.iter().map(|r| r.max_psi).filter(|v| !v.is_nan()).fold(f64::NEG_INFINITY, f64::max),
        max_scc_value: reports
            .iter()
            .map(|r| r.max_scc_value)
            .filter(|v| !v.is_nan())
            .fold(f64::NEG_INFINITY, f64::max),
        max_closure_residual: fold_max(reports.iter().map(|r| r.closure_residual).filter(|v| !v.is_nan())),
        max_concavity_defect: fold_max(profiles().map(|p| p.concavity_defect)),
        max_volume_rel: fold_max(profiles().map(|p| p.volume_rel)),
        max_centroid_rel: fold_max(profiles().map(|p| p.centroid_rel)),
        max_mass_rel: fold_max(profiles().map(|p| p.mass_rel)),
        max_balanced_centroid_rel: fold_max(reports.iter().filter_map(|r| r.reduction.as_ref()).map(|r| r.centroid_rel)),
        failures: results
            .iter()
            .filter(|(_, r)| !r.failures.is_empty())
            .map(|(input, report)| FailureRecord {
                config: *config,
                thresholds: *th,
                input: input.clone(),
                report: report.clone(),
            })
            .collect(),
        items: if keep_items { results.into_iter().map(|r| r.1).collect() } else { Vec::new() },
    };
    Ok(summary)
}

/// Recomputes the reports of saved failures.
pub fn replay(records: &[FailureRecord]) -> Vec<ItemReport> {
    records
        .iter()
        .map(|r| run_item(&r.input, r.config.resolution, &r.thresholds))
        .collect()
}
