//! The refined necessary condition
//! n(x + y) + (n + 1)^{n−1}|x − y|ⁿ ≤ 1, x = μ(u)/V, y = μ(−u)/V,
//! evaluated on polytopes with centroid at the origin, with detection of the
//! two equality cases.

use serde::Serialize;

use crate::error::{GeomError, Result};
use crate::measures::{cone_volume_measure, DiscreteMeasure, TOL_ANGLE};
use crate::polytope::Polytope;
use crate::scalar::Real;
use crate::symmetrization::profile;
use crate::truncated_cone::{psi, psi_excess};
use crate::vector::Vector;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    /// |1 − Ψ| below this counts as (numerical) equality.
    pub eq: f64,
    /// Ψ above 1 + this is a violation.
    pub violate: f64,
    /// Profile linearity threshold for the equality classifier.
    pub lin: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            eq: 1e-7,
            violate: 1e-7,
            lin: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Classification {
    Strict,
    PrismEquality,
    ConeEquality,
    Violated,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CheckOptions {
    pub tol: Tolerances,
    /// Profile resolution used by the equality classifier.
    pub resolution: usize,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            tol: Tolerances::default(),
            resolution: 256,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport<T> {
    pub direction: Vector<T>,
    pub x: T,
    pub y: T,
    pub psi: T,
    pub slack: T,
    pub scc_value: T,
    pub gap: T,
    pub classification: Classification,
    /// Set when Ψ is numerically 1 but the profile has neither equality shape.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Ψ − n(x + y) = (n + 1)^{n−1}|x − y|ⁿ, how much the refined condition adds
/// to the one-dimensional subspace concentration bound.
pub fn refinement_gap<T: Real>(report: &ConditionReport<T>) -> T {
    report.psi - report.scc_value
}

fn require_centered<T: Real>(p: &Polytope<T>) -> Result<()> {
    let off = p.centroid().norm();
    if off > T::tol(1e-9) * p.diameter() {
        return Err(GeomError::Precondition(format!(
            "centroid is {off} away from the origin (allowed {})",
            T::tol(1e-9) * p.diameter()
        )));
    }
    Ok(())
}

fn report_from_measure<T: Real>(
    p: &Polytope<T>,
    mu: &DiscreteMeasure<T>,
    u: &Vector<T>,
    opts: &CheckOptions,
) -> Result<ConditionReport<T>> {
    let n = p.dim();
    let v = p.volume();
    let x = mu.mass_at(u)? / v;
    let y = mu.mass_at(&-u)? / v;
    let value = psi(&x, &y, n);
    let slack = T::one() - value;
    let scc_value = T::from_usize(n).unwrap() * (x + y);
    let mut note = None;
    let classification = if slack < -T::lit(opts.tol.violate) {
        Classification::Violated
    } else if slack > T::lit(opts.tol.eq) {
        Classification::Strict
    } else {
        let c = classify_equality(p, u, opts)?;
        if c == Classification::Strict {
            note = Some("psi is numerically 1 but the section profile is neither constant nor conical".into());
        }
        c
    };
    Ok(ConditionReport {
        direction: u.clone(),
        x,
        y,
        psi: value,
        slack,
        scc_value,
        gap: psi_excess(&x, &y, n),
        classification,
        note,
    })
}

pub fn check_direction<T: Real>(p: &Polytope<T>, u: &Vector<T>, opts: &CheckOptions) -> Result<ConditionReport<T>> {
    require_centered(p)?;
    if u.dim() != p.dim() {
        return Err(GeomError::Input("direction dimension mismatch".into()));
    }
    u.check_unit()?;
    let mu = cone_volume_measure(p)?;
    report_from_measure(p, &mu, u, opts)
}

/// One unit normal per facet axis {±u}.
pub fn facet_axes<T: Real>(p: &Polytope<T>) -> Vec<Vector<T>> {
    let tol = T::tol(TOL_ANGLE);
    let mut axes: Vec<Vector<T>> = Vec::new();
    for f in p.facets() {
        let u = &f.normal;
        if !axes.iter().any(|a| a.distance(u) <= tol || a.distance(&-u) <= tol) {
            axes.push(u.clone());
        }
    }
    axes
}

/// Reports for the given directions, sorted by ascending slack.
pub fn check_directions<T: Real>(
    p: &Polytope<T>,
    directions: &[Vector<T>],
    opts: &CheckOptions,
) -> Result<Vec<ConditionReport<T>>> {
    require_centered(p)?;
    let mu = cone_volume_measure(p)?;
    let mut out = Vec::with_capacity(directions.len());
    for u in directions {
        if u.dim() != p.dim() {
            return Err(GeomError::Input("direction dimension mismatch".into()));
        }
        u.check_unit()?;
        out.push(report_from_measure(p, &mu, u, opts)?);
    }
    out.sort_by(|a, b| a.slack.partial_cmp(&b.slack).unwrap_or(std::cmp::Ordering::Equal));
    Ok(out)
}

pub fn check_all_facets<T: Real>(p: &Polytope<T>, opts: &CheckOptions) -> Result<Vec<ConditionReport<T>>> {
    check_directions(p, &facet_axes(p), opts)
}

/// Shape of the section profile along u: constant radius (prism), radius
/// affine and vanishing at one end (cone), or neither.
pub fn classify_equality<T: Real>(p: &Polytope<T>, u: &Vector<T>, opts: &CheckOptions) -> Result<Classification> {
    let prof = profile(p, u, opts.resolution)?;
    let defect = prof.concavity_defect();
    let lin = T::lit(opts.tol.lin);
    if defect.linearity_defect > lin {
        return Ok(Classification::Strict);
    }
    let rows = prof.rows();
    let r0 = rows[0].2;
    let r1 = rows[rows.len() - 1].2;
    let r_max = rows.iter().fold(T::zero(), |m, r| m.max(r.2));
    let small = lin * r_max;
    if (r0 - r1).abs() <= small {
        return Ok(Classification::PrismEquality);
    }
    if (r0 <= small) != (r1 <= small) {
        return Ok(Classification::ConeEquality);
    }
    Ok(Classification::Strict)
}
