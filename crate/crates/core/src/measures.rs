//! Discrete measures on the sphere attached to a polytope: the surface area
//! measure, the L_p surface area measure and the cone-volume measure, plus
//! the Minkowski closure and subspace concentration checks.

use serde::Serialize;

use crate::error::{GeomError, Result};
use crate::polytope::Polytope;
use crate::scalar::Real;
use crate::vector::{OrthoBasis, Vector};

/// Angular tolerance (radians) for atom identity and subspace membership.
pub const TOL_ANGLE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Atom<T> {
    pub direction: Vector<T>,
    pub mass: T,
}

/// Finite sum of point masses on S^{n−1}.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscreteMeasure<T> {
    pub dim: usize,
    pub atoms: Vec<Atom<T>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConcentrationReport<T> {
    pub ratio: T,
    pub bound: T,
    pub ok: bool,
}

impl<T: Real> DiscreteMeasure<T> {
    /// Builds a measure, rejecting non-positive masses and duplicate directions.
    pub fn new(dim: usize, atoms: Vec<Atom<T>>) -> Result<Self> {
        for (i, a) in atoms.iter().enumerate() {
            if a.direction.dim() != dim {
                return Err(GeomError::Input(format!("atom {i} has the wrong dimension")));
            }
            a.direction.check_unit()?;
            if !(a.mass > T::zero()) {
                return Err(GeomError::Input(format!("atom {i} has non-positive mass {}", a.mass)));
            }
            if atoms[..i]
                .iter()
                .any(|b| b.direction.distance(&a.direction) <= T::tol(TOL_ANGLE))
            {
                return Err(GeomError::Input(format!("atom {i} duplicates an earlier direction")));
            }
        }
        Ok(DiscreteMeasure { dim, atoms })
    }

    pub fn total(&self) -> T {
        self.atoms.iter().fold(T::zero(), |acc, a| acc + a.mass)
    }

    /// `Σ mass·direction`.
    pub fn resultant(&self) -> Vector<T> {
        self.atoms
            .iter()
            .fold(Vector::zeros(self.dim), |acc, a| acc.axpy(a.mass, &a.direction))
    }

    /// ‖Σ mass·direction‖ / total mass; zero for a closed polytope.
    pub fn closure_residual(&self) -> T {
        self.resultant().norm() / self.total()
    }

    /// μ({u}): the mass of the atom at `u`, or zero if there is none.
    pub fn mass_at(&self, u: &Vector<T>) -> Result<T> {
        u.check_unit()?;
        let mut hits = self
            .atoms
            .iter()
            .filter(|a| a.direction.distance(u) <= T::tol(TOL_ANGLE));
        match (hits.next(), hits.next()) {
            (None, _) => Ok(T::zero()),
            (Some(a), None) => Ok(a.mass),
            (Some(_), Some(_)) => Err(GeomError::Invariant(
                "two atoms lie within the angular tolerance of the query direction".into(),
            )),
        }
    }

    /// Ratio μ(ξ ∩ S^{n−1})/μ(S^{n−1}) against the bound dim ξ / n.
    pub fn subspace_concentration(&self, basis: &[Vector<T>]) -> Result<ConcentrationReport<T>> {
        let k = basis.len();
        if k == 0 || k >= self.dim {
            return Err(GeomError::Input(format!(
                "subspace dimension must be in 1..{}, got {k}",
                self.dim
            )));
        }
        let mut ortho = OrthoBasis::new();
        for b in basis {
            if b.dim() != self.dim {
                return Err(GeomError::Input("basis vector has the wrong dimension".into()));
            }
            let scale = b.norm();
            if !ortho.try_push(b, T::tol(1e-10) * (T::one() + scale)) {
                return Err(GeomError::Input("subspace basis is linearly dependent".into()));
            }
        }
        let inside = self
            .atoms
            .iter()
            .filter(|a| ortho.residual(&a.direction).norm() <= T::tol(TOL_ANGLE))
            .fold(T::zero(), |acc, a| acc + a.mass);
        let ratio = inside / self.total();
        let bound = T::from_usize(k).unwrap() / T::from_usize(self.dim).unwrap();
        Ok(ConcentrationReport {
            ratio,
            bound,
            ok: ratio <= bound + T::tol(1e-9),
        })
    }
}

fn facet_areas<T: Real>(p: &Polytope<T>) -> Vec<T> {
    (0..p.facets().len()).map(|fi| facet_area(p, fi)).collect()
}

/// (n−1)-volume of facet `fi`.
pub fn facet_area<T: Real>(p: &Polytope<T>, fi: usize) -> T {
    let f = &p.facets()[fi];
    let members = &f.vertex_indices;
    crate::polytope::face_measure(p.vertices(), p.labels(), members, p.dim() - 1, p.diameter()).0
}

/// μ_P: one atom per facet normal, mass = facet area.
pub fn surface_area_measure<T: Real>(p: &Polytope<T>) -> DiscreteMeasure<T> {
    let atoms = p
        .facets()
        .iter()
        .zip(facet_areas(p))
        .map(|(f, area)| Atom {
            direction: f.normal.clone(),
            mass: area,
        })
        .collect();
    DiscreteMeasure { dim: p.dim(), atoms }
}

/// μ_(P,p): facet mass h^{1−p}·area. Needs the origin inside unless p = 1.
pub fn lp_surface_measure<T: Real>(p: &Polytope<T>, exponent: T) -> Result<DiscreteMeasure<T>> {
    if exponent != T::one() && !p.origin_interior() {
        return Err(GeomError::Domain(
            "origin is not interior to the polytope; L_p measure undefined for p ≠ 1".into(),
        ));
    }
    let atoms = p
        .facets()
        .iter()
        .zip(facet_areas(p))
        .map(|(f, area)| Atom {
            direction: f.normal.clone(),
            mass: if exponent == T::one() {
                area
            } else {
                f.offset.powf(T::one() - exponent) * area
            },
        })
        .collect();
    Ok(DiscreteMeasure { dim: p.dim(), atoms })
}

/// Cone-volume measure: facet mass h·area/n, the volume of the cone from
/// the origin over the facet.
pub fn cone_volume_measure<T: Real>(p: &Polytope<T>) -> Result<DiscreteMeasure<T>> {
    if !p.origin_interior() {
        return Err(GeomError::Domain(
            "origin is not interior to the polytope; cone-volume measure undefined".into(),
        ));
    }
    let n = T::from_usize(p.dim()).unwrap();
    let atoms = p
        .facets()
        .iter()
        .zip(facet_areas(p))
        .map(|(f, area)| Atom {
            direction: f.normal.clone(),
            mass: f.offset * area / n,
        })
        .collect();
    Ok(DiscreteMeasure { dim: p.dim(), atoms })
}
