//! Canonical bodies and the seeded random generators used by the audit.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};

use crate::error::Result;
use crate::polytope::Polytope;
use crate::scalar::Real;
use crate::vector::Vector;

/// Cube `[−h, h]ⁿ`.
pub fn cube<T: Real>(dim: usize, half: T) -> Polytope<T> {
    let mut hs = Vec::with_capacity(2 * dim);
    for i in 0..dim {
        hs.push((Vector::axis(dim, i), half));
        hs.push((-&Vector::axis(dim, i), half));
    }
    Polytope::from_halfspaces(dim, &hs).expect("cube is a valid polytope")
}

/// Vertices of a regular simplex with centroid at the origin and unit
/// circumradius: the standard basis of ℝⁿ⁺¹ centered and written in an
/// orthonormal frame of the hyperplane Σxᵢ = 0.
pub fn regular_simplex_vertices<T: Real>(dim: usize) -> Vec<Vector<T>> {
    let m = dim + 1;
    let inv = T::one() / T::from_usize(m).unwrap();
    let lifted: Vec<Vector<T>> = (0..m)
        .map(|i| {
            let mut v = Vector::axis(m, i);
            for c in v.0.iter_mut() {
                *c = *c - inv;
            }
            v
        })
        .collect();
    let mut ones = crate::vector::OrthoBasis::new();
    ones.try_push(&Vector::new(vec![T::one(); m]), T::zero());
    let frame = ones.complement(m);
    let verts: Vec<Vector<T>> = lifted
        .iter()
        .map(|v| Vector::new(frame.iter().map(|f| f.dot(v)).collect()))
        .collect();
    let r = verts[0].norm();
    verts.into_iter().map(|v| v.scale(T::one() / r)).collect()
}

pub fn regular_simplex<T: Real>(dim: usize) -> Polytope<T> {
    Polytope::from_vertices(dim, &regular_simplex_vertices(dim)).expect("simplex is valid")
}

/// `conv{B ∪ (B + shift)}` for a base `B` given by points in the
/// hyperplane `x_n = 0` (last coordinate ignored and set to zero).
pub fn prism<T: Real>(base: &[Vector<T>], shift: &Vector<T>) -> Result<Polytope<T>> {
    let dim = shift.dim();
    let mut pts: Vec<Vector<T>> = base.iter().map(|b| flatten(b, dim)).collect();
    let tops: Vec<Vector<T>> = pts.iter().map(|b| b + shift).collect();
    pts.extend(tops);
    Polytope::from_vertices(dim, &pts)
}

/// `conv{B ∪ {apex}}` for a base in the hyperplane `x_n = 0`.
pub fn cone<T: Real>(base: &[Vector<T>], apex: &Vector<T>) -> Result<Polytope<T>> {
    let dim = apex.dim();
    let mut pts: Vec<Vector<T>> = base.iter().map(|b| flatten(b, dim)).collect();
    pts.push(apex.clone());
    Polytope::from_vertices(dim, &pts)
}

fn flatten<T: Real>(b: &Vector<T>, dim: usize) -> Vector<T> {
    let mut v: Vec<T> = b.coords().iter().copied().take(dim - 1).collect();
    v.resize(dim, T::zero());
    Vector::new(v)
}

/// Vertices of the cube `[−1, 1]^k`.
pub fn cube_vertices<T: Real>(k: usize) -> Vec<Vector<T>> {
    (0..1usize << k)
        .map(|m| {
            Vector::new(
                (0..k)
                    .map(|i| if m >> i & 1 == 0 { -T::one() } else { T::one() })
                    .collect(),
            )
        })
        .collect()
}

fn normal_point<T: Real, R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vector<T> {
    Vector::new(
        (0..dim)
            .map(|_| T::lit(StandardNormal.sample(rng)))
            .collect(),
    )
}

fn jitter<T: Real, R: Rng + ?Sized>(rng: &mut R, v: &Vector<T>, amplitude: f64) -> Vector<T> {
    if amplitude <= 0.0 {
        return v.clone();
    }
    let noise = Uniform::new_inclusive(-amplitude, amplitude);
    Vector::new(v.coords().iter().map(|&c| c + T::lit(noise.sample(rng))).collect())
}

/// Hull of `4n` standard-normal points; resamples on (improbable) degeneracy.
pub fn random_hull<T: Real, R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Polytope<T> {
    loop {
        let pts: Vec<Vector<T>> = (0..4 * dim).map(|_| normal_point(rng, dim)).collect();
        if let Ok(p) = Polytope::from_vertices(dim, &pts) {
            return p;
        }
    }
}

/// Right prism over the cube `[−1,1]^{n−1}` with height 2 and the given
/// vertexwise uniform noise.
pub fn perturbed_prism<T: Real, R: Rng + ?Sized>(rng: &mut R, dim: usize, amplitude: f64) -> Polytope<T> {
    let base = cube_vertices::<T>(dim - 1);
    loop {
        let mut pts = Vec::with_capacity(2 * base.len());
        for b in &base {
            for h in [-T::one(), T::one()] {
                let mut v = b.0.clone();
                v.push(h);
                pts.push(jitter(rng, &Vector::new(v), amplitude));
            }
        }
        if let Ok(p) = Polytope::from_vertices(dim, &pts) {
            return p;
        }
    }
}

/// Pyramid over the cube `[−1,1]^{n−1}` at height −1 with apex at height 1,
/// with vertexwise uniform noise.
pub fn perturbed_cone<T: Real, R: Rng + ?Sized>(rng: &mut R, dim: usize, amplitude: f64) -> Polytope<T> {
    let base = cube_vertices::<T>(dim - 1);
    loop {
        let mut pts = Vec::with_capacity(base.len() + 1);
        for b in &base {
            let mut v = b.0.clone();
            v.push(-T::one());
            pts.push(jitter(rng, &Vector::new(v), amplitude));
        }
        let mut apex = vec![T::zero(); dim];
        apex[dim - 1] = T::one();
        pts.push(jitter(rng, &Vector::new(apex), amplitude));
        if let Ok(p) = Polytope::from_vertices(dim, &pts) {
            return p;
        }
    }
}
