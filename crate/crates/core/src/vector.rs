//! Points and directions in ℝⁿ, plus the small dense linear algebra the
//! geometry needs (n ≤ 6 in practice).

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::scalar::Real;

/// Tolerance on ‖u‖ − 1 for arguments that must be unit directions.
pub const UNIT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Vector<T>(pub Vec<T>);

impl<T: Real> Vector<T> {
    pub fn new(coords: Vec<T>) -> Self {
        Vector(coords)
    }

    pub fn zeros(dim: usize) -> Self {
        Vector(vec![T::zero(); dim])
    }

    /// The `i`-th standard basis vector.
    pub fn axis(dim: usize, i: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.0[i] = T::one();
        v
    }

    pub fn from_f64(coords: &[f64]) -> Self {
        Vector(coords.iter().map(|&c| T::lit(c)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[T] {
        &self.0
    }

    pub fn dot(&self, other: &Self) -> T {
        debug_assert_eq!(self.dim(), other.dim());
        self.0
            .iter()
            .zip(&other.0)
            .fold(T::zero(), |acc, (&a, &b)| acc + a * b)
    }

    pub fn norm_squared(&self) -> T {
        self.dot(self)
    }

    pub fn norm(&self) -> T {
        self.norm_squared().sqrt()
    }

    pub fn scale(&self, k: T) -> Self {
        Vector(self.0.iter().map(|&a| a * k).collect())
    }

    /// `self + k·other`
    pub fn axpy(&self, k: T, other: &Self) -> Self {
        Vector(self.0.iter().zip(&other.0).map(|(&a, &b)| a + k * b).collect())
    }

    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm();
        if n > T::zero() && n.is_finite() {
            Some(self.scale(T::one() / n))
        } else {
            None
        }
    }

    pub fn distance(&self, other: &Self) -> T {
        (self - other).norm()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    /// Errors unless ‖self‖ = 1 within [`UNIT_TOL`].
    pub fn check_unit(&self) -> Result<()> {
        let n = self.norm();
        if (n - T::one()).abs() <= T::tol(UNIT_TOL) {
            Ok(())
        } else {
            Err(GeomError::Input(format!(
                "direction must be a unit vector, got norm {}",
                n
            )))
        }
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(|c| c.to_f64_lossy()).collect()
    }
}

impl<T> Index<usize> for Vector<T> {
    type Output = T;
    fn index(&self, i: usize) -> &T {
        &self.0[i]
    }
}

impl<T> IndexMut<usize> for Vector<T> {
    fn index_mut(&mut self, i: usize) -> &mut T {
        &mut self.0[i]
    }
}

impl<'a, T: Real> Add<&'a Vector<T>> for &'a Vector<T> {
    type Output = Vector<T>;
    fn add(self, rhs: &Vector<T>) -> Vector<T> {
        Vector(self.0.iter().zip(&rhs.0).map(|(&a, &b)| a + b).collect())
    }
}

impl<'a, T: Real> Sub<&'a Vector<T>> for &'a Vector<T> {
    type Output = Vector<T>;
    fn sub(self, rhs: &Vector<T>) -> Vector<T> {
        Vector(self.0.iter().zip(&rhs.0).map(|(&a, &b)| a - b).collect())
    }
}

impl<T: Real> Mul<T> for &Vector<T> {
    type Output = Vector<T>;
    fn mul(self, k: T) -> Vector<T> {
        self.scale(k)
    }
}

impl<T: Real> Neg for &Vector<T> {
    type Output = Vector<T>;
    fn neg(self) -> Vector<T> {
        Vector(self.0.iter().map(|&a| -a).collect())
    }
}

/// Arithmetic mean of a nonempty set of points.
pub fn mean<T: Real>(points: &[&Vector<T>]) -> Vector<T> {
    let dim = points[0].dim();
    let mut acc = Vector::zeros(dim);
    for p in points {
        for (a, &b) in acc.0.iter_mut().zip(&p.0) {
            *a = *a + b;
        }
    }
    acc.scale(T::one() / T::from_usize(points.len()).unwrap())
}

/// Incrementally built orthonormal basis (modified Gram–Schmidt).
#[derive(Debug, Clone)]
pub struct OrthoBasis<T> {
    pub vectors: Vec<Vector<T>>,
}

impl<T: Real> OrthoBasis<T> {
    pub fn new() -> Self {
        OrthoBasis { vectors: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.vectors.len()
    }

    /// Component of `v` orthogonal to the current span.
    pub fn residual(&self, v: &Vector<T>) -> Vector<T> {
        let mut r = v.clone();
        // two passes keep the residual orthogonal to working precision
        for _ in 0..2 {
            for b in &self.vectors {
                let c = r.dot(b);
                r = r.axpy(-c, b);
            }
        }
        r
    }

    /// Adds `v` if its residual exceeds `tol`; returns whether it was added.
    pub fn try_push(&mut self, v: &Vector<T>, tol: T) -> bool {
        let r = self.residual(v);
        let n = r.norm();
        if n > tol {
            self.vectors.push(r.scale(T::one() / n));
            true
        } else {
            false
        }
    }

    /// Orthonormal basis of the orthogonal complement inside ℝ^dim.
    pub fn complement(&self, dim: usize) -> Vec<Vector<T>> {
        let mut full = self.clone();
        let mut out = Vec::new();
        // standard axes in order of decreasing residual keep the result well conditioned
        while full.rank() < dim {
            let best = (0..dim)
                .map(|i| {
                    let r = full.residual(&Vector::axis(dim, i));
                    (r.norm(), i)
                })
                .max_by(|a, b| a.0.partial_cmp(&b.0).unwrap())
                .unwrap();
            let before = full.rank();
            full.try_push(&Vector::axis(dim, best.1), T::zero());
            if full.rank() == before {
                break;
            }
            out.push(full.vectors.last().unwrap().clone());
        }
        out
    }
}

impl<T: Real> Default for OrthoBasis<T> {
    fn default() -> Self {
        Self::new()
    }
}

/// Affine hull of a point set: an origin point and an orthonormal basis of
/// the directions, built greedily from the points furthest from the span.
#[derive(Debug, Clone)]
pub struct AffineHull<T> {
    pub origin: Vector<T>,
    pub basis: OrthoBasis<T>,
}

impl<T: Real> AffineHull<T> {
    pub fn of(points: &[&Vector<T>], tol: T) -> Self {
        let origin = points[0].clone();
        let mut basis = OrthoBasis::new();
        let dim = origin.dim();
        loop {
            if basis.rank() == dim {
                break;
            }
            let mut best: Option<(T, usize)> = None;
            for (i, p) in points.iter().enumerate() {
                let r = basis.residual(&(*p - &origin)).norm();
                if best.map_or(true, |(b, _)| r > b) {
                    best = Some((r, i));
                }
            }
            match best {
                Some((r, i)) if r > tol => {
                    basis.try_push(&(points[i] - &origin), T::zero());
                }
                _ => break,
            }
        }
        AffineHull { origin, basis }
    }

    pub fn rank(&self) -> usize {
        self.basis.rank()
    }
}

/// Solves the dense square system `a · x = b` by Gaussian elimination with
/// partial pivoting. Returns `None` when a pivot falls below `pivot_tol`.
pub fn solve<T: Real>(mut a: Vec<Vec<T>>, mut b: Vec<T>, pivot_tol: T) -> Option<Vec<T>> {
    let n = b.len();
    for col in 0..n {
        let (piv, max) = (col..n)
            .map(|r| (r, a[r][col].abs()))
            .max_by(|x, y| x.1.partial_cmp(&y.1).unwrap())?;
        if !(max > pivot_tol) {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            if f == T::zero() {
                continue;
            }
            for c in col..n {
                let v = a[col][c];
                a[r][c] = a[r][c] - f * v;
            }
            b[r] = b[r] - f * b[col];
        }
    }
    let mut x = vec![T::zero(); n];
    for r in (0..n).rev() {
        let mut s = b[r];
        for c in r + 1..n {
            s = s - a[r][c] * x[c];
        }
        x[r] = s / a[r][r];
    }
    Some(x)
}

/// Iterator over all `k`-subsets of `0..n` in lexicographic order.
pub struct Combinations {
    n: usize,
    idx: Vec<usize>,
    done: bool,
}

impl Combinations {
    pub fn new(n: usize, k: usize) -> Self {
        Combinations {
            n,
            idx: (0..k).collect(),
            done: k > n,
        }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.idx.clone();
        let k = self.idx.len();
        let mut i = k;
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.idx[i] < self.n - k + i {
                self.idx[i] += 1;
                for j in i + 1..k {
                    self.idx[j] = self.idx[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn combinations_count() {
        assert_eq!(Combinations::new(5, 2).count(), 10);
        assert_eq!(Combinations::new(6, 6).count(), 1);
        assert_eq!(Combinations::new(3, 4).count(), 0);
        assert_eq!(Combinations::new(4, 0).count(), 1);
    }

    #[test]
    fn solve_small_system() {
        let a = vec![vec![2.0, 1.0], vec![1.0, 3.0]];
        let x: Vec<f64> = solve(a, vec![3.0, 5.0], 1e-12).unwrap();
        assert!((x[0] - 0.8).abs() < 1e-14 && (x[1] - 1.4).abs() < 1e-14);
        assert!(solve(vec![vec![1.0, 2.0], vec![2.0, 4.0]], vec![1.0, 1.0], 1e-12).is_none());
    }

    #[test]
    fn complement_is_orthonormal() {
        let mut b = OrthoBasis::<f64>::new();
        b.try_push(&Vector::new(vec![1.0, 1.0, 1.0]), 1e-12);
        let c = b.complement(3);
        assert_eq!(c.len(), 2);
        for v in &c {
            assert!((v.norm() - 1.0).abs() < 1e-14);
            assert!(v.dot(&b.vectors[0]).abs() < 1e-14);
        }
        assert!(c[0].dot(&c[1]).abs() < 1e-14);
    }

    #[test]
    fn affine_rank_of_coplanar_points() {
        let pts: Vec<Vector<f64>> = [[0.0, 0.0, 1.0], [1.0, 0.0, 1.0], [0.0, 1.0, 1.0], [1.0, 1.0, 1.0]]
            .iter()
            .map(|c| Vector::from_f64(c))
            .collect();
        let refs: Vec<_> = pts.iter().collect();
        assert_eq!(AffineHull::of(&refs, 1e-12).rank(), 2);
    }
}
