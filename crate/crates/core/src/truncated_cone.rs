//! Closed forms for right truncated cones parameterized by the ratio t ≥ 1
//! of their base radii.
//!
//! Everything is written in s = 1/t against small polynomials whose common
//! factors of (t − 1) have been divided out exactly, so the formulas are free
//! of cancellation near t = 1 and of overflow for large t, and run unchanged
//! on exact rationals.

use serde::Serialize;

use crate::error::{GeomError, Result};
use crate::scalar::{powi, Field};

/// Radius ratio of a truncated cone; `Infinite` is the right circular cone.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum BaseRatio<T> {
    Finite(T),
    Infinite,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TruncatedConeParams<T> {
    pub dim: usize,
    pub ratio: BaseRatio<T>,
}

impl<T: Field> TruncatedConeParams<T> {
    pub fn new(dim: usize, ratio: BaseRatio<T>) -> Result<Self> {
        if dim < 2 {
            return Err(GeomError::Input(format!("dimension must be at least 2, got {dim}")));
        }
        if let BaseRatio::Finite(t) = &ratio {
            if !(*t >= T::one()) {
                return Err(GeomError::Input(format!("ratio must be at least 1, got {t:?}")));
            }
        }
        Ok(TruncatedConeParams { dim, ratio })
    }

    pub fn finite(dim: usize, t: T) -> Result<Self> {
        Self::new(dim, BaseRatio::Finite(t))
    }

    pub fn cone(dim: usize) -> Result<Self> {
        Self::new(dim, BaseRatio::Infinite)
    }

    /// s = 1/t, zero for the cone.
    fn s(&self) -> T {
        match &self.ratio {
            BaseRatio::Finite(t) => T::one() / t.clone(),
            BaseRatio::Infinite => T::zero(),
        }
    }
}

fn horner<T: Field>(coeffs: &[i64], s: &T) -> T {
    coeffs
        .iter()
        .rev()
        .fold(T::zero(), |acc, &c| acc * s.clone() + T::from_int(c))
}

fn int<T: Field>(v: usize) -> T {
    T::from_int(v as i64)
}

/// Coefficients (ascending) of p / (t − 1); panics if the division is inexact.
fn divide_by_t_minus_1(p: &[i64]) -> Vec<i64> {
    let d = p.len() - 1;
    let mut q = vec![0i64; d];
    let mut carry = 0i64;
    for k in (1..=d).rev() {
        carry += p[k];
        q[k - 1] = carry;
    }
    assert_eq!(carry + p[0], 0, "polynomial not divisible by t - 1");
    q
}

/// w(t) = ((Σ_{k<n} tᵏ)² − n² t^{n−1}) / (t − 1)², coefficients ascending.
fn w_coeffs(n: usize) -> Vec<i64> {
    let mut p = vec![0i64; 2 * n - 1];
    for i in 0..n {
        for j in 0..n {
            p[i + j] += 1;
        }
    }
    p[n - 1] -= (n * n) as i64;
    divide_by_t_minus_1(&divide_by_t_minus_1(&p))
}

/// q(t) = (t^{2n} − n t^{n+1} + n t^{n−1} − 1) / (t − 1)³, coefficients ascending.
fn q_coeffs(n: usize) -> Vec<i64> {
    let mut p = vec![0i64; 2 * n + 1];
    p[2 * n] += 1;
    p[n + 1] -= n as i64;
    p[n - 1] += n as i64;
    p[0] -= 1;
    divide_by_t_minus_1(&divide_by_t_minus_1(&divide_by_t_minus_1(&p)))
}

fn reversed(mut c: Vec<i64>) -> Vec<i64> {
    c.reverse();
    c
}

/// Σ_{k<n} sᵏ.
fn geometric<T: Field>(n: usize, s: &T) -> T {
    horner(&vec![1; n], s)
}

/// (x, y) = (μ(u)/V, μ(−u)/V) of the centered truncated cone, x on the
/// larger base. Exact at t = 1 and t = ∞.
pub fn xy_of_ratio<T: Field>(params: &TruncatedConeParams<T>) -> (T, T) {
    let n = params.dim;
    let s = params.s();
    let big_s = geometric(n, &s);
    let p: Vec<i64> = (1..=n as i64).collect();
    let r: Vec<i64> = (1..=n as i64).rev().collect();
    let den = int::<T>(n + 1) * big_s.clone() * big_s;
    let x = horner(&p, &s) / den.clone();
    let y = powi(&s, n - 1) * horner(&r, &s) / den;
    (x, y)
}

/// (V/ω_{n−1}, c·u) for the frustum with radius r(h) = h on [1, t].
pub fn volume_and_centroid<T: Field>(params: &TruncatedConeParams<T>) -> Result<(T, T)> {
    let n = params.dim;
    let t = match &params.ratio {
        BaseRatio::Finite(t) if *t > T::one() => t.clone(),
        _ => {
            return Err(GeomError::Input(
                "volume and centroid need a finite ratio t > 1".into(),
            ))
        }
    };
    let tn1 = powi(&t, n) - T::one();
    let volume = tn1.clone() / int(n);
    let centroid = int::<T>(n) * geometric(n + 1, &t) / (int::<T>(n + 1) * geometric(n, &t));
    Ok((volume, centroid))
}

/// Ψ(x, y) = n(x + y) + (n + 1)^{n−1} |x − y|ⁿ.
pub fn psi<T: Field>(x: &T, y: &T, n: usize) -> T {
    let c = powi(&int::<T>(n + 1), n - 1);
    int::<T>(n) * (x.clone() + y.clone()) + c * powi(&(x.clone() - y.clone()).abs_val(), n)
}

/// The extra term (n + 1)^{n−1} |x − y|ⁿ.
pub fn psi_excess<T: Field>(x: &T, y: &T, n: usize) -> T {
    powi(&int::<T>(n + 1), n - 1) * powi(&(x.clone() - y.clone()).abs_val(), n)
}

/// (∂Ψ/∂x, ∂Ψ/∂y).
pub fn psi_gradient<T: Field>(x: &T, y: &T, n: usize) -> (T, T) {
    let d = x.clone() - y.clone();
    let mut m = int::<T>(n) * powi(&int::<T>(n + 1), n - 1) * powi(&d.abs_val(), n - 1);
    if d < T::zero() {
        m = -m;
    }
    (int::<T>(n) + m.clone(), int::<T>(n) - m)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RangeReport<T> {
    pub x: T,
    pub y: T,
    /// 1/(n+1) − x
    pub x_bound_slack: T,
    /// 1/(n+1) − y
    pub y_bound_slack: T,
    /// 1/n − (x + y)
    pub sum_bound_slack: T,
    pub x_ok: bool,
    pub y_ok: bool,
    pub sum_ok: bool,
}

/// The three range bounds at (n, t); a bound holds when its slack ≥ −tol.
pub fn range_check<T: Field>(params: &TruncatedConeParams<T>, tol: &T) -> RangeReport<T> {
    let n = params.dim;
    let (x, y) = xy_of_ratio(params);
    let inv = T::one() / int::<T>(n + 1);
    let x_bound_slack = inv.clone() - x.clone();
    let y_bound_slack = inv - y.clone();
    let sum_bound_slack = T::one() / int::<T>(n) - (x.clone() + y.clone());
    let floor = -tol.clone();
    RangeReport {
        x_ok: x_bound_slack >= floor,
        y_ok: y_bound_slack >= floor,
        sum_ok: sum_bound_slack >= floor,
        x,
        y,
        x_bound_slack,
        y_bound_slack,
        sum_bound_slack,
    }
}

fn require_open_ray<T: Field>(n: usize, ratio: &BaseRatio<T>) -> Result<T> {
    if n < 2 {
        return Err(GeomError::Input(format!("dimension must be at least 2, got {n}")));
    }
    match ratio {
        BaseRatio::Finite(t) if *t > T::one() => Ok(T::one() / t.clone()),
        BaseRatio::Finite(t) => Err(GeomError::Input(format!("ratio must exceed 1, got {t:?}"))),
        BaseRatio::Infinite => Ok(T::zero()),
    }
}

/// 1 − s = (t − 1)/t, computed without cancellation.
fn one_minus_s<T: Field>(ratio: &BaseRatio<T>) -> T {
    match ratio {
        BaseRatio::Finite(t) => (t.clone() - T::one()) / t.clone(),
        BaseRatio::Infinite => T::one(),
    }
}

/// F(t)/G(t) with F = (tⁿ−1)^{2n} − n²t^{n−1}(t−1)²(tⁿ−1)^{2n−2} and
/// G = (t^{2n} − nt^{n+1} + nt^{n−1} − 1)ⁿ. Identically 1 for n = 2; 1 at t = ∞.
pub fn key_ratio<T: Field>(n: usize, ratio: &BaseRatio<T>) -> Result<T> {
    let s = require_open_ray(n, ratio)?;
    let w = horner(&reversed(w_coeffs(n)), &s);
    let q = horner(&reversed(q_coeffs(n)), &s);
    let big_s = geometric(n, &s);
    // F/G = (1−s)^{2−n} · S^{2n−2} · w / qⁿ
    let num = powi(&big_s, 2 * n - 2) * w;
    let den = powi(&q, n) * powi(&one_minus_s(ratio), n - 2);
    Ok(num / den)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AbForm<T> {
    pub a: T,
    pub b: T,
    /// nA + (1 − B)ⁿ
    pub lhs: T,
}

/// A = n t^{n−1}(t−1)²/(tⁿ−1)² and B = 1 − (t^{2n} − nt^{n+1} + nt^{n−1} − 1)/(tⁿ−1)²,
/// With (x, y) from [`xy_of_ratio`], nA + (1 − B)ⁿ − 1 = (n + 1)(Ψ(x, y) − 1),
/// so the two inequalities are equivalent.
pub fn ab_form<T: Field>(n: usize, ratio: &BaseRatio<T>) -> Result<AbForm<T>> {
    let s = require_open_ray(n, ratio)?;
    let big_s = geometric(n, &s);
    let s2 = big_s.clone() * big_s;
    let a = int::<T>(n) * powi(&s, n - 1) / s2.clone();
    let q = horner(&reversed(q_coeffs(n)), &s);
    let one_minus_b = one_minus_s(ratio) * q / s2;
    let lhs = int::<T>(n) * a.clone() + powi(&one_minus_b, n);
    Ok(AbForm {
        a,
        b: T::one() - one_minus_b,
        lhs,
    })
}
