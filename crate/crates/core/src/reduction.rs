//! Reduction of a symmetrized body to a truncated cone.
//!
//! The disks at the two ends of a profile are enlarged into the frustums K₀
//! (bottom kept) and K₁ (top kept) of the same volume. The family K_s moves
//! the top radius linearly from K₀ to K₁ at constant volume. The member with
//! centroid at the origin is the comparison body.

use serde::Serialize;

use crate::error::{GeomError, Result};
use crate::scalar::Real;
use crate::symmetrization::{radius_of_area, unit_ball_volume, SliceProfile};
use crate::truncated_cone::{psi, xy_of_ratio, BaseRatio, TruncatedConeParams};

pub const MAX_BISECTIONS: usize = 200;
pub const BISECTION_REL_TOL: f64 = 1e-13;
pub const CENTROID_REL_TOL: f64 = 1e-9;

/// Right truncated cone between two heights along the axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrustumSpec<T> {
    pub dim: usize,
    pub h_lo: T,
    pub h_hi: T,
    pub r_lo: T,
    pub r_hi: T,
}

impl<T: Real> FrustumSpec<T> {
    pub fn new(dim: usize, h_lo: T, h_hi: T, r_lo: T, r_hi: T) -> Result<Self> {
        if dim < 2 {
            return Err(GeomError::Input(format!("dimension must be at least 2, got {dim}")));
        }
        if !(h_lo < h_hi) {
            return Err(GeomError::Input("frustum heights must satisfy h_lo < h_hi".into()));
        }
        if r_lo < T::zero() || r_hi < T::zero() || (r_lo == T::zero() && r_hi == T::zero()) {
            return Err(GeomError::Input("frustum radii must be nonnegative and not both zero".into()));
        }
        Ok(FrustumSpec {
            dim,
            h_lo,
            h_hi,
            r_lo,
            r_hi,
        })
    }

    pub fn height(&self) -> T {
        self.h_hi - self.h_lo
    }

    /// Area of the slice at the top (`true`) or bottom end.
    pub fn end_area(&self, top: bool) -> T {
        let r = if top { self.r_hi } else { self.r_lo };
        omega::<T>(self.dim) * r.powi(self.dim as i32 - 1)
    }
}

fn omega<T: Real>(dim: usize) -> T {
    unit_ball_volume(dim - 1).expect("dim >= 2")
}

/// Σ_{j=0}^{m} aʲ b^{m−j} and Σ (j+1) aʲ b^{m−j}.
fn radius_sums<T: Real>(a: T, b: T, m: usize) -> (T, T) {
    let mut plain = T::zero();
    let mut weighted = T::zero();
    for j in 0..=m {
        let term = a.powi(j as i32) * b.powi((m - j) as i32);
        plain = plain + term;
        weighted = weighted + T::from_usize(j + 1).unwrap() * term;
    }
    (plain, weighted)
}

pub fn frustum_volume<T: Real>(f: &FrustumSpec<T>) -> T {
    let n = f.dim;
    let (plain, _) = radius_sums(f.r_hi, f.r_lo, n - 1);
    omega::<T>(n) * f.height() * plain / T::from_usize(n).unwrap()
}

/// Height of the centroid along the axis.
pub fn centroid_u<T: Real>(f: &FrustumSpec<T>) -> T {
    let m = f.dim - 1;
    let (plain, weighted) = radius_sums(f.r_hi, f.r_lo, m);
    f.h_lo + f.height() * weighted / (T::from_usize(m + 2).unwrap() * plain)
}

/// Smallest-bracket bisection for the root of a nondecreasing `f` on
/// [lo, hi] with f(lo) ≤ 0 ≤ f(hi).
fn bisect<T: Real>(mut lo: T, mut hi: T, f: impl Fn(T) -> T) -> T {
    let rel = T::tol(BISECTION_REL_TOL);
    for _ in 0..MAX_BISECTIONS {
        let mid = (lo + hi) / T::lit(2.0);
        let v = f(mid);
        if v == T::zero() {
            return mid;
        }
        if v < T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= rel * hi.abs().max(T::min_positive_value()) {
            break;
        }
    }
    (lo + hi) / T::lit(2.0)
}

/// Radius for the free end so that the frustum has volume `volume`.
fn solve_free_radius<T: Real>(dim: usize, h_lo: T, h_hi: T, fixed: T, volume: T) -> Result<T> {
    let vol = |r: T| {
        frustum_volume(&FrustumSpec {
            dim,
            h_lo,
            h_hi,
            r_lo: fixed,
            r_hi: r,
        }) - volume
    };
    let slack = T::tol(1e-12) * volume;
    let at_zero = vol(T::zero());
    if at_zero > slack {
        return Err(GeomError::Invariant(format!(
            "no radius reaches the target volume: the cone over the fixed end already exceeds it by {at_zero}"
        )));
    }
    if at_zero >= T::zero() {
        return Ok(T::zero());
    }
    let mut hi = fixed.max(T::one());
    let mut guard = 0;
    while vol(hi) < T::zero() {
        hi = hi * T::lit(2.0);
        guard += 1;
        if guard > 2000 || !hi.is_finite() {
            return Err(GeomError::Invariant("radius bracket diverged".into()));
        }
    }
    Ok(bisect(T::zero(), hi, vol))
}

/// The data of a profile that the reduction uses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Family<T> {
    pub dim: usize,
    pub h_lo: T,
    pub h_hi: T,
    /// Radius of K′ at the bottom and top ends.
    pub r_lo: T,
    pub r_hi: T,
    pub volume: T,
    /// Free radii of K₀ (top) and K₁ (bottom).
    pub big_r0: T,
    pub big_r1: T,
}

impl<T: Real> Family<T> {
    pub fn from_profile(profile: &SliceProfile<T>) -> Result<Self> {
        let volume = profile.volume();
        if !(volume > T::zero()) {
            return Err(GeomError::Input(format!("profile volume must be positive, got {volume}")));
        }
        let dim = profile.dim;
        let (h_lo, h_hi) = (profile.t_lo, profile.t_hi);
        let r_lo = radius_of_area(profile.area_lo(), dim)?;
        let r_hi = radius_of_area(profile.area_hi(), dim)?;
        let big_r0 = solve_free_radius(dim, h_lo, h_hi, r_lo, volume)?;
        // K₁ fixes the top; solve for the bottom by reflecting the axis.
        let big_r1 = solve_free_radius(dim, -h_hi, -h_lo, r_hi, volume)?;
        Ok(Family {
            dim,
            h_lo,
            h_hi,
            r_lo,
            r_hi,
            volume,
            big_r0,
            big_r1,
        })
    }

    fn frustum(&self, r_lo: T, r_hi: T) -> FrustumSpec<T> {
        FrustumSpec {
            dim: self.dim,
            h_lo: self.h_lo,
            h_hi: self.h_hi,
            r_lo,
            r_hi,
        }
    }

    pub fn k0(&self) -> FrustumSpec<T> {
        self.frustum(self.r_lo, self.big_r0)
    }

    pub fn k1(&self) -> FrustumSpec<T> {
        self.frustum(self.big_r1, self.r_hi)
    }

    /// K_s: top radius (1−s)R₀ + s·r_hi, bottom radius from the volume.
    pub fn member(&self, s: T) -> Result<FrustumSpec<T>> {
        if !(s >= T::zero() && s <= T::one()) {
            return Err(GeomError::Input(format!("family parameter must lie in [0, 1], got {s}")));
        }
        if s == T::zero() {
            return Ok(self.k0());
        }
        if s == T::one() {
            return Ok(self.k1());
        }
        let top = (T::one() - s) * self.big_r0 + s * self.r_hi;
        let bottom = solve_free_radius(self.dim, -self.h_hi, -self.h_lo, top, self.volume)?;
        Ok(self.frustum(bottom, top))
    }

    /// K₀ and K₁ coincide (the profile is already a cylinder-like frustum
    /// whose family is constant).
    pub fn is_degenerate(&self) -> bool {
        let scale = self.big_r0.max(self.r_hi).max(self.r_lo).max(self.big_r1);
        let tol = T::tol(1e-12) * scale;
        (self.big_r0 - self.r_hi).abs() <= tol && (self.big_r1 - self.r_lo).abs() <= tol
    }
}

pub fn build_d0_d1<T: Real>(profile: &SliceProfile<T>) -> Result<(FrustumSpec<T>, FrustumSpec<T>)> {
    let f = Family::from_profile(profile)?;
    Ok((f.k0(), f.k1()))
}

pub fn family_member<T: Real>(profile: &SliceProfile<T>, s: T) -> Result<FrustumSpec<T>> {
    Family::from_profile(profile)?.member(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Balanced<T> {
    pub s_star: T,
    pub frustum: FrustumSpec<T>,
    pub centroid_u: T,
    pub centroid_k0: T,
    pub centroid_k1: T,
    pub degenerate: bool,
}

/// Bisects s until the centroid of K_s is within 1e−9·height of the origin.
pub fn find_balanced_in<T: Real>(family: &Family<T>) -> Result<Balanced<T>> {
    let k0 = family.k0();
    let k1 = family.k1();
    let c0 = centroid_u(&k0);
    let c1 = centroid_u(&k1);
    let height = family.h_hi - family.h_lo;
    let tol = T::tol(CENTROID_REL_TOL) * height;
    if c0 < -tol || c1 > tol {
        return Err(GeomError::Invariant(format!(
            "endpoint centroid claim fails: c(K0)·u = {c0}, c(K1)·u = {c1} (tolerance {tol})"
        )));
    }
    let done = |s: T, f: FrustumSpec<T>, c: T, degenerate: bool| Balanced {
        s_star: s,
        frustum: f,
        centroid_u: c,
        centroid_k0: c0,
        centroid_k1: c1,
        degenerate,
    };
    if family.is_degenerate() {
        let half = T::lit(0.5);
        let f = family.member(half)?;
        return Ok(done(half, f, centroid_u(&f), true));
    }
    if c0.abs() <= tol {
        return Ok(done(T::zero(), k0, c0, false));
    }
    if c1.abs() <= tol {
        return Ok(done(T::one(), k1, c1, false));
    }
    let (mut lo, mut hi) = (T::zero(), T::one());
    let mut best = (T::zero(), k0, c0);
    for _ in 0..MAX_BISECTIONS {
        let mid = (lo + hi) / T::lit(2.0);
        let f = family.member(mid)?;
        let c = centroid_u(&f);
        if c.abs() < best.2.abs() {
            best = (mid, f, c);
        }
        if c.abs() <= tol {
            break;
        }
        if c > T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= T::tol(BISECTION_REL_TOL) {
            break;
        }
    }
    Ok(done(best.0, best.1, best.2, false))
}

pub fn find_balanced<T: Real>(profile: &SliceProfile<T>) -> Result<Balanced<T>> {
    find_balanced_in(&Family::from_profile(profile)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CompareReport<T> {
    /// μ_{K′}(±u)/V from the profile ends.
    pub x_prime: T,
    pub y_prime: T,
    pub psi_prime: T,
    /// The same quantities for the balanced frustum.
    pub x_frustum: T,
    pub y_frustum: T,
    pub psi_frustum: T,
    /// Ψ of the frustum from its radius ratio alone.
    pub psi_closed_form: T,
    pub x_ok: bool,
    pub y_ok: bool,
    pub psi_ok: bool,
    /// Ψ(x_{t′}, y_{t′}) ≤ 1 + tol.
    pub bound_ok: bool,
}

pub fn compare<T: Real>(profile: &SliceProfile<T>, balanced: &Balanced<T>, tol: T) -> Result<CompareReport<T>> {
    let n = profile.dim;
    let nt = T::from_usize(n).unwrap();
    let v = profile.volume();
    let x_prime = profile.t_hi * profile.area_hi() / (nt * v);
    let y_prime = -profile.t_lo * profile.area_lo() / (nt * v);
    let f = &balanced.frustum;
    let vf = frustum_volume(f);
    let x_frustum = f.h_hi * f.end_area(true) / (nt * vf);
    let y_frustum = -f.h_lo * f.end_area(false) / (nt * vf);
    let psi_prime = psi(&x_prime, &y_prime, n);
    let psi_frustum = psi(&x_frustum, &y_frustum, n);
    let (small, big) = if f.r_lo <= f.r_hi { (f.r_lo, f.r_hi) } else { (f.r_hi, f.r_lo) };
    let ratio = if small > T::zero() {
        BaseRatio::Finite((big / small).max(T::one()))
    } else {
        BaseRatio::Infinite
    };
    let (xc, yc) = xy_of_ratio(&TruncatedConeParams::new(n, ratio)?);
    Ok(CompareReport {
        x_prime,
        y_prime,
        psi_prime,
        x_frustum,
        y_frustum,
        psi_frustum,
        psi_closed_form: psi(&xc, &yc, n),
        x_ok: x_prime <= x_frustum + tol,
        y_ok: y_prime <= y_frustum + tol,
        psi_ok: psi_prime <= psi_frustum + tol,
        bound_ok: psi_frustum <= T::one() + tol,
    })
}
