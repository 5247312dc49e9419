//! Section-area profiles and Schwarz symmetrization.
//!
//! The symmetrized body is never meshed: it is the body of revolution about
//! the u-axis whose slice at height t is an (n−1)-ball of area A(t), so the
//! profile carries everything downstream code needs.

use serde::Serialize;

use crate::error::{GeomError, Result};
use crate::measures::cone_volume_measure;
use crate::polytope::{Polytope, Slicer};
use crate::scalar::Real;
use crate::vector::Vector;

pub const DEFAULT_RESOLUTION: usize = 2048;
pub const MIN_RESOLUTION: usize = 16;

/// Volume of the unit k-ball, π^{k/2}/Γ(k/2+1).
pub fn unit_ball_volume<T: Real>(k: usize) -> Result<T> {
    if k < 1 {
        return Err(GeomError::Input("unit ball dimension must be at least 1".into()));
    }
    // ω_k = (2π/k)·ω_{k−2}, ω_0 = 1, ω_1 = 2
    let two_pi = T::PI() + T::PI();
    let mut w = if k % 2 == 0 { T::one() } else { T::lit(2.0) };
    let mut j = if k % 2 == 0 { 2 } else { 3 };
    while j <= k {
        w = w * two_pi / T::from_usize(j).unwrap();
        j += 2;
    }
    Ok(w)
}

/// Sampled section-area function t ↦ A(t) along a direction.
#[derive(Debug, Clone, Serialize)]
pub struct SliceProfile<T> {
    pub dim: usize,
    pub direction: Vector<T>,
    pub t_lo: T,
    pub t_hi: T,
    /// `(t, A(t))`, strictly increasing in t, both endpoints included.
    pub samples: Vec<(T, T)>,
    /// Levels where A may fail to be smooth (vertex levels for polytopes).
    pub breakpoints: Vec<T>,
    /// Sample indices of the breakpoints; consecutive knots delimit the
    /// pieces integrated by Simpson's rule.
    #[serde(skip)]
    knots: Vec<usize>,
}

impl<T: Real> SliceProfile<T> {
    /// Samples `area` on a uniform sub-grid of every breakpoint interval,
    /// using an even number of sub-intervals proportional to its length.
    pub fn sample(
        dim: usize,
        direction: Vector<T>,
        t_lo: T,
        t_hi: T,
        breakpoints: &[T],
        resolution: usize,
        mut area: impl FnMut(T) -> T,
    ) -> Result<Self> {
        if resolution < MIN_RESOLUTION {
            return Err(GeomError::Input(format!(
                "resolution must be at least {MIN_RESOLUTION}, got {resolution}"
            )));
        }
        if !(t_lo < t_hi) {
            return Err(GeomError::Input("profile range is empty".into()));
        }
        let length = t_hi - t_lo;
        let merge = T::tol(1e-12) * (T::one() + t_lo.abs().max(t_hi.abs()));
        let mut knots_t = vec![t_lo];
        let mut inner: Vec<T> = breakpoints
            .iter()
            .copied()
            .filter(|&b| b > t_lo + merge && b < t_hi - merge)
            .collect();
        inner.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for b in inner {
            if b - *knots_t.last().unwrap() > merge {
                knots_t.push(b);
            }
        }
        if t_hi - *knots_t.last().unwrap() <= merge {
            knots_t.pop();
        }
        knots_t.push(t_hi);

        let res = T::from_usize(resolution).unwrap();
        let mut samples = Vec::new();
        let mut knots = Vec::with_capacity(knots_t.len());
        for w in knots_t.windows(2) {
            let (a, b) = (w[0], w[1]);
            let cells = ((b - a) / length * res / T::lit(2.0)).ceil().to_usize().unwrap_or(1).max(1) * 2;
            let h = (b - a) / T::from_usize(cells).unwrap();
            knots.push(samples.len());
            for j in 0..cells {
                let t = a + h * T::from_usize(j).unwrap();
                samples.push((t, area(t)));
            }
        }
        knots.push(samples.len());
        samples.push((t_hi, area(t_hi)));

        Ok(SliceProfile {
            dim,
            direction,
            t_lo,
            t_hi,
            samples,
            breakpoints: knots_t,
            knots,
        })
    }

    pub fn height(&self) -> T {
        self.t_hi - self.t_lo
    }

    /// A(t) by linear interpolation between samples; zero outside the range.
    pub fn area_at(&self, t: T) -> T {
        if t < self.t_lo || t > self.t_hi {
            return T::zero();
        }
        let i = self.samples.partition_point(|s| s.0 <= t);
        if i == 0 {
            return self.samples[0].1;
        }
        if i == self.samples.len() {
            return self.samples[i - 1].1;
        }
        let (t0, a0) = self.samples[i - 1];
        let (t1, a1) = self.samples[i];
        a0 + (a1 - a0) * (t - t0) / (t1 - t0)
    }

    pub fn area_lo(&self) -> T {
        self.samples[0].1
    }

    pub fn area_hi(&self) -> T {
        self.samples[self.samples.len() - 1].1
    }

    /// ∫ f(t, A(t)) dt, composite Simpson per breakpoint interval.
    pub fn integrate(&self, f: impl Fn(T, T) -> T) -> T {
        let vals: Vec<T> = self.samples.iter().map(|&(t, a)| f(t, a)).collect();
        let ts: Vec<T> = self.samples.iter().map(|s| s.0).collect();
        let mut total = T::zero();
        for w in self.knots.windows(2) {
            total = total + simpson(&ts[w[0]..=w[1]], &vals[w[0]..=w[1]]);
        }
        total
    }

    /// ∫ A dt, the volume of both the body and its symmetral.
    pub fn volume(&self) -> T {
        self.integrate(|_, a| a)
    }

    /// ∫ t·A dt.
    pub fn first_moment(&self) -> T {
        self.integrate(|t, a| t * a)
    }

    /// Centroid height c·u of the body.
    pub fn centroid_u(&self) -> T {
        self.first_moment() / self.volume()
    }

    /// Radius of the symmetral's slice at height `t`.
    pub fn schwarz_radius(&self, t: T) -> Result<T> {
        let slack = T::tol(1e-12) * (T::one() + self.height());
        if t < self.t_lo - slack || t > self.t_hi + slack {
            return Err(GeomError::Input(format!(
                "height {t} outside the profile range [{}, {}]",
                self.t_lo, self.t_hi
            )));
        }
        let t = t.max(self.t_lo).min(self.t_hi);
        radius_of_area(self.area_at(t), self.dim)
    }

    fn radii(&self) -> Vec<T> {
        let inv = T::one() / T::from_usize(self.dim - 1).unwrap();
        self.samples.iter().map(|&(_, a)| a.max(T::zero()).powf(inv)).collect()
    }

    /// Brunn–Minkowski signature of the profile; see [`ConcavityReport`].
    pub fn concavity_defect(&self) -> ConcavityReport<T> {
        let r = self.radii();
        let ts: Vec<T> = self.samples.iter().map(|s| s.0).collect();
        let r_max = r.iter().copied().fold(T::zero(), T::max);
        if !(r_max > T::zero()) {
            return ConcavityReport {
                concavity_defect: T::zero(),
                linearity_defect: T::zero(),
            };
        }
        let mut concavity = T::zero();
        for i in 1..r.len() - 1 {
            let w = (ts[i] - ts[i - 1]) / (ts[i + 1] - ts[i - 1]);
            let chord = r[i - 1] + (r[i + 1] - r[i - 1]) * w;
            concavity = concavity.max(chord - r[i]);
        }
        let (r0, r1) = (r[0], r[r.len() - 1]);
        let mut linearity = T::zero();
        for (i, &ri) in r.iter().enumerate() {
            let w = (ts[i] - self.t_lo) / self.height();
            linearity = linearity.max((ri - (r0 + (r1 - r0) * w)).abs());
        }
        ConcavityReport {
            concavity_defect: concavity / r_max,
            linearity_defect: linearity / r_max,
        }
    }

    /// Sample (t, A, r) rows for export.
    pub fn rows(&self) -> Vec<(T, T, T)> {
        self.samples
            .iter()
            .map(|&(t, a)| (t, a, radius_of_area(a, self.dim).unwrap_or(T::zero())))
            .collect()
    }
}

/// r with ω_{n−1}·r^{n−1} = A.
pub fn radius_of_area<T: Real>(area: T, dim: usize) -> Result<T> {
    let omega = unit_ball_volume::<T>(dim - 1)?;
    let inv = T::one() / T::from_usize(dim - 1).unwrap();
    Ok((area.max(T::zero()) / omega).powf(inv))
}

/// Composite Simpson on samples of one smooth piece; irregular spacing is
/// handled pairwise, and an odd final interval uses the quadratic through
/// the last three samples.
fn simpson<T: Real>(ts: &[T], fs: &[T]) -> T {
    let m = ts.len() - 1;
    if m == 0 {
        return T::zero();
    }
    if m == 1 {
        return (ts[1] - ts[0]) * (fs[0] + fs[1]) / T::lit(2.0);
    }
    let six = T::lit(6.0);
    let mut total = T::zero();
    let mut i = 0;
    while i + 2 <= m {
        let h0 = ts[i + 1] - ts[i];
        let h1 = ts[i + 2] - ts[i + 1];
        let s = h0 + h1;
        total = total
            + s / six
                * ((T::lit(2.0) - h1 / h0) * fs[i]
                    + s * s / (h0 * h1) * fs[i + 1]
                    + (T::lit(2.0) - h0 / h1) * fs[i + 2]);
        i += 2;
    }
    if i < m {
        let h0 = ts[m - 1] - ts[m - 2];
        let h1 = ts[m] - ts[m - 1];
        let d = six * h0 * (h0 + h1);
        total = total
            + (-h1 * h1 * h1 * fs[m - 2]
                + h1 * (h0 + h1) * (T::lit(3.0) * h0 + h1) * fs[m - 1]
                + h0 * h1 * (T::lit(3.0) * h0 + T::lit(2.0) * h1) * fs[m])
                / d;
    }
    total
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConcavityReport<T> {
    /// Largest excess of the neighbour chord over r = A^{1/(n−1)} at an
    /// interior sample, relative to max r. Zero for concave r.
    pub concavity_defect: T,
    /// Largest deviation of r from the chord through its endpoint values,
    /// relative to max r. Zero iff r is affine on the samples.
    pub linearity_defect: T,
}

/// Section-area profile of `p` along `u` (breakpoints at vertex levels).
pub fn profile<T: Real>(p: &Polytope<T>, u: &Vector<T>, resolution: usize) -> Result<SliceProfile<T>> {
    if u.dim() != p.dim() {
        return Err(GeomError::Input("direction dimension mismatch".into()));
    }
    u.check_unit()?;
    let slicer = Slicer::new(p, u);
    let levels = slicer.levels().to_vec();
    SliceProfile::sample(p.dim(), u.clone(), slicer.lo, slicer.hi, &levels, resolution, |t| {
        slicer.area(t)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Deviation<T> {
    pub expected: T,
    pub measured: T,
    pub abs: T,
    pub rel: T,
}

impl<T: Real> Deviation<T> {
    fn new(expected: T, measured: T, scale: T) -> Self {
        let abs = (measured - expected).abs();
        let rel = if scale > T::zero() { abs / scale } else { abs };
        Deviation {
            expected,
            measured,
            abs,
            rel,
        }
    }
}

/// Checks that symmetrization preserves volume, the centroid height and
/// the cone-volume masses at ±u.
#[derive(Debug, Clone, Serialize)]
pub struct Prop1Report<T> {
    pub direction: Vector<T>,
    /// ∫A dt against V(P); `rel` relative to V.
    pub volume: Deviation<T>,
    /// ∫tA dt / V against 0; `rel` relative to the diameter.
    pub centroid_u: Deviation<T>,
    /// h(u)·A(h(u))/n against μ(u); `rel` relative to max(μ(u), V·1e−300).
    pub mass_top: Deviation<T>,
    /// h(−u)·A(−h(−u))/n against μ(−u).
    pub mass_bottom: Deviation<T>,
    pub concavity: ConcavityReport<T>,
}

pub fn verify_prop1<T: Real>(p: &Polytope<T>, u: &Vector<T>, resolution: usize) -> Result<Prop1Report<T>> {
    verify_prop1_with(p, &profile(p, u, resolution)?)
}

/// [`verify_prop1`] on a profile already sampled along its direction.
pub fn verify_prop1_with<T: Real>(p: &Polytope<T>, prof: &SliceProfile<T>) -> Result<Prop1Report<T>> {
    let u = &prof.direction;
    let off = p.centroid().norm();
    if off > T::tol(1e-9) * p.diameter() {
        return Err(GeomError::Precondition(format!(
            "centroid is {off} away from the origin; center the body first"
        )));
    }
    let mu = cone_volume_measure(p)?;
    let v = p.volume();
    let n = T::from_usize(p.dim()).unwrap();
    let vol = prof.volume();
    let cu = prof.first_moment() / vol;
    let top = prof.t_hi * prof.area_hi() / n;
    let bottom = -prof.t_lo * prof.area_lo() / n;
    let mu_top = mu.mass_at(u)?;
    let mu_bottom = mu.mass_at(&-u)?;
    Ok(Prop1Report {
        direction: u.clone(),
        volume: Deviation::new(v, vol, v),
        centroid_u: Deviation::new(T::zero(), cu, p.diameter()),
        mass_top: Deviation::new(mu_top, top, mu_top),
        mass_bottom: Deviation::new(mu_bottom, bottom, mu_bottom),
        concavity: prof.concavity_defect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes::cube;
    use approx::assert_relative_eq;

    fn cube3() -> Polytope<f64> {
        cube(3, 1.0)
    }

    #[test]
    fn ball_volumes() {
        assert_relative_eq!(unit_ball_volume::<f64>(1).unwrap(), 2.0);
        assert_relative_eq!(unit_ball_volume::<f64>(2).unwrap(), std::f64::consts::PI);
        assert_relative_eq!(
            unit_ball_volume::<f64>(3).unwrap(),
            4.0 * std::f64::consts::PI / 3.0,
            epsilon = 1e-15
        );
        assert_relative_eq!(
            unit_ball_volume::<f64>(4).unwrap(),
            std::f64::consts::PI.powi(2) / 2.0,
            epsilon = 1e-15
        );
        assert!(unit_ball_volume::<f64>(0).is_err());
    }

    #[test]
    fn cube_profile_is_constant() {
        let p = profile(&cube3(), &Vector::axis(3, 2), 64).unwrap();
        assert_relative_eq!(p.t_lo, -1.0);
        assert_relative_eq!(p.t_hi, 1.0);
        for &(_, a) in &p.samples {
            assert_relative_eq!(a, 4.0, epsilon = 1e-13);
        }
        assert_relative_eq!(p.volume(), 8.0, epsilon = 1e-13);
        let r = p.schwarz_radius(0.0).unwrap();
        assert_relative_eq!(r, 2.0 / std::f64::consts::PI.sqrt(), epsilon = 1e-14);
        // solid of revolution ∫ω₂r² dt reproduces the volume
        let w2 = unit_ball_volume::<f64>(2).unwrap();
        let rev = p.integrate(|t, _| w2 * p.schwarz_radius(t).unwrap().powi(2));
        assert_relative_eq!(rev, 8.0, epsilon = 1e-12);
        assert!(p.schwarz_radius(1.5).is_err());
        let c = p.concavity_defect();
        assert!(c.concavity_defect < 1e-14 && c.linearity_defect < 1e-14);
    }

    #[test]
    fn corner_direction_profile_peaks_at_center() {
        let d = Vector::from_f64(&[1.0, 1.0, 1.0]).normalized().unwrap();
        let p = profile(&cube3(), &d, 256).unwrap();
        let (t_max, a_max) = p
            .samples
            .iter()
            .copied()
            .fold((0.0, -1.0), |acc, s| if s.1 > acc.1 { s } else { acc });
        assert!(t_max.abs() < 1e-12);
        // regular hexagon with side √2: (3√3/2)·2
        assert_relative_eq!(a_max, 3.0 * 3f64.sqrt(), epsilon = 1e-12);
        assert!(p.area_lo() < 1e-12 && p.area_hi() < 1e-12);
        for &(t, a) in &p.samples {
            assert_relative_eq!(a, p.area_at(-t), epsilon = 1e-9);
        }
        assert_relative_eq!(p.volume(), 8.0, epsilon = 1e-12);
    }

    #[test]
    fn simplex_profile_along_diagonal() {
        let pts = vec![Vector::zeros(3), Vector::axis(3, 0), Vector::axis(3, 1), Vector::axis(3, 2)];
        let s = Polytope::<f64>::from_vertices(3, &pts).unwrap();
        let d = Vector::from_f64(&[1.0, 1.0, 1.0]).normalized().unwrap();
        let p = profile(&s, &d, 64).unwrap();
        assert_eq!(p.area_lo(), 0.0);
        assert_relative_eq!(p.t_hi, 1.0 / 3f64.sqrt(), epsilon = 1e-15);
        // the facet x+y+z=1 is the last and largest section
        assert_relative_eq!(p.area_hi(), 3f64.sqrt() / 2.0, epsilon = 1e-14);
        assert!(p.samples.iter().all(|s| s.1 <= p.area_hi() + 1e-14));
        assert_relative_eq!(p.volume(), 1.0 / 6.0, epsilon = 1e-14);
    }

    #[test]
    fn closed_form_profiles() {
        let e = Vector::<f64>::axis(3, 2);
        let w2 = std::f64::consts::PI;
        let cyl = SliceProfile::sample(3, e.clone(), -1.0, 1.0, &[], 64, |_| 3.0).unwrap();
        let c = cyl.concavity_defect();
        assert_eq!((c.concavity_defect, c.linearity_defect), (0.0, 0.0));

        let cone = SliceProfile::sample(3, e.clone(), 0.0, 1.0, &[], 64, |t| w2 * t * t).unwrap();
        let c = cone.concavity_defect();
        assert!(c.concavity_defect < 1e-14 && c.linearity_defect < 1e-14);
        assert_relative_eq!(cone.volume(), w2 / 3.0, epsilon = 1e-14);

        let ball = SliceProfile::sample(3, e, -1.0, 1.0, &[], 256, |t| w2 * (1.0 - t * t)).unwrap();
        let c = ball.concavity_defect();
        assert!(c.concavity_defect < 1e-14);
        assert!(c.linearity_defect > 0.2);
        assert_relative_eq!(c.linearity_defect, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn simpson_handles_irregular_and_odd_pieces() {
        let ts = [0.0, 0.1, 0.35, 0.5, 1.0];
        let fs: Vec<f64> = ts.iter().map(|t| 3.0 * t * t - t + 2.0).collect();
        assert_relative_eq!(simpson(&ts, &fs), 2.5, epsilon = 1e-14);
        let ts = [0.0, 0.2, 0.7, 1.0];
        let fs: Vec<f64> = ts.iter().map(|t| 3.0 * t * t - t + 2.0).collect();
        assert_relative_eq!(simpson(&ts, &fs), 2.5, epsilon = 1e-14);
    }

    #[test]
    fn prop1_on_cube() {
        let c = cube3();
        let r = verify_prop1(&c, &Vector::axis(3, 2), 64).unwrap();
        assert!(r.volume.rel < 1e-9 && r.centroid_u.abs < 1e-9);
        assert!(r.mass_top.rel < 1e-9 && r.mass_bottom.rel < 1e-9);
        assert_relative_eq!(r.mass_top.expected, 4.0 / 3.0, epsilon = 1e-13);

        let d = Vector::from_f64(&[1.0, 1.0, 1.0]).normalized().unwrap();
        let r = verify_prop1(&c, &d, 256).unwrap();
        assert_eq!(r.mass_top.expected, 0.0);
        assert_eq!(r.mass_bottom.expected, 0.0);
        assert!(r.mass_top.measured.abs() < 1e-12);
        assert!(r.centroid_u.abs < 1e-6);
    }

    #[test]
    fn prop1_requires_centered_body() {
        let c = cube3().translated(&Vector::from_f64(&[0.1, 0.0, 0.0]));
        assert!(matches!(
            verify_prop1(&c, &Vector::axis(3, 2), 64),
            Err(GeomError::Precondition(_))
        ));
    }

    #[test]
    fn low_resolution_rejected() {
        assert!(profile(&cube3(), &Vector::axis(3, 0), 8).is_err());
    }
}
