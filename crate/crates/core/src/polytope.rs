//! Convex polytopes in vertex + facet representation.
//!
//! Construction is brute force (subset search over halfspaces or points),
//! which is adequate for n ≤ 6 with a few dozen vertices or halfspaces.
//! Every vertex carries the set of facets it lies on ("labels"); faces of
//! any dimension, including faces of hyperplane sections, are recovered
//! from those labels, which is what [`face_measure`] recurses on.

use std::collections::HashSet;

use serde::Serialize;

use crate::error::{GeomError, Result};
use crate::scalar::Real;
use crate::vector::{mean, solve, AffineHull, Combinations, OrthoBasis, Vector};

/// Vertices closer than this are the same vertex.
pub const VERTEX_MERGE_TOL: f64 = 1e-9;
/// Default cap on the number of input points for [`Polytope::from_vertices`].
pub const MAX_HULL_POINTS: usize = 64;
/// Two unit normals within this distance are the same direction.
pub const ANGLE_TOL: f64 = 1e-8;

/// Vertex–facet incidence tolerance, `1e-9·(1 + ‖v‖)`.
pub fn tol_incidence<T: Real>(v: &Vector<T>) -> T {
    T::tol(1e-9) * (T::one() + v.norm())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Facet<T> {
    /// Outward unit normal.
    pub normal: Vector<T>,
    /// Support value along `normal`.
    pub offset: T,
    pub vertex_indices: Vec<usize>,
}

/// A full-dimensional compact convex polytope.
#[derive(Debug, Clone)]
pub struct Polytope<T> {
    dim: usize,
    vertices: Vec<Vector<T>>,
    facets: Vec<Facet<T>>,
    /// `labels[v]` = sorted indices of the facets containing vertex `v`.
    labels: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
    volume: T,
    centroid: Vector<T>,
    diameter: T,
}

impl<T: Real> Polytope<T> {
    /// Intersection of the halfspaces `normal · x ≤ offset`.
    ///
    /// Normals are normalized on input. Vertices are the feasible solutions
    /// of every n-subset of boundary equations; halfspaces that touch the
    /// polytope in less than an (n−1)-face are dropped as redundant.
    pub fn from_halfspaces(dim: usize, halfspaces: &[(Vector<T>, T)]) -> Result<Self> {
        if dim < 2 {
            return Err(GeomError::Input(format!("dimension must be at least 2, got {dim}")));
        }
        if halfspaces.len() < 3 {
            return Err(GeomError::Input(format!(
                "need at least 3 halfspaces, got {}",
                halfspaces.len()
            )));
        }
        let mut hs: Vec<(Vector<T>, T)> = Vec::with_capacity(halfspaces.len());
        for (i, (a, b)) in halfspaces.iter().enumerate() {
            if a.dim() != dim || !a.is_finite() || !b.is_finite() {
                return Err(GeomError::Input(format!("halfspace {i} is malformed")));
            }
            let len = a.norm();
            if !(len > T::tol(1e-12)) {
                return Err(GeomError::Input(format!("halfspace {i} has a zero normal")));
            }
            hs.push((a.scale(T::one() / len), *b / len));
        }

        let mut vertices: Vec<Vector<T>> = Vec::new();
        for subset in Combinations::new(hs.len(), dim) {
            let a: Vec<Vec<T>> = subset.iter().map(|&i| hs[i].0 .0.clone()).collect();
            let b: Vec<T> = subset.iter().map(|&i| hs[i].1).collect();
            let Some(x) = solve(a, b, T::tol(1e-12)) else {
                continue;
            };
            let x = Vector::new(x);
            let tol = tol_incidence(&x);
            if hs.iter().all(|(a, b)| a.dot(&x) <= *b + tol) {
                push_unique(&mut vertices, x);
            }
        }

        if let Some(d) = recession_direction(dim, &hs) {
            return Err(GeomError::Construction(format!(
                "halfspace intersection is unbounded along {:?}",
                d.to_f64()
            )));
        }
        let refs: Vec<&Vector<T>> = vertices.iter().collect();
        if vertices.is_empty() {
            return Err(GeomError::Construction("halfspace intersection is empty".into()));
        }
        let scale = T::one() + max_norm(&vertices);
        let rank = AffineHull::of(&refs, T::tol(1e-10) * scale).rank();
        if rank < dim {
            return Err(GeomError::Construction(format!(
                "halfspace intersection has empty interior (affine rank {rank} < {dim})"
            )));
        }

        let mut facets: Vec<Facet<T>> = Vec::new();
        for (normal, offset) in &hs {
            let incident: Vec<usize> = vertices
                .iter()
                .enumerate()
                .filter(|(_, v)| (normal.dot(v) - *offset).abs() <= tol_incidence(v))
                .map(|(i, _)| i)
                .collect();
            if incident.len() < dim {
                continue;
            }
            let pts: Vec<&Vector<T>> = incident.iter().map(|&i| &vertices[i]).collect();
            if AffineHull::of(&pts, T::tol(1e-10) * scale).rank() != dim - 1 {
                continue;
            }
            if facets.iter().any(|f| f.vertex_indices == incident) {
                continue;
            }
            facets.push(Facet {
                normal: normal.clone(),
                offset: *offset,
                vertex_indices: incident,
            });
        }
        Self::assemble(dim, vertices, facets)
    }

    /// Convex hull of a point set (at most [`MAX_HULL_POINTS`] points).
    pub fn from_vertices(dim: usize, points: &[Vector<T>]) -> Result<Self> {
        if dim < 2 {
            return Err(GeomError::Input(format!("dimension must be at least 2, got {dim}")));
        }
        if points.len() > MAX_HULL_POINTS {
            return Err(GeomError::Input(format!(
                "{} points exceed the brute-force hull limit of {MAX_HULL_POINTS}",
                points.len()
            )));
        }
        let mut pts: Vec<Vector<T>> = Vec::with_capacity(points.len());
        for (i, p) in points.iter().enumerate() {
            if p.dim() != dim || !p.is_finite() {
                return Err(GeomError::Input(format!("point {i} is malformed")));
            }
            push_unique(&mut pts, p.clone());
        }
        let (pts, facets) = hull_facets(dim, &pts)?;

        // keep only true vertices: points whose facet normals span ℝⁿ
        let mut keep = vec![false; pts.len()];
        for (i, k) in keep.iter_mut().enumerate() {
            let mut basis = OrthoBasis::new();
            for f in facets.iter().filter(|f| f.vertex_indices.contains(&i)) {
                basis.try_push(&f.normal, T::tol(1e-9));
            }
            *k = basis.rank() == dim;
        }
        let mut remap = vec![usize::MAX; pts.len()];
        let mut vertices = Vec::new();
        for (i, p) in pts.into_iter().enumerate() {
            if keep[i] {
                remap[i] = vertices.len();
                vertices.push(p);
            }
        }
        let facets = facets
            .into_iter()
            .map(|f| Facet {
                vertex_indices: f
                    .vertex_indices
                    .iter()
                    .filter(|&&i| keep[i])
                    .map(|&i| remap[i])
                    .collect(),
                ..f
            })
            .collect();
        Self::assemble(dim, vertices, facets)
    }

    fn assemble(dim: usize, vertices: Vec<Vector<T>>, facets: Vec<Facet<T>>) -> Result<Self> {
        let mut labels = vec![Vec::new(); vertices.len()];
        for (fi, f) in facets.iter().enumerate() {
            for &v in &f.vertex_indices {
                labels[v].push(fi);
            }
        }

        let mut edges = Vec::new();
        for a in 0..vertices.len() {
            for b in a + 1..vertices.len() {
                let mut basis = OrthoBasis::new();
                for fi in labels[a].iter().filter(|fi| labels[b].contains(fi)) {
                    basis.try_push(&facets[*fi].normal, T::tol(1e-9));
                }
                if basis.rank() == dim - 1 {
                    edges.push((a, b));
                }
            }
        }

        let mut diameter = T::zero();
        for a in 0..vertices.len() {
            for b in a + 1..vertices.len() {
                diameter = diameter.max(vertices[a].distance(&vertices[b]));
            }
        }

        let all: Vec<usize> = (0..vertices.len()).collect();
        let (volume, centroid) = face_measure(&vertices, &labels, &all, dim, diameter);

        let p = Polytope {
            dim,
            vertices,
            facets,
            labels,
            edges,
            volume,
            centroid,
            diameter,
        };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        let n = self.dim;
        if self.facets.len() < n + 1 || self.vertices.len() < n + 1 {
            return Err(GeomError::Construction(format!(
                "{} vertices and {} facets cannot bound a {n}-polytope",
                self.vertices.len(),
                self.facets.len()
            )));
        }
        for (i, v) in self.vertices.iter().enumerate() {
            let tol = tol_incidence(v);
            for f in &self.facets {
                if f.normal.dot(v) > f.offset + tol {
                    return Err(GeomError::Construction(format!(
                        "vertex {i} violates a facet by {}",
                        f.normal.dot(v) - f.offset
                    )));
                }
            }
            if self.labels[i].len() < n {
                return Err(GeomError::Construction(format!(
                    "vertex {i} lies on only {} facets",
                    self.labels[i].len()
                )));
            }
        }
        let refs: Vec<&Vector<T>> = self.vertices.iter().collect();
        let inner = mean(&refs);
        let tol = tol_incidence(&inner);
        if self.facets.iter().any(|f| !(f.normal.dot(&inner) < f.offset - tol)) {
            return Err(GeomError::Construction("polytope has empty interior".into()));
        }
        if !(self.volume > T::zero()) {
            return Err(GeomError::Construction("polytope has zero volume".into()));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Vector<T>] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Facet<T>] {
        &self.facets
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Facet indices containing vertex `v`.
    pub fn vertex_facets(&self, v: usize) -> &[usize] {
        &self.labels[v]
    }

    pub(crate) fn labels(&self) -> &[Vec<usize>] {
        &self.labels
    }

    pub fn volume(&self) -> T {
        self.volume
    }

    pub fn centroid(&self) -> &Vector<T> {
        &self.centroid
    }

    pub fn diameter(&self) -> T {
        self.diameter
    }

    /// `h_P(u) = max_v v·u`.
    pub fn support(&self, u: &Vector<T>) -> Result<T> {
        self.check_direction(u)?;
        Ok(self.support_unchecked(u))
    }

    pub(crate) fn support_unchecked(&self, u: &Vector<T>) -> T {
        self.vertices
            .iter()
            .map(|v| v.dot(u))
            .fold(T::neg_infinity(), T::max)
    }

    fn check_direction(&self, u: &Vector<T>) -> Result<()> {
        if u.dim() != self.dim {
            return Err(GeomError::Input(format!(
                "direction has dimension {}, polytope has {}",
                u.dim(),
                self.dim
            )));
        }
        u.check_unit()
    }

    /// Whether `x` satisfies every facet inequality (with incidence slack).
    pub fn contains(&self, x: &Vector<T>) -> bool {
        let tol = tol_incidence(x);
        self.facets.iter().all(|f| f.normal.dot(x) <= f.offset + tol)
    }

    /// Whether the origin lies strictly inside (every facet offset > tol).
    pub fn origin_interior(&self) -> bool {
        let tol = T::tol(1e-9) * (T::one() + self.diameter);
        self.facets.iter().all(|f| f.offset > tol)
    }

    /// The same polytope shifted by `shift`.
    pub fn translated(&self, shift: &Vector<T>) -> Self {
        let vertices: Vec<Vector<T>> = self.vertices.iter().map(|v| v + shift).collect();
        let facets = self
            .facets
            .iter()
            .map(|f| Facet {
                normal: f.normal.clone(),
                offset: f.offset + f.normal.dot(shift),
                vertex_indices: f.vertex_indices.clone(),
            })
            .collect();
        let all: Vec<usize> = (0..vertices.len()).collect();
        let (volume, centroid) = face_measure(&vertices, &self.labels, &all, self.dim, self.diameter);
        Polytope {
            dim: self.dim,
            vertices,
            facets,
            labels: self.labels.clone(),
            edges: self.edges.clone(),
            volume,
            centroid,
            diameter: self.diameter,
        }
    }

    /// Shifts the polytope so that its centroid is the origin.
    pub fn translate_to_centroid(&self) -> Self {
        let mut p = self.translated(&-&self.centroid);
        // one refinement step absorbs the rounding of the first shift
        let residual = p.centroid.clone();
        if residual.norm() > T::zero() {
            p = p.translated(&-&residual);
        }
        p
    }

    /// Rebuilds the hull of the vertex images under `f` (affine maps).
    pub fn map_vertices(&self, f: impl Fn(&Vector<T>) -> Vector<T>) -> Result<Self> {
        let pts: Vec<Vector<T>> = self.vertices.iter().map(f).collect();
        Self::from_vertices(self.dim, &pts)
    }

    /// (n−1)-volume of `P ∩ {x·u = t}`.
    pub fn slice_area(&self, u: &Vector<T>, t: T) -> Result<T> {
        self.check_direction(u)?;
        Ok(Slicer::new(self, u).area(t))
    }
}

fn max_norm<T: Real>(pts: &[Vector<T>]) -> T {
    pts.iter().map(|p| p.norm()).fold(T::zero(), T::max)
}

fn push_unique<T: Real>(pts: &mut Vec<Vector<T>>, p: Vector<T>) {
    let tol = T::tol(VERTEX_MERGE_TOL);
    if !pts.iter().any(|q| q.distance(&p) <= tol) {
        pts.push(p);
    }
}

/// A nonzero `d` with `a·d ≤ 0` for every halfspace, if one exists.
/// Extreme rays of the recession cone are cut out by n−1 independent
/// tight constraints, so checking those null directions suffices.
fn recession_direction<T: Real>(dim: usize, hs: &[(Vector<T>, T)]) -> Option<Vector<T>> {
    let tol = T::tol(1e-9);
    if hs.len() < dim - 1 {
        return Some(Vector::axis(dim, 0));
    }
    for subset in Combinations::new(hs.len(), dim - 1) {
        let mut basis = OrthoBasis::new();
        for &i in &subset {
            basis.try_push(&hs[i].0, T::tol(1e-10));
        }
        if basis.rank() != dim - 1 {
            continue;
        }
        let d = basis.complement(dim).remove(0);
        for cand in [d.clone(), -&d] {
            if hs.iter().all(|(a, _)| a.dot(&cand) <= tol) {
                return Some(cand);
            }
        }
    }
    None
}

/// Brute-force facet search: every n-subset spanning a hyperplane that
/// supports all points. Returns the (deduplicated) points and facets with
/// indices into them.
fn hull_facets<T: Real>(dim: usize, pts: &[Vector<T>]) -> Result<(Vec<Vector<T>>, Vec<Facet<T>>)> {
    if pts.is_empty() {
        return Err(GeomError::Construction("no points".into()));
    }
    let refs: Vec<&Vector<T>> = pts.iter().collect();
    let scale = T::one() + max_norm(pts);
    let rank_tol = T::tol(1e-10) * scale;
    let rank = AffineHull::of(&refs, rank_tol).rank();
    if rank < dim {
        return Err(GeomError::Construction(format!(
            "points are degenerate: affine rank {rank} < {dim}"
        )));
    }
    let inner = mean(&refs);
    let mut facets: Vec<Facet<T>> = Vec::new();
    for subset in Combinations::new(pts.len(), dim) {
        if facets
            .iter()
            .any(|f| subset.iter().all(|i| f.vertex_indices.contains(i)))
        {
            continue;
        }
        let sub: Vec<&Vector<T>> = subset.iter().map(|&i| &pts[i]).collect();
        let hull = AffineHull::of(&sub, rank_tol);
        if hull.rank() != dim - 1 {
            continue;
        }
        let mut normal = hull.basis.complement(dim).remove(0);
        let mut offset = normal.dot(&hull.origin);
        if normal.dot(&inner) > offset {
            normal = -&normal;
            offset = -offset;
        }
        if !pts.iter().all(|p| normal.dot(p) <= offset + tol_incidence(p)) {
            continue;
        }
        let incident: Vec<usize> = pts
            .iter()
            .enumerate()
            .filter(|(_, p)| (normal.dot(p) - offset).abs() <= tol_incidence(p))
            .map(|(i, _)| i)
            .collect();
        let dup = facets.iter().any(|f| {
            f.vertex_indices == incident
                || (f.normal.distance(&normal) <= T::tol(1e-9)
                    && (f.offset - offset).abs() <= tol_incidence(&hull.origin))
        });
        if !dup {
            facets.push(Facet {
                normal,
                offset,
                vertex_indices: incident,
            });
        }
    }
    Ok((pts.to_vec(), facets))
}

/// k-dimensional volume and centroid of the face spanned by `members`.
///
/// The face is decomposed into cones from its vertex mean over its own
/// facets; those are found as maximal label-sharing subsets of affine
/// rank k−1 and measured recursively. All points stay in ambient
/// coordinates; orthonormal frames are only used to measure heights.
pub(crate) fn face_measure<T: Real>(
    points: &[Vector<T>],
    labels: &[Vec<usize>],
    members: &[usize],
    k: usize,
    scale: T,
) -> (T, Vector<T>) {
    let refs: Vec<&Vector<T>> = members.iter().map(|&i| &points[i]).collect();
    let center = mean(&refs);
    if members.len() < k + 1 {
        return (T::zero(), center);
    }
    let tol = T::tol(1e-11) * (T::one() + scale);
    let hull = AffineHull::of(&refs, tol);
    if hull.rank() < k {
        return (T::zero(), center);
    }
    if k == 1 {
        let axis = &hull.basis.vectors[0];
        let (mut lo, mut hi) = (T::infinity(), T::neg_infinity());
        for p in &refs {
            let s = (*p - &hull.origin).dot(axis);
            lo = lo.min(s);
            hi = hi.max(s);
        }
        let mid = hull.origin.axpy((lo + hi) / T::lit(2.0), axis);
        return (hi - lo, mid);
    }

    let mut candidates: Vec<usize> = members.iter().flat_map(|&m| labels[m].iter().copied()).collect();
    candidates.sort_unstable();
    candidates.dedup();

    let kf = T::from_usize(k).unwrap();
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let mut volume = T::zero();
    let mut moment = Vector::zeros(center.dim());
    for label in candidates {
        let sub: Vec<usize> = members
            .iter()
            .copied()
            .filter(|&m| labels[m].binary_search(&label).is_ok())
            .collect();
        if sub.len() < k || sub.len() == members.len() || !seen.insert(sub.clone()) {
            continue;
        }
        let sub_refs: Vec<&Vector<T>> = sub.iter().map(|&i| &points[i]).collect();
        let sub_hull = AffineHull::of(&sub_refs, tol);
        if sub_hull.rank() != k - 1 {
            continue;
        }
        let height = sub_hull.basis.residual(&(&center - &sub_hull.origin)).norm();
        let (base, base_centroid) = face_measure(points, labels, &sub, k - 1, scale);
        let cone = base * height / kf;
        if cone > T::zero() {
            let apex_to_base = &base_centroid - &center;
            let c = center.axpy(kf / (kf + T::one()), &apex_to_base);
            volume = volume + cone;
            moment = moment.axpy(cone, &c);
        }
    }
    if volume > T::zero() {
        let centroid = moment.scale(T::one() / volume);
        (volume, centroid)
    } else {
        (T::zero(), center)
    }
}

/// Precomputed state for repeated hyperplane sections along one direction.
pub(crate) struct Slicer<'a, T> {
    poly: &'a Polytope<T>,
    levels: Vec<T>,
    /// Vertex labels with facets perpendicular to u removed.
    labels: Vec<Vec<usize>>,
    pub lo: T,
    pub hi: T,
}

impl<'a, T: Real> Slicer<'a, T> {
    pub fn new(poly: &'a Polytope<T>, u: &Vector<T>) -> Self {
        let levels: Vec<T> = poly.vertices.iter().map(|v| v.dot(u)).collect();
        let parallel: Vec<bool> = poly
            .facets
            .iter()
            .map(|f| f.normal.distance(u) <= T::tol(ANGLE_TOL) || f.normal.distance(&-u) <= T::tol(ANGLE_TOL))
            .collect();
        let labels = poly
            .labels
            .iter()
            .map(|l| l.iter().copied().filter(|&f| !parallel[f]).collect())
            .collect();
        let lo = levels.iter().copied().fold(T::infinity(), T::min);
        let hi = levels.iter().copied().fold(T::neg_infinity(), T::max);
        Slicer {
            poly,
            levels,
            labels,
            lo,
            hi,
        }
    }

    pub fn levels(&self) -> &[T] {
        &self.levels
    }

    pub fn area(&self, t: T) -> T {
        let p = self.poly;
        let span_tol = T::tol(1e-12) * (T::one() + p.diameter);
        if t < self.lo - span_tol || t > self.hi + span_tol {
            return T::zero();
        }
        let on = |i: usize| (self.levels[i] - t).abs() <= T::tol(1e-12) * (T::one() + p.vertices[i].norm());
        let mut pts = Vec::new();
        let mut labs = Vec::new();
        for i in 0..p.vertices.len() {
            if on(i) {
                pts.push(p.vertices[i].clone());
                labs.push(self.labels[i].clone());
            }
        }
        for &(a, b) in &p.edges {
            if on(a) || on(b) {
                continue;
            }
            let (la, lb) = (self.levels[a] - t, self.levels[b] - t);
            if (la < T::zero()) == (lb < T::zero()) {
                continue;
            }
            let s = la / (la - lb);
            let x = p.vertices[a].axpy(s, &(&p.vertices[b] - &p.vertices[a]));
            let common: Vec<usize> = self.labels[a]
                .iter()
                .copied()
                .filter(|f| self.labels[b].binary_search(f).is_ok())
                .collect();
            pts.push(x);
            labs.push(common);
        }
        if pts.len() < p.dim {
            return T::zero();
        }
        let all: Vec<usize> = (0..pts.len()).collect();
        face_measure(&pts, &labs, &all, p.dim - 1, p.diameter).0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn cube(h: f64) -> Polytope<f64> {
        let mut pts = Vec::new();
        for m in 0..8 {
            pts.push(Vector::from_f64(&[
                if m & 1 == 0 { -h } else { h },
                if m & 2 == 0 { -h } else { h },
                if m & 4 == 0 { -h } else { h },
            ]));
        }
        Polytope::from_vertices(3, &pts).unwrap()
    }

    fn axis_halfspaces(dim: usize) -> Vec<(Vector<f64>, f64)> {
        let mut hs = Vec::new();
        for i in 0..dim {
            hs.push((Vector::axis(dim, i), 1.0));
            hs.push((-&Vector::axis(dim, i), 1.0));
        }
        hs
    }

    fn standard_simplex() -> Polytope<f64> {
        let pts = vec![
            Vector::from_f64(&[0.0, 0.0, 0.0]),
            Vector::axis(3, 0),
            Vector::axis(3, 1),
            Vector::axis(3, 2),
        ];
        Polytope::from_vertices(3, &pts).unwrap()
    }

    #[test]
    fn cube_support() {
        let c = cube(1.0);
        assert_relative_eq!(c.support(&Vector::axis(3, 0)).unwrap(), 1.0);
        let d = Vector::from_f64(&[1.0, 1.0, 1.0]).normalized().unwrap();
        assert_relative_eq!(c.support(&d).unwrap(), 3f64.sqrt(), epsilon = 1e-15);
        assert!(c.support(&Vector::from_f64(&[1.0, 1.0, 0.0])).is_err());
    }

    #[test]
    fn cube_from_halfspaces() {
        let c = Polytope::from_halfspaces(3, &axis_halfspaces(3)).unwrap();
        assert_eq!(c.vertices().len(), 8);
        assert_eq!(c.facets().len(), 6);
        assert_eq!(c.edges().len(), 12);
        assert_relative_eq!(c.volume(), 8.0, epsilon = 1e-12);
    }

    #[test]
    fn redundant_halfspace_dropped() {
        let mut hs = axis_halfspaces(3);
        hs.push((Vector::axis(3, 0), 2.0));
        let c = Polytope::from_halfspaces(3, &hs).unwrap();
        assert_eq!(c.facets().len(), 6);
        assert_eq!(c.vertices().len(), 8);
    }

    #[test]
    fn unbounded_and_empty_rejected() {
        let mut hs = axis_halfspaces(3);
        hs.remove(0);
        assert!(matches!(
            Polytope::from_halfspaces(3, &hs),
            Err(GeomError::Construction(_))
        ));
        let mut hs = axis_halfspaces(3);
        hs[1].1 = -1.0; // x ≤ 1 and x ≥ 1: a flat slab
        assert!(matches!(
            Polytope::from_halfspaces(3, &hs),
            Err(GeomError::Construction(_))
        ));
    }

    #[test]
    fn interior_point_discarded() {
        let mut pts: Vec<Vector<f64>> = cube(1.0).vertices().to_vec();
        pts.push(Vector::zeros(3));
        pts.push(Vector::from_f64(&[1.0, 0.0, 0.0])); // facet interior
        pts.push(Vector::from_f64(&[1.0, 1.0, 0.0])); // edge interior
        let c = Polytope::from_vertices(3, &pts).unwrap();
        assert_eq!(c.vertices().len(), 8);
        assert_eq!(c.facets().len(), 6);
    }

    #[test]
    fn degenerate_points_report_rank() {
        let pts: Vec<Vector<f64>> = vec![
            Vector::from_f64(&[0.0, 0.0, 0.0]),
            Vector::from_f64(&[1.0, 0.0, 0.0]),
            Vector::from_f64(&[0.0, 1.0, 0.0]),
            Vector::from_f64(&[1.0, 1.0, 0.0]),
        ];
        let err = Polytope::from_vertices(3, &pts).unwrap_err();
        assert!(err.to_string().contains("affine rank 2"), "{err}");
    }

    #[test]
    fn simplex_volume_and_centroid() {
        let s = standard_simplex();
        assert_eq!(s.facets().len(), 4);
        assert_relative_eq!(s.volume(), 1.0 / 6.0, epsilon = 1e-15);
        for c in s.centroid().coords() {
            assert_relative_eq!(*c, 0.25, epsilon = 1e-15);
        }
    }

    #[test]
    fn shifted_cube_centroid() {
        let c = cube(1.0).translated(&Vector::from_f64(&[1.0, 1.0, 1.0]));
        for x in c.centroid().coords() {
            assert_relative_eq!(*x, 1.0, epsilon = 1e-14);
        }
        let back = c.translate_to_centroid();
        assert!(back.centroid().norm() <= 1e-12 * back.diameter());
    }

    #[test]
    fn cube_slices() {
        let c = cube(1.0);
        let e3 = Vector::axis(3, 2);
        assert_relative_eq!(c.slice_area(&e3, 0.0).unwrap(), 4.0, epsilon = 1e-14);
        assert_relative_eq!(c.slice_area(&e3, 1.0).unwrap(), 4.0, epsilon = 1e-14);
        assert_eq!(c.slice_area(&e3, 2.0).unwrap(), 0.0);
        let d = Vector::from_f64(&[1.0, 1.0, 1.0]).normalized().unwrap();
        // corner-direction tangent level touches a single vertex
        assert!(c.slice_area(&d, 3f64.sqrt()).unwrap().abs() < 1e-12);
    }

    #[test]
    fn square_slices_are_segments() {
        let sq = Polytope::from_halfspaces(2, &axis_halfspaces(2)).unwrap();
        assert_relative_eq!(sq.volume(), 4.0, epsilon = 1e-14);
        let d = Vector::from_f64(&[1.0, 1.0]).normalized().unwrap();
        assert_relative_eq!(sq.slice_area(&d, 0.0).unwrap(), 2.0 * 2f64.sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn hypercube_volume_in_four_dims() {
        let c = Polytope::from_halfspaces(4, &axis_halfspaces(4)).unwrap();
        assert_eq!(c.vertices().len(), 16);
        assert_relative_eq!(c.volume(), 16.0, epsilon = 1e-12);
        assert_relative_eq!(c.slice_area(&Vector::axis(4, 3), 0.3).unwrap(), 8.0, epsilon = 1e-12);
    }

    #[test]
    fn works_in_single_precision() {
        let pts: Vec<Vector<f32>> = cube(1.0)
            .vertices()
            .iter()
            .map(|v| Vector::new(v.coords().iter().map(|&c| c as f32).collect()))
            .collect();
        let c = Polytope::<f32>::from_vertices(3, &pts).unwrap();
        assert!((c.volume() - 8.0).abs() < 1e-4);
    }
}
