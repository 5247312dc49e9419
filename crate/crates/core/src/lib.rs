//! Cone-volume measures of convex polytopes and the refined necessary
//! condition n(x + y) + (n + 1)^{n−1}|x − y|ⁿ ≤ 1 for x = μ(u)/V,
//! y = μ(−u)/V on bodies with centroid at the origin.
//!
//! Geometry is generic over [`scalar::Real`] (`f32`, `f64`); the truncated
//! cone closed forms also run on exact rationals, and [`exact_poly`]
//! certifies the polynomial inequalities behind them.

pub mod checker;
pub mod error;
pub mod exact_poly;
pub mod measures;
pub mod polytope;
pub mod reduction;
pub mod scalar;
pub mod shapes;
pub mod symmetrization;
pub mod truncated_cone;
pub mod vector;

pub use error::{GeomError, Result};
pub use num_rational::BigRational;

pub type Vector64 = vector::Vector<f64>;
pub type Polytope64 = polytope::Polytope<f64>;
pub type Polytope32 = polytope::Polytope<f32>;
pub type Profile64 = symmetrization::SliceProfile<f64>;
pub type Frustum64 = reduction::FrustumSpec<f64>;
pub type Report64 = checker::ConditionReport<f64>;
pub type Measure64 = measures::DiscreteMeasure<f64>;
pub type TruncatedCone64 = truncated_cone::TruncatedConeParams<f64>;
pub type TruncatedConeExact = truncated_cone::TruncatedConeParams<BigRational>;
