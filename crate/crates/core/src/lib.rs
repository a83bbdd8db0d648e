//! Tangential maximal operators on discretized spaces of homogeneous type.
//!
//! The crate works on a finite point cloud `(X, d, mu)` and provides:
//!
//! * [`space`]: model spaces (circle, real sphere, complex sphere with the
//!   nonisotropic quasimetric) and validators for the quasimetric and
//!   homogeneity axioms;
//! * [`kernels`]: Poisson kernels, their powers `P_l`, the normalized
//!   operators and the log-normalized potential `P_0` of a homogeneous space;
//! * [`maximal`]: ball means, Hardy-Littlewood maximal functions, tangential
//!   and parametric maximal operators over logarithmic approach regions,
//!   the three-term domination bound and a Vitali-type covering selection;
//! * [`measures`]: `L^p` norms, distribution functions, layer-cake norms for
//!   outer measures and a Frostman-type logarithmic content.
//!
//! Everything is generic over the scalar type ([`Real`], implemented for
//! `f32` and `f64`); the aliases below fix `f64`.

// negated comparisons reject NaN inputs; index loops mirror the formulas
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod field;
pub mod kernels;
pub mod maximal;
pub mod measures;
pub mod scalar;
pub mod space;

pub use error::{Error, Result};
pub use field::InteriorFunction;
pub use kernels::{InteriorPoint, KernelKind};
pub use maximal::{ApproachSpec, CoverResult, Domination};
pub use measures::{LogContent, OuterMeasure, WeightMeasure};
pub use scalar::Real;
pub use space::{Ball, HomogeneousSpace, Quasimetric, ScaleGrid, SpaceDescriptor, SpaceKind};

pub type Space = HomogeneousSpace<f64>;
pub type Space32 = HomogeneousSpace<f32>;
pub type Interior = InteriorFunction<f64>;
pub type Interior32 = InteriorFunction<f32>;
pub type Approach = ApproachSpec<f64>;
pub type Content = LogContent<f64>;
pub type Cover = CoverResult<f64>;
