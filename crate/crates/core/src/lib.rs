//! Piecewise Chebyshevian splines through transition functions.
//!
//! A spline space is described by section spaces (one per break-point
//! interval) and an extended partition. Its B-spline basis is obtained as
//! differences `N_i = f_i - f_{i+1}` of transition functions, each computed
//! from a small Hermite interpolation problem. On top of that the crate
//! provides knot insertion, order elevation, Bézier extraction, knot
//! removal, periodic to clamped conversion, geometric continuity through
//! connection matrices, multi-order spaces and quasi extended Chebyshev
//! sections.
//!
//! Everything is generic over [`Scalar`] (`f32` or `f64`); the `*64`
//! aliases cover the common case.

// `!(a < b)` comparisons are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod basis;
pub mod closedform;
pub mod descriptor;
pub mod error;
pub mod extensions;
pub mod linalg;
pub mod partition;
pub mod refine;
pub mod scalar;
pub mod section;
pub mod transition;

pub use basis::{Basis, Spline, SplineSpace, TensorSurface};
pub use error::{Error, Result};
pub use extensions::{ConnectionMatrix, MultiOrderSpace, QecProfile};
pub use partition::ExtendedPartition;
pub use scalar::Scalar;
pub use section::{Family, LocalMap, Section, SplitStrategy};
pub use transition::{HermiteRow, Row, Side, TransitionTable};

pub type Section64 = Section<f64>;
pub type Family64 = Family<f64>;
pub type ExtendedPartition64 = ExtendedPartition<f64>;
pub type TransitionTable64 = TransitionTable<f64>;
pub type SplineSpace64 = SplineSpace<f64>;
pub type Spline64 = Spline<f64>;
pub type TensorSurface64 = TensorSurface<f64>;
pub type ConnectionMatrix64 = ConnectionMatrix<f64>;
pub type MultiOrderSpace64 = MultiOrderSpace<f64>;

pub type Section32 = Section<f32>;
pub type SplineSpace32 = SplineSpace<f32>;
pub type Spline32 = Spline<f32>;
