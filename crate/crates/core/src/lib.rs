//! Exact-arithmetic toolkit for planar distance statistics and the
//! incidence geometry of lines in 3-space.
//!
//! Everything here runs over arbitrary-precision rationals: planar point
//! sets and their distance quadruples, the lift of distance quadruples to
//! rigid motions and then to lines in R^3, exact line-intersection
//! histograms, discrete polynomial ham-sandwich partitions, and the
//! critical/flat/flecnode tests on algebraic surfaces. There are no
//! floating-point code paths except clearly labelled `*_approx` report
//! fields.

pub mod error;
pub mod geom;
pub mod grid;
pub mod lines;
pub mod motions;
pub mod num;
pub mod partition;
pub mod points;
pub mod poly;
pub mod surfaces;

pub use error::Error;
pub use geom::{P2, P3, V2, V3};
pub use lines::{Intersection, Line3};
pub use motions::{Quadruple, RigidMotion};
pub use num::Rat;
pub use partition::CellDecomposition;
pub use points::PointSet2;
pub use poly::{MultiPoly, UniPoly};
pub use surfaces::FactoredPoly;

/// Crate result alias.
pub type Result<T> = std::result::Result<T, Error>;
