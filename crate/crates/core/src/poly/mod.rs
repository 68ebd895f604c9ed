//! Exact polynomial kernel: sparse multivariate polynomials, dense
//! univariate polynomials with Sturm-sequence root counting, and
//! fraction-free linear algebra.

mod linalg;
mod multi;
mod uni;

pub use linalg::{determinant, normalize as nullspace_normalize, nullspace, rank};
pub use multi::MultiPoly;
pub use uni::{Bound, UniPoly};
