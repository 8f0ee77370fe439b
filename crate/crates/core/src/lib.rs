//! Explicit-formula lower bounds on conductors of elliptic curves and abelian varieties
//! over ℚ and over number fields.
//!
//! The pipeline is: a [`testfunc::TestFunction`] F and a support parameter λ give the
//! archimedean constant M_{λ,F} ([`quadrature`]) and a worst-case prime sum ([`sums`]) over
//! prime ideals of norm ≤ e^λ ([`numberfield`]); [`bounds`] assembles them into
//! log B = λrΦ(1/2)/n − (2/n)S + g·M − 2g·log δ_K and scans λ. [`congruence`] turns a
//! real bound over ℚ into an admissible integer, and [`optimizer`] searches polynomial
//! autocorrelations for a better F.

pub mod bounds;
pub mod congruence;
pub mod error;
pub mod linalg;
pub mod numberfield;
pub mod optimizer;
pub mod quadrature;
pub mod sums;
pub mod testfunc;

pub use error::{Error, Result};
