//! Series expansions of products of Bessel functions through the
//! multivariable l-polynomials, with the associated integrals, derivatives
//! and verification suites.

pub mod besselfam;
pub mod error;
pub mod integrals;
pub mod lpoly;
pub mod products;
pub mod scalarkit;
pub mod types;
pub mod verify;

pub use error::{Error, Result};
pub use lpoly::{HomogIndex, LPolySpec, Method};
pub use products::{SeriesCoeffs, TruncatedSeries};
pub use scalarkit::QuadratureResult;
pub use types::{EvalReport, ExactRational, LIndex, LValue, Number, OrderSpec, Provenance, Scale, ScaleSpec};
pub use verify::{CaseDetail, Suite, VerifyReport};
