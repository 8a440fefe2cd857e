//! Arbitrary-precision verification of central binomial harmonic series
//! `Σ 4^k H.../(k^n C(2k,k))` and the log-trigonometric integrals behind
//! their weight-5 closed forms.
//!
//! All arithmetic runs on MPFR floats ([`precision::BigReal`]) at a decimal
//! working precision set by [`precision::PrecisionContext`].

pub mod closed_form;
pub mod constants;
pub mod elementary;
pub mod error;
pub mod expr;
pub mod identities;
pub mod integrands;
pub mod polygamma;
pub mod polylog;
pub mod precision;
pub mod pslq;
pub mod quad;
pub mod series;

pub use error::{Error, Result};
pub use identities::{verify, verify_all, Status, VerificationReport};
pub use precision::{BigReal, PrecisionContext};
