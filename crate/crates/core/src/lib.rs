//! Inversion of the modular j-function in quasilinear time with certified
//! precision, and complex-multiplication (CM) testing of algebraic
//! j-invariants.
//!
//! The library exposes:
//!
//! - [`precision`]: arbitrary-precision complex arithmetic with explicit
//!   precision claims (log, roots, π, regulated error).
//! - [`modular`]: evaluation of j(τ), its derivatives, theta constants, and
//!   the Gauss hypergeometric series used for low-precision inversion.
//! - [`domain`]: SL₂(ℤ) reduction to the fundamental domain.
//! - [`phi2`]: the level-2 modular polynomial, its cubic specialization, and
//!   Newton iteration with Kantorovich certificates.
//! - [`invert`]: the full inversion algorithm with regime dispatch and
//!   operation-count telemetry.
//! - [`cm`]: the singular-modulus test returning the discriminant and binary
//!   quadratic form.

pub mod cm;
pub mod domain;
pub mod error;
pub mod invert;
pub mod modular;
pub mod phi2;
pub mod precision;

pub use cm::{AlgebraicInput, BinaryQuadraticForm, CMResult, Convergent, ConvergentPair};
pub use domain::{in_f, reduce_to_f, FundamentalPoint, UnimodularMatrix};
pub use error::{Error, Result};
pub use invert::{invert, InversionResult, Regime, Telemetry};
pub use phi2::{KantorovichCertificate, Phi2Cubic, Phi2Poly};
pub use precision::{
    complex_log, complex_root, pi_to, regulated_error, ApproxComplex, PrecBits, PrecisionClaim,
    PrecisionKind,
};
