//! Achievable rates for three-terminal quantum relay channels under the
//! decode-forward strategy.
//!
//! The crate is organised bottom-up:
//!
//! - [`linalg`]: labeled subsystems, partial traces, spectra, purification,
//!   Haar sampling and Uhlmann isometries.
//! - [`channels`]: Kraus-form channels, Stinespring dilations, complementary
//!   channels and relay constructors `N_{AD->BE}`.
//! - [`entropy`]: von Neumann entropy and the derived correlation measures.
//! - [`rates`]: decode-forward rate functionals, rate-point feasibility and
//!   decoupling exponents.
//! - [`optimize`]: multi-restart simplex search over pure input states.
//! - [`fqsw`]: Monte-Carlo check of the FQSW decoupling inequality.

pub mod channels;
pub mod entropy;
mod error;
pub mod fqsw;
pub mod linalg;
pub mod optimize;
pub mod random;
pub mod rates;

pub use error::{Error, Result};

/// Complex scalar used throughout the crate.
pub type C64 = nalgebra::Complex<f64>;
/// Dense complex matrix.
pub type CMatrix = nalgebra::DMatrix<C64>;
/// Dense complex column vector.
pub type CVector = nalgebra::DVector<C64>;

/// Subsystem labels used by the relay model.
pub mod labels {
    /// Sender's auxiliary (reference) system.
    pub const A1: &str = "A1";
    /// Sender's channel input.
    pub const A: &str = "A";
    /// Relay's channel input.
    pub const D: &str = "D";
    /// Destination output.
    pub const B: &str = "B";
    /// Relay output.
    pub const E: &str = "E";
    /// Environment of the joint output in a Stinespring dilation.
    pub const JO: &str = "JO";
}
