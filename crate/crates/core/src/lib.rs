//! Incoherent double Compton scattering: kinematics, the triple-differential
//! cross section, single Compton reference spectra, rate estimates and an
//! event generator.
//!
//! All physics is done in natural units (hbar = m = c = 1, energies in units
//! of the electron rest energy). See [`units`] for conversions.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod dcs;
pub mod error;
pub mod kinematics;
pub mod quadrature;
pub mod rates;
pub mod sampler;
pub mod scs;
pub mod units;

mod numeric;

pub use error::{Error, Result};
pub use numeric::{gauss_legendre_on, NeumaierSum};
