//! Inverse single Compton scattering, used as the reference spectrum
//! that double Compton yields are compared against.

use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::kinematics::ElectronState;
use crate::units::{NaturalEnergy, CONSTANTS};

/// Laser pulse duration, either in femtoseconds or in natural time units
/// (hbar / m c^2).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum PulseDuration {
    Femtoseconds(f64),
    Natural(f64),
}

impl PulseDuration {
    /// Dimensionless product `omega_L tau_L`.
    pub fn omega_tau(self, omega_l: NaturalEnergy) -> f64 {
        match self {
            PulseDuration::Femtoseconds(fs) => crate::units::omega_tau(omega_l, fs * 1e-15),
            PulseDuration::Natural(t) => omega_l.get() * t,
        }
    }

    fn value(self) -> f64 {
        match self {
            PulseDuration::Femtoseconds(v) | PulseDuration::Natural(v) => v,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SingleComptonConfig {
    pub electron: ElectronState,
    pub omega_l: NaturalEnergy,
    /// Angle between laser photon and electron axis.
    pub alpha: f64,
    /// Observation angle about the electron axis.
    pub thetap: f64,
    pub tau_l: PulseDuration,
}

impl SingleComptonConfig {
    pub fn new(
        electron: ElectronState,
        omega_l: NaturalEnergy,
        alpha: f64,
        thetap: f64,
        tau_l: PulseDuration,
    ) -> Result<Self> {
        if !(omega_l.get() > 0.0) {
            return Err(Error::invalid("omega_L", "laser photon energy must be positive"));
        }
        for (what, a) in [("alpha", alpha), ("theta'", thetap)] {
            if !a.is_finite() || !(0.0..=PI).contains(&a) {
                return Err(Error::invalid(what, format!("{a} rad outside [0, pi]")));
            }
        }
        if !(tau_l.value() > 0.0) || !tau_l.value().is_finite() {
            return Err(Error::invalid("tau_L", "pulse duration must be positive"));
        }
        Ok(SingleComptonConfig {
            electron,
            omega_l,
            alpha,
            thetap,
            tau_l,
        })
    }

    pub fn with_thetap(&self, thetap: f64) -> Result<Self> {
        Self::new(self.electron, self.omega_l, self.alpha, thetap, self.tau_l)
    }

    /// `kappa = p.k = -gamma omega_L (1 - beta cos alpha)`
    pub fn kappa(&self) -> f64 {
        -self.electron.gamma() * self.omega_l.get() * self.electron.one_minus_beta_cos(self.alpha)
    }
}

/// Scattered photon energy
/// `gamma omega_L (1 - beta cos alpha) / (gamma (1 - beta cos theta') + omega_L (1 - cos alpha))`.
/// `1 - cos alpha` stands in for the laser-to-photon angle: exact on the
/// electron axis and at rest, off by O(theta'^2) in the recoil term otherwise.
pub fn omega_prime(cfg: &SingleComptonConfig) -> Result<NaturalEnergy> {
    let e = &cfg.electron;
    let w = cfg.omega_l.get();
    let den = e.gamma() * e.one_minus_beta_cos(cfg.thetap) + w * (1.0 - cfg.alpha.cos());
    if !(den > 0.0) {
        return Err(Error::ForbiddenConfiguration(format!(
            "single Compton denominator {den:e} is not positive"
        )));
    }
    NaturalEnergy::new(e.gamma() * w * e.one_minus_beta_cos(cfg.alpha) / den)
}

/// Unpolarized `d sigma / d Omega` in b/sr.
pub fn single_diff_xsec(cfg: &SingleComptonConfig) -> Result<f64> {
    let wp = omega_prime(cfg)?.get();
    let e = &cfg.electron;
    let kappa = cfg.kappa();
    let kappa_p = -e.gamma() * wp * e.one_minus_beta_cos(cfg.thetap);
    let inv = 1.0 / kappa - 1.0 / kappa_p;
    let bracket = kappa_p / kappa + kappa / kappa_p + 2.0 * (1.0 / kappa_p - 1.0 / kappa) + inv * inv;
    let ratio = wp / kappa;
    Ok(0.5 * CONSTANTS.r0_sq_barn() * ratio * ratio * bracket)
}

/// Gaussian spectral function of the scattered line, per unit natural energy.
pub fn spectral_g(omega: NaturalEnergy, cfg: &SingleComptonConfig) -> Result<f64> {
    let wp = omega_prime(cfg)?.get();
    let s = cfg.tau_l.omega_tau(cfg.omega_l);
    let d = omega.get() / wp - 1.0;
    Ok(s / (wp * (2.0 * PI).sqrt()) * (-0.5 * s * s * d * d).exp())
}

/// Relative FWHM of the scattered line, `2 sqrt(2 ln 2) / (omega_L tau_L)`.
pub fn relative_fwhm(cfg: &SingleComptonConfig) -> f64 {
    2.0 * (2.0 * std::f64::consts::LN_2).sqrt() / cfg.tau_l.omega_tau(cfg.omega_l)
}

/// `d2 sigma / (d omega dOmega)` in b/(keV sr).
pub fn single_double_diff(omega: NaturalEnergy, cfg: &SingleComptonConfig) -> Result<f64> {
    Ok(single_diff_xsec(cfg)? * spectral_g(omega, cfg)? / CONSTANTS.mc2_kev)
}
