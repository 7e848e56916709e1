//! Natural units (hbar = m = c = 1) and the handful of laboratory
//! conversions the rest of the crate needs.
//!
//! Every energy inside the physics code is measured in units of the
//! electron rest energy. Conversion to keV, barns and SI happens only at
//! the boundaries.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Physical constants shared by all modules.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// Classical electron radius in m.
    pub r0: f64,
    /// Fine-structure constant.
    pub alpha_qed: f64,
    /// Electron rest energy in keV.
    pub mc2_kev: f64,
    pub barn_per_m2: f64,
    /// Boltzmann constant in eV/K.
    pub kb_ev_per_k: f64,
    /// Reduced Planck constant in eV s.
    pub hbar_ev_s: f64,
    /// Elementary charge in C.
    pub elementary_charge: f64,
    /// Vacuum permittivity in F/m.
    pub epsilon0: f64,
    /// Speed of light in m/s.
    pub c: f64,
    /// Avogadro constant in 1/mol.
    pub avogadro: f64,
}

pub const CONSTANTS: PhysicalConstants = PhysicalConstants {
    r0: 2.817_940_326_2e-15,
    alpha_qed: 7.297_352_569_3e-3,
    mc2_kev: 510.999,
    barn_per_m2: 1e28,
    kb_ev_per_k: 8.617_333_262e-5,
    hbar_ev_s: 6.582_119_569e-16,
    elementary_charge: 1.602_176_634e-19,
    epsilon0: 8.854_187_812_8e-12,
    c: 299_792_458.0,
    avogadro: 6.022_140_76e23,
};

impl PhysicalConstants {
    /// r0^2 expressed in barns (about 0.0794 b).
    pub fn r0_sq_barn(&self) -> f64 {
        self.r0 * self.r0 * self.barn_per_m2
    }

    /// Electron rest energy in eV.
    pub fn mc2_ev(&self) -> f64 {
        self.mc2_kev * 1e3
    }

    /// h c in eV m, used for photon wavelength conversions.
    pub fn hc_ev_m(&self) -> f64 {
        2.0 * PI * self.hbar_ev_s * self.c
    }
}

/// An energy in units of the electron rest energy.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
pub struct NaturalEnergy(f64);

impl NaturalEnergy {
    pub const ZERO: NaturalEnergy = NaturalEnergy(0.0);

    /// Wraps a value already in natural units. Non-finite values are rejected.
    pub fn new(value: f64) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::invalid("natural energy", format!("{value} is not finite")));
        }
        Ok(NaturalEnergy(value))
    }

    pub fn from_kev(kev: f64) -> Result<Self> {
        kev_to_natural(kev)
    }

    pub fn from_ev(ev: f64) -> Result<Self> {
        kev_to_natural(ev * 1e-3)
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }

    pub fn kev(self) -> f64 {
        natural_to_kev(self.0)
    }

    pub fn ev(self) -> f64 {
        self.kev() * 1e3
    }
}

/// keV to natural units. Negative or non-finite energies are rejected.
pub fn kev_to_natural(e_kev: f64) -> Result<NaturalEnergy> {
    if !e_kev.is_finite() || e_kev < 0.0 {
        return Err(Error::invalid(
            "energy",
            format!("{e_kev} keV must be finite and non-negative"),
        ));
    }
    Ok(NaturalEnergy(e_kev / CONSTANTS.mc2_kev))
}

#[inline]
pub fn natural_to_kev(e: f64) -> f64 {
    e * CONSTANTS.mc2_kev
}

/// Converts a natural cross-section density d3sigma / (r0^2 domega1 dOmega1 dOmega2),
/// with omega1 in units of m c^2, into b/(keV sr^2).
///
/// The same factor converts any density per unit natural energy carried in
/// units of r0^2 (for example b/(keV sr)).
pub fn xsec_natural_to_barn_per_kev_sr2(v: f64) -> Result<f64> {
    if !v.is_finite() {
        return Err(Error::invalid("cross section", format!("{v} is not finite")));
    }
    Ok(v * CONSTANTS.r0_sq_barn() / CONSTANTS.mc2_kev)
}

/// Inverse of [`xsec_natural_to_barn_per_kev_sr2`].
pub fn xsec_barn_per_kev_sr2_to_natural(v: f64) -> Result<f64> {
    if !v.is_finite() {
        return Err(Error::invalid("cross section", format!("{v} is not finite")));
    }
    Ok(v * CONSTANTS.mc2_kev / CONSTANTS.r0_sq_barn())
}

/// Dimensionless product omega_L * tau_L for a photon energy in natural
/// units and a duration in seconds.
pub fn omega_tau(omega: NaturalEnergy, tau_s: f64) -> f64 {
    omega.ev() * tau_s / CONSTANTS.hbar_ev_s
}

/// Photon wavelength in m for a given photon energy.
pub fn photon_wavelength_m(omega: NaturalEnergy) -> f64 {
    CONSTANTS.hc_ev_m() / omega.ev()
}

/// Photon energy for a wavelength in m.
pub fn photon_energy_from_wavelength(lambda_m: f64) -> Result<NaturalEnergy> {
    if !(lambda_m > 0.0) || !lambda_m.is_finite() {
        return Err(Error::invalid("wavelength", format!("{lambda_m} m must be positive")));
    }
    NaturalEnergy::from_ev(CONSTANTS.hc_ev_m() / lambda_m)
}

/// 1/m^2 to 1/barn.
#[inline]
pub fn per_m2_to_per_barn(v: f64) -> f64 {
    v / CONSTANTS.barn_per_m2
}

/// Plain quantities with explicit units, used where the type carries the
/// dimension so that mismatched products do not compile.
macro_rules! quantity {
    ($(#[$meta:meta])* $name:ident, $unit:expr) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
        pub struct $name(pub f64);

        impl $name {
            pub const UNIT: &'static str = $unit;

            #[inline]
            pub fn get(self) -> f64 {
                self.0
            }
        }
    };
}

quantity!(
    /// Luminosity per unit area, 1/m^2.
    PerSquareMeter,
    "1/m^2"
);
quantity!(
    /// Luminosity per electron, 1/b.
    InverseBarn,
    "1/b"
);
quantity!(
    /// Effective cross section after integrating over an acceptance, b.
    Barn,
    "b"
);
quantity!(
    /// Triple-differential yield per electron, pairs/(keV sr^2 electron).
    PairYield,
    "pairs/(keV*sr^2*electron)"
);
quantity!(
    /// Number of detected pairs per pulse.
    PairsPerPulse,
    "pairs/pulse"
);
quantity!(
    /// Detected pair rate, pairs/s.
    PairsPerSecond,
    "pairs/s"
);
quantity!(
    /// Electric field, V/m.
    VoltsPerMeter,
    "V/m"
);
quantity!(
    /// Temperature, K.
    Kelvin,
    "K"
);
