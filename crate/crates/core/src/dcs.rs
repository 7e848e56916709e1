//! Exact triple-differential cross section of incoherent double Compton
//! scattering for an electron of arbitrary velocity.
//!
//! All quantities are in natural units. The cross-section value is
//! returned in units of `r0^2` per unit natural energy per sr^2 and can be
//! converted with [`XsecValue::to_barn_per_kev_sr2`].

use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::kinematics::{ConfigKinematics, ScatterConfig};
use crate::units::{xsec_natural_to_barn_per_kev_sr2, NaturalEnergy, CONSTANTS};
use twofloat::TwoFloat;

/// The six invariants feeding the X function.
///
/// `k1 = -p.k1`, `k2 = -p.k2`, `k3 = p.k`, and the primed set built from
/// the final electron: `k1p = p'.k1`, `k2p = p'.k2`, `k3p = -p'.k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KappaSet {
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub k1p: f64,
    pub k2p: f64,
    pub k3p: f64,
}

impl KappaSet {
    pub fn unprimed(&self) -> [f64; 3] {
        [self.k1, self.k2, self.k3]
    }

    pub fn primed(&self) -> [f64; 3] {
        [self.k1p, self.k2p, self.k3p]
    }

    /// Photon 1 and photon 2 exchanged.
    pub fn swapped(&self) -> Self {
        KappaSet {
            k1: self.k2,
            k2: self.k1,
            k1p: self.k2p,
            k2p: self.k1p,
            ..*self
        }
    }
}

/// Scalar combinations of a [`KappaSet`] appearing in X.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Abbreviations {
    /// sum 1/k_i
    pub a: f64,
    /// sum 1/k'_i
    pub b: f64,
    /// sum 1/(k_i k'_i)
    pub c: f64,
    /// sum k_i
    pub x: f64,
    /// sum k_i k'_i
    pub z: f64,
    /// product k_i
    pub big_a: f64,
    /// product k'_i
    pub big_b: f64,
    /// sum (k_i/k'_i + k'_i/k_i)
    pub rho: f64,
}

impl Abbreviations {
    pub fn new(ks: &KappaSet) -> Result<Self> {
        let k = ks.unprimed();
        let kp = ks.primed();
        let big_a = k[0] * k[1] * k[2];
        let big_b = kp[0] * kp[1] * kp[2];
        if big_a == 0.0 || !big_a.is_finite() {
            return Err(Error::InfraredSingularity("product of kappa vanishes"));
        }
        if big_b == 0.0 || !big_b.is_finite() {
            return Err(Error::InfraredSingularity("product of kappa' vanishes"));
        }
        let mut ab = Abbreviations {
            a: 0.0,
            b: 0.0,
            c: 0.0,
            x: 0.0,
            z: 0.0,
            big_a,
            big_b,
            rho: 0.0,
        };
        for i in 0..3 {
            ab.a += 1.0 / k[i];
            ab.b += 1.0 / kp[i];
            ab.c += 1.0 / (k[i] * kp[i]);
            ab.x += k[i];
            ab.z += k[i] * kp[i];
            ab.rho += k[i] / kp[i] + kp[i] / k[i];
        }
        Ok(ab)
    }
}

/// Triple-differential cross section together with its unit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct XsecValue {
    pub value: f64,
    pub units: XsecUnits,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum XsecUnits {
    /// `r0^2 / (m c^2 sr^2)`
    Natural,
    BarnPerKevSr2,
}

impl XsecValue {
    pub fn natural(value: f64) -> Self {
        XsecValue {
            value,
            units: XsecUnits::Natural,
        }
    }

    pub fn to_barn_per_kev_sr2(self) -> f64 {
        match self.units {
            XsecUnits::BarnPerKevSr2 => self.value,
            XsecUnits::Natural => {
                xsec_natural_to_barn_per_kev_sr2(self.value).expect("cross-section values are finite")
            }
        }
    }
}

fn kappas_unchecked(kin: &ConfigKinematics, omega1: f64, omega2: f64) -> KappaSet {
    let w = kin.cfg.omega.get();
    let an = &kin.angles;
    let k1 = omega1 * kin.g1;
    let k2 = omega2 * kin.g2;
    let k3 = -kin.incident;
    let pair = omega1 * omega2 * an.one_minus_cos12;
    let kk1 = w * omega1 * an.one_minus_cos1;
    let kk2 = w * omega2 * an.one_minus_cos2;
    KappaSet {
        k1,
        k2,
        k3,
        k1p: -k1 - kk1 + pair,
        k2p: -k2 - kk2 + pair,
        k3p: -k3 - kk1 - kk2,
    }
}

/// Invariants for a kinematically consistent `(omega1, omega2)` pair.
pub fn kappas(cfg: &ScatterConfig, omega1: NaturalEnergy, omega2: NaturalEnergy) -> Result<KappaSet> {
    let kin = ConfigKinematics::new(cfg);
    let expected = kin.omega2(omega1.get())?;
    let scale = kin.omega1_max().max(omega2.get());
    let residual = (expected - omega2.get()).abs() / scale;
    if residual > 1e-9 {
        return Err(Error::InconsistentKinematics {
            detail: "omega2 does not follow from omega1 for this geometry",
            residual,
        });
    }
    Ok(kappas_unchecked(&kin, omega1.get(), omega2.get()))
}

// Evaluated in double-double: the abbreviations cancel among themselves
// (s = ab - c in particular) long before the terms are summed, so plain f64
// loses far more than the term-level condition number suggests.
// twofloat's division forms its residual in plain f64 and so is only
// f64-accurate; one Newton step with a double-double residual fixes that.
fn recip(v: TwoFloat) -> TwoFloat {
    let r0 = 1.0 / v.hi();
    r0 + r0 * (1.0 - v * r0)
}

fn x_terms(ks: &KappaSet) -> Result<[TwoFloat; 11]> {
    let k = ks.unprimed().map(TwoFloat::from);
    let kp = ks.primed().map(TwoFloat::from);
    let big_a = k[0] * k[1] * k[2];
    let big_b = kp[0] * kp[1] * kp[2];
    if big_a.hi() == 0.0 || !big_a.hi().is_finite() {
        return Err(Error::InfraredSingularity("product of kappa vanishes"));
    }
    if big_b.hi() == 0.0 || !big_b.hi().is_finite() {
        return Err(Error::InfraredSingularity("product of kappa' vanishes"));
    }
    let zero = TwoFloat::from(0.0);
    let (mut a, mut b, mut c, mut x, mut z, mut rho) = (zero, zero, zero, zero, zero, zero);
    for i in 0..3 {
        let (rk, rkp) = (recip(k[i]), recip(kp[i]));
        a += rk;
        b += rkp;
        c += rk * rkp;
        x += k[i];
        z += k[i] * kp[i];
        rho += k[i] * rkp + kp[i] * rk;
    }
    let s = a * b - c;
    let q = 4.0 * recip(big_a * big_b);
    Ok([
        2.0 * s * (a + b) * (x + 2.0),
        -2.0 * s * s,
        -16.0 * s,
        -2.0 * x * (a * a + b * b),
        -8.0 * c,
        q * (big_a + big_b) * (x * x + x),
        -q * (a * big_a + b * big_b) * (2.0 * x + z * (1.0 - x)),
        q * x * x * x * (1.0 - z),
        q * 2.0 * z * x,
        -2.0 * rho * a * b,
        -2.0 * rho * c * (1.0 - x),
    ])
}

/// The cross-section function X of the six invariants.
///
/// Points on the zero-recoil manifold (where X cancels to zero
/// analytically) return exactly zero instead of rounding noise of either
/// sign.
pub fn x_function(ks: &KappaSet) -> Result<f64> {
    let terms = x_terms(ks)?;
    let mut sum = TwoFloat::from(0.0);
    let mut scale = 0.0f64;
    for t in terms {
        sum += t;
        scale = scale.max(t.hi().abs());
    }
    let value = sum.hi() + sum.lo();
    if !value.is_finite() || !scale.is_finite() {
        return Err(Error::InfraredSingularity("X is not finite"));
    }
    // the invariants are only f64; below their resolution of the largest
    // term the sign is meaningless
    if value.abs() <= 64.0 * f64::EPSILON * scale {
        return Ok(0.0);
    }
    Ok(value)
}

/// Condition number of X: the summed magnitude of its terms over |X|.
/// X is evaluated in double-double, so this bounds the working-precision
/// error well below f64 resolution; values near `1 / f64::EPSILON` mean the
/// f64 invariants themselves no longer resolve X.
pub fn x_condition(ks: &KappaSet) -> Result<f64> {
    let terms = x_terms(ks)?;
    let mag: f64 = terms.iter().map(|t| t.hi().abs()).sum();
    Ok(mag / x_function(ks)?.abs())
}

/// Overall normalization `alpha / (4 pi)^2` in front of X.
pub fn prefactor() -> f64 {
    CONSTANTS.alpha_qed / (16.0 * PI * PI)
}

/// Cross section at photon-1 energy `omega1` for a precomputed geometry,
/// without an infrared cutoff.
pub fn triple_diff_xsec_at(kin: &ConfigKinematics, omega1: f64) -> Result<f64> {
    let omega2 = kin.omega2(omega1)?;
    if omega2 == 0.0 {
        return Err(Error::InfraredSingularity("omega2 vanishes at the kinematic edge"));
    }
    let ks = kappas_unchecked(kin, omega1, omega2);
    let x = x_function(&ks)?;
    let den = kin.d2 - omega1 * kin.angles.one_minus_cos12;
    let v = prefactor() * x * omega1 * omega2 / (kin.incident * den);
    if v < 0.0 {
        return Err(Error::ForbiddenConfiguration(format!(
            "negative cross section {v:e} at omega1 = {omega1:e}"
        )));
    }
    Ok(v)
}

/// `d3 sigma / (d omega1 dOmega1' dOmega2')` in natural units.
pub fn triple_diff_xsec(cfg: &ScatterConfig, omega1: NaturalEnergy) -> Result<XsecValue> {
    let kin = ConfigKinematics::new(cfg);
    triple_diff_xsec_at(&kin, omega1.get()).map(XsecValue::natural)
}

/// As [`triple_diff_xsec`], but reports [`Error::BelowInfraredCutoff`] when
/// either photon energy is below `cutoff`.
pub fn triple_diff_xsec_cut(cfg: &ScatterConfig, omega1: NaturalEnergy, cutoff: NaturalEnergy) -> Result<XsecValue> {
    let kin = ConfigKinematics::new(cfg);
    let w1 = omega1.get();
    if w1 < cutoff.get() {
        return Err(Error::BelowInfraredCutoff {
            omega: w1,
            cutoff: cutoff.get(),
        });
    }
    let w2 = kin.omega2(w1)?;
    if w2 < cutoff.get() {
        return Err(Error::BelowInfraredCutoff {
            omega: w2,
            cutoff: cutoff.get(),
        });
    }
    triple_diff_xsec_at(&kin, w1).map(XsecValue::natural)
}

/// Both photons emitted into the same direction: `4 pi` times the
/// triple-differential value, per unit energy and per sr.
pub fn same_direction_double_diff(cfg: &ScatterConfig, omega1: NaturalEnergy) -> Result<XsecValue> {
    let n1 = cfg.photon1_direction();
    let n2 = cfg.photon2_direction();
    let sep = crate::kinematics::one_minus_cos_between(n1, n2);
    if sep > 1e-20 {
        return Err(Error::NotCollinear(format!(
            "photon directions differ (1 - cos theta12 = {sep:e})"
        )));
    }
    let v = triple_diff_xsec(cfg, omega1)?;
    Ok(XsecValue {
        value: 4.0 * PI * v.value,
        units: v.units,
    })
}
