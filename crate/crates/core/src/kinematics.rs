//! Four-vector algebra and the 2 -> 3 kinematics of double Compton scattering.
//!
//! Frame convention: the incident electron moves along +z. The incident
//! photon lies in the x-z plane at angle `alpha` to the electron axis, on
//! the +x side, so the plane of incidence is the x-z plane and azimuths
//! are measured from it, right-handed about +z. Emission angles
//! `(theta', phi')` of the outgoing photons are polar angles about +z.
//! Cross sections depend only on `cos(phi1' - phi2')` and `cos phi'`, so
//! the orientation sign of the azimuth has no observable effect.

use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::units::NaturalEnergy;

/// Minimum Lorentz factor accepted by the ultra-relativistic approximations.
pub const MIN_GAMMA_APPROX: f64 = 10.0;

/// Four-vector `(t, x, y, z)` with signature (-+++).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FourVector {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl FourVector {
    pub const fn new(t: f64, x: f64, y: f64, z: f64) -> Self {
        FourVector { t, x, y, z }
    }

    /// Massless vector with energy `energy` along the unit vector `dir`.
    pub fn photon(energy: f64, dir: [f64; 3]) -> Self {
        FourVector::new(energy, energy * dir[0], energy * dir[1], energy * dir[2])
    }

    /// Minkowski product with signature (-+++).
    #[inline]
    pub fn dot(&self, other: &FourVector) -> f64 {
        -self.t * other.t + self.x * other.x + self.y * other.y + self.z * other.z
    }

    #[inline]
    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn spatial(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    /// Components in a frame moving with velocity `beta` along +z.
    pub fn boost_z(&self, beta: f64) -> FourVector {
        let gamma = 1.0 / ((1.0 - beta) * (1.0 + beta)).sqrt();
        FourVector::new(
            gamma * (self.t - beta * self.z),
            self.x,
            self.y,
            gamma * (self.z - beta * self.t),
        )
    }
}

impl Add for FourVector {
    type Output = FourVector;
    fn add(self, o: FourVector) -> FourVector {
        FourVector::new(self.t + o.t, self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for FourVector {
    type Output = FourVector;
    fn sub(self, o: FourVector) -> FourVector {
        FourVector::new(self.t - o.t, self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for FourVector {
    type Output = FourVector;
    fn neg(self) -> FourVector {
        FourVector::new(-self.t, -self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for FourVector {
    type Output = FourVector;
    fn mul(self, s: f64) -> FourVector {
        FourVector::new(self.t * s, self.x * s, self.y * s, self.z * s)
    }
}

/// Unit vector for polar angle `theta` and azimuth `phi` about +z.
#[inline]
pub fn direction(theta: f64, phi: f64) -> [f64; 3] {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    [st * cp, st * sp, ct]
}

/// Polar angle and azimuth in `[0, 2pi)` of a unit vector.
pub fn angles_of(dir: [f64; 3]) -> (f64, f64) {
    let rho = dir[0].hypot(dir[1]);
    let theta = rho.atan2(dir[2]);
    let phi = dir[1].atan2(dir[0]).rem_euclid(TAU);
    (theta, phi)
}

/// `1 - u.v` for unit vectors, evaluated as `|u - v|^2 / 2` so that small
/// angles keep full relative precision.
#[inline]
pub fn one_minus_cos_between(u: [f64; 3], v: [f64; 3]) -> f64 {
    let d = [u[0] - v[0], u[1] - v[1], u[2] - v[2]];
    0.5 * (d[0] * d[0] + d[1] * d[1] + d[2] * d[2])
}

/// Incident electron, moving along +z.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ElectronState {
    gamma: f64,
    beta: f64,
    one_minus_beta: f64,
}

impl ElectronState {
    pub fn new(gamma: f64) -> Result<Self> {
        if !gamma.is_finite() || gamma < 1.0 {
            return Err(Error::invalid("gamma", format!("{gamma} must be finite and >= 1")));
        }
        let inv_g2 = 1.0 / (gamma * gamma);
        let beta = (1.0 - inv_g2).sqrt();
        // 1 - beta = 1 / (gamma^2 (1 + beta)) without cancellation
        let one_minus_beta = inv_g2 / (1.0 + beta);
        Ok(ElectronState {
            gamma,
            beta,
            one_minus_beta,
        })
    }

    pub fn from_beta(beta: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&beta) {
            return Err(Error::invalid("beta", format!("{beta} must lie in [0, 1)")));
        }
        Self::new(1.0 / ((1.0 - beta) * (1.0 + beta)).sqrt())
    }

    pub fn at_rest() -> Self {
        ElectronState {
            gamma: 1.0,
            beta: 0.0,
            one_minus_beta: 1.0,
        }
    }

    #[inline]
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    #[inline]
    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Unit vector of motion.
    pub fn axis(&self) -> [f64; 3] {
        [0.0, 0.0, 1.0]
    }

    /// `1 - beta cos(theta)`, stable for `beta -> 1, theta -> 0`.
    #[inline]
    pub fn one_minus_beta_cos(&self, theta: f64) -> f64 {
        let s = (0.5 * theta).sin();
        self.one_minus_beta + 2.0 * self.beta * s * s
    }

    pub fn momentum(&self) -> FourVector {
        FourVector::new(self.gamma, 0.0, 0.0, self.gamma * self.beta)
    }
}

/// Incident photon energy, electron state and emission angles of both
/// outgoing photons about the electron axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScatterConfig {
    pub omega: NaturalEnergy,
    /// Angle between incident photon and electron axis.
    pub alpha: f64,
    pub theta1p: f64,
    pub phi1p: f64,
    pub theta2p: f64,
    pub phi2p: f64,
    pub electron: ElectronState,
}

fn check_polar(what: &'static str, theta: f64) -> Result<()> {
    if !theta.is_finite() || !(0.0..=PI).contains(&theta) {
        return Err(Error::invalid(what, format!("{theta} rad outside [0, pi]")));
    }
    Ok(())
}

fn wrap_azimuth(what: &'static str, phi: f64) -> Result<f64> {
    if !phi.is_finite() {
        return Err(Error::invalid(what, format!("{phi} is not finite")));
    }
    let w = phi.rem_euclid(TAU);
    // rem_euclid can round up to exactly 2pi for tiny negative input
    Ok(if w >= TAU { 0.0 } else { w })
}

impl ScatterConfig {
    /// Validates the angles and normalizes azimuths into `[0, 2pi)`.
    pub fn new(
        omega: NaturalEnergy,
        electron: ElectronState,
        alpha: f64,
        (theta1p, phi1p): (f64, f64),
        (theta2p, phi2p): (f64, f64),
    ) -> Result<Self> {
        if !(omega.get() > 0.0) {
            return Err(Error::invalid("omega", "incident photon energy must be positive"));
        }
        check_polar("alpha", alpha)?;
        check_polar("theta1'", theta1p)?;
        check_polar("theta2'", theta2p)?;
        Ok(ScatterConfig {
            omega,
            alpha,
            theta1p,
            phi1p: wrap_azimuth("phi1'", phi1p)?,
            theta2p,
            phi2p: wrap_azimuth("phi2'", phi2p)?,
            electron,
        })
    }

    /// Electron at rest with the incident photon along the polar axis, so
    /// the primed angles coincide with the angles to the incident photon.
    pub fn fixed_target(omega: NaturalEnergy, photon1: (f64, f64), photon2: (f64, f64)) -> Result<Self> {
        Self::new(omega, ElectronState::at_rest(), 0.0, photon1, photon2)
    }

    /// Same incident channel with new emission angles.
    pub fn with_angles(&self, photon1: (f64, f64), photon2: (f64, f64)) -> Result<Self> {
        Self::new(self.omega, self.electron, self.alpha, photon1, photon2)
    }

    /// Detector settings of photon 1 and photon 2 exchanged.
    pub fn swapped(&self) -> Self {
        ScatterConfig {
            theta1p: self.theta2p,
            phi1p: self.phi2p,
            theta2p: self.theta1p,
            phi2p: self.phi1p,
            ..*self
        }
    }

    pub fn incident_direction(&self) -> [f64; 3] {
        [self.alpha.sin(), 0.0, self.alpha.cos()]
    }

    pub fn photon1_direction(&self) -> [f64; 3] {
        direction(self.theta1p, self.phi1p)
    }

    pub fn photon2_direction(&self) -> [f64; 3] {
        direction(self.theta2p, self.phi2p)
    }

    pub fn incident_photon(&self) -> FourVector {
        FourVector::photon(self.omega.get(), self.incident_direction())
    }
}

/// Angles of the outgoing photons relative to the incident photon and to
/// each other. The `one_minus_cos*` fields carry `1 - cos` at full
/// precision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmissionAngles {
    pub theta1: f64,
    pub theta2: f64,
    pub theta12: f64,
    pub one_minus_cos1: f64,
    pub one_minus_cos2: f64,
    pub one_minus_cos12: f64,
}

impl EmissionAngles {
    pub fn cos_theta1(&self) -> f64 {
        1.0 - self.one_minus_cos1
    }
    pub fn cos_theta2(&self) -> f64 {
        1.0 - self.one_minus_cos2
    }
    pub fn cos_theta12(&self) -> f64 {
        1.0 - self.one_minus_cos12
    }
}

fn angle_from_omc(omc: f64) -> f64 {
    // 1 - cos t = 2 sin^2(t/2)
    2.0 * (0.5 * omc).sqrt().min(1.0).asin()
}

pub fn emission_angles(cfg: &ScatterConfig) -> EmissionAngles {
    let k = cfg.incident_direction();
    let n1 = cfg.photon1_direction();
    let n2 = cfg.photon2_direction();
    let omc1 = one_minus_cos_between(k, n1);
    let omc2 = one_minus_cos_between(k, n2);
    let omc12 = one_minus_cos_between(n1, n2);
    EmissionAngles {
        theta1: angle_from_omc(omc1),
        theta2: angle_from_omc(omc2),
        theta12: angle_from_omc(omc12),
        one_minus_cos1: omc1,
        one_minus_cos2: omc2,
        one_minus_cos12: omc12,
    }
}

/// Precomputed energy bookkeeping for one configuration.
///
/// With `N = gamma omega (1 - beta cos alpha)`,
/// `D1 = gamma (1 - beta cos theta1') + omega (1 - cos theta1)` and
/// `D2 = gamma (1 - beta cos theta2') + omega (1 - cos theta2)`,
/// the second photon energy is `(N - omega1 D1) / (D2 - omega1 (1 - cos theta12))`.
#[derive(Debug, Clone, Copy)]
pub struct ConfigKinematics {
    pub cfg: ScatterConfig,
    pub angles: EmissionAngles,
    /// `gamma omega (1 - beta cos alpha)`, equal to `-kappa3`.
    pub incident: f64,
    pub d1: f64,
    pub d2: f64,
    /// `gamma (1 - beta cos theta1')`
    pub g1: f64,
    /// `gamma (1 - beta cos theta2')`
    pub g2: f64,
}

impl ConfigKinematics {
    pub fn new(cfg: &ScatterConfig) -> Self {
        let angles = emission_angles(cfg);
        let e = &cfg.electron;
        let w = cfg.omega.get();
        let g1 = e.gamma() * e.one_minus_beta_cos(cfg.theta1p);
        let g2 = e.gamma() * e.one_minus_beta_cos(cfg.theta2p);
        ConfigKinematics {
            cfg: *cfg,
            angles,
            incident: e.gamma() * w * e.one_minus_beta_cos(cfg.alpha),
            d1: g1 + w * angles.one_minus_cos1,
            d2: g2 + w * angles.one_minus_cos2,
            g1,
            g2,
        }
    }

    /// Largest photon-1 energy, reached when photon 2 carries no energy.
    pub fn omega1_max(&self) -> f64 {
        self.incident / self.d1
    }

    fn denominator(&self, omega1: f64) -> f64 {
        self.d2 - omega1 * self.angles.one_minus_cos12
    }

    /// Photon-2 energy for a photon-1 energy, in natural units.
    pub fn omega2(&self, omega1: f64) -> Result<f64> {
        if !(omega1 > 0.0) || !omega1.is_finite() {
            return Err(Error::invalid("omega1", format!("{omega1} must be positive")));
        }
        let mut num = self.incident - omega1 * self.d1;
        if num < 0.0 {
            if -num <= 8.0 * f64::EPSILON * self.incident {
                num = 0.0;
            } else {
                return Err(Error::KinematicallyForbidden {
                    omega1,
                    omega1_max: self.omega1_max(),
                });
            }
        }
        let den = self.denominator(omega1);
        if !(den > 0.0) {
            return Err(Error::ForbiddenConfiguration(format!(
                "non-positive energy denominator {den:e} at omega1 = {omega1:e}"
            )));
        }
        Ok(num / den)
    }

    /// `d omega2 / d omega1` at fixed angles (always <= 0 inside phase space).
    pub fn domega2_domega1(&self, omega1: f64) -> f64 {
        let den = self.denominator(omega1);
        (self.incident * self.angles.one_minus_cos12 - self.d1 * self.d2) / (den * den)
    }

    /// Photon-1 energy at which photon 2 carries exactly `omega2`; inverse
    /// of [`Self::omega2`].
    pub fn omega1_for_omega2(&self, omega2: f64) -> f64 {
        (self.incident - omega2 * self.d2) / (self.d1 - omega2 * self.angles.one_minus_cos12)
    }
}

pub fn omega2(cfg: &ScatterConfig, omega1: NaturalEnergy) -> Result<NaturalEnergy> {
    NaturalEnergy::new(ConfigKinematics::new(cfg).omega2(omega1.get())?)
}

/// Independent of the photon-2 setting.
pub fn omega1_max(cfg: &ScatterConfig) -> NaturalEnergy {
    let k = ConfigKinematics::new(cfg);
    NaturalEnergy::new(k.omega1_max()).expect("finite for valid configurations")
}

fn check_gamma_approx(gamma: f64) -> Result<()> {
    if !gamma.is_finite() || gamma < MIN_GAMMA_APPROX {
        return Err(Error::ApproximationInvalid {
            gamma,
            min_gamma: MIN_GAMMA_APPROX,
        });
    }
    Ok(())
}

/// Ultra-relativistic photon-1 edge `omega_m / (1 + (theta1'/theta0')^2)`
/// with `x = 4 gamma omega_L cos^2(alpha0 / 2)`, `omega_m = gamma x / (1 + x)`
/// and `theta0' = sqrt(1 + x) / gamma`. `alpha0 = pi - alpha` is zero for a
/// head-on collision.
pub fn omega1_max_approx(gamma: f64, omega_l: NaturalEnergy, alpha0: f64, theta1p: f64) -> Result<NaturalEnergy> {
    check_gamma_approx(gamma)?;
    let c = (0.5 * alpha0).cos();
    let x = 4.0 * gamma * omega_l.get() * c * c;
    let omega_m = gamma * x / (1.0 + x);
    let theta0 = (1.0 + x).sqrt() / gamma;
    let r = theta1p / theta0;
    NaturalEnergy::new(omega_m / (1.0 + r * r))
}

/// Final electron four-momentum from conservation, `p' = p + k - k1 - k2`.
pub fn reconstruct_final_electron(
    cfg: &ScatterConfig,
    omega1: NaturalEnergy,
    omega2: NaturalEnergy,
) -> Result<FourVector> {
    let kin = ConfigKinematics::new(cfg);
    let expected = kin.omega2(omega1.get())?;
    let scale = kin.omega1_max().max(omega2.get()).max(f64::MIN_POSITIVE);
    let mismatch = (expected - omega2.get()).abs() / scale;
    if mismatch > 1e-9 {
        return Err(Error::InconsistentKinematics {
            detail: "omega2 does not match omega1 for this geometry",
            residual: mismatch,
        });
    }
    let p_final = cfg.electron.momentum() + cfg.incident_photon()
        - FourVector::photon(omega1.get(), cfg.photon1_direction())
        - FourVector::photon(omega2.get(), cfg.photon2_direction());
    let shell = p_final.norm_sq() + 1.0;
    if shell.abs() > 1e-9 * p_final.t.abs().max(1.0) {
        return Err(Error::InconsistentKinematics {
            detail: "final electron off mass shell",
            residual: shell,
        });
    }
    Ok(p_final)
}

/// Normalized laser strength `a_L`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct LaserStrength(f64);

impl LaserStrength {
    pub fn new(a: f64) -> Result<Self> {
        if !a.is_finite() || a < 0.0 {
            return Err(Error::invalid("a_L", format!("{a} must be finite and >= 0")));
        }
        Ok(LaserStrength(a))
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }

    /// Effective electron mass `sqrt(1 + a_L^2)` inside the wave.
    pub fn effective_mass(self) -> f64 {
        (1.0 + self.0 * self.0).sqrt()
    }
}

/// Quasimomentum `q = p - a_L^2 / (2 k.p) k` of an electron in a plane wave.
pub fn quasimomentum(p: &FourVector, k: &FourVector, a_l: LaserStrength) -> Result<FourVector> {
    let kp = k.dot(p);
    if kp == 0.0 || !kp.is_finite() {
        return Err(Error::DegenerateGeometry("k.p vanishes"));
    }
    let a2 = a_l.get() * a_l.get();
    Ok(*p - *k * (a2 / (2.0 * kp)))
}

/// Photon-1 edge for a laser-dressed electron,
/// `2 gamma^2 omega_L (1 - beta cos alpha) / (1 + a_L^2 + (gamma theta1')^2)`.
pub fn omega1_max_dressed(
    gamma: f64,
    omega_l: NaturalEnergy,
    alpha: f64,
    theta1p: f64,
    a_l: LaserStrength,
) -> Result<NaturalEnergy> {
    check_gamma_approx(gamma)?;
    let e = ElectronState::new(gamma)?;
    let gt = gamma * theta1p;
    let a2 = a_l.get() * a_l.get();
    NaturalEnergy::new(2.0 * gamma * gamma * omega_l.get() * e.one_minus_beta_cos(alpha) / (1.0 + a2 + gt * gt))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::kev_to_natural;

    fn kev(v: f64) -> NaturalEnergy {
        kev_to_natural(v).unwrap()
    }

    fn fig2(omega1_phi: f64, omega2_phi: f64, theta: f64) -> ScatterConfig {
        ScatterConfig::fixed_target(kev(100.0), (theta, omega1_phi), (theta, omega2_phi)).unwrap()
    }

    #[test]
    fn aligned_axes_keep_theta() {
        let cfg = ScatterConfig::new(kev(50.0), ElectronState::new(3.0).unwrap(), 0.0, (0.7, 1.9), (0.2, 0.0)).unwrap();
        let a = emission_angles(&cfg);
        assert!((a.theta1 - 0.7).abs() < 1e-12);
    }

    #[test]
    fn antipodal_azimuths_give_double_angle() {
        let cfg = fig2(0.0, PI, 0.4);
        let a = emission_angles(&cfg);
        assert!((a.cos_theta12() - (0.8f64).cos()).abs() < 1e-12);
    }

    #[test]
    fn head_on_reverses_polar_angle() {
        let cfg = ScatterConfig::new(kev(1.0), ElectronState::new(2.0).unwrap(), PI, (0.5, 0.0), (0.1, 0.0)).unwrap();
        let a = emission_angles(&cfg);
        assert!((a.theta1 - (PI - 0.5)).abs() < 1e-12);
    }

    #[test]
    fn cosine_identities_hold() {
        let cfg = ScatterConfig::new(kev(30.0), ElectronState::new(1.7).unwrap(), 1.1, (0.9, 2.2), (2.4, 5.1)).unwrap();
        let a = emission_angles(&cfg);
        let (ca, sa) = (cfg.alpha.cos(), cfg.alpha.sin());
        let c1 = ca * cfg.theta1p.cos() + sa * cfg.theta1p.sin() * cfg.phi1p.cos();
        let c2 = ca * cfg.theta2p.cos() + sa * cfg.theta2p.sin() * cfg.phi2p.cos();
        let c12 = cfg.theta1p.cos() * cfg.theta2p.cos()
            + cfg.theta1p.sin() * cfg.theta2p.sin() * (cfg.phi1p - cfg.phi2p).cos();
        assert!((a.cos_theta1() - c1).abs() < 1e-12);
        assert!((a.cos_theta2() - c2).abs() < 1e-12);
        assert!((a.cos_theta12() - c12).abs() < 1e-12);
        assert!((a.theta1.cos() - c1).abs() < 1e-12);
    }

    #[test]
    fn fixed_target_edge_at_two_radians() {
        let cfg = fig2(0.0, PI, 2.0);
        let w1max = omega1_max(&cfg).kev();
        assert!((w1max - 78.30).abs() < 0.01, "{w1max}");
        let forward = fig2(0.0, 0.0, 0.0);
        assert!((omega1_max(&forward).kev() - 100.0).abs() < 1e-10);
    }

    #[test]
    fn omega2_vanishes_at_edge() {
        let cfg = fig2(0.0, PI, 2.0);
        let w1 = omega1_max(&cfg);
        assert_eq!(omega2(&cfg, w1).unwrap().get(), 0.0);
        let above = NaturalEnergy::new(w1.get() * 1.001).unwrap();
        assert!(matches!(omega2(&cfg, above), Err(Error::KinematicallyForbidden { .. })));
    }

    #[test]
    fn same_direction_sum_rule() {
        let cfg = fig2(0.3, 0.3, 2.0);
        let wp = omega1_max(&cfg).get();
        let w1 = kev(40.0);
        let w2 = omega2(&cfg, w1).unwrap().get();
        assert!((w1.get() + w2 - wp).abs() < 1e-10);
        assert!(((w1.kev() + w2 * 510.999) - 78.30).abs() < 0.01);
    }

    #[test]
    fn detector_two_does_not_move_the_edge() {
        let a = fig2(0.0, PI, 2.0);
        let b = a.with_angles((2.0, 0.0), (0.3, 4.0)).unwrap();
        assert_eq!(omega1_max(&a), omega1_max(&b));
    }

    #[test]
    fn inverse_head_on_edge() {
        let wl = NaturalEnergy::from_ev(2.5).unwrap();
        let cfg = ScatterConfig::new(wl, ElectronState::new(300.0).unwrap(), PI, (0.0, 0.0), (0.0, PI)).unwrap();
        let exact = omega1_max(&cfg).kev();
        assert!((exact - 894.7).abs() < 0.1, "{exact}");
        let x = 4.0 * 300.0 * wl.get();
        let formula = 4.0 * 300.0f64.powi(2) * wl.kev() / (1.0 + x);
        assert!(((exact - formula) / formula).abs() < 1e-3);
    }

    #[test]
    fn approximate_edge() {
        let wl = NaturalEnergy::from_ev(2.5).unwrap();
        let x = 4.0 * 300.0 * wl.get();
        assert!((x - 5.871e-3).abs() < 1e-6);
        let on_axis = omega1_max_approx(300.0, wl, 0.0, 0.0).unwrap();
        assert!((on_axis.kev() - 894.7).abs() < 0.1);
        let theta0 = (1.0 + x).sqrt() / 300.0;
        let half = omega1_max_approx(300.0, wl, 0.0, theta0).unwrap();
        assert!((half.get() - 0.5 * on_axis.get()).abs() < 1e-14);
        assert!(matches!(
            omega1_max_approx(9.0, wl, 0.0, 0.0),
            Err(Error::ApproximationInvalid { .. })
        ));
        for i in 0..=30 {
            let tp = 3.0 / 300.0 * i as f64 / 30.0;
            let cfg = ScatterConfig::new(wl, ElectronState::new(300.0).unwrap(), PI, (tp, 0.0), (0.0, 0.0)).unwrap();
            let exact = omega1_max(&cfg).get();
            let approx = omega1_max_approx(300.0, wl, 0.0, tp).unwrap().get();
            assert!(((approx - exact) / exact).abs() < 0.01, "theta' = {tp}");
        }
    }

    #[test]
    fn elastic_edge_reconstructs_single_compton() {
        let cfg = fig2(0.0, PI, 2.0);
        let w1 = omega1_max(&cfg);
        let p = reconstruct_final_electron(&cfg, w1, NaturalEnergy::ZERO).unwrap();
        // 2-body Compton recoil: p' = p + k - k'
        let single =
            cfg.electron.momentum() + cfg.incident_photon() - FourVector::photon(w1.get(), cfg.photon1_direction());
        assert!((p.t - single.t).abs() < 1e-14);
        assert!((p.x - single.x).abs() < 1e-14);
        assert!((p.z - single.z).abs() < 1e-14);
        assert!(p.t >= 1.0);
    }

    #[test]
    fn reconstruct_rejects_inconsistent_pair() {
        let cfg = fig2(0.0, PI, 2.0);
        assert!(matches!(
            reconstruct_final_electron(&cfg, kev(42.0), kev(36.3)),
            Err(Error::InconsistentKinematics { .. })
        ));
    }

    #[test]
    fn quasimomentum_shell() {
        let e = ElectronState::new(300.0).unwrap();
        let p = e.momentum();
        let k = FourVector::photon(NaturalEnergy::from_ev(2.5).unwrap().get(), [0.0, 0.0, -1.0]);
        assert_eq!(quasimomentum(&p, &k, LaserStrength::new(0.0).unwrap()).unwrap(), p);
        let a = LaserStrength::new(0.85).unwrap();
        let q = quasimomentum(&p, &k, a).unwrap();
        assert!(((q.norm_sq() + 1.7225) / 1.7225).abs() < 1e-10);
        assert!((a.effective_mass() - 1.3124).abs() < 1e-4);
        let parallel = FourVector::photon(1.0, [0.0, 0.0, 1.0]);
        let massless = FourVector::photon(2.0, [0.0, 0.0, 1.0]);
        assert!(quasimomentum(&massless, &parallel, a).is_err());
    }

    #[test]
    fn dressed_edge() {
        let wl = NaturalEnergy::from_ev(2.5).unwrap();
        let zero = LaserStrength::new(0.0).unwrap();
        let a = LaserStrength::new(0.85).unwrap();
        let undressed = omega1_max_dressed(300.0, wl, PI, 0.0, zero).unwrap();
        let dressed = omega1_max_dressed(300.0, wl, PI, 0.0, a).unwrap();
        assert!((undressed.kev() - 900.0).abs() < 0.01);
        assert!((dressed.kev() - 900.0 / 1.7225).abs() < 0.01);
        let reduction = 1.0 - dressed.get() / undressed.get();
        assert!((reduction - 0.40).abs() < 0.03);
        // (gamma theta')^2 = 1 + a^2 halves the on-axis value
        let tp = 1.7225f64.sqrt() / 300.0;
        let half = omega1_max_dressed(300.0, wl, PI, tp, a).unwrap();
        assert!((half.get() - 0.5 * dressed.get()).abs() < 1e-12);
        // undressed limit agrees with the approximate edge for x << 1
        let approx = omega1_max_approx(300.0, wl, 0.0, 0.0).unwrap();
        assert!(((undressed.get() - approx.get()) / approx.get()).abs() < 0.01);
    }

    #[test]
    fn electron_state_validation() {
        assert!(ElectronState::new(0.5).is_err());
        assert!(ElectronState::new(f64::NAN).is_err());
        let e = ElectronState::new(300.0).unwrap();
        assert!((e.one_minus_beta_cos(0.0) - (1.0 - e.beta())).abs() < 1e-15);
        let b = ElectronState::from_beta(0.6).unwrap();
        assert!((b.gamma() - 1.25).abs() < 1e-12);
    }

    #[test]
    fn config_rejects_bad_angles() {
        assert!(ScatterConfig::fixed_target(kev(10.0), (4.0, 0.0), (1.0, 0.0)).is_err());
        assert!(ScatterConfig::fixed_target(kev(0.0), (1.0, 0.0), (1.0, 0.0)).is_err());
        let c = ScatterConfig::fixed_target(kev(10.0), (1.0, -0.5), (1.0, 7.0)).unwrap();
        assert!((0.0..TAU).contains(&c.phi1p) && (0.0..TAU).contains(&c.phi2p));
    }
}
