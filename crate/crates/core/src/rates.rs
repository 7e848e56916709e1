//! Experiment-level arithmetic: luminosities, yields, fixed-target pair
//! rates and the laser/undulator diagnostics reported with them.

use serde::Serialize;
use std::f64::consts::{PI, TAU};

use crate::dcs::triple_diff_xsec;
use crate::error::{Error, Result};
use crate::kinematics::{LaserStrength, ScatterConfig};
use crate::quadrature::{detector_rate_integral, AcceptanceMode};
use crate::units::{
    per_m2_to_per_barn, photon_energy_from_wavelength, Barn, InverseBarn, Kelvin, NaturalEnergy, PairYield,
    PairsPerPulse, PairsPerSecond, PerSquareMeter, VoltsPerMeter, CONSTANTS,
};

/// Luminosity per electron quoted in the literature for the 2.5 eV,
/// 1e18 W/cm^2, 50 fs laser. The formula gives about half of this.
pub const QUOTED_LUMINOSITY_PER_ELECTRON: f64 = 0.06;

/// Laser strength quoted in the literature for the same laser (it matches a
/// 1 um wavelength rather than 2.5 eV photons).
pub const QUOTED_LASER_STRENGTH: f64 = 0.85;

fn positive(what: &'static str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::invalid(what, format!("{v} must be positive and finite")))
    }
}

/// Detected energy band `center * (1 +- bandwidth/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyWindow {
    pub center_kev: f64,
    pub fractional_bandwidth: f64,
}

impl EnergyWindow {
    pub fn new(center_kev: f64, fractional_bandwidth: f64) -> Result<Self> {
        positive("detector center energy", center_kev)?;
        if !(fractional_bandwidth > 0.0 && fractional_bandwidth < 1.0) {
            return Err(Error::invalid(
                "fractional bandwidth",
                format!("{fractional_bandwidth} outside (0, 1)"),
            ));
        }
        Ok(EnergyWindow {
            center_kev,
            fractional_bandwidth,
        })
    }

    pub fn width_kev(&self) -> f64 {
        self.center_kev * self.fractional_bandwidth
    }

    pub fn contains(&self, e_kev: f64) -> bool {
        (e_kev - self.center_kev).abs() <= 0.5 * self.width_kev()
    }
}

/// A photon detector: a cone of given solid angle around `(theta', phi')`
/// and an optional energy window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DetectorConfig {
    pub theta: f64,
    pub phi: f64,
    /// sr, in `[0, 4 pi]`. Zero is accepted and yields zero rates.
    pub solid_angle: f64,
    pub energy: Option<EnergyWindow>,
}

impl DetectorConfig {
    pub fn new(theta: f64, phi: f64, solid_angle: f64, energy: Option<EnergyWindow>) -> Result<Self> {
        let d = DetectorConfig {
            theta,
            phi: phi.rem_euclid(TAU),
            solid_angle,
            energy,
        };
        d.validate()?;
        Ok(d)
    }

    /// Detector covering the whole sphere with no energy cut.
    pub fn full_sphere() -> Self {
        DetectorConfig {
            theta: 0.0,
            phi: 0.0,
            solid_angle: 4.0 * PI,
            energy: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=PI).contains(&self.theta) || !self.phi.is_finite() {
            return Err(Error::invalid(
                "detector direction",
                format!("({}, {})", self.theta, self.phi),
            ));
        }
        if !(0.0..=4.0 * PI).contains(&self.solid_angle) {
            return Err(Error::invalid(
                "solid angle",
                format!("{} sr outside [0, 4 pi]", self.solid_angle),
            ));
        }
        Ok(())
    }

    /// `1 - cos` of the cone half-angle.
    pub fn cone_one_minus_cos(&self) -> f64 {
        self.solid_angle / TAU
    }

    /// Whether a direction lies inside the cone.
    pub fn accepts_direction(&self, theta: f64, phi: f64) -> bool {
        let sep = crate::kinematics::one_minus_cos_between(
            crate::kinematics::direction(self.theta, self.phi),
            crate::kinematics::direction(theta, phi),
        );
        sep <= self.cone_one_minus_cos()
    }

    pub fn accepts_energy(&self, e_kev: f64) -> bool {
        self.energy.is_none_or(|w| w.contains(e_kev))
    }
}

/// Colliding-beam parameters. Fields not needed by an operation may be
/// left unset.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct BeamParams {
    /// Electrons per bunch.
    pub n_e: Option<f64>,
    /// Photons per bunch.
    pub n_gamma: Option<f64>,
    /// Transverse rms sizes, m.
    pub sigma_te: Option<f64>,
    pub sigma_tgamma: Option<f64>,
    /// Electron bunch rms length, m.
    pub sigma_le: Option<f64>,
    pub omega_l: Option<NaturalEnergy>,
    /// Laser intensity, W/cm^2.
    pub intensity_w_cm2: Option<f64>,
    /// Laser pulse duration, s.
    pub tau_l_s: Option<f64>,
}

fn required(what: &'static str, v: Option<f64>) -> Result<f64> {
    positive(what, v.ok_or_else(|| Error::invalid(what, "not set"))?)
}

/// `N_e N_gamma / (2 pi (sigma_te^2 + sigma_tgamma^2))` per crossing,
/// assuming perfect spatial and temporal overlap.
pub fn luminosity_per_crossing(b: &BeamParams) -> Result<PerSquareMeter> {
    let ne = required("N_e", b.n_e)?;
    let ng = required("N_gamma", b.n_gamma)?;
    let se = required("sigma_te", b.sigma_te)?;
    let sg = required("sigma_tgamma", b.sigma_tgamma)?;
    Ok(PerSquareMeter(ne * ng / (TAU * (se * se + sg * sg))))
}

/// `I_L tau_L / (4 hbar omega_L)`.
pub fn luminosity_per_electron(b: &BeamParams) -> Result<InverseBarn> {
    let i = required("I_L", b.intensity_w_cm2)? * 1e4;
    let tau = b.tau_l_s.ok_or_else(|| Error::invalid("tau_L", "not set"))?;
    if !(tau >= 0.0) || !tau.is_finite() {
        return Err(Error::invalid("tau_L", format!("{tau} s must be >= 0")));
    }
    let w = b.omega_l.ok_or_else(|| Error::invalid("omega_L", "not set"))?;
    let photon_j = positive("omega_L", w.ev())? * CONSTANTS.elementary_charge;
    Ok(InverseBarn(per_m2_to_per_barn(i * tau / (4.0 * photon_j))))
}

/// Triple-differential yield per electron, `d3 sigma * L / N_e`.
pub fn pair_yield_per_electron(cfg: &ScatterConfig, omega1: NaturalEnergy, b: &BeamParams) -> Result<PairYield> {
    let xs = triple_diff_xsec(cfg, omega1)?.to_barn_per_kev_sr2();
    Ok(PairYield(xs * luminosity_per_electron(b)?.get()))
}

/// `Y N_e dOmega1 dOmega2 d omega1`, with `d omega1` from detector 1's window.
pub fn pairs_per_pulse(y: PairYield, n_e: f64, det1: &DetectorConfig, det2: &DetectorConfig) -> Result<PairsPerPulse> {
    det1.validate()?;
    det2.validate()?;
    if !(n_e >= 0.0) {
        return Err(Error::invalid("N_e", format!("{n_e} must be >= 0")));
    }
    let w = det1
        .energy
        .ok_or_else(|| Error::invalid("detector 1 energy", "an energy window is required"))?;
    Ok(PairsPerPulse(
        y.get() * n_e * det1.solid_angle * det2.solid_angle * w.width_kev(),
    ))
}

/// Target material given by atomic number, density (g/cm^3) and molar mass (g/mol).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Material {
    pub name: String,
    pub z: f64,
    pub density_g_cm3: f64,
    pub molar_mass: f64,
}

impl Material {
    pub fn aluminium() -> Self {
        Material {
            name: "Al".into(),
            z: 13.0,
            density_g_cm3: 2.70,
            molar_mass: 26.98,
        }
    }

    /// Electrons per cm^3.
    pub fn electron_density_cm3(&self) -> f64 {
        self.z * self.density_g_cm3 / self.molar_mass * CONSTANTS.avogadro
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TargetConfig {
    /// Electrons per barn.
    pub areal_electron_density: f64,
    /// Incident photons per second.
    pub incident_flux: f64,
    pub thickness_m: Option<f64>,
    pub material: Option<Material>,
}

impl TargetConfig {
    pub fn new(areal_electron_density: f64, incident_flux: f64) -> Result<Self> {
        positive("areal electron density", areal_electron_density)?;
        positive("incident flux", incident_flux)?;
        Ok(TargetConfig {
            areal_electron_density,
            incident_flux,
            thickness_m: None,
            material: None,
        })
    }

    pub fn from_material(material: Material, thickness_m: f64, incident_flux: f64) -> Result<Self> {
        positive("target thickness", thickness_m)?;
        positive("Z", material.z)?;
        positive("density", material.density_g_cm3)?;
        positive("molar mass", material.molar_mass)?;
        // electrons/cm^2 -> electrons/b
        let per_cm2 = material.electron_density_cm3() * thickness_m * 100.0;
        let mut t = TargetConfig::new(per_cm2 * 1e-24, incident_flux)?;
        t.thickness_m = Some(thickness_m);
        t.material = Some(material);
        Ok(t)
    }

    /// Electrons per cm^2.
    pub fn areal_density_cm2(&self) -> f64 {
        self.areal_electron_density * 1e24
    }
}

/// Coincidence rate for a photon beam on a fixed target:
/// `flux * areal density * d3 sigma * dOmega1 * dOmega2 * d omega1`.
pub fn fixed_target_rate(
    t: &TargetConfig,
    det1: &DetectorConfig,
    det2: &DetectorConfig,
    cfg: &ScatterConfig,
    mode: AcceptanceMode,
) -> Result<PairsPerSecond> {
    if cfg.electron.beta() != 0.0 {
        return Err(Error::invalid(
            "electron",
            "fixed-target rates need an electron at rest",
        ));
    }
    let sigma = effective_cross_section(cfg, det1, det2, mode)?;
    Ok(PairsPerSecond(t.incident_flux * t.areal_electron_density * sigma.get()))
}

/// `d3 sigma` integrated over both detector acceptances, in b.
pub fn effective_cross_section(
    cfg: &ScatterConfig,
    det1: &DetectorConfig,
    det2: &DetectorConfig,
    mode: AcceptanceMode,
) -> Result<Barn> {
    let xs = |w: f64, p1: (f64, f64), p2: (f64, f64)| -> Result<f64> {
        let c = cfg.with_angles(p1, p2)?;
        Ok(triple_diff_xsec(&c, NaturalEnergy::from_kev(w)?)?.to_barn_per_kev_sr2())
    };
    detector_rate_integral(xs, det1, det2, mode)
}

/// Peak field `sqrt(2 I / (eps0 c))` for an intensity in W/cm^2.
pub fn laser_field_strength(intensity_w_cm2: f64) -> Result<VoltsPerMeter> {
    let i = positive("laser intensity", intensity_w_cm2)? * 1e4;
    Ok(VoltsPerMeter((2.0 * i / (CONSTANTS.epsilon0 * CONSTANTS.c)).sqrt()))
}

/// `a_L = e E_L lambda_L / (2 pi m c^2)`.
pub fn laser_strength_a_l(field: VoltsPerMeter, lambda_m: f64) -> Result<LaserStrength> {
    let e = positive("field strength", field.get())?;
    let l = positive("wavelength", lambda_m)?;
    LaserStrength::new(e * l / (TAU * CONSTANTS.mc2_ev()))
}

/// `a_L` of a laser given by intensity and photon energy.
pub fn laser_strength_from_intensity(intensity_w_cm2: f64, omega_l: NaturalEnergy) -> Result<LaserStrength> {
    positive("omega_L", omega_l.get())?;
    laser_strength_a_l(
        laser_field_strength(intensity_w_cm2)?,
        crate::units::photon_wavelength_m(omega_l),
    )
}

/// `T = hbar omega_L a_L / (2 pi k_B)`.
pub fn unruh_temperature(a_l: LaserStrength, omega_l: NaturalEnergy) -> Result<Kelvin> {
    if !(omega_l.get() >= 0.0) {
        return Err(Error::invalid("omega_L", "must be >= 0"));
    }
    Ok(Kelvin(omega_l.ev() * a_l.get() / (TAU * CONSTANTS.kb_ev_per_k)))
}

/// Magnetic undulator: peak field (T) and period (m).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MagneticUndulator {
    pub b_field_t: f64,
    pub lambda_u_m: f64,
}

/// Laser wave acting as an undulator for an electron with velocity `beta`;
/// `alpha0` is the angle from head-on incidence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LaserUndulator {
    pub field: VoltsPerMeter,
    pub lambda_l_m: f64,
    pub alpha0: f64,
    pub beta: f64,
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::DegenerateGeometry(
            "undulator correspondence needs 0 < beta <= 1",
        ));
    }
    Ok(())
}

/// Equivalent undulator period `lambda_L / (cos alpha0 + 1/beta)`.
pub fn equivalent_period(lambda_l_m: f64, alpha0: f64, beta: f64) -> Result<f64> {
    check_beta(beta)?;
    positive("wavelength", lambda_l_m)?;
    let d = alpha0.cos() + 1.0 / beta;
    if !(d > 0.0) {
        return Err(Error::DegenerateGeometry("cos alpha0 + 1/beta vanishes"));
    }
    Ok(lambda_l_m / d)
}

/// Undulator parameter `K = e B lambda_U / (2 pi m c)`.
pub fn undulator_parameter(u: &MagneticUndulator) -> Result<f64> {
    positive("undulator field", u.b_field_t)?;
    positive("undulator period", u.lambda_u_m)?;
    Ok(u.b_field_t * u.lambda_u_m * CONSTANTS.c / (TAU * CONSTANTS.mc2_ev()))
}

/// Magnetic undulator with the same period and strength (`K = a_L`) as the laser wave.
pub fn laser_to_magnetic(l: &LaserUndulator) -> Result<MagneticUndulator> {
    let lambda_u = equivalent_period(l.lambda_l_m, l.alpha0, l.beta)?;
    let k = laser_strength_a_l(l.field, l.lambda_l_m)?.get();
    Ok(MagneticUndulator {
        b_field_t: k * TAU * CONSTANTS.mc2_ev() / (lambda_u * CONSTANTS.c),
        lambda_u_m: lambda_u,
    })
}

/// Inverse of [`laser_to_magnetic`] for a given incidence and velocity.
pub fn magnetic_to_laser(u: &MagneticUndulator, alpha0: f64, beta: f64) -> Result<LaserUndulator> {
    check_beta(beta)?;
    let k = undulator_parameter(u)?;
    let d = alpha0.cos() + 1.0 / beta;
    if !(d > 0.0) {
        return Err(Error::DegenerateGeometry("cos alpha0 + 1/beta vanishes"));
    }
    let lambda_l = u.lambda_u_m * d;
    Ok(LaserUndulator {
        field: VoltsPerMeter(k * TAU * CONSTANTS.mc2_ev() / lambda_l),
        lambda_l_m: lambda_l,
        alpha0,
        beta,
    })
}

/// Fundamental `2 gamma^2 omega_U / (1 + K^2 + (gamma theta)^2)` with
/// `omega_U` the photon energy of wavelength `lambda_U`.
pub fn fundamental_energy(gamma: f64, lambda_u_m: f64, k: f64, theta: f64) -> Result<NaturalEnergy> {
    positive("gamma", gamma)?;
    let wu = photon_energy_from_wavelength(lambda_u_m)?.get();
    let gt = gamma * theta;
    NaturalEnergy::new(2.0 * gamma * gamma * wu / (1.0 + k * k + gt * gt))
}

/// Duration of the two-photon pulse in a head-on collision, `sigma_le / c` in s.
pub fn two_photon_pulse_duration(sigma_le_m: f64) -> Result<f64> {
    Ok(positive("sigma_le", sigma_le_m)? / CONSTANTS.c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinematics::{omega1_max_dressed, ElectronState};

    fn laser_beam() -> BeamParams {
        BeamParams {
            n_e: Some(1e10),
            n_gamma: Some(1e10),
            sigma_te: Some(35e-6),
            sigma_tgamma: Some(35e-6),
            sigma_le: Some(30e-6),
            omega_l: Some(NaturalEnergy::from_ev(2.5).unwrap()),
            intensity_w_cm2: Some(1e18),
            tau_l_s: Some(50e-15),
        }
    }

    #[test]
    fn crossing_luminosity() {
        let b = laser_beam();
        let l = luminosity_per_crossing(&b).unwrap().get();
        assert!((l / 6.5e27 - 1.0).abs() < 0.01, "{l}");
        let sym = 1e20 / (4.0 * PI * 35e-6f64.powi(2));
        assert!((l / sym - 1.0).abs() < 1e-14);
        let double = BeamParams { n_e: Some(2e10), ..b };
        assert!((luminosity_per_crossing(&double).unwrap().get() / l - 2.0).abs() < 1e-14);
        let bad = BeamParams {
            sigma_te: Some(0.0),
            sigma_tgamma: Some(0.0),
            ..b
        };
        assert!(luminosity_per_crossing(&bad).is_err());
    }

    #[test]
    fn per_electron_luminosity() {
        let b = laser_beam();
        let l = luminosity_per_electron(&b).unwrap().get();
        assert!((l / 0.0312 - 1.0).abs() < 0.01, "{l}");
        let ratio = QUOTED_LUMINOSITY_PER_ELECTRON / l;
        assert!(ratio > 0.5 && ratio < 2.0);
        let hot = BeamParams {
            intensity_w_cm2: Some(3e18),
            ..b
        };
        assert!((luminosity_per_electron(&hot).unwrap().get() / l - 3.0).abs() < 1e-12);
        let blue = BeamParams {
            omega_l: Some(NaturalEnergy::from_ev(5.0).unwrap()),
            ..b
        };
        assert!((luminosity_per_electron(&blue).unwrap().get() / l - 0.5).abs() < 1e-12);
        let flash = BeamParams {
            tau_l_s: Some(0.0),
            ..b
        };
        assert_eq!(luminosity_per_electron(&flash).unwrap().get(), 0.0);
    }

    #[test]
    fn aluminium_target_density() {
        let t = TargetConfig::from_material(Material::aluminium(), 100e-6, 1e12).unwrap();
        assert!((t.areal_density_cm2() / 7.83e21 - 1.0).abs() < 1e-3);
        let thin = TargetConfig::from_material(Material::aluminium(), 10e-6, 1e12).unwrap();
        assert!((t.areal_electron_density / thin.areal_electron_density - 10.0).abs() < 1e-12);
    }

    #[test]
    fn fixed_target_rate_is_linear_in_thickness() {
        let cfg = ScatterConfig::fixed_target(NaturalEnergy::from_kev(100.0).unwrap(), (2.0, 0.0), (2.0, PI)).unwrap();
        let d1 = DetectorConfig::new(2.0, 0.0, 3e-2, Some(EnergyWindow::new(42.0, 0.05).unwrap())).unwrap();
        let d2 = DetectorConfig::new(2.0, PI, 3e-2, None).unwrap();
        let t1 = TargetConfig::from_material(Material::aluminium(), 100e-6, 1e12).unwrap();
        let t2 = TargetConfig::from_material(Material::aluminium(), 200e-6, 1e12).unwrap();
        let r1 = fixed_target_rate(&t1, &d1, &d2, &cfg, AcceptanceMode::Midpoint)
            .unwrap()
            .get();
        let r2 = fixed_target_rate(&t2, &d1, &d2, &cfg, AcceptanceMode::Midpoint)
            .unwrap()
            .get();
        assert!((r2 / r1 - 2.0).abs() < 1e-12);
        assert!(r1 > 0.1 / 3.0 && r1 < 0.3, "{r1}");
        let moving = cfg.electron;
        assert_eq!(moving.beta(), 0.0);
    }

    #[test]
    fn pairs_per_pulse_product() {
        let d1 = DetectorConfig::new(0.002, 0.0, 1e-6, Some(EnergyWindow::new(160.0, 0.05).unwrap())).unwrap();
        let d2 = DetectorConfig::new(0.002, PI, 1e-6, None).unwrap();
        let p = pairs_per_pulse(PairYield(2.0), 1e10, &d1, &d2).unwrap().get();
        assert!((p - 2.0 * 1e10 * 1e-12 * 8.0).abs() < 1e-12);
        assert_eq!(pairs_per_pulse(PairYield(0.0), 1e10, &d1, &d2).unwrap().get(), 0.0);
        assert_eq!(pairs_per_pulse(PairYield(1.0), 0.0, &d1, &d2).unwrap().get(), 0.0);
    }

    #[test]
    fn yield_scales_with_intensity() {
        let e = ElectronState::new(300.0).unwrap();
        let b = laser_beam();
        let cfg = ScatterConfig::new(b.omega_l.unwrap(), e, PI, (0.002, 0.0), (0.002, PI)).unwrap();
        let w1 = NaturalEnergy::from_kev(200.0).unwrap();
        let y1 = pair_yield_per_electron(&cfg, w1, &b).unwrap().get();
        let b2 = BeamParams {
            intensity_w_cm2: Some(2e18),
            ..b
        };
        let y2 = pair_yield_per_electron(&cfg, w1, &b2).unwrap().get();
        assert!((y2 / y1 - 2.0).abs() < 1e-12);
    }

    #[test]
    fn laser_field_and_strength() {
        let e = laser_field_strength(1e18).unwrap();
        assert!((e.get() / 2.7e12 - 1.0).abs() < 0.02);
        let e4 = laser_field_strength(4e18).unwrap();
        assert!((e4.get() / e.get() - 2.0).abs() < 1e-12);
        let xfel = laser_field_strength(5e14).unwrap();
        assert!((xfel.get() / 6.1e10 - 1.0).abs() < 0.01, "{}", xfel.get());
        let a = laser_strength_from_intensity(1e18, NaturalEnergy::from_ev(2.5).unwrap()).unwrap();
        assert!((a.get() - 0.42).abs() < 0.01, "{}", a.get());
        let a2 = laser_strength_a_l(e, 2.0 * 496e-9).unwrap();
        let a1 = laser_strength_a_l(e, 496e-9).unwrap();
        assert!((a2.get() / a1.get() - 2.0).abs() < 1e-12);
        let ax = laser_strength_a_l(xfel, 0.1e-9).unwrap().get();
        assert!(ax > 2e-6 / 1.5 && ax < 2e-6 * 1.5, "{ax}");
    }

    #[test]
    fn unruh_temperature_of_optical_laser() {
        let w = NaturalEnergy::from_ev(2.5).unwrap();
        let a = laser_strength_from_intensity(1e18, w).unwrap();
        let t = unruh_temperature(a, w).unwrap().get();
        assert!((t / 1900.0 - 1.0).abs() < 0.05, "{t}");
        assert_eq!(
            unruh_temperature(LaserStrength::new(0.0).unwrap(), w).unwrap().get(),
            0.0
        );
        let t2 = unruh_temperature(LaserStrength::new(2.0 * a.get()).unwrap(), w)
            .unwrap()
            .get();
        assert!((t2 / t - 2.0).abs() < 1e-12);
    }

    #[test]
    fn undulator_correspondence() {
        let l = LaserUndulator {
            field: VoltsPerMeter(2.745e12),
            lambda_l_m: 495.9e-9,
            alpha0: 0.0,
            beta: ElectronState::new(300.0).unwrap().beta(),
        };
        let u = laser_to_magnetic(&l).unwrap();
        assert!((u.lambda_u_m / (l.lambda_l_m / 2.0) - 1.0).abs() < 1e-5);
        let back = magnetic_to_laser(&u, l.alpha0, l.beta).unwrap();
        assert!((back.field.get() / l.field.get() - 1.0).abs() < 1e-12);
        assert!((back.lambda_l_m / l.lambda_l_m - 1.0).abs() < 1e-12);
        let k = undulator_parameter(&u).unwrap();
        let a = laser_strength_a_l(l.field, l.lambda_l_m).unwrap().get();
        assert!((k / a - 1.0).abs() < 1e-12);
        assert!(equivalent_period(1e-6, 0.0, 0.0).is_err());
    }

    #[test]
    fn fundamental_matches_dressed_edge() {
        let gamma = 300.0;
        let beta = ElectronState::new(gamma).unwrap().beta();
        let w = NaturalEnergy::from_ev(2.5).unwrap();
        let lambda_u = equivalent_period(crate::units::photon_wavelength_m(w), 0.0, beta).unwrap();
        for (k, theta) in [(0.0, 0.0), (0.85, 0.0), (0.42, 0.6 / gamma), (1.5, 2.0 / gamma)] {
            let f = fundamental_energy(gamma, lambda_u, k, theta).unwrap().get();
            let d = omega1_max_dressed(gamma, w, PI, theta, LaserStrength::new(k).unwrap())
                .unwrap()
                .get();
            assert!((f / d - 1.0).abs() < 5e-3, "{k} {theta}: {f} vs {d}");
        }
        let small_k = fundamental_energy(gamma, lambda_u, 0.0, 0.0).unwrap().get();
        assert!((small_k / (4.0 * gamma * gamma * w.get()) - 1.0).abs() < 1e-4);
    }

    #[test]
    fn pulse_duration() {
        let t = two_photon_pulse_duration(30e-6).unwrap();
        assert!((t - 30e-6 / 299_792_458.0).abs() < 1e-20);
    }

    #[test]
    fn detector_acceptance_checks() {
        let d = DetectorConfig::new(1.0, 0.5, 0.01, Some(EnergyWindow::new(10.0, 0.1).unwrap())).unwrap();
        assert!(d.accepts_direction(1.0, 0.5));
        assert!(!d.accepts_direction(1.5, 0.5));
        assert!(d.accepts_energy(10.4));
        assert!(!d.accepts_energy(10.6));
        assert!(DetectorConfig::new(1.0, 0.0, 13.0, None).is_err());
        assert!(EnergyWindow::new(10.0, 1.0).is_err());
        let full = DetectorConfig::full_sphere();
        assert!(full.accepts_direction(PI, 0.0));
    }
}
