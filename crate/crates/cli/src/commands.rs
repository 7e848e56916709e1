//! The four commands: grid, rates, sample, report.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};
use xpair_core::dcs::triple_diff_xsec;
use xpair_core::kinematics::{
    omega1_max_approx, omega1_max_dressed, ConfigKinematics, LaserStrength, ScatterConfig, MIN_GAMMA_APPROX,
};
use xpair_core::quadrature::{
    fill_grid, photon2_integrated_grid, triple_xsec_at_grid_point, triple_xsec_grid, GridResult,
    DEFAULT_PHOTON2_TOLERANCE,
};
use xpair_core::rates::{
    effective_cross_section, equivalent_period, laser_field_strength, laser_strength_a_l, laser_to_magnetic,
    luminosity_per_crossing, luminosity_per_electron, pair_yield_per_electron, pairs_per_pulse,
    two_photon_pulse_duration, unruh_temperature, LaserUndulator, QUOTED_LASER_STRENGTH,
    QUOTED_LUMINOSITY_PER_ELECTRON,
};
use xpair_core::sampler::{coincidence_stats, write_events, CoincidenceStats, SampleRun, Sampler};
use xpair_core::scs::{single_double_diff, PulseDuration, SingleComptonConfig};
use xpair_core::units::{photon_wavelength_m, NaturalEnergy, CONSTANTS};
use xpair_core::Error;

use crate::scenario::{Detectors, EnergyPoint, GridQuantity, Scenario, ScenarioError};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("{0}")]
    Validation(String),
    #[error(transparent)]
    Numerical(#[from] Error),
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    /// 0 success, 2 validation, 3 numerical, 4 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Scenario(ScenarioError::Io { .. }) | CliError::Io { .. } => 4,
            CliError::Scenario(_) | CliError::Validation(_) => 2,
            CliError::Numerical(Error::InvalidInput { .. }) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

fn io_err(context: impl Into<String>) -> impl FnOnce(std::io::Error) -> CliError {
    let context = context.into();
    move |source| CliError::Io { context, source }
}

/// Opens `path` for writing, or stdout when absent.
pub fn open_output(path: Option<&Path>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(io_err(format!("cannot write {}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(std::io::stdout())),
    })
}

fn photon2_tolerance(s: &Scenario, tol: Option<f64>) -> f64 {
    tol.or(s.grid.as_ref().and_then(|g| g.tolerance))
        .unwrap_or(DEFAULT_PHOTON2_TOLERANCE)
}

/// Evaluates the scenario's `[grid]`, optionally with another quantity.
pub fn run_grid(s: &Scenario, tol: Option<f64>, quantity: Option<GridQuantity>) -> CliResult<GridResult> {
    let g = s
        .grid
        .as_ref()
        .ok_or_else(|| CliError::Validation("scenario has no [grid] section".into()))?;
    let spec = s.grid_spec_of(g)?;
    let base = s.base_config()?;
    let quantity = quantity.unwrap_or(g.quantity);
    if let Some(t) = tol {
        if !(t > 0.0 && t < 1.0) {
            return Err(CliError::Validation(format!("--tol {t} must lie in (0, 1)")));
        }
    }
    Ok(match quantity {
        GridQuantity::CrossSection => triple_xsec_grid(&base, &spec)?,
        GridQuantity::Yield => {
            let lumi = luminosity_per_electron(&s.beam_params())?.get();
            fill_grid(&spec, "pair_yield", "1/(keV*sr^2*electron)", |w, t| {
                Ok(triple_xsec_at_grid_point(&base, &spec, w, t)? * lumi)
            })?
        }
        GridQuantity::Photon2Integrated => photon2_integrated_grid(&base, &spec, photon2_tolerance(s, tol))?,
        GridQuantity::SingleCompton => {
            let cfg = single_compton_config(s)?;
            fill_grid(&spec, "d2sigma_single_compton", "b/(keV*sr)", |w, t| {
                single_double_diff(NaturalEnergy::from_kev(w)?, &cfg.with_thetap(t)?)
            })?
        }
    })
}

fn single_compton_config(s: &Scenario) -> CliResult<SingleComptonConfig> {
    let tau = s
        .beam
        .pulse_duration_s
        .ok_or_else(|| CliError::Validation("beam.pulse_duration: required for single-compton".into()))?;
    Ok(SingleComptonConfig::new(
        s.electron()?,
        s.photon_energy()?,
        s.beam.incidence_angle,
        0.0,
        PulseDuration::Femtoseconds(tau * 1e15),
    )?)
}

pub fn write_grid(result: &GridResult, out: Option<&Path>) -> CliResult<()> {
    let mut w = open_output(out)?;
    result
        .write_csv(&mut w)
        .and_then(|_| w.flush())
        .map_err(io_err("cannot write grid"))
}

/// Quantity with its unit and the operation that produced it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Derived {
    pub value: f64,
    pub unit: String,
    pub op: String,
}

fn derived(value: f64, unit: &str, op: &str) -> Derived {
    Derived {
        value,
        unit: unit.to_string(),
        op: op.to_string(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub version: String,
    pub seed: Option<u64>,
    pub photon2_tolerance: f64,
    pub acceptance: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportDocument {
    pub schema: u32,
    pub scenario: Option<String>,
    pub inputs: Value,
    pub derived: BTreeMap<String, Derived>,
    pub outputs: BTreeMap<String, Value>,
    pub provenance: Provenance,
}

impl ReportDocument {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn write(&self, out: Option<&Path>) -> CliResult<()> {
        let mut w = open_output(out)?;
        writeln!(w, "{}", self.to_json())
            .and_then(|_| w.flush())
            .map_err(io_err("cannot write report"))
    }
}

/// Photon-1 energy (natural units) with `omega1 = f (omega1 + omega2)`.
/// `f = 1/2` is the symmetric point.
pub fn energy_split_point(kin: &ConfigKinematics, f: f64) -> CliResult<f64> {
    let max = kin.omega1_max();
    if !(max > 0.0) || !(f > 0.0 && f < 1.0) {
        return Err(CliError::Numerical(Error::ForbiddenConfiguration(
            "no photon pair is allowed in this geometry".into(),
        )));
    }
    // omega2 falls as omega1 rises, so the residual is monotone
    let h = |w: f64| kin.omega2(w).map(|w2| w - f * (w + w2));
    let (mut lo, mut hi) = (max * 1e-12, max * (1.0 - 1e-12));
    if h(lo)? > 0.0 || h(hi)? < 0.0 {
        return Err(CliError::Numerical(Error::ForbiddenConfiguration(format!(
            "split {f} not reachable"
        ))));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if h(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 4.0 * f64::EPSILON * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn resolve_energy(kin: &ConfigKinematics, e: EnergyPoint) -> CliResult<f64> {
    match e {
        EnergyPoint::Kev(k) => Ok(k),
        EnergyPoint::Symmetric => Ok(energy_split_point(kin, 0.5)? * CONSTANTS.mc2_kev),
    }
}

/// Scalar diagnostics available from the scenario alone.
pub fn derived_quantities(s: &Scenario) -> CliResult<BTreeMap<String, Derived>> {
    let mut d = BTreeMap::new();
    let base = s.base_config()?;
    let on_axis = base.with_angles((0.0, 0.0), (base.theta2p, base.phi2p))?;
    d.insert(
        "omega1_max_on_axis".into(),
        derived(
            ConfigKinematics::new(&on_axis).omega1_max() * CONSTANTS.mc2_kev,
            "keV",
            "exact photon-1 edge (omega2 -> 0) with photon 1 along the electron axis",
        ),
    );
    if s.detectors.is_some() {
        let kin = ConfigKinematics::new(&base);
        d.insert(
            "omega1_max_detector".into(),
            derived(
                kin.omega1_max() * CONSTANTS.mc2_kev,
                "keV",
                "exact photon-1 edge at the detector-1 direction",
            ),
        );
        if let Ok(w) = energy_split_point(&kin, 0.5) {
            d.insert(
                "symmetric_energy".into(),
                derived(w * CONSTANTS.mc2_kev, "keV", "omega1 = omega2 at the detector geometry"),
            );
        }
    }
    let b = &s.beam;
    let e = s.electron()?;
    let omega_l = s.photon_energy()?;
    let alpha0 = PI - b.incidence_angle;
    if e.gamma() >= MIN_GAMMA_APPROX {
        d.insert(
            "omega1_max_approx_on_axis".into(),
            derived(
                omega1_max_approx(e.gamma(), omega_l, alpha0, 0.0)?.kev(),
                "keV",
                "ultra-relativistic edge gamma x/(1+x), x = 4 gamma omega_L cos^2(alpha0/2)",
            ),
        );
    }
    if let Some(intensity) = b.intensity_w_cm2 {
        let lambda = photon_wavelength_m(omega_l);
        let field = laser_field_strength(intensity)?;
        let a_l = laser_strength_a_l(field, lambda)?;
        let quoted = LaserStrength::new(QUOTED_LASER_STRENGTH)?;
        d.insert("laser_wavelength".into(), derived(lambda, "m", "hc / omega_L"));
        d.insert(
            "laser_field".into(),
            derived(field.get(), "V/m", "sqrt(2 I_L / (eps0 c))"),
        );
        d.insert(
            "a_l_computed".into(),
            derived(a_l.get(), "1", "e E_L lambda_L / (2 pi m c^2)"),
        );
        d.insert("a_l_quoted".into(), derived(quoted.get(), "1", "quoted laser strength"));
        d.insert(
            "m_eff_computed".into(),
            derived(a_l.effective_mass(), "m_e", "sqrt(1 + a_L^2), computed a_L"),
        );
        d.insert(
            "m_eff_quoted".into(),
            derived(quoted.effective_mass(), "m_e", "sqrt(1 + a_L^2), quoted a_L"),
        );
        d.insert(
            "unruh_temperature".into(),
            derived(
                unruh_temperature(a_l, omega_l)?.get(),
                "K",
                "hbar a / (2 pi k_B c), computed a_L",
            ),
        );
        d.insert(
            "unruh_temperature_quoted_a_l".into(),
            derived(
                unruh_temperature(quoted, omega_l)?.get(),
                "K",
                "hbar a / (2 pi k_B c), quoted a_L",
            ),
        );
        if e.gamma() >= MIN_GAMMA_APPROX {
            let plain = 2.0 * e.gamma().powi(2) * omega_l.get() * e.one_minus_beta_cos(b.incidence_angle);
            for (key, a) in [("computed", a_l), ("quoted", quoted)] {
                let dressed = omega1_max_dressed(e.gamma(), omega_l, b.incidence_angle, 0.0, a)?.get();
                d.insert(
                    format!("omega1_max_dressed_{key}"),
                    derived(
                        dressed * CONSTANTS.mc2_kev,
                        "keV",
                        &format!("2 gamma^2 omega_L (1 - beta cos alpha) / (1 + a_L^2), {key} a_L"),
                    ),
                );
                d.insert(
                    format!("dressed_reduction_{key}"),
                    derived(
                        100.0 * (1.0 - dressed / plain),
                        "%",
                        &format!("1 - 1/(1 + a_L^2), {key} a_L"),
                    ),
                );
            }
        }
        if e.beta() > 0.0 {
            let lambda_u = equivalent_period(lambda, alpha0, e.beta())?;
            d.insert(
                "undulator_period".into(),
                derived(lambda_u, "m", "lambda_L / (cos alpha0 + 1/beta)"),
            );
            let mag = laser_to_magnetic(&LaserUndulator {
                field,
                lambda_l_m: lambda,
                alpha0,
                beta: e.beta(),
            })?;
            d.insert(
                "undulator_equivalent_field".into(),
                derived(
                    mag.b_field_t,
                    "T",
                    "magnetic field with K = a_L at the equivalent period",
                ),
            );
        }
        if b.pulse_duration_s.is_some() {
            let l = luminosity_per_electron(&s.beam_params())?.get();
            d.insert(
                "luminosity_per_electron".into(),
                derived(l, "1/b", "I_L tau_L / (4 hbar omega_L)"),
            );
            d.insert(
                "luminosity_per_electron_quoted".into(),
                derived(QUOTED_LUMINOSITY_PER_ELECTRON, "1/b", "quoted luminosity per electron"),
            );
            d.insert(
                "luminosity_quoted_over_formula".into(),
                derived(QUOTED_LUMINOSITY_PER_ELECTRON / l, "1", "quoted / formula"),
            );
        }
    }
    if let Ok(l) = luminosity_per_crossing(&s.beam_params()) {
        d.insert(
            "luminosity_per_crossing".into(),
            derived(l.get(), "1/m^2", "N_e N_gamma / (2 pi (sigma_te^2 + sigma_tgamma^2))"),
        );
    }
    if let Some(le) = b.electron_bunch_length_m {
        d.insert(
            "two_photon_pulse_duration".into(),
            derived(two_photon_pulse_duration(le)?, "s", "sigma_le / c"),
        );
    }
    if let Some(t) = &s.target {
        let tc = s.target_config_of(t)?;
        d.insert(
            "areal_electron_density".into(),
            derived(tc.areal_density_cm2(), "1/cm^2", "Z rho N_A / M * thickness"),
        );
    }
    Ok(d)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
struct FixedTargetPoint {
    omega1_kev: f64,
    omega2_kev: f64,
    d3sigma_b_per_kev_sr2: f64,
    effective_cross_section_b: f64,
    rate_pairs_per_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
struct CollisionPoint {
    omega1_kev: f64,
    omega2_kev: f64,
    d3sigma_b_per_kev_sr2: f64,
    yield_per_kev_sr2_electron: f64,
    energy_window_kev: f64,
    pairs_per_pulse: f64,
}

fn d3sigma_kev(cfg: &ScatterConfig, w_kev: f64) -> CliResult<f64> {
    Ok(triple_diff_xsec(cfg, NaturalEnergy::from_kev(w_kev)?)?.to_barn_per_kev_sr2())
}

/// Rate or yield curve over the detector energies.
pub fn rate_outputs(s: &Scenario) -> CliResult<BTreeMap<String, Value>> {
    let d: &Detectors = s
        .detectors
        .as_ref()
        .ok_or_else(|| CliError::Validation("rates need a [detectors] section".into()))?;
    let cfg = s.base_config()?;
    let kin = ConfigKinematics::new(&cfg);
    let mut out = BTreeMap::new();
    if s.beam.is_laser() {
        let bp = s.beam_params();
        let n_e = bp
            .n_e
            .ok_or_else(|| CliError::Validation("beam.electrons_per_bunch: required for pairs per pulse".into()))?;
        let mut points = Vec::new();
        for &e in &d.energies {
            let w = resolve_energy(&kin, e)?;
            let (d1, d2) = s.detector_pair(d, w)?;
            let y = pair_yield_per_electron(&cfg, NaturalEnergy::from_kev(w)?, &bp)?;
            points.push(CollisionPoint {
                omega1_kev: w,
                omega2_kev: kin.omega2(w / CONSTANTS.mc2_kev)? * CONSTANTS.mc2_kev,
                d3sigma_b_per_kev_sr2: d3sigma_kev(&cfg, w)?,
                yield_per_kev_sr2_electron: y.get(),
                energy_window_kev: d1.energy.map_or(0.0, |w| w.width_kev()),
                pairs_per_pulse: pairs_per_pulse(y, n_e, &d1, &d2)?.get(),
            });
        }
        out.insert("yield_curve".into(), json!(points));
    } else if let Some(t) = &s.target {
        let tc = s.target_config_of(t)?;
        let mut points = Vec::new();
        for &e in &d.energies {
            let w = resolve_energy(&kin, e)?;
            let (d1, d2) = s.detector_pair(d, w)?;
            let sigma = effective_cross_section(&cfg, &d1, &d2, d.acceptance)?.get();
            points.push(FixedTargetPoint {
                omega1_kev: w,
                omega2_kev: kin.omega2(w / CONSTANTS.mc2_kev)? * CONSTANTS.mc2_kev,
                d3sigma_b_per_kev_sr2: d3sigma_kev(&cfg, w)?,
                effective_cross_section_b: sigma,
                rate_pairs_per_s: tc.incident_flux * tc.areal_electron_density * sigma,
            });
        }
        out.insert("rate_curve".into(), json!(points));
    } else {
        return Err(CliError::Validation(
            "rates need a [target] section or laser parameters (beam.intensity) in [beam]".into(),
        ));
    }
    if let Some(f) = d.asymmetric_split {
        let sym = energy_split_point(&kin, 0.5)? * CONSTANTS.mc2_kev;
        let asym = energy_split_point(&kin, f)? * CONSTANTS.mc2_kev;
        let gain = d3sigma_kev(&cfg, asym)? / d3sigma_kev(&cfg, sym)?;
        out.insert(
            "asymmetric_gain".into(),
            json!(derived(
                gain,
                "1",
                &format!(
                    "d3sigma at omega1 = {asym:.4} keV ({f} of the pair energy) over the symmetric point {sym:.4} keV"
                ),
            )),
        );
    }
    Ok(out)
}

fn provenance(s: &Scenario, tol: Option<f64>, seed: Option<u64>) -> Provenance {
    Provenance {
        version: env!("CARGO_PKG_VERSION").to_string(),
        seed,
        photon2_tolerance: photon2_tolerance(s, tol),
        acceptance: s
            .detectors
            .as_ref()
            .map(|d| format!("{:?}", d.acceptance).to_lowercase()),
    }
}

fn document(s: &Scenario, tol: Option<f64>, outputs: BTreeMap<String, Value>) -> CliResult<ReportDocument> {
    Ok(ReportDocument {
        schema: SCHEMA_VERSION,
        scenario: s.name.clone(),
        inputs: serde_json::to_value(s.to_table()).expect("scenario table converts to JSON"),
        derived: derived_quantities(s)?,
        outputs,
        provenance: provenance(s, tol, s.sampler.as_ref().map(|x| x.seed)),
    })
}

pub fn run_rates(s: &Scenario, tol: Option<f64>) -> CliResult<ReportDocument> {
    let outputs = rate_outputs(s)?;
    document(s, tol, outputs)
}

/// Derived quantities, plus the rate curve when the scenario has detectors
/// and a target or laser.
pub fn run_report(s: &Scenario, tol: Option<f64>) -> CliResult<ReportDocument> {
    let has_source = s.target.is_some() || s.beam.is_laser();
    let outputs = if s.detectors.is_some() && has_source {
        rate_outputs(s)?
    } else {
        BTreeMap::new()
    };
    document(s, tol, outputs)
}

pub struct SampleOutcome {
    pub seed: u64,
    pub run: SampleRun,
    pub coincidence: Option<CoincidenceStats>,
    /// Unit of `coincidence.rate`.
    pub rate_unit: Option<&'static str>,
}

impl SampleOutcome {
    pub fn summary(&self) -> String {
        let r = &self.run;
        let mut s = format!(
            "events {} proposals {} acceptance {:.4e} region cross section {:.6e} +- {:.2e} b",
            r.events.len(),
            r.proposals,
            r.acceptance,
            r.cross_section_barn,
            r.cross_section_error_barn
        );
        if let Some(c) = &self.coincidence {
            s.push_str(&format!(
                "\ncoincidences {} of {} (fraction {:.4e} +- {:.2e})",
                c.count, c.n_events, c.fraction, c.fraction_error
            ));
            if let Some((v, e)) = c.cross_section_barn {
                s.push_str(&format!("\ncoincidence cross section {v:.6e} +- {e:.2e} b"));
            }
            if let (Some((v, e)), Some(u)) = (c.rate, self.rate_unit) {
                s.push_str(&format!("\ncoincidence rate {v:.6e} +- {e:.2e} {u}"));
            }
        }
        s
    }
}

/// Samples the scenario's `[sampler]` region. `events` and `seed` override
/// the file.
pub fn run_sample(s: &Scenario, events: Option<usize>, seed: Option<u64>) -> CliResult<SampleOutcome> {
    let sc = s
        .sampler
        .as_ref()
        .ok_or_else(|| CliError::Validation("scenario has no [sampler] section".into()))?;
    let mut cfg = s.sampler_config_of(sc)?;
    if let Some(n) = events {
        cfg.n_events = n;
    }
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    let seed = cfg.seed;
    let run = Sampler::new(cfg)?.run()?;
    let mut coincidence = None;
    let mut rate_unit = None;
    if let Some(d) = &s.detectors {
        let kin = ConfigKinematics::new(&s.base_config()?);
        let w = resolve_energy(&kin, d.energies[0])?;
        let (d1, d2) = s.detector_pair(d, w)?;
        let lumi = if s.beam.is_laser() {
            let bp = s.beam_params();
            rate_unit = Some("pairs/pulse");
            bp.n_e
                .map(|n| luminosity_per_electron(&bp).map(|l| l.get() * n))
                .transpose()?
        } else if let Some(t) = &s.target {
            let tc = s.target_config_of(t)?;
            rate_unit = Some("pairs/s");
            Some(tc.incident_flux * tc.areal_electron_density)
        } else {
            None
        };
        let xs = (run.proposals > 0).then_some((run.cross_section_barn, run.cross_section_error_barn));
        coincidence = Some(coincidence_stats(&run.events, &d1, &d2, xs, lumi)?);
    }
    Ok(SampleOutcome {
        seed,
        run,
        coincidence,
        rate_unit,
    })
}

pub fn write_sample(o: &SampleOutcome, out: Option<&Path>) -> CliResult<()> {
    let mut w = open_output(out)?;
    write_events(&mut w, o.seed, &o.run.events)
        .and_then(|_| w.flush())
        .map_err(io_err("cannot write events"))
}
