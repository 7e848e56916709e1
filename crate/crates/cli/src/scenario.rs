//! Scenario files: TOML with `[beam]`, `[target]`, `[detectors]`, `[grid]`
//! and `[sampler]` sections. Dimensioned values carry a unit suffix.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use toml::{Table, Value};
use xpair_core::kinematics::{ElectronState, ScatterConfig};
use xpair_core::quadrature::{AcceptanceMode, GeometryMode, GridSpec, DEFAULT_IR_CUTOFF_KEV, DEFAULT_LOG_FLOOR};
use xpair_core::rates::{BeamParams, DetectorConfig, EnergyWindow, Material, TargetConfig};
use xpair_core::sampler::{PhaseSpaceBox, SamplerConfig, DEFAULT_ENVELOPE_RESOLUTION, DEFAULT_SAFETY_FACTOR};
use xpair_core::units::NaturalEnergy;

use crate::quantity::{self, Dimension};

/// One problem found while reading a scenario, tied to its key path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Issue {
    pub path: String,
    pub message: String,
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("cannot read scenario {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("scenario is not valid TOML: {0}")]
    Syntax(String),
    #[error("invalid scenario:\n{}", .0.iter().map(|i| format!("  {i}")).collect::<Vec<_>>().join("\n"))]
    Invalid(Vec<Issue>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Beam {
    /// Incident photon energy, keV. For a laser this is the laser photon.
    pub photon_energy_kev: f64,
    pub gamma: f64,
    /// Angle between the incident photon and the electron axis, rad.
    pub incidence_angle: f64,
    pub intensity_w_cm2: Option<f64>,
    pub pulse_duration_s: Option<f64>,
    pub electrons_per_bunch: Option<f64>,
    pub photons_per_bunch: Option<f64>,
    /// Transverse rms sizes, m.
    pub electron_spot_m: Option<f64>,
    pub photon_spot_m: Option<f64>,
    /// Longitudinal rms electron bunch length, m.
    pub electron_bunch_length_m: Option<f64>,
}

impl Beam {
    pub fn is_laser(&self) -> bool {
        self.intensity_w_cm2.is_some()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TargetMaterial {
    Named(String),
    Custom {
        z: f64,
        density_g_cm3: f64,
        molar_mass: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Target {
    pub material: TargetMaterial,
    pub thickness_m: f64,
    /// Incident photons per second.
    pub flux: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EnergyPoint {
    Kev(f64),
    /// `omega1 = omega2` for the detector geometry.
    Symmetric,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Detectors {
    pub theta1: f64,
    pub phi1: f64,
    pub theta2: f64,
    pub phi2: f64,
    pub solid_angle1: f64,
    pub solid_angle2: f64,
    /// Fractional energy bandwidth of detector 1.
    pub bandwidth: f64,
    /// Energy the bandwidth refers to, keV; defaults to each center energy.
    pub bandwidth_reference_kev: Option<f64>,
    pub energies: Vec<EnergyPoint>,
    pub acceptance: AcceptanceMode,
    /// Fraction `omega1 / (omega1 + omega2)` of an asymmetric comparison point.
    pub asymmetric_split: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridQuantity {
    /// b/(keV sr^2)
    CrossSection,
    /// pairs/(keV sr^2 electron)
    Yield,
    /// b/(keV sr)
    Photon2Integrated,
    /// b/(keV sr), single Compton with spectral broadening
    SingleCompton,
}

impl GridQuantity {
    const NAMES: [(&'static str, GridQuantity); 4] = [
        ("cross-section", GridQuantity::CrossSection),
        ("yield", GridQuantity::Yield),
        ("photon2-integrated", GridQuantity::Photon2Integrated),
        ("single-compton", GridQuantity::SingleCompton),
    ];

    pub fn name(self) -> &'static str {
        Self::NAMES.iter().find(|(_, q)| *q == self).unwrap().0
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::NAMES.iter().find(|(n, _)| *n == s).map(|(_, q)| *q)
    }

    pub fn names() -> String {
        Self::NAMES.iter().map(|(n, _)| *n).collect::<Vec<_>>().join(", ")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub omega1_kev: (f64, f64),
    pub omega1_steps: usize,
    pub angle: (f64, f64),
    pub angle_steps: usize,
    pub geometry: GeometryMode,
    pub quantity: GridQuantity,
    pub ir_cutoff_kev: f64,
    pub log_floor: f64,
    pub tolerance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sampling {
    pub events: usize,
    pub seed: u64,
    pub ir_cutoff_kev: f64,
    pub envelope: [usize; 5],
    pub safety: f64,
    pub region: PhaseSpaceBox,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: Option<String>,
    pub beam: Beam,
    pub target: Option<Target>,
    pub detectors: Option<Detectors>,
    pub grid: Option<Grid>,
    pub sampler: Option<Sampling>,
}

struct Section {
    path: String,
    table: Table,
    seen: BTreeSet<String>,
    issues: Vec<Issue>,
}

impl Section {
    fn new(path: &str, table: Table) -> Self {
        Section {
            path: path.to_string(),
            table,
            seen: BTreeSet::new(),
            issues: Vec::new(),
        }
    }

    fn key_path(&self, key: &str) -> String {
        if self.path.is_empty() {
            key.to_string()
        } else {
            format!("{}.{key}", self.path)
        }
    }

    fn issue(&mut self, key: &str, message: impl Into<String>) {
        let path = self.key_path(key);
        self.issues.push(Issue {
            path,
            message: message.into(),
        });
    }

    fn take(&mut self, key: &str, required: bool) -> Option<Value> {
        self.seen.insert(key.to_string());
        let v = self.table.get(key).cloned();
        if v.is_none() && required {
            self.issue(key, "required key is missing");
        }
        v
    }

    fn convert<T>(&mut self, key: &str, required: bool, f: impl FnOnce(&Value) -> Result<T, String>) -> Option<T> {
        let v = self.take(key, required)?;
        match f(&v) {
            Ok(x) => Some(x),
            Err(m) => {
                self.issue(key, m);
                None
            }
        }
    }

    fn quantity(&mut self, key: &str, dim: Dimension, required: bool) -> Option<f64> {
        self.convert(key, required, |v| quantity_value(v, dim))
    }

    fn number(&mut self, key: &str, required: bool) -> Option<f64> {
        self.convert(key, required, number_value)
    }

    fn integer(&mut self, key: &str, required: bool) -> Option<u64> {
        self.convert(key, required, |v| match v {
            Value::Integer(i) if *i >= 0 => Ok(*i as u64),
            _ => Err(format!("expected a non-negative integer, got {v}")),
        })
    }

    fn string(&mut self, key: &str, required: bool) -> Option<String> {
        self.convert(key, required, |v| match v {
            Value::String(s) => Ok(s.clone()),
            _ => Err(format!("expected a string, got {v}")),
        })
    }

    fn range(&mut self, key: &str, dim: Dimension) -> Option<(f64, f64)> {
        self.convert(key, false, |v| match v {
            Value::Array(a) if a.len() == 2 => Ok((quantity_value(&a[0], dim)?, quantity_value(&a[1], dim)?)),
            _ => Err(format!("expected [\"<low> <unit>\", \"<high> <unit>\"], got {v}")),
        })
    }

    fn finish(mut self) -> Vec<Issue> {
        let unknown: Vec<String> = self.table.keys().filter(|k| !self.seen.contains(*k)).cloned().collect();
        for k in unknown {
            self.issue(&k, "unknown key");
        }
        self.issues
    }
}

fn quantity_value(v: &Value, dim: Dimension) -> Result<f64, String> {
    match v {
        Value::String(s) => quantity::parse(s, dim),
        Value::Integer(_) | Value::Float(_) => Err(format!(
            "unit suffix required: write \"{v} {}\" or another {dim} unit",
            dim.base_unit()
        )),
        _ => Err(format!(
            "expected a {dim} string such as \"1 {}\", got {v}",
            dim.base_unit()
        )),
    }
}

fn number_value(v: &Value) -> Result<f64, String> {
    match v {
        Value::Integer(i) => Ok(*i as f64),
        Value::Float(f) if f.is_finite() => Ok(*f),
        _ => Err(format!("expected a number, got {v}")),
    }
}

const SECTIONS: [&str; 5] = ["beam", "target", "detectors", "grid", "sampler"];

impl Scenario {
    pub fn from_path(path: &Path) -> Result<Self, ScenarioError> {
        let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ScenarioError> {
        let root: Table = text
            .parse()
            .map_err(|e: toml::de::Error| ScenarioError::Syntax(e.to_string()))?;
        let mut issues = Vec::new();
        let mut top = Section::new("", root.clone());
        let name = top.string("name", false);
        let mut tables = Vec::new();
        for s in SECTIONS {
            let t = match top.take(s, s == "beam") {
                Some(Value::Table(t)) => Some(t),
                Some(_) => {
                    top.issue(s, "expected a table");
                    None
                }
                None => None,
            };
            tables.push(t);
        }
        issues.extend(top.finish());
        let [beam, target, detectors, grid, sampler]: [Option<Table>; 5] = tables.try_into().unwrap();

        let beam = beam.and_then(|t| collect(&mut issues, read_beam(t)));
        let target = target.and_then(|t| collect(&mut issues, read_target(t)));
        let detectors = detectors.and_then(|t| collect(&mut issues, read_detectors(t)));
        let grid = grid.and_then(|t| collect(&mut issues, read_grid(t)));
        let sampler = sampler.and_then(|t| collect(&mut issues, read_sampler(t)));

        if !issues.is_empty() {
            return Err(ScenarioError::Invalid(issues));
        }
        let s = Scenario {
            name,
            beam: beam.expect("beam reported missing above"),
            target,
            detectors,
            grid,
            sampler,
        };
        s.check()?;
        Ok(s)
    }

    /// Cross-section consistency checks that need more than one section.
    fn check(&self) -> Result<(), ScenarioError> {
        let mut issues = Vec::new();
        let mut bad = |path: &str, msg: String| {
            issues.push(Issue {
                path: path.to_string(),
                message: msg,
            })
        };
        if let Err(e) = self.electron() {
            bad("beam.gamma", e.to_string());
        }
        if let Err(e) = self.base_config() {
            bad("beam", e.to_string());
        }
        if let Some(d) = &self.detectors {
            if let Err(e) = DetectorConfig::new(d.theta1, d.phi1, d.solid_angle1, None) {
                bad("detectors", e.to_string());
            }
            if let Err(e) = DetectorConfig::new(d.theta2, d.phi2, d.solid_angle2, None) {
                bad("detectors", e.to_string());
            }
            if !(d.bandwidth > 0.0 && d.bandwidth < 1.0) {
                bad("detectors.bandwidth", format!("{} must lie in (0, 1)", d.bandwidth));
            }
            if d.energies.is_empty() {
                bad("detectors.energies", "at least one energy is required".into());
            }
            if let Some(f) = d.asymmetric_split {
                if !(f > 0.0 && f < 1.0) {
                    bad("detectors.asymmetric_split", format!("{f} must lie in (0, 1)"));
                }
            }
        }
        if let Some(t) = &self.target {
            if let Err(e) = self.target_config_of(t) {
                bad("target", e.to_string());
            }
        }
        if let Some(g) = &self.grid {
            if let Err(e) = self.grid_spec_of(g) {
                bad("grid", e.to_string());
            }
            if matches!(g.quantity, GridQuantity::Yield | GridQuantity::SingleCompton) && !self.beam.is_laser() {
                bad(
                    "grid.quantity",
                    format!("{} needs beam.intensity and beam.pulse_duration", g.quantity.name()),
                );
            }
            if let Some(t) = g.tolerance {
                if !(t > 0.0 && t < 1.0) {
                    bad("grid.tolerance", format!("{t} must lie in (0, 1)"));
                }
            }
        }
        if let Some(s) = &self.sampler {
            if !(s.ir_cutoff_kev > 0.0) {
                bad("sampler.ir_cutoff", "must be positive".into());
            }
            if s.envelope.contains(&0) {
                bad("sampler.envelope", "every axis needs at least one cell".into());
            }
            if !(s.safety >= 1.0) {
                bad("sampler.safety", format!("{} must be >= 1", s.safety));
            }
        }
        if self.beam.is_laser() && self.beam.pulse_duration_s.is_none() {
            bad("beam.pulse_duration", "required when beam.intensity is set".into());
        }
        if issues.is_empty() {
            Ok(())
        } else {
            Err(ScenarioError::Invalid(issues))
        }
    }

    pub fn electron(&self) -> xpair_core::Result<ElectronState> {
        ElectronState::new(self.beam.gamma)
    }

    pub fn photon_energy(&self) -> xpair_core::Result<NaturalEnergy> {
        NaturalEnergy::from_kev(self.beam.photon_energy_kev)
    }

    /// Beam configuration with the detector angles, or all photon angles at
    /// zero when there is no detector section.
    pub fn base_config(&self) -> xpair_core::Result<ScatterConfig> {
        let (p1, p2) = match &self.detectors {
            Some(d) => ((d.theta1, d.phi1), (d.theta2, d.phi2)),
            None => ((0.0, 0.0), (0.0, 0.0)),
        };
        ScatterConfig::new(
            self.photon_energy()?,
            self.electron()?,
            self.beam.incidence_angle,
            p1,
            p2,
        )
    }

    pub fn beam_params(&self) -> BeamParams {
        let b = &self.beam;
        BeamParams {
            n_e: b.electrons_per_bunch,
            n_gamma: b.photons_per_bunch,
            sigma_te: b.electron_spot_m,
            sigma_tgamma: b.photon_spot_m,
            sigma_le: b.electron_bunch_length_m,
            omega_l: NaturalEnergy::from_kev(b.photon_energy_kev).ok(),
            intensity_w_cm2: b.intensity_w_cm2,
            tau_l_s: b.pulse_duration_s,
        }
    }

    pub fn target_config_of(&self, t: &Target) -> xpair_core::Result<TargetConfig> {
        let m = match &t.material {
            TargetMaterial::Named(_) => Material::aluminium(),
            TargetMaterial::Custom {
                z,
                density_g_cm3,
                molar_mass,
            } => Material {
                name: "custom".into(),
                z: *z,
                density_g_cm3: *density_g_cm3,
                molar_mass: *molar_mass,
            },
        };
        TargetConfig::from_material(m, t.thickness_m, t.flux)
    }

    /// Detector pair with detector 1's window centered on `center_kev`.
    pub fn detector_pair(
        &self,
        d: &Detectors,
        center_kev: f64,
    ) -> xpair_core::Result<(DetectorConfig, DetectorConfig)> {
        let frac = match d.bandwidth_reference_kev {
            Some(r) => d.bandwidth * r / center_kev,
            None => d.bandwidth,
        };
        let w = EnergyWindow::new(center_kev, frac)?;
        Ok((
            DetectorConfig::new(d.theta1, d.phi1, d.solid_angle1, Some(w))?,
            DetectorConfig::new(d.theta2, d.phi2, d.solid_angle2, None)?,
        ))
    }

    pub fn grid_spec_of(&self, g: &Grid) -> xpair_core::Result<GridSpec> {
        let mut s = GridSpec::new(g.omega1_kev, g.omega1_steps, g.angle, g.angle_steps, g.geometry)?;
        s.ir_cutoff_kev = g.ir_cutoff_kev;
        s.log_floor = g.log_floor;
        s.validate()?;
        Ok(s)
    }

    pub fn sampler_config_of(&self, s: &Sampling) -> xpair_core::Result<SamplerConfig> {
        let mut c = SamplerConfig::new(self.base_config()?, s.events, s.seed);
        c.region = s.region;
        c.ir_cutoff_kev = s.ir_cutoff_kev;
        c.envelope_resolution = s.envelope;
        c.safety_factor = s.safety;
        Ok(c)
    }

    /// Canonical TOML text; quantities are written in base units.
    pub fn to_toml_string(&self) -> String {
        toml::to_string(&self.to_table()).expect("scenario tables always serialize")
    }

    pub fn to_table(&self) -> Table {
        let mut root = Table::new();
        if let Some(n) = &self.name {
            root.insert("name".into(), Value::String(n.clone()));
        }
        root.insert("beam".into(), Value::Table(write_beam(&self.beam)));
        if let Some(t) = &self.target {
            root.insert("target".into(), Value::Table(write_target(t)));
        }
        if let Some(d) = &self.detectors {
            root.insert("detectors".into(), Value::Table(write_detectors(d)));
        }
        if let Some(g) = &self.grid {
            root.insert("grid".into(), Value::Table(write_grid(g)));
        }
        if let Some(s) = &self.sampler {
            root.insert("sampler".into(), Value::Table(write_sampler(s)));
        }
        root
    }
}

fn collect<T>(issues: &mut Vec<Issue>, r: (Option<T>, Vec<Issue>)) -> Option<T> {
    let (v, found) = r;
    let ok = found.is_empty();
    issues.extend(found);
    if ok {
        v
    } else {
        None
    }
}

fn read_beam(t: Table) -> (Option<Beam>, Vec<Issue>) {
    let mut s = Section::new("beam", t);
    let photon_energy_kev = s.quantity("photon_energy", Dimension::Energy, true);
    let gamma = s.number("gamma", false).unwrap_or(1.0);
    let incidence_angle = s.quantity("incidence_angle", Dimension::Angle, false).unwrap_or(0.0);
    let intensity_w_cm2 = s.quantity("intensity", Dimension::Intensity, false);
    let pulse_duration_s = s.quantity("pulse_duration", Dimension::Time, false);
    let electrons_per_bunch = s.number("electrons_per_bunch", false);
    let photons_per_bunch = s.number("photons_per_bunch", false);
    let electron_spot_m = s.quantity("electron_spot", Dimension::Length, false);
    let photon_spot_m = s.quantity("photon_spot", Dimension::Length, false);
    let electron_bunch_length_m = s.quantity("electron_bunch_length", Dimension::Length, false);
    let beam = photon_energy_kev.map(|e| Beam {
        photon_energy_kev: e,
        gamma,
        incidence_angle,
        intensity_w_cm2,
        pulse_duration_s,
        electrons_per_bunch,
        photons_per_bunch,
        electron_spot_m,
        photon_spot_m,
        electron_bunch_length_m,
    });
    (beam, s.finish())
}

fn write_beam(b: &Beam) -> Table {
    let mut t = Table::new();
    put_q(&mut t, "photon_energy", Some(b.photon_energy_kev), Dimension::Energy);
    t.insert("gamma".into(), Value::Float(b.gamma));
    put_q(&mut t, "incidence_angle", Some(b.incidence_angle), Dimension::Angle);
    put_q(&mut t, "intensity", b.intensity_w_cm2, Dimension::Intensity);
    put_q(&mut t, "pulse_duration", b.pulse_duration_s, Dimension::Time);
    put_n(&mut t, "electrons_per_bunch", b.electrons_per_bunch);
    put_n(&mut t, "photons_per_bunch", b.photons_per_bunch);
    put_q(&mut t, "electron_spot", b.electron_spot_m, Dimension::Length);
    put_q(&mut t, "photon_spot", b.photon_spot_m, Dimension::Length);
    put_q(
        &mut t,
        "electron_bunch_length",
        b.electron_bunch_length_m,
        Dimension::Length,
    );
    t
}

fn read_target(t: Table) -> (Option<Target>, Vec<Issue>) {
    let mut s = Section::new("target", t);
    let named = s.string("material", false);
    let z = s.number("z", false);
    let density = s.quantity("density", Dimension::Density, false);
    let molar = s.quantity("molar_mass", Dimension::MolarMass, false);
    let thickness = s.quantity("thickness", Dimension::Length, true);
    let flux = s.quantity("flux", Dimension::Rate, true);
    let material = match (named, z, density, molar) {
        (Some(n), None, None, None) => {
            if n == "Al" {
                Some(TargetMaterial::Named(n))
            } else {
                s.issue(
                    "material",
                    format!("unknown material {n:?}; known: Al, or give z, density, molar_mass"),
                );
                None
            }
        }
        (None, Some(z), Some(d), Some(m)) => Some(TargetMaterial::Custom {
            z,
            density_g_cm3: d,
            molar_mass: m,
        }),
        _ => {
            s.issue("material", "give either material or all of z, density, molar_mass");
            None
        }
    };
    let target = match (material, thickness, flux) {
        (Some(material), Some(thickness_m), Some(flux)) => Some(Target {
            material,
            thickness_m,
            flux,
        }),
        _ => None,
    };
    (target, s.finish())
}

fn write_target(tg: &Target) -> Table {
    let mut t = Table::new();
    match &tg.material {
        TargetMaterial::Named(n) => {
            t.insert("material".into(), Value::String(n.clone()));
        }
        TargetMaterial::Custom {
            z,
            density_g_cm3,
            molar_mass,
        } => {
            t.insert("z".into(), Value::Float(*z));
            put_q(&mut t, "density", Some(*density_g_cm3), Dimension::Density);
            put_q(&mut t, "molar_mass", Some(*molar_mass), Dimension::MolarMass);
        }
    }
    put_q(&mut t, "thickness", Some(tg.thickness_m), Dimension::Length);
    put_q(&mut t, "flux", Some(tg.flux), Dimension::Rate);
    t
}

const ACCEPTANCE_NAMES: [(&str, AcceptanceMode); 3] = [
    ("midpoint", AcceptanceMode::Midpoint),
    ("quadrature", AcceptanceMode::Quadrature),
    ("auto", AcceptanceMode::Auto),
];

fn read_detectors(t: Table) -> (Option<Detectors>, Vec<Issue>) {
    let mut s = Section::new("detectors", t);
    let theta1 = s.quantity("theta1", Dimension::Angle, true);
    let phi1 = s.quantity("phi1", Dimension::Angle, true);
    let theta2 = s.quantity("theta2", Dimension::Angle, true);
    let phi2 = s.quantity("phi2", Dimension::Angle, true);
    let solid_angle1 = s.quantity("solid_angle1", Dimension::SolidAngle, true);
    let solid_angle2 = s.quantity("solid_angle2", Dimension::SolidAngle, true);
    let bandwidth = s.number("bandwidth", true);
    let bandwidth_reference_kev = s.quantity("bandwidth_reference", Dimension::Energy, false);
    let energies = s.convert("energies", true, |v| match v {
        Value::Array(a) => a
            .iter()
            .map(|e| match e {
                Value::String(x) if x == "symmetric" => Ok(EnergyPoint::Symmetric),
                _ => quantity_value(e, Dimension::Energy).map(EnergyPoint::Kev),
            })
            .collect(),
        _ => Err(format!("expected a list of energies, got {v}")),
    });
    let acceptance = match s.string("acceptance", false) {
        None => Some(AcceptanceMode::Midpoint),
        Some(n) => match ACCEPTANCE_NAMES.iter().find(|(k, _)| *k == n) {
            Some((_, m)) => Some(*m),
            None => {
                s.issue(
                    "acceptance",
                    format!("unknown mode {n:?}; expected midpoint, quadrature or auto"),
                );
                None
            }
        },
    };
    let asymmetric_split = s.number("asymmetric_split", false);
    let d = (|| {
        Some(Detectors {
            theta1: theta1?,
            phi1: phi1?,
            theta2: theta2?,
            phi2: phi2?,
            solid_angle1: solid_angle1?,
            solid_angle2: solid_angle2?,
            bandwidth: bandwidth?,
            bandwidth_reference_kev,
            energies: energies?,
            acceptance: acceptance?,
            asymmetric_split,
        })
    })();
    (d, s.finish())
}

fn write_detectors(d: &Detectors) -> Table {
    let mut t = Table::new();
    put_q(&mut t, "theta1", Some(d.theta1), Dimension::Angle);
    put_q(&mut t, "phi1", Some(d.phi1), Dimension::Angle);
    put_q(&mut t, "theta2", Some(d.theta2), Dimension::Angle);
    put_q(&mut t, "phi2", Some(d.phi2), Dimension::Angle);
    put_q(&mut t, "solid_angle1", Some(d.solid_angle1), Dimension::SolidAngle);
    put_q(&mut t, "solid_angle2", Some(d.solid_angle2), Dimension::SolidAngle);
    t.insert("bandwidth".into(), Value::Float(d.bandwidth));
    put_q(
        &mut t,
        "bandwidth_reference",
        d.bandwidth_reference_kev,
        Dimension::Energy,
    );
    let energies = d
        .energies
        .iter()
        .map(|e| match e {
            EnergyPoint::Symmetric => Value::String("symmetric".into()),
            EnergyPoint::Kev(k) => Value::String(quantity::format(*k, Dimension::Energy)),
        })
        .collect();
    t.insert("energies".into(), Value::Array(energies));
    let mode = ACCEPTANCE_NAMES.iter().find(|(_, m)| *m == d.acceptance).unwrap().0;
    t.insert("acceptance".into(), Value::String(mode.into()));
    put_n(&mut t, "asymmetric_split", d.asymmetric_split);
    t
}

fn read_grid(t: Table) -> (Option<Grid>, Vec<Issue>) {
    let mut s = Section::new("grid", t);
    let w0 = s.quantity("omega1_min", Dimension::Energy, true);
    let w1 = s.quantity("omega1_max", Dimension::Energy, true);
    let wn = s.integer("omega1_steps", true);
    let a0 = s.quantity("angle_min", Dimension::Angle, true);
    let a1 = s.quantity("angle_max", Dimension::Angle, true);
    let an = s.integer("angle_steps", true);
    let geometry = match s.string("geometry", false).as_deref() {
        None | Some("one-mode") => Some(GeometryMode::OneMode),
        Some("two-mode") => Some(GeometryMode::TwoMode),
        Some("custom") => {
            let p1 = s.quantity("phi1", Dimension::Angle, true);
            let p2 = s.quantity("phi2", Dimension::Angle, true);
            p1.zip(p2).map(|(phi1, phi2)| GeometryMode::Custom { phi1, phi2 })
        }
        Some(other) => {
            s.issue(
                "geometry",
                format!("unknown geometry {other:?}; expected one-mode, two-mode or custom"),
            );
            None
        }
    };
    let quantity = match s.string("quantity", false) {
        None => Some(GridQuantity::CrossSection),
        Some(n) => GridQuantity::from_name(&n).or_else(|| {
            s.issue(
                "quantity",
                format!("unknown quantity {n:?}; expected one of {}", GridQuantity::names()),
            );
            None
        }),
    };
    let ir_cutoff_kev = s
        .quantity("ir_cutoff", Dimension::Energy, false)
        .unwrap_or(DEFAULT_IR_CUTOFF_KEV);
    let log_floor = s.number("log_floor", false).unwrap_or(DEFAULT_LOG_FLOOR);
    let tolerance = s.number("tolerance", false);
    let g = (|| {
        Some(Grid {
            omega1_kev: (w0?, w1?),
            omega1_steps: wn? as usize,
            angle: (a0?, a1?),
            angle_steps: an? as usize,
            geometry: geometry?,
            quantity: quantity?,
            ir_cutoff_kev,
            log_floor,
            tolerance,
        })
    })();
    (g, s.finish())
}

fn write_grid(g: &Grid) -> Table {
    let mut t = Table::new();
    put_q(&mut t, "omega1_min", Some(g.omega1_kev.0), Dimension::Energy);
    put_q(&mut t, "omega1_max", Some(g.omega1_kev.1), Dimension::Energy);
    t.insert("omega1_steps".into(), Value::Integer(g.omega1_steps as i64));
    put_q(&mut t, "angle_min", Some(g.angle.0), Dimension::Angle);
    put_q(&mut t, "angle_max", Some(g.angle.1), Dimension::Angle);
    t.insert("angle_steps".into(), Value::Integer(g.angle_steps as i64));
    let geometry = match g.geometry {
        GeometryMode::OneMode => "one-mode",
        GeometryMode::TwoMode => "two-mode",
        GeometryMode::Custom { phi1, phi2 } => {
            put_q(&mut t, "phi1", Some(phi1), Dimension::Angle);
            put_q(&mut t, "phi2", Some(phi2), Dimension::Angle);
            "custom"
        }
    };
    t.insert("geometry".into(), Value::String(geometry.into()));
    t.insert("quantity".into(), Value::String(g.quantity.name().into()));
    put_q(&mut t, "ir_cutoff", Some(g.ir_cutoff_kev), Dimension::Energy);
    t.insert("log_floor".into(), Value::Float(g.log_floor));
    put_n(&mut t, "tolerance", g.tolerance);
    t
}

fn read_sampler(t: Table) -> (Option<Sampling>, Vec<Issue>) {
    let mut s = Section::new("sampler", t);
    let events = s.integer("events", true);
    let seed = s.integer("seed", false).unwrap_or(0);
    let ir_cutoff_kev = s
        .quantity("ir_cutoff", Dimension::Energy, false)
        .unwrap_or(DEFAULT_IR_CUTOFF_KEV);
    let envelope = s
        .convert("envelope", false, |v| {
            let err = || format!("expected five positive integers, got {v}");
            let a = v.as_array().filter(|a| a.len() == 5).ok_or_else(err)?;
            let mut out = [0usize; 5];
            for (o, x) in out.iter_mut().zip(a) {
                *o = x.as_integer().filter(|i| *i > 0).ok_or_else(err)? as usize;
            }
            Ok(out)
        })
        .unwrap_or(DEFAULT_ENVELOPE_RESOLUTION);
    let safety = s.number("safety", false).unwrap_or(DEFAULT_SAFETY_FACTOR);
    let full = PhaseSpaceBox::default();
    let region = PhaseSpaceBox {
        theta1: s.range("theta1", Dimension::Angle).unwrap_or(full.theta1),
        phi1: s.range("phi1", Dimension::Angle).unwrap_or(full.phi1),
        theta2: s.range("theta2", Dimension::Angle).unwrap_or(full.theta2),
        phi2: s.range("phi2", Dimension::Angle).unwrap_or(full.phi2),
        omega1_kev: s.range("omega1", Dimension::Energy).unwrap_or(full.omega1_kev),
    };
    let out = events.map(|n| Sampling {
        events: n as usize,
        seed,
        ir_cutoff_kev,
        envelope,
        safety,
        region,
    });
    (out, s.finish())
}

fn write_sampler(s: &Sampling) -> Table {
    let mut t = Table::new();
    t.insert("events".into(), Value::Integer(s.events as i64));
    t.insert("seed".into(), Value::Integer(s.seed as i64));
    put_q(&mut t, "ir_cutoff", Some(s.ir_cutoff_kev), Dimension::Energy);
    t.insert(
        "envelope".into(),
        Value::Array(s.envelope.iter().map(|n| Value::Integer(*n as i64)).collect()),
    );
    t.insert("safety".into(), Value::Float(s.safety));
    let full = PhaseSpaceBox::default();
    let r = &s.region;
    for (key, v, f, dim) in [
        ("theta1", r.theta1, full.theta1, Dimension::Angle),
        ("phi1", r.phi1, full.phi1, Dimension::Angle),
        ("theta2", r.theta2, full.theta2, Dimension::Angle),
        ("phi2", r.phi2, full.phi2, Dimension::Angle),
        ("omega1", r.omega1_kev, full.omega1_kev, Dimension::Energy),
    ] {
        // the open upper energy bound has no finite spelling; omit defaults
        if v != f {
            t.insert(
                key.into(),
                Value::Array(vec![
                    Value::String(quantity::format(v.0, dim)),
                    Value::String(quantity::format(v.1, dim)),
                ]),
            );
        }
    }
    t
}

fn put_q(t: &mut Table, key: &str, v: Option<f64>, dim: Dimension) {
    if let Some(v) = v {
        t.insert(key.into(), Value::String(quantity::format(v, dim)));
    }
}

fn put_n(t: &mut Table, key: &str, v: Option<f64>) {
    if let Some(v) = v {
        t.insert(key.into(), Value::Float(v));
    }
}
