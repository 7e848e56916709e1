//! Numerical integration: the second-photon solid-angle integral,
//! detector acceptance integrals and (omega1, theta) grids.

use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::{PI, TAU};

use crate::dcs::triple_diff_xsec_at;
use crate::error::{Error, Result};
use crate::kinematics::{angles_of, ConfigKinematics, ScatterConfig};
use crate::numeric::{gauss_legendre_on, NeumaierSum};
use crate::rates::DetectorConfig;
use crate::units::{xsec_natural_to_barn_per_kev_sr2, Barn, NaturalEnergy, CONSTANTS};

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    /// Absolute error bound.
    pub error: f64,
    pub evaluations: usize,
}

// 15-point Kronrod extension of the 7-point Gauss rule, on [-1, 1].
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7).
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Nodes and (Kronrod, Gauss) weights of the 15-point rule on `[a, b]`.
/// Gauss weights are zero at nodes that belong to the Kronrod rule only.
fn gk15_on(a: f64, b: f64) -> [(f64, f64, f64); 15] {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut out = [(0.0, 0.0, 0.0); 15];
    for j in 0..7 {
        let wg = if j % 2 == 1 { WG[j / 2] } else { 0.0 };
        out[2 * j] = (mid - half * XGK[j], half * WGK[j], half * wg);
        out[2 * j + 1] = (mid + half * XGK[j], half * WGK[j], half * wg);
    }
    out[14] = (mid, half * WGK[7], half * WG[3]);
    out
}

const MAX_INTERVALS_1D: usize = 4000;

/// Adaptive Gauss-Kronrod integration of `f` over `[a, b]` to relative
/// tolerance `rel_tol`.
pub fn integrate_1d<F>(f: F, a: f64, b: f64, rel_tol: f64) -> Result<Estimate>
where
    F: Fn(f64) -> Result<f64>,
{
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::invalid("integration bounds", format!("[{a}, {b}] not finite")));
    }
    check_tolerance(rel_tol)?;
    let rule = |lo: f64, hi: f64| -> Result<(f64, f64, f64, f64)> {
        let mut k = 0.0;
        let mut g = 0.0;
        for (x, wk, wg) in gk15_on(lo, hi) {
            let v = f(x)?;
            k += wk * v;
            g += wg * v;
        }
        Ok((lo, hi, k, (k - g).abs()))
    };
    let mut pieces = vec![rule(a, b)?];
    let mut evaluations = 15;
    loop {
        let total: NeumaierSum = pieces.iter().map(|p| p.2).collect();
        let err: f64 = pieces.iter().map(|p| p.3).sum();
        let value = total.value();
        if err <= rel_tol * value.abs() || err == 0.0 {
            return Ok(Estimate {
                value,
                error: err,
                evaluations,
            });
        }
        let (idx, worst) = pieces
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .map(|(i, p)| (i, *p))
            .expect("at least one interval");
        let mid = 0.5 * (worst.0 + worst.1);
        if pieces.len() >= MAX_INTERVALS_1D || mid <= worst.0 || mid >= worst.1 {
            return Err(Error::IntegrationFailure {
                estimate: value,
                error: err,
                evaluations,
            });
        }
        pieces[idx] = rule(worst.0, mid)?;
        pieces.push(rule(mid, worst.1)?);
        evaluations += 30;
    }
}

#[derive(Debug, Clone, Copy)]
struct Rect {
    x: (f64, f64),
    y: (f64, f64),
    value: f64,
    error: f64,
    split_x: bool,
}

/// Upper bound on integrand evaluations in [`integrate_2d`].
pub const MAX_EVALUATIONS_2D: usize = 4_000_000;

fn rect_rule<F>(f: &F, x: (f64, f64), y: (f64, f64)) -> Result<Rect>
where
    F: Fn(f64, f64) -> Result<f64>,
{
    let rx = gk15_on(x.0, x.1);
    let ry = gk15_on(y.0, y.1);
    let (mut kk, mut gg, mut gk, mut kg) = (0.0, 0.0, 0.0, 0.0);
    for &(xi, wkx, wgx) in &rx {
        let (mut k, mut g) = (0.0, 0.0);
        for &(yj, wky, wgy) in &ry {
            let v = f(xi, yj)?;
            k += wky * v;
            g += wgy * v;
        }
        kk += wkx * k;
        kg += wkx * g;
        gk += wgx * k;
        gg += wgx * g;
    }
    let ex = (kk - gk).abs();
    let ey = (kk - kg).abs();
    Ok(Rect {
        x,
        y,
        value: kk,
        error: (kk - gg).abs().max(ex).max(ey),
        split_x: ex >= ey,
    })
}

/// Adaptive tensor-product Gauss-Kronrod cubature over a rectangle,
/// starting from an `nx` by `ny` partition.
pub fn integrate_2d<F>(f: F, x: (f64, f64), y: (f64, f64), initial: (usize, usize), rel_tol: f64) -> Result<Estimate>
where
    F: Fn(f64, f64) -> Result<f64>,
{
    check_tolerance(rel_tol)?;
    let (nx, ny) = (initial.0.max(1), initial.1.max(1));
    let mut rects = Vec::with_capacity(nx * ny * 4);
    for i in 0..nx {
        let x0 = x.0 + (x.1 - x.0) * i as f64 / nx as f64;
        let x1 = x.0 + (x.1 - x.0) * (i + 1) as f64 / nx as f64;
        for j in 0..ny {
            let y0 = y.0 + (y.1 - y.0) * j as f64 / ny as f64;
            let y1 = y.0 + (y.1 - y.0) * (j + 1) as f64 / ny as f64;
            rects.push(rect_rule(&f, (x0, x1), (y0, y1))?);
        }
    }
    let mut evaluations = rects.len() * 225;
    loop {
        let total: NeumaierSum = rects.iter().map(|r| r.value).collect();
        let err: f64 = rects.iter().map(|r| r.error).sum();
        let value = total.value();
        if err <= rel_tol * value.abs() || err == 0.0 {
            return Ok(Estimate {
                value,
                error: err,
                evaluations,
            });
        }
        if evaluations + 450 > MAX_EVALUATIONS_2D {
            return Err(Error::IntegrationFailure {
                estimate: value,
                error: err,
                evaluations,
            });
        }
        let idx = rects
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.error.total_cmp(&b.1.error))
            .map(|(i, _)| i)
            .expect("non-empty partition");
        let r = rects[idx];
        let (a, b) = if r.split_x {
            let m = 0.5 * (r.x.0 + r.x.1);
            (rect_rule(&f, (r.x.0, m), r.y)?, rect_rule(&f, (m, r.x.1), r.y)?)
        } else {
            let m = 0.5 * (r.y.0 + r.y.1);
            (rect_rule(&f, r.x, (r.y.0, m))?, rect_rule(&f, r.x, (m, r.y.1))?)
        };
        rects[idx] = a;
        rects.push(b);
        evaluations += 450;
    }
}

fn check_tolerance(rel_tol: f64) -> Result<()> {
    if !(rel_tol > 0.0 && rel_tol < 1.0) {
        return Err(Error::invalid("tolerance", format!("{rel_tol} must lie in (0, 1)")));
    }
    Ok(())
}

/// Default relative tolerance for [`integrate_photon2`].
pub const DEFAULT_PHOTON2_TOLERANCE: f64 = 1e-4;

/// Polar variable used for the photon-2 integral and the sampler. For fast
/// electrons the cross section is concentrated inside a cone of opening
/// `1/gamma`, so the variable is `u = ln(eps + 2 beta sin^2(theta/2))` rather
/// than `cos theta`. With `eps = (1 - beta)/8` the core `gamma theta < 1`
/// spans about ln 9 in `u` instead of ln 2.
#[derive(Debug, Clone, Copy)]
pub(crate) enum PolarMap {
    Cosine,
    LogDoppler { beta: f64, offset: f64 },
}

impl PolarMap {
    pub(crate) fn for_electron(e: &crate::kinematics::ElectronState) -> Self {
        if e.beta() > 0.5 {
            PolarMap::LogDoppler {
                beta: e.beta(),
                offset: 0.125 * e.one_minus_beta_cos(0.0),
            }
        } else {
            PolarMap::Cosine
        }
    }

    /// Integration variable at polar angle `theta`.
    pub(crate) fn variable(&self, theta: f64) -> f64 {
        match *self {
            PolarMap::Cosine => theta.cos(),
            PolarMap::LogDoppler { beta, offset } => {
                let s = (0.5 * theta).sin();
                (offset + 2.0 * beta * s * s).ln()
            }
        }
    }

    fn range(&self) -> (f64, f64) {
        match *self {
            PolarMap::Cosine => (-1.0, 1.0),
            PolarMap::LogDoppler { beta, offset } => (offset.ln(), (offset + 2.0 * beta).ln()),
        }
    }

    /// `(theta, d cos theta / d s)` at integration variable `s`.
    pub(crate) fn theta_and_jacobian(&self, s: f64) -> (f64, f64) {
        match *self {
            PolarMap::Cosine => (s.clamp(-1.0, 1.0).acos(), 1.0),
            PolarMap::LogDoppler { beta, offset } => {
                let e = s.exp();
                let omc = ((e - offset) / beta).clamp(0.0, 2.0);
                (2.0 * (0.5 * omc).sqrt().min(1.0).asin(), e / beta)
            }
        }
    }
}

/// `d2 sigma / (d omega1 dOmega1')` in b/(keV sr): the triple-differential
/// cross section integrated over all photon-2 directions. The photon-2
/// angles stored in `cfg` are ignored.
pub fn integrate_photon2(cfg: &ScatterConfig, omega1: NaturalEnergy, rel_tol: f64) -> Result<Estimate> {
    let kin = ConfigKinematics::new(cfg);
    // omega1_max does not depend on photon 2, so this is checked once
    kin.omega2(omega1.get())?;
    let map = PolarMap::for_electron(&cfg.electron);
    let w1 = omega1.get();
    let p1 = (cfg.theta1p, cfg.phi1p);
    let integrand = |s: f64, phi: f64| -> Result<f64> {
        let (theta, jac) = map.theta_and_jacobian(s);
        let c = cfg.with_angles(p1, (theta, phi))?;
        Ok(triple_diff_xsec_at(&ConfigKinematics::new(&c), w1)? * jac)
    };
    let est = integrate_2d(integrand, map.range(), (0.0, TAU), (4, 8), rel_tol).map_err(|e| match e {
        Error::IntegrationFailure {
            estimate,
            error,
            evaluations,
        } => Error::IntegrationFailure {
            estimate: to_barn(estimate),
            error: to_barn(error),
            evaluations,
        },
        other => other,
    })?;
    Ok(Estimate {
        value: to_barn(est.value),
        error: to_barn(est.error),
        evaluations: est.evaluations,
    })
}

fn to_barn(v: f64) -> f64 {
    xsec_natural_to_barn_per_kev_sr2(v).unwrap_or(f64::NAN)
}

/// How [`detector_rate_integral`] treats the acceptance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AcceptanceMode {
    /// Cross section at the detector centers times the window sizes.
    Midpoint,
    /// Product Gauss rule over both cones and the energy window.
    Quadrature,
    /// Midpoint unless the cross section varies by more than
    /// [`FLATNESS_THRESHOLD`] across the windows.
    Auto,
}

pub const FLATNESS_THRESHOLD: f64 = 0.05;

/// Directions inside a cone of given solid angle around `(theta, phi)`,
/// returned as `((theta, phi), weight)` with weights summing to the solid angle.
fn cone_rule(det: &DetectorConfig, n_polar: usize, n_azimuth: usize) -> Vec<((f64, f64), f64)> {
    let axis = crate::kinematics::direction(det.theta, det.phi);
    let (st, ct) = det.theta.sin_cos();
    let (sp, cp) = det.phi.sin_cos();
    let e1 = [ct * cp, ct * sp, -st];
    let e2 = [-sp, cp, 0.0];
    let cos_a = 1.0 - det.solid_angle / TAU;
    let mut out = Vec::with_capacity(n_polar * n_azimuth);
    for (c, wc) in gauss_legendre_on(n_polar, cos_a, 1.0) {
        let s = (1.0 - c * c).max(0.0).sqrt();
        for (chi, wchi) in gauss_legendre_on(n_azimuth, 0.0, TAU) {
            let (sc, cc) = chi.sin_cos();
            let d = [0, 1, 2].map(|i| c * axis[i] + s * (cc * e1[i] + sc * e2[i]));
            out.push((angles_of(d), wc * wchi));
        }
    }
    out
}

fn cone_edges(det: &DetectorConfig) -> Vec<(f64, f64)> {
    let cos_a = 1.0 - det.solid_angle / TAU;
    let a = cos_a.clamp(-1.0, 1.0).acos();
    let axis = crate::kinematics::direction(det.theta, det.phi);
    let (st, ct) = det.theta.sin_cos();
    let (sp, cp) = det.phi.sin_cos();
    let e1 = [ct * cp, ct * sp, -st];
    let e2 = [-sp, cp, 0.0];
    (0..4)
        .map(|k| {
            let (sc, cc) = (k as f64 * PI / 2.0).sin_cos();
            let (sa, ca) = a.sin_cos();
            angles_of([0, 1, 2].map(|i| ca * axis[i] + sa * (cc * e1[i] + sc * e2[i])))
        })
        .collect()
}

/// Effective cross section seen by two detectors, in b:
/// `d3 sigma * dOmega1 * dOmega2 * d omega1`, with `d omega1` the fractional
/// bandwidth of detector 1 times its center energy.
///
/// `xsec(omega1_keV, photon1, photon2)` returns b/(keV sr^2); photon
/// directions are `(theta', phi')`. Detector 2 has no independent energy
/// window: its energy follows from kinematics.
pub fn detector_rate_integral<F>(
    xsec: F,
    det1: &DetectorConfig,
    det2: &DetectorConfig,
    mode: AcceptanceMode,
) -> Result<Barn>
where
    F: Fn(f64, (f64, f64), (f64, f64)) -> Result<f64> + Sync,
{
    det1.validate()?;
    det2.validate()?;
    let window = det1
        .energy
        .ok_or_else(|| Error::invalid("detector 1 energy", "an energy window is required on detector 1"))?;
    let center = window.center_kev;
    let width = window.width_kev();
    if det1.solid_angle == 0.0 || det2.solid_angle == 0.0 || width == 0.0 {
        return Ok(Barn(0.0));
    }
    let p1 = (det1.theta, det1.phi);
    let p2 = (det2.theta, det2.phi);
    let f0 = xsec(center, p1, p2).map_err(|e| outside(e, "detector centers"))?;
    let midpoint = f0 * det1.solid_angle * det2.solid_angle * width;
    let use_quadrature = match mode {
        AcceptanceMode::Midpoint => false,
        AcceptanceMode::Quadrature => true,
        AcceptanceMode::Auto => {
            let mut probes = Vec::new();
            for e in [center - 0.5 * width, center + 0.5 * width] {
                probes.push(xsec(e, p1, p2));
            }
            for d in cone_edges(det1) {
                probes.push(xsec(center, d, p2));
            }
            for d in cone_edges(det2) {
                probes.push(xsec(center, p1, d));
            }
            probes.into_iter().any(|p| match p {
                Ok(v) => f0 == 0.0 && v != 0.0 || f0 != 0.0 && (v / f0 - 1.0).abs() > FLATNESS_THRESHOLD,
                Err(_) => true,
            })
        }
    };
    if !use_quadrature {
        return Ok(Barn(midpoint));
    }
    let c1 = cone_rule(det1, 4, 8);
    let c2 = cone_rule(det2, 4, 8);
    let energies = gauss_legendre_on(6, center - 0.5 * width, center + 0.5 * width);
    let partial: Vec<(f64, usize)> = c1
        .par_iter()
        .map(|&(d1, w1)| {
            let mut sum = NeumaierSum::default();
            let mut inside = 0;
            for &(d2, w2) in &c2 {
                for &(e, we) in &energies {
                    // points beyond the kinematic edge carry no cross section
                    if let Ok(v) = xsec(e, d1, d2) {
                        sum.add(v * w1 * w2 * we);
                        inside += 1;
                    }
                }
            }
            (sum.value(), inside)
        })
        .collect();
    if partial.iter().all(|p| p.1 == 0) {
        return Err(Error::AcceptanceOutsidePhaseSpace(
            "no point of the acceptance is kinematically allowed".into(),
        ));
    }
    let total: NeumaierSum = partial.iter().map(|p| p.0).collect();
    Ok(Barn(total.value()))
}

fn outside(e: Error, what: &str) -> Error {
    if e.is_outside_phase_space() || e.is_infrared() {
        Error::AcceptanceOutsidePhaseSpace(format!("{what}: {e}"))
    } else {
        e
    }
}

/// Azimuth arrangement of the two detectors in a grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum GeometryMode {
    /// `phi1 = 0`, `phi2 = pi`
    OneMode,
    /// `phi1 = phi2 = 0`: both photons in the same direction.
    TwoMode,
    Custom {
        phi1: f64,
        phi2: f64,
    },
}

impl GeometryMode {
    pub fn azimuths(self) -> (f64, f64) {
        match self {
            GeometryMode::OneMode => (0.0, PI),
            GeometryMode::TwoMode => (0.0, 0.0),
            GeometryMode::Custom { phi1, phi2 } => (phi1, phi2),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridSpec {
    /// keV
    pub omega1_range: (f64, f64),
    pub omega1_steps: usize,
    /// rad
    pub angle_range: (f64, f64),
    pub angle_steps: usize,
    pub geometry: GeometryMode,
    /// Cells where either photon is softer than this (keV) are masked.
    pub ir_cutoff_kev: f64,
    /// Floor applied to `log10_value`.
    pub log_floor: f64,
}

pub const DEFAULT_IR_CUTOFF_KEV: f64 = 0.1;
pub const DEFAULT_LOG_FLOOR: f64 = -30.0;

impl GridSpec {
    pub fn new(
        omega1_range: (f64, f64),
        omega1_steps: usize,
        angle_range: (f64, f64),
        angle_steps: usize,
        geometry: GeometryMode,
    ) -> Result<Self> {
        let spec = GridSpec {
            omega1_range,
            omega1_steps,
            angle_range,
            angle_steps,
            geometry,
            ir_cutoff_kev: DEFAULT_IR_CUTOFF_KEV,
            log_floor: DEFAULT_LOG_FLOOR,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let (w0, w1) = self.omega1_range;
        if !(w0 > 0.0 && w1 >= w0 && w1.is_finite()) {
            return Err(Error::invalid("omega1 range", format!("[{w0}, {w1}] keV")));
        }
        let (a0, a1) = self.angle_range;
        if !(a0 >= 0.0 && a1 >= a0 && a1 <= PI) {
            return Err(Error::invalid(
                "angle range",
                format!("[{a0}, {a1}] rad not inside [0, pi]"),
            ));
        }
        if self.omega1_steps == 0 || self.angle_steps == 0 {
            return Err(Error::invalid("grid steps", "at least one step per axis"));
        }
        if self.omega1_steps == 1 && w1 != w0 || self.angle_steps == 1 && a1 != a0 {
            return Err(Error::invalid("grid steps", "a single step needs a degenerate range"));
        }
        if !(self.ir_cutoff_kev > 0.0) {
            return Err(Error::invalid("ir cutoff", "must be positive"));
        }
        Ok(())
    }

    pub fn omega1_axis(&self) -> Vec<f64> {
        linspace(self.omega1_range, self.omega1_steps)
    }

    pub fn angle_axis(&self) -> Vec<f64> {
        linspace(self.angle_range, self.angle_steps)
    }
}

fn linspace((a, b): (f64, f64), n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

/// Why a grid cell has no value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[repr(u8)]
pub enum MaskCode {
    Ok = 0,
    Forbidden = 1,
    Infrared = 2,
    Numerical = 3,
}

impl MaskCode {
    pub fn from_error(e: &Error) -> Self {
        if e.is_outside_phase_space() {
            MaskCode::Forbidden
        } else if e.is_infrared() {
            MaskCode::Infrared
        } else {
            MaskCode::Numerical
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridCell {
    pub value: Option<f64>,
    pub mask: MaskCode,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridResult {
    pub omega1_kev: Vec<f64>,
    pub angle_rad: Vec<f64>,
    /// Row-major, `omega1` outer.
    pub cells: Vec<GridCell>,
    pub quantity: String,
    pub units: String,
    pub log_floor: f64,
}

impl GridResult {
    pub fn cell(&self, i_omega: usize, i_angle: usize) -> &GridCell {
        &self.cells[i_omega * self.angle_rad.len() + i_angle]
    }

    /// Largest unmasked value.
    pub fn max_value(&self) -> Option<f64> {
        self.cells.iter().filter_map(|c| c.value).reduce(f64::max)
    }

    pub fn log10_value(&self, v: f64) -> f64 {
        if v > 0.0 {
            v.log10().max(self.log_floor)
        } else {
            self.log_floor
        }
    }

    /// CSV with a versioned comment header and fixed columns
    /// `omega1_keV,theta_rad,value,log10_value,mask_code`; masked cells leave
    /// both value fields empty.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(
            w,
            "# xpair grid schema=1 quantity={} units={}",
            self.quantity, self.units
        )?;
        writeln!(w, "omega1_keV,theta_rad,value,log10_value,mask_code")?;
        for (i, om) in self.omega1_kev.iter().enumerate() {
            for (j, th) in self.angle_rad.iter().enumerate() {
                let c = self.cell(i, j);
                match c.value {
                    Some(v) => writeln!(w, "{om},{th},{v:e},{},{}", self.log10_value(v), c.mask as u8)?,
                    None => writeln!(w, "{om},{th},,,{}", c.mask as u8)?,
                }
            }
        }
        Ok(())
    }
}

/// Evaluates `f(omega1_keV, theta)` on every cell of the grid in parallel.
/// Errors become mask codes.
pub fn fill_grid<F>(spec: &GridSpec, quantity: &str, units: &str, f: F) -> Result<GridResult>
where
    F: Fn(f64, f64) -> Result<f64> + Sync,
{
    spec.validate()?;
    let om = spec.omega1_axis();
    let th = spec.angle_axis();
    let cells = (0..om.len() * th.len())
        .into_par_iter()
        .map(|k| {
            let (w, t) = (om[k / th.len()], th[k % th.len()]);
            match f(w, t) {
                Ok(v) if v.is_finite() => GridCell {
                    value: Some(v),
                    mask: MaskCode::Ok,
                },
                Ok(_) => GridCell {
                    value: None,
                    mask: MaskCode::Numerical,
                },
                Err(e) => GridCell {
                    value: None,
                    mask: MaskCode::from_error(&e),
                },
            }
        })
        .collect();
    Ok(GridResult {
        omega1_kev: om,
        angle_rad: th,
        cells,
        quantity: quantity.to_string(),
        units: units.to_string(),
        log_floor: spec.log_floor,
    })
}

/// Triple-differential cross section in b/(keV sr^2) with `theta1 = theta2 = theta`
/// and the azimuths of the geometry mode, masked below the infrared cutoff.
pub fn triple_xsec_at_grid_point(base: &ScatterConfig, spec: &GridSpec, omega1_kev: f64, theta: f64) -> Result<f64> {
    let (phi1, phi2) = spec.geometry.azimuths();
    let cfg = base.with_angles((theta, phi1), (theta, phi2))?;
    let cutoff = NaturalEnergy::from_kev(spec.ir_cutoff_kev)?;
    let v = crate::dcs::triple_diff_xsec_cut(&cfg, NaturalEnergy::from_kev(omega1_kev)?, cutoff)?;
    Ok(v.to_barn_per_kev_sr2())
}

pub fn triple_xsec_grid(base: &ScatterConfig, spec: &GridSpec) -> Result<GridResult> {
    fill_grid(spec, "d3sigma", "b/(keV*sr^2)", |w, t| {
        triple_xsec_at_grid_point(base, spec, w, t)
    })
}

/// Photon-2-integrated cross section in b/(keV sr) over `(omega1, theta1')`.
pub fn photon2_integrated_grid(base: &ScatterConfig, spec: &GridSpec, rel_tol: f64) -> Result<GridResult> {
    let (phi1, _) = spec.geometry.azimuths();
    fill_grid(spec, "d2sigma_photon2_integrated", "b/(keV*sr)", |w, t| {
        if w < spec.ir_cutoff_kev {
            return Err(Error::BelowInfraredCutoff {
                omega: w / CONSTANTS.mc2_kev,
                cutoff: spec.ir_cutoff_kev / CONSTANTS.mc2_kev,
            });
        }
        let cfg = base.with_angles((t, phi1), (base.theta2p, base.phi2p))?;
        let kin = ConfigKinematics::new(&cfg);
        let w1 = w / CONSTANTS.mc2_kev;
        if w1 >= kin.omega1_max() {
            return Err(Error::KinematicallyForbidden {
                omega1: w1,
                omega1_max: kin.omega1_max(),
            });
        }
        if (kin.omega1_max() - w1) * CONSTANTS.mc2_kev < spec.ir_cutoff_kev {
            return Err(Error::BelowInfraredCutoff {
                omega: kin.omega1_max() - w / CONSTANTS.mc2_kev,
                cutoff: spec.ir_cutoff_kev / CONSTANTS.mc2_kev,
            });
        }
        integrate_photon2(&cfg, NaturalEnergy::from_kev(w)?, rel_tol).map(|e| e.value)
    })
}
