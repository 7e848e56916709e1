//! Monte Carlo generation of photon pairs distributed according to the
//! triple-differential cross section.
//!
//! Events are drawn by rejection against a piecewise-constant envelope on
//! the unit 5-cube `(t, s1, phi1, s2, phi2)`. The polar coordinates `s`
//! are linear in `cos theta'` (or in `ln(1 - beta cos theta')` for fast
//! electrons) and `t` is linear in `ln(omega1 / omega2)` between the two
//! infrared cutoffs, which flattens both soft-photon divergences.
//!
//! Work is split into fixed-size chunks. Chunk `k` draws from a ChaCha8
//! generator seeded with the master seed on stream `k`, so the event
//! stream does not depend on the number of worker threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::{PI, TAU};
use std::io::Write;

use crate::dcs::triple_diff_xsec_at;
use crate::error::{Error, Result};
use crate::kinematics::{direction, reconstruct_final_electron, ConfigKinematics, FourVector, ScatterConfig};
use crate::quadrature::PolarMap;
use crate::rates::DetectorConfig;
use crate::units::{NaturalEnergy, CONSTANTS};

/// Events generated per chunk (and per random stream).
pub const CHUNK_EVENTS: usize = 4096;

pub const DEFAULT_ENVELOPE_RESOLUTION: [usize; 5] = [24, 12, 12, 12, 12];
pub const DEFAULT_SAFETY_FACTOR: f64 = 1.2;
pub const LOW_ACCEPTANCE_WARNING: f64 = 1e-4;
/// Random interior points evaluated per envelope cell, besides its corners
/// and centre.
pub const ENVELOPE_PROBES: usize = 4;
const ENVELOPE_PROBE_SEED: u64 = 0x5eed_e4e1;

/// Region of phase space to sample. Angles in rad, energies in keV.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseSpaceBox {
    pub theta1: (f64, f64),
    pub phi1: (f64, f64),
    pub theta2: (f64, f64),
    pub phi2: (f64, f64),
    pub omega1_kev: (f64, f64),
}

impl Default for PhaseSpaceBox {
    fn default() -> Self {
        PhaseSpaceBox {
            theta1: (0.0, PI),
            phi1: (0.0, TAU),
            theta2: (0.0, PI),
            phi2: (0.0, TAU),
            omega1_kev: (0.0, f64::INFINITY),
        }
    }
}

impl PhaseSpaceBox {
    fn validate(&self) -> Result<()> {
        for (what, (a, b)) in [("theta1 range", self.theta1), ("theta2 range", self.theta2)] {
            if !(a >= 0.0 && b > a && b <= PI) {
                return Err(Error::invalid(what, format!("[{a}, {b}] not inside [0, pi]")));
            }
        }
        for (what, (a, b)) in [("phi1 range", self.phi1), ("phi2 range", self.phi2)] {
            if !(a.is_finite() && b > a && b - a <= TAU + 1e-12) {
                return Err(Error::invalid(what, format!("[{a}, {b}]")));
            }
        }
        let (w0, w1) = self.omega1_kev;
        if !(w0 >= 0.0 && w1 > w0) {
            return Err(Error::invalid("omega1 range", format!("[{w0}, {w1}] keV")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SamplerConfig {
    /// Beam and electron; the photon angles are overwritten per event.
    pub scenario: ScatterConfig,
    pub region: PhaseSpaceBox,
    /// Both photons must carry at least this energy (keV).
    pub ir_cutoff_kev: f64,
    pub n_events: usize,
    pub seed: u64,
    pub envelope_resolution: [usize; 5],
    pub safety_factor: f64,
}

impl SamplerConfig {
    pub fn new(scenario: ScatterConfig, n_events: usize, seed: u64) -> Self {
        SamplerConfig {
            scenario,
            region: PhaseSpaceBox::default(),
            ir_cutoff_kev: crate::quadrature::DEFAULT_IR_CUTOFF_KEV,
            n_events,
            seed,
            envelope_resolution: DEFAULT_ENVELOPE_RESOLUTION,
            safety_factor: DEFAULT_SAFETY_FACTOR,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.ir_cutoff_kev > 0.0) {
            return Err(Error::invalid("ir cutoff", "must be positive"));
        }
        if self.envelope_resolution.contains(&0) {
            return Err(Error::invalid("envelope resolution", "every axis needs a cell"));
        }
        if !(self.safety_factor >= 1.0) {
            return Err(Error::invalid("safety factor", "must be >= 1"));
        }
        self.region.validate()
    }
}

/// One sampled photon pair. Angles are measured about the electron axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairEvent {
    pub omega1_kev: f64,
    pub omega2_kev: f64,
    pub theta1: f64,
    pub phi1: f64,
    pub theta2: f64,
    pub phi2: f64,
    pub weight: f64,
    /// Recoil electron, natural units.
    pub p_prime: FourVector,
}

impl PairEvent {
    pub fn dir1(&self) -> [f64; 3] {
        direction(self.theta1, self.phi1)
    }

    pub fn dir2(&self) -> [f64; 3] {
        direction(self.theta2, self.phi2)
    }
}

#[derive(Debug, Clone, Copy)]
struct Axis {
    lo: f64,
    hi: f64,
}

impl Axis {
    fn at(&self, s: f64) -> f64 {
        self.lo + s * (self.hi - self.lo)
    }
}

/// A point of the unit cube mapped to physics coordinates.
struct Mapped {
    theta1: f64,
    phi1: f64,
    theta2: f64,
    phi2: f64,
    omega1: f64,
    omega2: f64,
    density: f64,
}

/// Rejection sampler with a cached envelope.
pub struct Sampler {
    cfg: SamplerConfig,
    polar: PolarMap,
    s1: Axis,
    s2: Axis,
    phi1: Axis,
    phi2: Axis,
    cutoff: f64,
    omega1_box: (f64, f64),
    bounds: Vec<f64>,
    cdf: Vec<f64>,
    /// Integral of the envelope over the unit cube, natural units.
    envelope_integral: f64,
}

/// Output of a sampling run.
#[derive(Debug, Clone, Serialize)]
pub struct SampleRun {
    pub events: Vec<PairEvent>,
    pub proposals: u64,
    pub acceptance: f64,
    /// Cross section of the sampled region, b.
    pub cross_section_barn: f64,
    /// Statistical error of `cross_section_barn`, b.
    pub cross_section_error_barn: f64,
}

impl Sampler {
    /// Validates the configuration and tabulates the envelope.
    pub fn new(cfg: SamplerConfig) -> Result<Self> {
        cfg.validate()?;
        let polar = PolarMap::for_electron(&cfg.scenario.electron);
        let r = cfg.region;
        let mut s = Sampler {
            cfg,
            polar,
            s1: Axis {
                lo: polar.variable(r.theta1.0),
                hi: polar.variable(r.theta1.1),
            },
            s2: Axis {
                lo: polar.variable(r.theta2.0),
                hi: polar.variable(r.theta2.1),
            },
            phi1: Axis {
                lo: r.phi1.0,
                hi: r.phi1.1,
            },
            phi2: Axis {
                lo: r.phi2.0,
                hi: r.phi2.1,
            },
            cutoff: cfg.ir_cutoff_kev / CONSTANTS.mc2_kev,
            omega1_box: (r.omega1_kev.0 / CONSTANTS.mc2_kev, r.omega1_kev.1 / CONSTANTS.mc2_kev),
            bounds: Vec::new(),
            cdf: Vec::new(),
            envelope_integral: 0.0,
        };
        s.build_envelope()?;
        Ok(s)
    }

    pub fn config(&self) -> &SamplerConfig {
        &self.cfg
    }

    /// Envelope integral in b; an upper bound on the region's cross section.
    pub fn envelope_barn(&self) -> f64 {
        self.envelope_integral * CONSTANTS.r0_sq_barn()
    }

    fn map(&self, x: [f64; 5]) -> Option<Mapped> {
        let (theta1, j1) = self.polar.theta_and_jacobian(self.s1.at(x[1]));
        let (theta2, j2) = self.polar.theta_and_jacobian(self.s2.at(x[3]));
        let phi1 = self.phi1.at(x[2]);
        let phi2 = self.phi2.at(x[4]);
        let cfg = self.cfg.scenario.with_angles((theta1, phi1), (theta2, phi2)).ok()?;
        let kin = ConfigKinematics::new(&cfg);
        let c12 = kin.angles.one_minus_cos12;
        // omega1 interval with both photons above the cutoff
        let lo = self.cutoff.max(self.omega1_box.0);
        let hi = kin.omega1_for_omega2(self.cutoff).min(self.omega1_box.1);
        if !(hi > lo) || !(kin.d1 - self.cutoff * c12 > 0.0) {
            return None;
        }
        let v_of = |w1: f64| -> Option<f64> {
            let w2 = kin.omega2(w1).ok()?;
            (w2 > 0.0).then(|| (w1 / w2).ln())
        };
        let (v_lo, v_hi) = (v_of(lo)?, v_of(hi)?);
        let v = v_lo + x[0] * (v_hi - v_lo);
        let ev = v.exp();
        let sum = kin.d2 + ev * kin.d1;
        let disc = (sum * sum - 4.0 * c12 * ev * kin.incident).max(0.0);
        let omega1 = 2.0 * ev * kin.incident / (sum + disc.sqrt());
        let omega2 = kin.omega2(omega1).ok()?;
        if !(omega2 > 0.0) {
            return None;
        }
        let dv_dw1 = 1.0 / omega1 - kin.domega2_domega1(omega1) / omega2;
        let xs = triple_diff_xsec_at(&kin, omega1).ok()?;
        let jac = (v_hi - v_lo) / dv_dw1
            * j1
            * (self.s1.hi - self.s1.lo).abs()
            * j2
            * (self.s2.hi - self.s2.lo).abs()
            * (self.phi1.hi - self.phi1.lo)
            * (self.phi2.hi - self.phi2.lo);
        Some(Mapped {
            theta1,
            phi1,
            theta2,
            phi2,
            omega1,
            omega2,
            density: xs * jac,
        })
    }

    /// Density on the unit cube, natural units; zero outside phase space.
    pub fn density(&self, x: [f64; 5]) -> f64 {
        self.map(x).map_or(0.0, |m| m.density)
    }

    fn build_envelope(&mut self) -> Result<()> {
        let res = self.cfg.envelope_resolution;
        let nv: Vec<usize> = res.iter().map(|r| r + 1).collect();
        let n_vertices: usize = nv.iter().product();
        let vertices: Vec<f64> = (0..n_vertices)
            .into_par_iter()
            .map(|k| {
                let idx = unflatten(k, &nv);
                self.density(std::array::from_fn(|d| idx[d] as f64 / res[d] as f64))
            })
            .collect();
        let n_cells: usize = res.iter().product();
        let safety = self.cfg.safety_factor;
        let bounds: Vec<f64> = (0..n_cells)
            .into_par_iter()
            .map(|k| {
                let idx = unflatten(k, &res);
                let centre = self.density(std::array::from_fn(|d| (idx[d] as f64 + 0.5) / res[d] as f64));
                let mut m = centre;
                for corner in 0..32usize {
                    let v: [usize; 5] = std::array::from_fn(|d| idx[d] + ((corner >> d) & 1));
                    m = m.max(vertices[flatten(&v, &nv)]);
                }
                // interior probes catch peaks narrower than a cell; the
                // stream depends on the cell only, never on the user seed
                let mut rng = ChaCha8Rng::seed_from_u64(ENVELOPE_PROBE_SEED);
                rng.set_stream(k as u64);
                for _ in 0..ENVELOPE_PROBES {
                    let x = std::array::from_fn(|d| (idx[d] as f64 + rng.gen::<f64>()) / res[d] as f64);
                    m = m.max(self.density(x));
                }
                m
            })
            .collect();
        // a ridge between sample points can exceed every sample of a cell;
        // borrowing the axis neighbours' maxima covers it
        let bounds: Vec<f64> = (0..n_cells)
            .into_par_iter()
            .map(|k| {
                let idx = unflatten(k, &res);
                let mut m = bounds[k];
                for d in 0..5 {
                    for step in [-1isize, 1] {
                        let j = idx[d] as isize + step;
                        if j >= 0 && (j as usize) < res[d] {
                            let mut n = idx;
                            n[d] = j as usize;
                            m = m.max(bounds[flatten(&n, &res)]);
                        }
                    }
                }
                m * safety
            })
            .collect();
        let volume = 1.0 / n_cells as f64;
        let mut cdf = Vec::with_capacity(n_cells);
        let mut acc = 0.0;
        for b in &bounds {
            acc += b * volume;
            cdf.push(acc);
        }
        if !(acc > 0.0) || !acc.is_finite() {
            return Err(Error::EmptySamplingRegion);
        }
        self.bounds = bounds;
        self.cdf = cdf;
        self.envelope_integral = acc;
        Ok(())
    }

    fn propose(&self, rng: &mut ChaCha8Rng) -> Result<Option<PairEvent>> {
        let res = self.cfg.envelope_resolution;
        let u: f64 = rng.gen::<f64>() * self.envelope_integral;
        let cell = self.cdf.partition_point(|&c| c <= u).min(self.cdf.len() - 1);
        let idx = unflatten(cell, &res);
        let x: [f64; 5] = std::array::from_fn(|d| (idx[d] as f64 + rng.gen::<f64>()) / res[d] as f64);
        let bound = self.bounds[cell];
        let y: f64 = rng.gen::<f64>() * bound;
        let Some(m) = self.map(x) else {
            return Ok(None);
        };
        if m.density > bound {
            return Err(Error::EnvelopeViolation {
                cell: idx,
                density: m.density,
                bound,
            });
        }
        if y >= m.density {
            return Ok(None);
        }
        let cfg = self.cfg.scenario.with_angles((m.theta1, m.phi1), (m.theta2, m.phi2))?;
        let p_prime = reconstruct_final_electron(&cfg, NaturalEnergy::new(m.omega1)?, NaturalEnergy::new(m.omega2)?)?;
        Ok(Some(PairEvent {
            omega1_kev: m.omega1 * CONSTANTS.mc2_kev,
            omega2_kev: m.omega2 * CONSTANTS.mc2_kev,
            theta1: m.theta1,
            phi1: m.phi1.rem_euclid(TAU),
            theta2: m.theta2,
            phi2: m.phi2.rem_euclid(TAU),
            weight: 1.0,
            p_prime,
        }))
    }

    /// Draws `n` events from random stream `chunk`. Returns the events and the
    /// number of proposals used.
    pub fn sample_chunk(&self, chunk: u64, n: usize) -> Result<(Vec<PairEvent>, u64)> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.cfg.seed);
        rng.set_stream(chunk);
        let mut out = Vec::with_capacity(n);
        let mut proposals = 0u64;
        // a generous cap keeps a mis-specified region from spinning forever
        let cap = 1_000_000u64.max(n as u64 * 1_000_000);
        while out.len() < n {
            proposals += 1;
            if proposals > cap {
                return Err(Error::EmptySamplingRegion);
            }
            if let Some(ev) = self.propose(&mut rng)? {
                out.push(ev);
            }
        }
        Ok((out, proposals))
    }

    /// Generates the configured number of events.
    pub fn run(&self) -> Result<SampleRun> {
        let n = self.cfg.n_events;
        let chunks = n.div_ceil(CHUNK_EVENTS);
        let parts: Vec<(Vec<PairEvent>, u64)> = (0..chunks)
            .into_par_iter()
            .map(|k| {
                let size = CHUNK_EVENTS.min(n - k * CHUNK_EVENTS);
                self.sample_chunk(k as u64, size)
            })
            .collect::<Result<_>>()?;
        let proposals: u64 = parts.iter().map(|p| p.1).sum();
        let events: Vec<PairEvent> = parts.into_iter().flat_map(|p| p.0).collect();
        let acceptance = if proposals > 0 {
            events.len() as f64 / proposals as f64
        } else {
            f64::NAN
        };
        if proposals > 0 && acceptance < LOW_ACCEPTANCE_WARNING {
            log::warn!(
                "sampler acceptance {acceptance:.2e} is below {LOW_ACCEPTANCE_WARNING:e}; \
                 refine the envelope resolution or shrink the sampling region"
            );
        }
        let env = self.envelope_barn();
        let (xs, err) = if proposals > 0 {
            let p = acceptance;
            (env * p, env * (p * (1.0 - p) / proposals as f64).sqrt())
        } else {
            (f64::NAN, f64::NAN)
        };
        Ok(SampleRun {
            events,
            proposals,
            acceptance,
            cross_section_barn: xs,
            cross_section_error_barn: err,
        })
    }
}

fn unflatten(mut k: usize, dims: &[usize]) -> [usize; 5] {
    let mut out = [0; 5];
    for d in (0..5).rev() {
        out[d] = k % dims[d];
        k /= dims[d];
    }
    out
}

fn flatten(idx: &[usize], dims: &[usize]) -> usize {
    idx.iter().zip(dims).fold(0, |acc, (i, d)| acc * d + i)
}

/// Builds the envelope and draws `sc.n_events` events.
pub fn sample_pairs(sc: SamplerConfig) -> Result<SampleRun> {
    Sampler::new(sc)?.run()
}

/// Writes events as text: a `#` header with schema version and seed, a
/// column row, then one comma-separated record per event.
pub fn write_events<W: Write>(mut w: W, seed: u64, events: &[PairEvent]) -> std::io::Result<()> {
    writeln!(w, "# xpair-events schema=1 seed={seed}")?;
    writeln!(w, "omega1_keV,omega2_keV,theta1,phi1,theta2,phi2,weight")?;
    for e in events {
        writeln!(
            w,
            "{:e},{:e},{:e},{:e},{:e},{:e},{}",
            e.omega1_kev, e.omega2_kev, e.theta1, e.phi1, e.theta2, e.phi2, e.weight
        )?;
    }
    Ok(())
}

/// Coincidence counts for a pair of detectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoincidenceStats {
    pub n_events: usize,
    pub count: usize,
    pub fraction: f64,
    /// Binomial standard error of `fraction`.
    pub fraction_error: f64,
    /// Coincidence cross section (b) and its error, when the sampled
    /// region's cross section is known.
    pub cross_section_barn: Option<(f64, f64)>,
    /// Rate and error (1/s), when a luminosity (1/(b s)) is supplied too.
    pub rate: Option<(f64, f64)>,
}

/// Counts events with photon 1 inside `det1` and photon 2 inside `det2`
/// (directions and any energy windows).
pub fn coincidence_stats(
    events: &[PairEvent],
    det1: &DetectorConfig,
    det2: &DetectorConfig,
    region_cross_section: Option<(f64, f64)>,
    luminosity_per_barn_s: Option<f64>,
) -> Result<CoincidenceStats> {
    det1.validate()?;
    det2.validate()?;
    let count = events
        .iter()
        .filter(|e| {
            det1.accepts_direction(e.theta1, e.phi1)
                && det1.accepts_energy(e.omega1_kev)
                && det2.accepts_direction(e.theta2, e.phi2)
                && det2.accepts_energy(e.omega2_kev)
        })
        .count();
    let n = events.len();
    let (fraction, fraction_error) = if n > 0 {
        let p = count as f64 / n as f64;
        (p, (p * (1.0 - p) / n as f64).sqrt())
    } else {
        (0.0, 0.0)
    };
    let cross_section_barn = region_cross_section.map(|(s, ds)| {
        let v = fraction * s;
        let rel = if fraction > 0.0 {
            ((fraction_error / fraction).powi(2) + (ds / s).powi(2)).sqrt()
        } else {
            0.0
        };
        // with no counts the binomial error on zero is zero; use one count
        let err = if count == 0 && n > 0 { s / n as f64 } else { v * rel };
        (v, err)
    });
    let rate = match (cross_section_barn, luminosity_per_barn_s) {
        (Some((v, e)), Some(l)) => Some((v * l, e * l)),
        _ => None,
    };
    Ok(CoincidenceStats {
        n_events: n,
        count,
        fraction,
        fraction_error,
        cross_section_barn,
        rate,
    })
}
