//! Reference implementations used as test oracles. Nothing here calls the
//! library's kinematics or cross-section code; inputs are plain numbers.
#![allow(dead_code, clippy::excessive_precision)]

use std::f64::consts::PI;

pub const MC2_KEV: f64 = 510.999;
pub const ALPHA_QED: f64 = 7.297_352_569_3e-3;
pub const R0_SQ_BARN: f64 = 2.817_940_326_2e-15 * 2.817_940_326_2e-15 * 1e28;

/// Plain description of a scattering geometry.
#[derive(Debug, Clone, Copy)]
pub struct Geometry {
    pub omega: f64,
    pub gamma: f64,
    pub alpha: f64,
    pub theta1: f64,
    pub phi1: f64,
    pub theta2: f64,
    pub phi2: f64,
}

pub type V4 = [f64; 4];

pub fn dot(a: &V4, b: &V4) -> f64 {
    -a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]
}

pub fn add(a: &V4, b: &V4) -> V4 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]]
}

pub fn sub(a: &V4, b: &V4) -> V4 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]]
}

pub fn photon(e: f64, theta: f64, phi: f64) -> V4 {
    [
        e,
        e * theta.sin() * phi.cos(),
        e * theta.sin() * phi.sin(),
        e * theta.cos(),
    ]
}

pub fn boost_z(v: &V4, beta: f64) -> V4 {
    let g = 1.0 / (1.0 - beta * beta).sqrt();
    [g * (v[0] - beta * v[3]), v[1], v[2], g * (v[3] - beta * v[0])]
}

impl Geometry {
    pub fn electron(&self) -> V4 {
        let pz = (self.gamma * self.gamma - 1.0).max(0.0).sqrt();
        [self.gamma, 0.0, 0.0, pz]
    }

    pub fn incident(&self) -> V4 {
        photon(self.omega, self.alpha, 0.0)
    }

    pub fn n1(&self) -> V4 {
        photon(1.0, self.theta1, self.phi1)
    }

    pub fn n2(&self) -> V4 {
        photon(1.0, self.theta2, self.phi2)
    }

    /// Photon-2 energy from the final-electron mass shell by bisection.
    pub fn omega2_by_root(&self, omega1: f64) -> Option<f64> {
        let q = sub(&add(&self.electron(), &self.incident()), &scale(&self.n1(), omega1));
        // (q - w n2)^2 + 1 = q^2 + 1 - 2 w q.n2, linear in w, but solve it
        // by bisection to stay independent of any closed form.
        let f = |w: f64| {
            let pf = sub(&q, &scale(&self.n2(), w));
            dot(&pf, &pf) + 1.0
        };
        let (mut lo, mut hi) = (0.0, 1.0);
        if f(lo) > 0.0 {
            return None;
        }
        while f(hi) < 0.0 {
            hi *= 2.0;
            if hi > 1e12 {
                return None;
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(0.5 * (lo + hi))
    }

    /// First-order bound on the relative error of [`Self::omega2_by_root`],
    /// from the rounding error of the mass-shell function over its slope.
    pub fn omega2_root_relative_error(&self, omega1: f64, omega2: f64) -> f64 {
        let q = sub(&add(&self.electron(), &self.incident()), &scale(&self.n1(), omega1));
        let mag: f64 = q.iter().map(|v| v * v).sum::<f64>() + 1.0;
        let slope = 2.0 * dot(&q, &self.n2()).abs();
        8.0 * f64::EPSILON * mag / (slope * omega2)
    }

    /// The six invariants from explicit four-vector products.
    pub fn kappas(&self, omega1: f64, omega2: f64) -> [f64; 6] {
        kappas_of(
            &self.electron(),
            &self.incident(),
            &scale(&self.n1(), omega1),
            &scale(&self.n2(), omega2),
        )
    }
}

pub fn scale(v: &V4, s: f64) -> V4 {
    [v[0] * s, v[1] * s, v[2] * s, v[3] * s]
}

pub fn kappas_of(p: &V4, k: &V4, k1: &V4, k2: &V4) -> [f64; 6] {
    let pf = sub(&add(p, k), &add(k1, k2));
    [
        -dot(p, k1),
        -dot(p, k2),
        dot(p, k),
        dot(&pf, k1),
        dot(&pf, k2),
        -dot(&pf, k),
    ]
}

/// Largest relative rounding error of the invariants computed by
/// [`kappas_of`], from a first-order bound on each product.
pub fn kappas_relative_error(p: &V4, k: &V4, k1: &V4, k2: &V4) -> f64 {
    let abs_dot = |u: &V4, v: &V4| -> f64 { (0..4).map(|i| (u[i] * v[i]).abs()).sum() };
    let pf_mag: V4 = std::array::from_fn(|i| p[i].abs() + k[i].abs() + k1[i].abs() + k2[i].abs());
    let ks = kappas_of(p, k, k1, k2);
    let bounds = [
        abs_dot(p, k1),
        abs_dot(p, k2),
        abs_dot(p, k),
        2.0 * abs_dot(&pf_mag, k1),
        2.0 * abs_dot(&pf_mag, k2),
        2.0 * abs_dot(&pf_mag, k),
    ];
    (0..6)
        .map(|i| 4.0 * f64::EPSILON * bounds[i] / ks[i].abs())
        .fold(0.0, f64::max)
}

/// Direct transcription of the cross-section function X.
pub fn x_reference(ks: &[f64; 6]) -> f64 {
    let k = [ks[0], ks[1], ks[2]];
    let kp = [ks[3], ks[4], ks[5]];
    let a: f64 = k.iter().map(|v| 1.0 / v).sum();
    let b: f64 = kp.iter().map(|v| 1.0 / v).sum();
    let c: f64 = k.iter().zip(&kp).map(|(u, v)| 1.0 / (u * v)).sum();
    let x: f64 = k.iter().sum();
    let z: f64 = k.iter().zip(&kp).map(|(u, v)| u * v).sum();
    let aa = k[0] * k[1] * k[2];
    let bb = kp[0] * kp[1] * kp[2];
    let rho: f64 = k.iter().zip(&kp).map(|(u, v)| u / v + v / u).sum();
    2.0 * (a * b - c) * ((a + b) * (x + 2.0) - (a * b - c) - 8.0) - 2.0 * x * (a * a + b * b) - 8.0 * c
        + 4.0 / (aa * bb)
            * ((aa + bb) * (x * x + x) - (a * aa + b * bb) * (2.0 * x + z * (1.0 - x))
                + x * x * x * (1.0 - z)
                + 2.0 * z * x)
        - 2.0 * rho * (a * b + c * (1.0 - x))
}

/// Sum of the magnitudes of the grouped terms of X, a measure of how much
/// cancellation the direct transcription suffers.
pub fn x_term_magnitude(ks: &[f64; 6]) -> f64 {
    let k = [ks[0], ks[1], ks[2]];
    let kp = [ks[3], ks[4], ks[5]];
    let a: f64 = k.iter().map(|v| 1.0 / v).sum();
    let b: f64 = kp.iter().map(|v| 1.0 / v).sum();
    let c: f64 = k.iter().zip(&kp).map(|(u, v)| 1.0 / (u * v)).sum();
    let x: f64 = k.iter().sum();
    let z: f64 = k.iter().zip(&kp).map(|(u, v)| u * v).sum();
    let aa = k[0] * k[1] * k[2];
    let bb = kp[0] * kp[1] * kp[2];
    let rho: f64 = k.iter().zip(&kp).map(|(u, v)| u / v + v / u).sum();
    let q = 4.0 / (aa * bb);
    [
        2.0 * (a * b - c) * (a + b) * (x + 2.0),
        2.0 * (a * b - c) * (a * b - c),
        16.0 * (a * b - c),
        2.0 * x * (a * a + b * b),
        8.0 * c,
        q * (aa + bb) * (x * x + x),
        q * (a * aa + b * bb) * (2.0 * x + z * (1.0 - x)),
        q * x * x * x * (1.0 - z),
        q * 2.0 * z * x,
        2.0 * rho * a * b,
        2.0 * rho * c * (1.0 - x),
    ]
    .iter()
    .map(|t| t.abs())
    .sum()
}

/// Triple-differential cross section in units of r0^2 per (m c^2 sr^2),
/// assembled from the four-vector invariants.
pub fn d3sigma_reference(g: &Geometry, omega1: f64) -> Option<(f64, f64)> {
    let w2 = g.omega2_by_root(omega1)?;
    let ks = g.kappas(omega1, w2);
    let x = x_reference(&ks);
    let k1 = scale(&g.n1(), omega1);
    let pf = sub(&add(&g.electron(), &g.incident()), &k1);
    // -p'' . n2 with p'' = p + k - k1 is the energy denominator
    let den = -dot(&pf, &g.n2());
    let n = -ks[2];
    Some((ALPHA_QED / (16.0 * PI * PI) * x * omega1 * w2 / (n * den), w2))
}

/// Leading soft-photon approximation for a soft photon 1 on top of
/// single Compton scattering off an electron at rest along the +z photon:
/// `dsigma_KN/dOmega2 * alpha/(4 pi^2) * (-J.J) / omega1` in r0^2 units.
pub fn soft_photon_limit(omega: f64, theta1: f64, phi1: f64, theta2: f64, phi2: f64, omega1: f64) -> f64 {
    let wp = omega / (1.0 + omega * (1.0 - theta2.cos()));
    let p: V4 = [1.0, 0.0, 0.0, 0.0];
    let k: V4 = [omega, 0.0, 0.0, omega];
    let k2 = photon(wp, theta2, phi2);
    let pf = sub(&add(&p, &k), &k2);
    let n1 = photon(1.0, theta1, phi1);
    let j = sub(&scale(&pf, 1.0 / dot(&pf, &n1)), &scale(&p, 1.0 / dot(&p, &n1)));
    let r = wp / omega;
    let kn = 0.5 * r * r * (r + 1.0 / r - theta2.sin().powi(2));
    kn * ALPHA_QED / (4.0 * PI * PI) * dot(&j, &j) / omega1
}

/// Klein-Nishina total cross section in b for photon energy `eps` (natural).
pub fn klein_nishina_total(eps: f64) -> f64 {
    let l = (1.0 + 2.0 * eps).ln();
    2.0 * PI
        * R0_SQ_BARN
        * ((1.0 + eps) / (eps * eps) * (2.0 * (1.0 + eps) / (1.0 + 2.0 * eps) - l / eps) + l / (2.0 * eps)
            - (1.0 + 3.0 * eps) / ((1.0 + 2.0 * eps) * (1.0 + 2.0 * eps)))
}

/// 50-digit reference values: (name, omega, gamma, alpha, theta1', phi1',
/// theta2', phi2', omega1, omega2, X, d3sigma in r0^2/(m c^2 sr^2)).
pub const BENCHMARKS: [(&str, [f64; 8], [f64; 3]); 5] = [
    (
        "rest, opposite azimuths",
        [100.0 / MC2_KEV, 1.0, 0.0, 2.0, 0.0, 2.0, PI, 42.0 / MC2_KEV],
        [
            0.079_498_529_361_245_827_833,
            27.262_249_519_824_636_981,
            3.685_933_645_603_169_892_1e-5,
        ],
    ),
    (
        "rest, oblique",
        [0.3, 1.0, 0.0, 0.5, 1.0, 1.3, 2.5, 0.05],
        [
            0.209_753_324_734_234_827_79,
            71.679_416_007_236_404_746,
            9.787_419_282_703_672_016_5e-5,
        ],
    ),
    (
        "moving, oblique incidence",
        [0.8, 2.5, 1.2, 0.7, 0.4, 2.1, 3.9, 0.1],
        [
            0.255_643_572_942_420_623_49,
            263.500_541_143_756_600_92,
            4.775_695_540_014_963_324_6e-5,
        ],
    ),
    (
        "laser head-on",
        [2.5e-3 / MC2_KEV, 300.0, PI, 0.002, 0.0, 0.002, PI, 300.0 / MC2_KEV],
        [
            0.703_837_319_708_805_635_45,
            28.171_099_747_017_116_989,
            80.666_134_111_083_337_725,
        ],
    ),
    (
        "rest, same direction",
        [12.4 / MC2_KEV, 1.0, 0.0, 2.1, 0.0, 2.1, 0.0, 6.0 / MC2_KEV],
        [
            0.011_669_579_144_660_304_505,
            27.022_175_983_506_302_788,
            6.802_590_016_535_713_447_3e-6,
        ],
    ),
];
