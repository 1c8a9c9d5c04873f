//! The fixed family of bounded Lipschitz test functions on the bundle.
//!
//! Each function is a product `a_j(base) · b_k(fiber)` with 8 base and 8 fiber factors.
//! Base coordinates of a reduced `g0` are `w = g0⁻¹·i = x + iy`, `u = log y` and the angle
//! `θ = -2 arg(c i + d)` from the bottom row `(c, d)` of `g0⁻¹`. The base factors are
//! `cos²(πx) · tent(u) · A` with `A ∈ {1, cos 2πx, cos θ, sin θ}` and tents centred at
//! `u = 0.3, 0.8`; they vanish on the sides and the arc of the fundamental domain, so they
//! are continuous on the quotient.

use flatlab_core::Mat2;
use num_complex::Complex64;

use crate::sample::FiberSample;

pub const DICTIONARY_ID: &str = "lipschitz-64-v1";

const TENT_CENTRES: [f64; 2] = [0.3, 0.8];
const TENT_WIDTH: f64 = 0.25;

pub const BASE_FUNCTIONS: usize = 8;
pub const FIBER_FUNCTIONS: usize = 8;

/// Siegel-set coordinates `(x, y, θ)` of a base point.
pub fn base_coordinates(g0: &Mat2) -> (f64, f64, f64) {
    let inv = g0.inverse();
    let w = inv.mobius(Complex64::new(0.0, 1.0));
    let theta = -2.0 * Complex64::new(inv.d, inv.c).arg();
    (w.re, w.im, theta)
}

/// The 8 base factors at `g0`.
pub fn base_values(g0: &Mat2) -> [f64; BASE_FUNCTIONS] {
    let (x, y, theta) = base_coordinates(g0);
    let u = y.ln();
    let envelope = (std::f64::consts::PI * x).cos().powi(2);
    let ang = [1.0, (2.0 * std::f64::consts::PI * x).cos(), theta.cos(), theta.sin()];
    let mut out = [0.0; BASE_FUNCTIONS];
    for (ci, c) in TENT_CENTRES.iter().enumerate() {
        let tent = (1.0 - (u - c).abs() / TENT_WIDTH).max(0.0);
        for (ai, a) in ang.iter().enumerate() {
            out[ci * 4 + ai] = envelope * tent * a;
        }
    }
    out
}

/// The 8 fiber factors of a unit vector; all are even, so they are functions on projective space.
pub fn fiber_values(v: &[f64]) -> [f64; FIBER_FUNCTIONS] {
    let mut out = [1.0; FIBER_FUNCTIONS];
    match v.len() {
        0 | 1 => {}
        2 => {
            let psi = v[1].atan2(v[0]);
            for k in 1..FIBER_FUNCTIONS {
                let m = 2.0 * ((k + 1) / 2) as f64;
                out[k] = if k % 2 == 1 { (m * psi).cos() } else { (m * psi).sin() };
            }
        }
        n => {
            // quadratic monomials first, padded with squared squares
            let mut k = 1;
            'outer: for i in 0..n {
                for j in i..n {
                    if k == FIBER_FUNCTIONS {
                        break 'outer;
                    }
                    out[k] = v[i] * v[j];
                    k += 1;
                }
            }
            let mut i = 0;
            while k < FIBER_FUNCTIONS {
                out[k] = v[i % n].powi(4);
                i += 1;
                k += 1;
            }
        }
    }
    out
}

/// Evaluates the whole family on samples.
#[derive(Clone, Copy, Debug, Default)]
pub struct Dictionary;

impl Dictionary {
    pub const SIZE: usize = BASE_FUNCTIONS * FIBER_FUNCTIONS;

    pub fn id(&self) -> &'static str {
        DICTIONARY_ID
    }

    /// All 64 values, base-major.
    pub fn evaluate(&self, s: &FiberSample) -> [f64; 64] {
        let b = base_values(&s.base);
        let f = fiber_values(&s.fiber);
        let mut out = [0.0; 64];
        for i in 0..BASE_FUNCTIONS {
            for j in 0..FIBER_FUNCTIONS {
                out[i * FIBER_FUNCTIONS + j] = b[i] * f[j];
            }
        }
        out
    }

    /// Means of all 64 functions.
    pub fn means(&self, samples: &[FiberSample]) -> Vec<f64> {
        let mut acc = vec![0.0; Self::SIZE];
        for s in samples {
            for (a, v) in acc.iter_mut().zip(self.evaluate(s)) {
                *a += v;
            }
        }
        let n = samples.len().max(1) as f64;
        acc.iter().map(|a| a / n).collect()
    }

    /// Means of the base factors only.
    pub fn base_means<'a>(&self, bases: impl IntoIterator<Item = &'a Mat2>) -> Vec<f64> {
        let mut acc = vec![0.0; BASE_FUNCTIONS];
        let mut n = 0usize;
        for g in bases {
            for (a, v) in acc.iter_mut().zip(base_values(g)) {
                *a += v;
            }
            n += 1;
        }
        acc.iter().map(|a| a / n.max(1) as f64).collect()
    }
}
