//! The quoted actions of `T̃²` and `S̃²` on the `ρ`-eigenspaces of the Matheus–Yoccoz family:
//! exact `m`-th powers and the trace of `S̃² T̃²`.

use serde::Serialize;

use crate::cyclotomic::{CycloField, CycloMat2};
use crate::{ArithError, Result};

#[derive(Clone, Debug, Serialize)]
pub struct RootCheck {
    /// `ρ = ζ_m^k`.
    pub k: usize,
    /// Multiplicative order of `ρ`.
    pub order: usize,
    pub t_power_identity: bool,
    pub s_power_identity: bool,
    /// The first powers are not the identity.
    pub first_powers_nontrivial: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct MatYocReport {
    pub m: usize,
    pub roots: Vec<RootCheck>,
    /// Trace of `S̃² T̃²` at `ρ = exp(2πi/m)` in the basis `1, ζ, ..., ζ^{φ(m)-1}`.
    pub trace_coeffs: Vec<String>,
    /// Exact equality with `2 + 2(ζ + ζ⁻¹)`.
    pub trace_matches: bool,
    pub trace_real: bool,
    pub trace_value: f64,
    /// `2 + 4cos(2π/m)`.
    pub trace_expected: f64,
    pub determinant_one: bool,
    /// Real trace with absolute value above 2 and determinant 1.
    pub hyperbolic: bool,
    pub passed: bool,
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// `[[ρ, 1+ρ], [0, 1]]`.
fn t_tilde(f: &CycloField, k: i64) -> CycloMat2 {
    let rho = f.zeta_pow(k);
    CycloMat2 { a: rho.clone(), b: f.add(&f.one(), &rho), c: f.zero(), d: f.one() }
}

/// `[[1, 0], [1+ρ⁻¹, ρ⁻¹]]`.
fn s_tilde(f: &CycloField, k: i64) -> CycloMat2 {
    let ri = f.zeta_pow(-k);
    CycloMat2 { a: f.one(), b: f.zero(), c: f.add(&f.one(), &ri), d: ri }
}

pub fn matheus_yoccoz_check(m: usize) -> Result<MatYocReport> {
    if m < 5 || m % 2 == 0 {
        return Err(ArithError::InvalidParameter(format!("m must be odd and at least 5, got {m}")));
    }
    let f = CycloField::new(m);
    let id = f.mat_identity();
    let roots: Vec<RootCheck> = (1..m)
        .map(|k| {
            let t = t_tilde(&f, k as i64);
            let s = s_tilde(&f, k as i64);
            RootCheck {
                k,
                order: m / gcd(m, k),
                t_power_identity: f.mat_pow(&t, m as u64) == id,
                s_power_identity: f.mat_pow(&s, m as u64) == id,
                first_powers_nontrivial: t != id && s != id,
            }
        })
        .collect();

    let prod = f.mat_mul(&s_tilde(&f, 1), &t_tilde(&f, 1));
    let tr = f.mat_trace(&prod);
    let two = f.add(&f.one(), &f.one());
    let zsum = f.add(&f.zeta_pow(1), &f.zeta_pow(-1));
    let target = f.add(&two, &f.mul(&two, &zsum));
    let (re, im) = f.to_complex(&tr);
    let trace_real = f.conj(&tr) == tr;
    let determinant_one = f.mat_det(&prod) == f.one();
    let trace_expected = 2.0 + 4.0 * (std::f64::consts::TAU / m as f64).cos();
    let hyperbolic = trace_real && determinant_one && re.abs() > 2.0 && im.abs() < 1e-12;
    let trace_matches = tr == target;
    let passed = roots.iter().all(|r| r.t_power_identity && r.s_power_identity && r.first_powers_nontrivial)
        && trace_matches
        && hyperbolic;
    Ok(MatYocReport {
        m,
        roots,
        trace_coeffs: tr.0.to_strings(),
        trace_matches,
        trace_real,
        trace_value: re,
        trace_expected,
        determinant_one,
        hyperbolic,
        passed,
    })
}
