//! Trace fields of the regular `2n`-gons and ratio fields of cylinder circumferences.

use flatlab_core::CylinderDecomposition;
use serde::Serialize;

use crate::cyclotomic::RealCycloField;
use crate::lll::{find_relation, minimal_polynomial, MinPoly};
use crate::{ArithError, Result};

pub fn totient(n: u64) -> u64 {
    let mut m = n;
    let mut out = n;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            while m % p == 0 {
                m /= p;
            }
            out -= out / p;
        }
        p += 1;
    }
    if m > 1 {
        out -= out / m;
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct TraceFieldReport {
    pub n: usize,
    /// `φ(2n)/2`.
    pub degree: usize,
    /// Degree of `ℚ(2cos(π/n))` from its computed minimal polynomial.
    pub field_degree: usize,
    /// Minimal polynomial of `2cos(π/n)`, rational coefficients from the constant term up.
    pub minimal_polynomial: Vec<String>,
    pub minimal_polynomial_exact: bool,
    /// `α_n = 1 + 2cos(π/n)`.
    pub alpha: f64,
    /// Lower bound on the degree claimed for `n > 5`.
    pub claimed_lower_bound: Option<usize>,
    /// Set when the formula value is below the claimed bound.
    pub discrepancy: bool,
}

pub fn trace_field_degree(n: usize) -> Result<TraceFieldReport> {
    if n < 4 {
        return Err(ArithError::InvalidParameter(format!("n must be at least 4, got {n}")));
    }
    let degree = (totient(2 * n as u64) / 2) as usize;
    let k = RealCycloField::new(n);
    let claimed = (n > 5).then_some(3);
    Ok(TraceFieldReport {
        n,
        degree,
        field_degree: k.degree(),
        minimal_polynomial: k.minimal_polynomial().to_strings(),
        minimal_polynomial_exact: k.minpoly_vanishes_exactly(),
        alpha: k.to_f64(&k.alpha()),
        claimed_lower_bound: claimed,
        discrepancy: claimed.is_some_and(|c| degree < c),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct RatioReport {
    pub index: usize,
    pub value: f64,
    pub minimal_polynomial: MinPoly,
}

#[derive(Clone, Debug, Serialize)]
pub struct CircumferenceField {
    /// `c_i / c_0` for `i >= 1`.
    pub circumference_ratios: Vec<RatioReport>,
    /// Lengths of the distinct horizontal saddle connections over the shortest one.
    pub saddle_ratios: Vec<RatioReport>,
    /// Degree of `ℚ(c_1/c_0, ...)`; `None` if some ratio is unresolved.
    pub degree: Option<usize>,
    pub max_degree: usize,
    pub max_coeff: i64,
}

const MAX_DEGREE: usize = 6;
const MAX_COEFF: i64 = 100_000;

fn ratio_reports(values: &[f64]) -> Vec<RatioReport> {
    values
        .iter()
        .enumerate()
        .map(|(i, &v)| RatioReport { index: i + 1, value: v, minimal_polynomial: minimal_polynomial(v, MAX_DEGREE, MAX_COEFF) })
        .collect()
}

/// Rank over `ℚ` of the monomials in the ratios (exponents below each ratio's degree), grown
/// greedily with integer relation tests.
fn compositum_degree(ratios: &[f64], degrees: &[usize]) -> Option<usize> {
    let mut monomials = vec![1.0f64];
    for (&r, &d) in ratios.iter().zip(degrees) {
        let current = monomials.clone();
        for e in 1..d {
            for &m in &current {
                monomials.push(m * r.powi(e as i32));
            }
        }
    }
    let mut basis: Vec<f64> = Vec::new();
    for m in monomials {
        let mut trial = basis.clone();
        trial.push(m);
        if basis.is_empty() || find_relation(&trial, MAX_COEFF).is_none() {
            if basis.len() >= 12 {
                return None;
            }
            basis = trial;
        }
    }
    Some(basis.len())
}

/// Field generated by the ratios of cylinder circumferences.
pub fn circumference_field(d: &CylinderDecomposition) -> Result<CircumferenceField> {
    if d.len() < 2 {
        return Err(ArithError::InvalidParameter("need at least two cylinders".into()));
    }
    let c = d.circumferences();
    let ratios: Vec<f64> = c[1..].iter().map(|x| x / c[0]).collect();
    let circumference_ratios = ratio_reports(&ratios);

    let mut lens: Vec<f64> = d.saddle_connections.iter().map(|s| s.length).collect();
    lens.sort_by(f64::total_cmp);
    lens.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * b.abs().max(1.0));
    let saddle_ratios = ratio_reports(&lens[1..].iter().map(|x| x / lens[0]).collect::<Vec<_>>());

    let degrees: Option<Vec<usize>> = circumference_ratios.iter().map(|r| r.minimal_polynomial.degree()).collect();
    let degree = degrees.and_then(|ds| compositum_degree(&ratios, &ds));
    Ok(CircumferenceField { circumference_ratios, saddle_ratios, degree, max_degree: MAX_DEGREE, max_coeff: MAX_COEFF })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn totients() {
        let v: Vec<u64> = (1..=12).map(totient).collect();
        assert_eq!(v, vec![1, 1, 2, 2, 4, 2, 6, 4, 6, 4, 10, 4]);
    }
}
