//! LLL reduction in exact rational arithmetic and integer relation detection for
//! double-precision data.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Signed, ToPrimitive, Zero};
use serde::Serialize;

fn dot(a: &[BigRational], b: &[BigRational]) -> BigRational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn gram_schmidt(b: &[Vec<BigInt>]) -> (Vec<Vec<BigRational>>, Vec<BigRational>) {
    let n = b.len();
    let rows: Vec<Vec<BigRational>> =
        b.iter().map(|r| r.iter().map(|x| BigRational::from_integer(x.clone())).collect()).collect();
    let mut star: Vec<Vec<BigRational>> = Vec::with_capacity(n);
    let mut mu = vec![vec![BigRational::zero(); n]; n];
    let mut norms = Vec::with_capacity(n);
    for i in 0..n {
        let mut v = rows[i].clone();
        for j in 0..i {
            mu[i][j] = if norms[j] == BigRational::zero() {
                BigRational::zero()
            } else {
                dot(&rows[i], &star[j]) / &norms[j]
            };
            for (x, y) in v.iter_mut().zip(&star[j]) {
                *x -= &mu[i][j] * y;
            }
        }
        norms.push(dot(&v, &v));
        star.push(v);
    }
    (mu, norms)
}

fn round(x: &BigRational) -> BigInt {
    let two = BigInt::from(2);
    (x.numer() * &two + x.denom()).div_floor(&(x.denom() * two))
}

/// LLL-reduces the rows of `b` in place with `δ = 3/4`.
pub fn lll(b: &mut [Vec<BigInt>]) {
    let n = b.len();
    if n < 2 {
        return;
    }
    let delta = BigRational::new(BigInt::from(3), BigInt::from(4));
    let (mut mu, mut norms) = gram_schmidt(b);
    let mut k = 1;
    while k < n {
        for j in (0..k).rev() {
            let r = round(&mu[k][j]);
            if r.is_zero() {
                continue;
            }
            let (head, tail) = b.split_at_mut(k);
            for (x, y) in tail[0].iter_mut().zip(&head[j]) {
                *x -= &r * y;
            }
            let rq = BigRational::from_integer(r);
            for i in 0..j {
                let d = &rq * &mu[j][i];
                mu[k][i] -= d;
            }
            mu[k][j] -= &rq;
        }
        let m = &mu[k][k - 1];
        if norms[k] >= (&delta - m * m) * &norms[k - 1] {
            k += 1;
        } else {
            b.swap(k, k - 1);
            (mu, norms) = gram_schmidt(b);
            k = (k - 1).max(1);
        }
    }
}

fn scaled(v: f64, bits: i32) -> BigInt {
    BigInt::from_f64((v * 2f64.powi(bits)).round()).expect("finite input")
}

/// Shortest vector of the relation lattice at `bits` of scaling.
fn candidate(values: &[f64], bits: i32) -> Vec<BigInt> {
    let n = values.len();
    let mut b: Vec<Vec<BigInt>> = (0..n)
        .map(|i| {
            let mut row = vec![BigInt::zero(); n + 1];
            row[i] = BigInt::from(1);
            row[n] = scaled(values[i], bits);
            row
        })
        .collect();
    lll(&mut b);
    b[0][..n].to_vec()
}

fn primitive(c: &[BigInt]) -> Vec<BigInt> {
    let g = c.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if g.is_zero() {
        return c.to_vec();
    }
    let sign = c.iter().rev().find(|x| !x.is_zero()).map(|x| x.signum()).unwrap_or_else(|| BigInt::from(1));
    c.iter().map(|x| x / &g * &sign).collect()
}

/// Scalings used for detection; a relation must be found at both.
const SCALES: [i32; 2] = [40, 48];

/// Integer vector `c` with `Σ c_i v_i = 0`, `max |c_i| <= max_coeff`, found identically at two
/// lattice scalings and with a residual consistent with double precision.
pub fn find_relation(values: &[f64], max_coeff: i64) -> Option<Vec<i64>> {
    if values.len() < 2 || values.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let a = primitive(&candidate(values, SCALES[0]));
    let b = primitive(&candidate(values, SCALES[1]));
    if a != b || a.iter().all(|x| x.is_zero()) {
        return None;
    }
    let c: Vec<i64> = a.iter().map(|x| x.to_i64()).collect::<Option<_>>()?;
    if c.iter().any(|x| x.abs() > max_coeff) {
        return None;
    }
    let res: f64 = c.iter().zip(values).map(|(&k, v)| k as f64 * v).sum();
    let mag: f64 = c.iter().zip(values).map(|(&k, v)| (k as f64 * v).abs()).sum();
    (res.abs() <= 1e-11 * mag.max(1.0)).then_some(c)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum MinPoly {
    /// Primitive integer coefficients, constant term first, positive leading coefficient.
    Found { coeffs: Vec<i64>, residual: f64 },
    /// No relation up to `max_degree` within the coefficient bound.
    Unresolved { max_degree: usize },
}

impl MinPoly {
    pub fn degree(&self) -> Option<usize> {
        match self {
            MinPoly::Found { coeffs, .. } => Some(coeffs.len() - 1),
            MinPoly::Unresolved { .. } => None,
        }
    }
}

/// Minimal polynomial of `x` over `ℚ` by integer relations on `1, x, ..., x^d`, `d` increasing.
pub fn minimal_polynomial(x: f64, max_degree: usize, max_coeff: i64) -> MinPoly {
    for d in 1..=max_degree {
        let powers: Vec<f64> = (0..=d).map(|i| x.powi(i as i32)).collect();
        if let Some(c) = find_relation(&powers, max_coeff) {
            if c[d] == 0 {
                continue;
            }
            let residual = c.iter().rev().fold(0.0, |acc, &k| acc * x + k as f64);
            return MinPoly::Found { coeffs: c, residual };
        }
    }
    MinPoly::Unresolved { max_degree }
}
