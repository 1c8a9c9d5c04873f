//! 2×2 matrices, SL(2,Z) words, and reduction to the modular fundamental domain.

use std::fmt;
use std::ops::Mul;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{FlatError, Result};
use crate::geom::Vec2;

/// Real 2×2 matrix `[[a, b], [c, d]]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "[[f64; 2]; 2]", into = "[[f64; 2]; 2]")]
pub struct Mat2 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl From<[[f64; 2]; 2]> for Mat2 {
    fn from(m: [[f64; 2]; 2]) -> Self {
        Mat2::new(m[0][0], m[0][1], m[1][0], m[1][1])
    }
}

impl From<Mat2> for [[f64; 2]; 2] {
    fn from(m: Mat2) -> Self {
        [[m.a, m.b], [m.c, m.d]]
    }
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2 { a: 1.0, b: 0.0, c: 0.0, d: 1.0 };

    pub const fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Mat2 { a, b, c, d }
    }

    /// Geodesic flow `diag(e^t, e^-t)`.
    pub fn geodesic(t: f64) -> Self {
        Mat2::new(t.exp(), 0.0, 0.0, (-t).exp())
    }

    /// Horocycle flow `[[1, s], [0, 1]]`.
    pub fn horocycle(s: f64) -> Self {
        Mat2::new(1.0, s, 0.0, 1.0)
    }

    /// Opposite horocycle `[[1, 0], [s, 1]]`.
    pub fn horocycle_minus(s: f64) -> Self {
        Mat2::new(1.0, 0.0, s, 1.0)
    }

    pub fn rotation(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Mat2::new(c, -s, s, c)
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn inverse(&self) -> Self {
        let det = self.det();
        Mat2::new(self.d / det, -self.b / det, -self.c / det, self.a / det)
    }

    pub fn transpose(&self) -> Self {
        Mat2::new(self.a, self.c, self.b, self.d)
    }

    pub fn apply(&self, v: Vec2) -> Vec2 {
        Vec2::new(self.a * v.x + self.b * v.y, self.c * v.x + self.d * v.y)
    }

    /// Same action with points written as complex numbers `x + iy`.
    pub fn apply_c(&self, z: Complex64) -> Complex64 {
        let v = self.apply(Vec2::new(z.re, z.im));
        Complex64::new(v.x, v.y)
    }

    /// Möbius action on the upper half plane.
    pub fn mobius(&self, z: Complex64) -> Complex64 {
        (z * self.a + self.b) / (z * self.c + self.d)
    }

    /// Operator norm (largest singular value).
    pub fn op_norm(&self) -> f64 {
        let f2 = self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d;
        let det = self.det().abs();
        let disc = (f2 * f2 - 4.0 * det * det).max(0.0).sqrt();
        ((f2 + disc) / 2.0).sqrt()
    }

    pub fn max_abs_diff(&self, o: &Mat2) -> f64 {
        [self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d]
            .iter()
            .fold(0.0f64, |m, x| m.max(x.abs()))
    }

    pub fn is_special(&self, tol: f64) -> bool {
        (self.det() - 1.0).abs() <= tol
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }
}

/// Integer 2×2 matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "[[i64; 2]; 2]", into = "[[i64; 2]; 2]")]
pub struct IntMat2 {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl From<[[i64; 2]; 2]> for IntMat2 {
    fn from(m: [[i64; 2]; 2]) -> Self {
        IntMat2::new(m[0][0], m[0][1], m[1][0], m[1][1])
    }
}

impl From<IntMat2> for [[i64; 2]; 2] {
    fn from(m: IntMat2) -> Self {
        [[m.a, m.b], [m.c, m.d]]
    }
}

impl IntMat2 {
    pub const IDENTITY: IntMat2 = IntMat2 { a: 1, b: 0, c: 0, d: 1 };

    pub const fn new(a: i64, b: i64, c: i64, d: i64) -> Self {
        IntMat2 { a, b, c, d }
    }

    pub fn det(&self) -> i64 {
        self.a * self.d - self.b * self.c
    }

    /// Inverse of a determinant-one matrix.
    pub fn inverse(&self) -> Self {
        debug_assert_eq!(self.det(), 1);
        IntMat2::new(self.d, -self.b, -self.c, self.a)
    }

    pub fn neg(&self) -> Self {
        IntMat2::new(-self.a, -self.b, -self.c, -self.d)
    }

    pub fn to_real(&self) -> Mat2 {
        Mat2::new(self.a as f64, self.b as f64, self.c as f64, self.d as f64)
    }

    /// Rounds a real matrix with integral entries (within `tol`).
    pub fn from_real(m: &Mat2, tol: f64) -> Result<Self> {
        let r = |x: f64| -> Result<i64> {
            let k = x.round();
            if (x - k).abs() > tol {
                Err(FlatError::InvalidArgument(format!("entry {x} is not an integer")))
            } else {
                Ok(k as i64)
            }
        };
        Ok(IntMat2::new(r(m.a)?, r(m.b)?, r(m.c)?, r(m.d)?))
    }
}

impl Mul for IntMat2 {
    type Output = IntMat2;
    fn mul(self, o: IntMat2) -> IntMat2 {
        IntMat2::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }
}

/// Generators of SL(2,Z): `T = [[1,1],[0,1]]`, `S = [[0,-1],[1,0]]` and inverses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Letter {
    T,
    Ti,
    S,
    Si,
}

impl Letter {
    pub const ALL: [Letter; 4] = [Letter::T, Letter::Ti, Letter::S, Letter::Si];

    pub fn matrix(self) -> IntMat2 {
        match self {
            Letter::T => IntMat2::new(1, 1, 0, 1),
            Letter::Ti => IntMat2::new(1, -1, 0, 1),
            Letter::S => IntMat2::new(0, -1, 1, 0),
            Letter::Si => IntMat2::new(0, 1, -1, 0),
        }
    }

    pub fn inverse(self) -> Letter {
        match self {
            Letter::T => Letter::Ti,
            Letter::Ti => Letter::T,
            Letter::S => Letter::Si,
            Letter::Si => Letter::S,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Letter::T => 'T',
            Letter::Ti => 't',
            Letter::S => 'S',
            Letter::Si => 's',
        }
    }

    pub fn from_symbol(c: char) -> Option<Letter> {
        match c {
            'T' => Some(Letter::T),
            't' => Some(Letter::Ti),
            'S' => Some(Letter::S),
            's' => Some(Letter::Si),
            _ => None,
        }
    }
}

/// A word `L_1 L_2 ... L_k`, read as a matrix product from left to right.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn parse(s: &str) -> Result<Word> {
        s.chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| {
                Letter::from_symbol(c)
                    .ok_or_else(|| FlatError::InvalidArgument(format!("unknown letter {c:?}")))
            })
            .collect::<Result<Vec<_>>>()
            .map(Word)
    }

    pub fn product(&self) -> IntMat2 {
        self.0.iter().fold(IntMat2::IDENTITY, |m, l| m * l.matrix())
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    pub fn concat(&self, o: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&o.0);
        Word(v).reduced()
    }

    /// Cancels adjacent inverse pairs.
    pub fn reduced(self) -> Word {
        let mut out: Vec<Letter> = Vec::with_capacity(self.0.len());
        for l in self.0 {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            write!(f, "{}", l.symbol())?;
        }
        Ok(())
    }
}

fn div_round(a: i64, c: i64) -> i64 {
    // nearest integer to a/c, ties toward -inf
    let (a, c) = if c < 0 { (-a, -c) } else { (a, c) };
    (2 * a + c).div_euclid(2 * c)
}

/// Word in `T, S` and inverses whose product is exactly `g` (sign fixed by `S² = -I`).
pub fn word_decompose(g: IntMat2) -> Result<Word> {
    if g.det() != 1 {
        return Err(FlatError::InvalidArgument(format!("det {} != 1", g.det())));
    }
    let mut m = g;
    let mut left: Vec<Letter> = Vec::new();
    while m.c != 0 {
        let q = div_round(m.a, m.c);
        if q != 0 {
            let l = if q > 0 { Letter::Ti } else { Letter::T };
            for _ in 0..q.abs() {
                left.push(l);
            }
            m = IntMat2::new(m.a - q * m.c, m.b - q * m.d, m.c, m.d);
        }
        if m.c != 0 {
            left.push(Letter::S);
            m = Letter::S.matrix() * m;
        }
    }
    // now left_k ... left_1 g = m = ±T^b
    let mut letters: Vec<Letter> = left.iter().map(|l| l.inverse()).collect();
    if m.a == -1 {
        letters.push(Letter::S);
        letters.push(Letter::S);
        m = m.neg();
    }
    debug_assert!(m.a == 1 && m.d == 1 && m.c == 0);
    let l = if m.b > 0 { Letter::T } else { Letter::Ti };
    for _ in 0..m.b.abs() {
        letters.push(l);
    }
    let w = Word(letters).reduced();
    debug_assert_eq!(w.product(), g);
    Ok(w)
}

/// Result of writing `g = g0 · γ` with `g0⁻¹·i` in the standard fundamental domain.
#[derive(Clone, Debug, PartialEq)]
pub struct Reduction {
    pub g0: Mat2,
    pub gamma: IntMat2,
    pub word: Word,
    /// The reduced point `g0⁻¹·i`.
    pub z: Complex64,
}

/// Tolerance used for boundary decisions of the fundamental domain.
pub const FD_TOL: f64 = 1e-12;

/// Whether `z` lies in `{|Re z| <= 1/2, |z| >= 1}` (half-open normal form).
pub fn in_fundamental_domain(z: Complex64, tol: f64) -> bool {
    z.re >= -0.5 - tol && z.re < 0.5 + tol && z.norm_sqr() >= 1.0 - tol
}

/// Reduces `g ∈ SL(2,R)` modulo right multiplication by SL(2,Z).
///
/// Boundary points are normalized to `Re z ∈ [-1/2, 1/2)` and, on the unit circle, `Re z <= 0`;
/// the sign of `g0` is fixed so that its first column is lexicographically positive.
pub fn reduce(g: &Mat2, max_steps: usize) -> Result<Reduction> {
    let mut gamma = IntMat2::IDENTITY;
    let mut z = g.inverse().mobius(Complex64::new(0.0, 1.0));
    let mut steps = 0usize;
    loop {
        for _ in 0..max_steps {
            steps += 1;
            let n = (z.re + 0.5).floor();
            if n != 0.0 {
                z.re -= n;
                let k = n as i64;
                gamma = IntMat2::new(1, -k, 0, 1) * gamma;
            }
            if z.norm_sqr() < 1.0 - FD_TOL {
                z = -z.inv();
                gamma = Letter::S.matrix() * gamma;
            } else {
                break;
            }
        }
        if steps >= max_steps {
            return Err(FlatError::NumericInstability(format!(
                "reduction exceeded {max_steps} steps, |g| = {:.3e}",
                g.op_norm()
            )));
        }
        // unit-circle tie: prefer Re z <= 0
        if (z.norm_sqr() - 1.0).abs() <= FD_TOL && z.re > FD_TOL {
            gamma = Letter::S.matrix() * gamma;
        }
        // recompute from the exact integer part to shed accumulated rounding
        let g0 = *g * gamma.inverse().to_real();
        let z2 = g0.inverse().mobius(Complex64::new(0.0, 1.0));
        z = z2;
        if in_fundamental_domain(z, 1e-9) || steps >= max_steps {
            break;
        }
    }
    let mut g0 = *g * gamma.inverse().to_real();
    if g0.a < 0.0 || (g0.a == 0.0 && g0.c < 0.0) {
        g0 = Mat2::new(-g0.a, -g0.b, -g0.c, -g0.d);
        gamma = gamma.neg();
    }
    let word = word_decompose(gamma)?;
    Ok(Reduction { g0, gamma, word, z })
}
