//! Representations of `SL(2,Z)` and the lattice context they live in.

use flatlab_core::{IntMat2, Letter, Word};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::{Result, RigError};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Representation {
    /// `ρ ≡ I` on `R^dim`.
    Trivial { dim: usize },
    /// The defining representation on `R²`.
    Standard,
    /// Reduction mod `p`, acting by permutation of the nonzero vectors of `F_p²`.
    ModP { p: u32 },
    /// Explicit images of `T` and `S`, row-major.
    Custom { t: Vec<Vec<f64>>, s: Vec<Vec<f64>> },
}

fn is_prime(p: u32) -> bool {
    p >= 2 && (2..p).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

impl Representation {
    /// `std2`, `trivial`, `trivial:<dim>`, `mod<p>` or `mod:<p>`.
    pub fn parse(s: &str) -> Result<Self> {
        let bad = || RigError::InvalidRepresentation(format!("unknown representation {s:?}"));
        match s {
            "std2" | "standard" => Ok(Representation::Standard),
            "trivial" => Ok(Representation::Trivial { dim: 1 }),
            _ => {
                if let Some(d) = s.strip_prefix("trivial:") {
                    let dim = d.parse().map_err(|_| bad())?;
                    return Ok(Representation::Trivial { dim });
                }
                if let Some(p) = s.strip_prefix("mod:").or_else(|| s.strip_prefix("mod")) {
                    let p = p.parse().map_err(|_| bad())?;
                    return Ok(Representation::ModP { p });
                }
                Err(bad())
            }
        }
    }

    pub fn id(&self) -> String {
        match self {
            Representation::Trivial { dim } => format!("trivial:{dim}"),
            Representation::Standard => "std2".into(),
            Representation::ModP { p } => format!("mod{p}"),
            Representation::Custom { t, .. } => format!("custom{}", t.len()),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Representation::Trivial { dim } => *dim,
            Representation::Standard => 2,
            Representation::ModP { p } => (p * p - 1) as usize,
            Representation::Custom { t, .. } => t.len(),
        }
    }

    pub fn is_finite_image(&self) -> bool {
        matches!(self, Representation::Trivial { .. } | Representation::ModP { .. })
    }

    /// `γ mod p` as `[a, b, c, d]`, for the mod-`p` representation.
    pub fn group_element(&self, gamma: &IntMat2) -> Option<[u32; 4]> {
        match self {
            Representation::ModP { p } => {
                let p = *p as i64;
                let r = |x: i64| x.rem_euclid(p) as u32;
                Some([r(gamma.a), r(gamma.b), r(gamma.c), r(gamma.d)])
            }
            _ => None,
        }
    }

    fn custom_matrix(rows: &[Vec<f64>]) -> DMatrix<f64> {
        let n = rows.len();
        DMatrix::from_fn(n, n, |i, j| rows[i][j])
    }

    fn perm_matrix(p: u32, g: [u32; 4]) -> DMatrix<f64> {
        let n = (p * p - 1) as usize;
        let mut m = DMatrix::zeros(n, n);
        for b in 0..p {
            for a in 0..p {
                if a == 0 && b == 0 {
                    continue;
                }
                let x = (g[0] * a + g[1] * b) % p;
                let y = (g[2] * a + g[3] * b) % p;
                m[((x + p * y - 1) as usize, (a + p * b - 1) as usize)] = 1.0;
            }
        }
        m
    }

    pub fn letter_matrix(&self, l: Letter) -> DMatrix<f64> {
        match self {
            Representation::Custom { t, s } => {
                let m = match l {
                    Letter::T | Letter::Ti => Self::custom_matrix(t),
                    Letter::S | Letter::Si => Self::custom_matrix(s),
                };
                match l {
                    Letter::T | Letter::S => m,
                    _ => m.try_inverse().unwrap_or_else(|| DMatrix::from_element(self.dim(), self.dim(), f64::NAN)),
                }
            }
            _ => self.matrix(&l.matrix(), &Word(vec![l])),
        }
    }

    /// `ρ(γ)`; `word` must multiply out to `gamma`.
    pub fn matrix(&self, gamma: &IntMat2, word: &Word) -> DMatrix<f64> {
        match self {
            Representation::Trivial { dim } => DMatrix::identity(*dim, *dim),
            Representation::Standard => {
                DMatrix::from_row_slice(2, 2, &[gamma.a as f64, gamma.b as f64, gamma.c as f64, gamma.d as f64])
            }
            Representation::ModP { p } => Self::perm_matrix(*p, self.group_element(gamma).expect("mod p")),
            Representation::Custom { .. } => word
                .0
                .iter()
                .fold(DMatrix::identity(self.dim(), self.dim()), |m, &l| m * self.letter_matrix(l)),
        }
    }

    /// `ρ(γ)v` as a unit vector and the log of the norm ratio `|ρ(γ)v|/|v|`.
    pub fn apply(&self, gamma: &IntMat2, word: &Word, v: &[f64]) -> (Vec<f64>, f64) {
        let x = DVector::from_column_slice(v);
        let n0 = x.norm();
        let (y, log_extra) = match self {
            Representation::Trivial { .. } => (x, 0.0),
            Representation::Standard | Representation::ModP { .. } => (self.matrix(gamma, word) * x, 0.0),
            Representation::Custom { .. } => {
                // letter by letter with renormalization, rightmost first
                let mut y = x;
                let mut acc = 0.0;
                for &l in word.0.iter().rev() {
                    y = self.letter_matrix(l) * y;
                    let n = y.norm();
                    if n > 0.0 && n.is_finite() {
                        acc += n.ln();
                        y /= n;
                    }
                }
                (y, acc)
            }
        };
        let n = y.norm();
        let unit: Vec<f64> = y.iter().map(|c| c / n).collect();
        (unit, log_extra + (n / n0).ln())
    }
}

/// The lattice `Γ = SL(2,Z)` with a representation.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LatticeContext {
    pub rep: Representation,
    /// Step budget of the fundamental-domain reduction.
    pub max_steps: usize,
}

impl LatticeContext {
    /// Validates `ρ` on the defining relations `S⁴ = I`, `(ST)³ = S²`.
    pub fn new(rep: Representation) -> Result<Self> {
        match &rep {
            Representation::ModP { p } if !is_prime(*p) || *p > 13 => {
                return Err(RigError::InvalidRepresentation(format!("p = {p} must be a prime ≤ 13")));
            }
            Representation::Trivial { dim: 0 } => {
                return Err(RigError::InvalidRepresentation("dimension 0".into()));
            }
            Representation::Custom { t, s } => {
                let n = t.len();
                if n == 0 || s.len() != n || t.iter().chain(s).any(|r| r.len() != n) {
                    return Err(RigError::InvalidRepresentation("T and S must be square of equal size".into()));
                }
            }
            _ => {}
        }
        let ctx = LatticeContext { rep, max_steps: 100_000 };
        let defect = ctx.relation_defect();
        if !(defect <= 1e-9) {
            return Err(RigError::InvalidRepresentation(format!("relations fail by {defect:.3e}")));
        }
        Ok(ctx)
    }

    /// Largest entry of `ρ(S)⁴ - I` and `ρ(ST)³ - ρ(S)²`.
    pub fn relation_defect(&self) -> f64 {
        let s = self.rep.letter_matrix(Letter::S);
        let t = self.rep.letter_matrix(Letter::T);
        let n = self.rep.dim();
        let id = DMatrix::<f64>::identity(n, n);
        let s2 = &s * &s;
        let st = &s * &t;
        let a = (&s2 * &s2 - &id).amax();
        let b = (&st * &st * &st - &s2).amax();
        a.max(b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relations_hold() {
        for r in [
            Representation::Standard,
            Representation::Trivial { dim: 3 },
            Representation::ModP { p: 2 },
            Representation::ModP { p: 3 },
        ] {
            assert!(LatticeContext::new(r).is_ok());
        }
        let bad = Representation::Custom { t: vec![vec![2.0]], s: vec![vec![1.0]] };
        assert!(LatticeContext::new(bad).is_err());
        assert!(LatticeContext::new(Representation::ModP { p: 4 }).is_err());
    }

    #[test]
    fn parse_ids() {
        for s in ["std2", "trivial:3", "mod2"] {
            assert_eq!(Representation::parse(s).unwrap().id(), s);
        }
        assert!(Representation::parse("nope").is_err());
    }

    #[test]
    fn permutation_rep_matches_group_element() {
        let r = Representation::ModP { p: 3 };
        let g = IntMat2::new(2, 1, 1, 1);
        let w = flatlab_core::sl2::word_decompose(g).unwrap();
        let m = r.matrix(&g, &w);
        let prod = w.0.iter().fold(DMatrix::identity(8, 8), |acc, &l| acc * r.letter_matrix(l));
        assert!((m - prod).amax() < 1e-12);
    }
}
