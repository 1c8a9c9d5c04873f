//! Points of the bundle and their pushes along expanding horocycle arcs.

use flatlab_core::sl2::{self, Reduction};
use flatlab_core::{IntMat2, Mat2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::rep::LatticeContext;
use crate::{Result, RigError};

/// A point `(g0, [v])` of the bundle with `g0` reduced.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiberSample {
    pub base: Mat2,
    /// Unit vector, first nonzero coordinate positive.
    pub fiber: Vec<f64>,
    /// Accumulated `log |ρ(γ)v|` relative to the starting vector.
    pub log_norm: f64,
    /// `γ mod p` composed with the starting element, for finite-image representations.
    pub group: Option<[u32; 4]>,
}

fn projective_normalize(v: &mut [f64]) -> Result<()> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !(n.is_finite() && n > 0.0) {
        return Err(RigError::NumericInstability(format!("fiber norm {n}")));
    }
    let sign = match v.iter().find(|x| **x != 0.0) {
        Some(x) if *x < 0.0 => -1.0,
        _ => 1.0,
    };
    for x in v.iter_mut() {
        *x *= sign / n;
    }
    Ok(())
}

fn mul_mod(p: u32, x: [u32; 4], y: [u32; 4]) -> [u32; 4] {
    [
        (x[0] * y[0] + x[1] * y[2]) % p,
        (x[0] * y[1] + x[1] * y[3]) % p,
        (x[2] * y[0] + x[3] * y[2]) % p,
        (x[2] * y[1] + x[3] * y[3]) % p,
    ]
}

/// Reduces `g` within the context's step budget.
pub fn reduce(ctx: &LatticeContext, g: &Mat2) -> Result<Reduction> {
    sl2::reduce(g, ctx.max_steps).map_err(|e| RigError::NumericInstability(e.to_string()))
}

impl FiberSample {
    /// The class of `(g, v)`, reduced.
    pub fn new(ctx: &LatticeContext, g: &Mat2, v: &[f64]) -> Result<Self> {
        if v.len() != ctx.rep.dim() {
            return Err(RigError::InvalidArgument(format!(
                "fiber has dimension {}, representation {}",
                v.len(),
                ctx.rep.dim()
            )));
        }
        let mut fiber = v.to_vec();
        projective_normalize(&mut fiber)?;
        let start = FiberSample {
            base: Mat2::IDENTITY,
            fiber,
            log_norm: 0.0,
            group: ctx.rep.group_element(&IntMat2::IDENTITY),
        };
        start.act(ctx, g)
    }

    /// `h · (g0, v)`, reduced.
    pub fn act(&self, ctx: &LatticeContext, h: &Mat2) -> Result<Self> {
        let r = reduce(ctx, &(*h * self.base))?;
        let (mut fiber, dlog) = ctx.rep.apply(&r.gamma, &r.word, &self.fiber);
        projective_normalize(&mut fiber)?;
        if !dlog.is_finite() {
            return Err(RigError::NumericInstability(format!("log-norm {dlog} after word of length {}", r.word.len())));
        }
        let group = match (ctx.rep.group_element(&r.gamma), self.group) {
            (Some(g), Some(k)) => {
                let p = match ctx.rep {
                    crate::Representation::ModP { p } => p,
                    _ => unreachable!(),
                };
                Some(mul_mod(p, g, k))
            }
            (g, _) => g,
        };
        Ok(FiberSample { base: r.g0, fiber, log_norm: self.log_norm + dlog, group })
    }
}

/// Samples pushed along `s ↦ g_t u(s)·z` at `s ∈ [0, 1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalFiberDistribution {
    pub t: f64,
    pub n: usize,
    pub seed: u64,
    pub representation: String,
    pub start: FiberSample,
    pub samples: Vec<FiberSample>,
}

impl EmpiricalFiberDistribution {
    pub fn validate(&self) -> Result<()> {
        if self.samples.len() != self.n {
            return Err(RigError::InvalidArgument(format!(
                "{} samples, metadata says {}",
                self.samples.len(),
                self.n
            )));
        }
        Ok(())
    }
}

/// `g_t u(s)·z` for each given `s`.
pub fn push_samples(ctx: &LatticeContext, z: &FiberSample, t: f64, s: &[f64]) -> Result<Vec<FiberSample>> {
    let gt = Mat2::geodesic(t);
    s.par_iter().map(|&s| z.act(ctx, &(gt * Mat2::horocycle(s)))).collect()
}

/// The `i`-th arc parameter of a run: stream `i` of the seeded generator.
pub fn arc_parameter(seed: u64, i: usize) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i as u64);
    rng.gen::<f64>()
}

/// Empirical push of the uniform measure on the unit horocycle arc through `z` by `g_t`.
pub fn push_arc(ctx: &LatticeContext, z: &FiberSample, t: f64, n: usize, seed: u64) -> Result<EmpiricalFiberDistribution> {
    if !t.is_finite() {
        return Err(RigError::InvalidArgument(format!("t = {t}")));
    }
    let s: Vec<f64> = (0..n).into_par_iter().map(|i| arc_parameter(seed, i)).collect();
    let samples = push_samples(ctx, z, t, &s)?;
    Ok(EmpiricalFiberDistribution {
        t,
        n,
        seed,
        representation: ctx.rep.id(),
        start: z.clone(),
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Representation;

    #[test]
    fn normalization_sign() {
        let mut v = vec![0.0, -3.0, 4.0];
        projective_normalize(&mut v).unwrap();
        for (a, b) in v.iter().zip([0.0, 0.6, -0.8]) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!(projective_normalize(&mut [0.0, 0.0]).is_err());
    }

    #[test]
    fn trivial_rep_keeps_fiber() {
        let ctx = LatticeContext::new(Representation::Trivial { dim: 2 }).unwrap();
        let z = FiberSample::new(&ctx, &Mat2::IDENTITY, &[0.3, 0.4]).unwrap();
        let d = push_arc(&ctx, &z, 3.0, 200, 1).unwrap();
        assert!(d.samples.iter().all(|s| s.fiber == vec![0.6, 0.8]));
    }

    #[test]
    fn standard_rep_trivializes() {
        // the bundle is trivialized by (g0, v) ↦ g0 v
        let ctx = LatticeContext::new(Representation::Standard).unwrap();
        let g = Mat2::geodesic(0.2) * Mat2::rotation(0.4);
        let z = FiberSample::new(&ctx, &g, &[1.0, 0.5]).unwrap();
        let want = g.apply(flatlab_core::Vec2::new(1.0, 0.5));
        let got = z.base.apply(flatlab_core::Vec2::new(z.fiber[0], z.fiber[1]));
        let cross = want.x * got.y - want.y * got.x;
        assert!(cross.abs() < 1e-12 * want.norm() * got.norm());
    }
}
