//! Statistics on pushed distributions.

use std::collections::{HashMap, HashSet, VecDeque};

use flatlab_core::{Letter, Mat2};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dictionary::{Dictionary, BASE_FUNCTIONS, DICTIONARY_ID};
use crate::rep::{LatticeContext, Representation};
use crate::sample::{push_arc, reduce, EmpiricalFiberDistribution, FiberSample};
use crate::{Result, RigError};

pub const MIN_SAMPLES: usize = 1000;

fn need(n: usize) -> Result<()> {
    if n < MIN_SAMPLES {
        return Err(RigError::InsufficientSamples { got: n, need: MIN_SAMPLES });
    }
    Ok(())
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AInvarianceReport {
    pub dictionary: String,
    pub t: f64,
    pub delta: f64,
    /// `max_f |E_{D_t} f - E_{D_{t+δ}} f|`.
    pub statistic: f64,
    pub argmax: usize,
    /// Monte-Carlo standard error of the difference at `argmax`.
    pub stderr: f64,
}

fn moments(d: &Dictionary, samples: &[FiberSample]) -> (Vec<f64>, Vec<f64>) {
    let k = Dictionary::SIZE;
    let (mut m, mut q) = (vec![0.0; k], vec![0.0; k]);
    for s in samples {
        for (i, v) in d.evaluate(s).into_iter().enumerate() {
            m[i] += v;
            q[i] += v * v;
        }
    }
    let n = samples.len() as f64;
    for i in 0..k {
        m[i] /= n;
        q[i] = (q[i] / n - m[i] * m[i]).max(0.0);
    }
    (m, q)
}

/// Dictionary discrepancy between `D_t` and `D_{t+δ}` pushed from the same start.
///
/// Both distributions are evaluated as measures on the bundle; for a `U`-invariant weak-∗
/// limit the two sides agree, so the statistic measures the remaining `A`-defect.
pub fn a_invariance_test(
    dt: &EmpiricalFiberDistribution,
    dtd: &EmpiricalFiberDistribution,
    delta: f64,
) -> Result<AInvarianceReport> {
    need(dt.samples.len())?;
    need(dtd.samples.len())?;
    dt.validate()?;
    dtd.validate()?;
    if (dtd.t - dt.t - delta).abs() > 1e-9 {
        return Err(RigError::InvalidArgument(format!("t = {} and {} do not differ by δ = {delta}", dt.t, dtd.t)));
    }
    if dt.representation != dtd.representation || dt.start != dtd.start {
        return Err(RigError::InvalidArgument("distributions come from different contexts or starts".into()));
    }
    let d = Dictionary;
    let (m1, v1) = moments(&d, &dt.samples);
    let (m2, v2) = moments(&d, &dtd.samples);
    let (n1, n2) = (dt.samples.len() as f64, dtd.samples.len() as f64);
    let (argmax, statistic) = m1
        .iter()
        .zip(&m2)
        .map(|(a, b)| (a - b).abs())
        .enumerate()
        .fold((0, 0.0), |best, (i, x)| if x > best.1 { (i, x) } else { best });
    Ok(AInvarianceReport {
        dictionary: DICTIONARY_ID.into(),
        t: dt.t,
        delta,
        statistic,
        argmax,
        stderr: (v1[argmax] / n1 + v2[argmax] / n2).sqrt(),
    })
}

/// `n` reduced base points distributed by Haar measure on `SL(2,R)/SL(2,Z)`.
pub fn haar_reference(n: usize, seed: u64) -> Vec<Mat2> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let y0 = 3f64.sqrt() / 2.0;
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let x: f64 = rng.gen_range(-0.5..0.5);
        let y = y0 / (1.0 - rng.gen::<f64>());
        let phi: f64 = rng.gen_range(0.0..std::f64::consts::PI);
        if x * x + y * y < 1.0 {
            continue;
        }
        let sy = y.sqrt();
        let h = Mat2::new(sy, x / sy, 0.0, 1.0 / sy);
        out.push((h * Mat2::rotation(phi)).inverse());
    }
    out
}

/// `max_j |E_D a_j - E_Haar a_j|` over the base factors, against `n_ref` Haar samples.
pub fn base_discrepancy(d: &EmpiricalFiberDistribution, n_ref: usize, seed: u64) -> Result<f64> {
    need(d.samples.len())?;
    let dict = Dictionary;
    let reference = haar_reference(n_ref, seed);
    let a = dict.base_means(d.samples.iter().map(|s| &s.base));
    let b = dict.base_means(reference.iter());
    Ok((0..BASE_FUNCTIONS).map(|j| (a[j] - b[j]).abs()).fold(0.0, f64::max))
}

/// `1 - λ_max / tr` of the second moment of the fiber directions `g0·v` in the standard
/// trivialization; zero when all fibers have collapsed to a line.
pub fn fiber_dispersion(d: &EmpiricalFiberDistribution) -> Result<f64> {
    if d.representation != Representation::Standard.id() {
        return Err(RigError::InvalidRepresentation(format!(
            "dispersion needs the standard representation, got {}",
            d.representation
        )));
    }
    need(d.samples.len())?;
    let (mut a, mut b, mut c) = (0.0, 0.0, 0.0);
    for s in &d.samples {
        let u = s.base.apply(flatlab_core::Vec2::new(s.fiber[0], s.fiber[1]));
        let n2 = u.x * u.x + u.y * u.y;
        a += u.x * u.x / n2;
        b += u.x * u.y / n2;
        c += u.y * u.y / n2;
    }
    let tr = a + c;
    let lmax = 0.5 * (tr + ((a - c).powi(2) + 4.0 * b * b).sqrt());
    Ok((1.0 - lmax / tr).max(0.0))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundedImageReport {
    pub representation: String,
    pub t: f64,
    pub n: usize,
    pub orbit_size: usize,
    /// Total variation distance of the group-element distribution to uniform on the orbit.
    pub tv: f64,
    pub outside_orbit: usize,
}

const MAX_ORBIT: usize = 100_000;

fn orbit(p: u32, k0: [u32; 4]) -> Result<HashSet<[u32; 4]>> {
    let gens: Vec<[u32; 4]> = [Letter::T, Letter::S]
        .iter()
        .map(|l| {
            let m = l.matrix();
            let r = |x: i64| x.rem_euclid(p as i64) as u32;
            [r(m.a), r(m.b), r(m.c), r(m.d)]
        })
        .collect();
    let mut seen = HashSet::from([k0]);
    let mut queue = VecDeque::from([k0]);
    while let Some(k) = queue.pop_front() {
        for g in &gens {
            let x = [
                (g[0] * k[0] + g[1] * k[2]) % p,
                (g[0] * k[1] + g[1] * k[3]) % p,
                (g[2] * k[0] + g[3] * k[2]) % p,
                (g[2] * k[1] + g[3] * k[3]) % p,
            ];
            if seen.insert(x) {
                if seen.len() > MAX_ORBIT {
                    return Err(RigError::InvalidRepresentation(format!("orbit exceeds {MAX_ORBIT}")));
                }
                queue.push_back(x);
            }
        }
    }
    Ok(seen)
}

/// TV distance of the group marginal of a pushed distribution to uniform on `K·k0`.
pub fn group_tv(ctx: &LatticeContext, d: &EmpiricalFiberDistribution) -> Result<BoundedImageReport> {
    let base = BoundedImageReport {
        representation: ctx.rep.id(),
        t: d.t,
        n: d.samples.len(),
        orbit_size: 1,
        tv: 0.0,
        outside_orbit: 0,
    };
    match ctx.rep {
        Representation::Trivial { .. } => Ok(base),
        Representation::ModP { p } => {
            let k0 = d.start.group.ok_or_else(|| RigError::InvalidArgument("start has no group element".into()))?;
            let orb = orbit(p, k0)?;
            let mut counts: HashMap<[u32; 4], usize> = HashMap::new();
            let mut outside = 0;
            for s in &d.samples {
                let k = s.group.expect("mod p samples carry group elements");
                if orb.contains(&k) {
                    *counts.entry(k).or_default() += 1;
                } else {
                    outside += 1;
                }
            }
            let n = d.samples.len() as f64;
            let u = 1.0 / orb.len() as f64;
            let inside: f64 = orb.iter().map(|k| (*counts.get(k).unwrap_or(&0) as f64 / n - u).abs()).sum();
            Ok(BoundedImageReport {
                orbit_size: orb.len(),
                tv: 0.5 * (inside + outside as f64 / n),
                outside_orbit: outside,
                ..base
            })
        }
        _ => Err(RigError::InvalidRepresentation(format!("{} does not have finite image", ctx.rep.id()))),
    }
}

/// Pushes the arc through `z` and measures the group marginal against uniform.
pub fn bounded_image_test(ctx: &LatticeContext, z: &FiberSample, t: f64, n: usize, seed: u64) -> Result<BoundedImageReport> {
    if !ctx.rep.is_finite_image() {
        return Err(RigError::InvalidRepresentation(format!("{} does not have finite image", ctx.rep.id())));
    }
    need(n)?;
    group_tv(ctx, &push_arc(ctx, z, t, n, seed)?)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FluctuationReport {
    pub n: usize,
    pub replicates: usize,
    pub tv_n: f64,
    pub stderr_n: f64,
    pub tv_4n: f64,
    pub stderr_4n: f64,
    /// `tv_n / tv_4n`; close to 2 for `N^{-1/2}` fluctuations.
    pub ratio: f64,
    pub ratio_sigma: f64,
    pub within_two_sigma: bool,
}

fn mean_se(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    let v = x.iter().map(|a| (a - m).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    (m, (v / n).sqrt())
}

/// Replicated TV at `n` and `4n` samples with independent seeds.
pub fn tv_fluctuation_scaling(
    ctx: &LatticeContext,
    z: &FiberSample,
    t: f64,
    n: usize,
    replicates: usize,
    seed: u64,
) -> Result<FluctuationReport> {
    if replicates < 2 {
        return Err(RigError::InvalidArgument("need at least 2 replicates".into()));
    }
    let run = |n: usize, offset: u64| -> Result<Vec<f64>> {
        (0..replicates as u64)
            .map(|r| bounded_image_test(ctx, z, t, n, seed.wrapping_add(offset + r)).map(|b| b.tv))
            .collect()
    };
    let (m1, s1) = mean_se(&run(n, 0)?);
    let (m2, s2) = mean_se(&run(4 * n, 1 << 32)?);
    if m2 <= 0.0 {
        return Err(RigError::NumericInstability("TV vanished at 4N".into()));
    }
    let ratio = m1 / m2;
    let ratio_sigma = ratio * ((s1 / m1).powi(2) + (s2 / m2).powi(2)).sqrt();
    Ok(FluctuationReport {
        n,
        replicates,
        tv_n: m1,
        stderr_n: s1,
        tv_4n: m2,
        stderr_4n: s2,
        ratio,
        ratio_sigma,
        within_two_sigma: (ratio - 2.0).abs() <= 2.0 * ratio_sigma,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DivergenceReport {
    pub s: Vec<f64>,
    pub distance: Vec<f64>,
    /// Least-squares slope of `log dist` against `log(1+s)`; `None` after collapse.
    pub slope: Option<f64>,
    pub collapsed: bool,
}

/// `‖a∧b‖ / (‖a‖‖b‖)`.
pub fn projective_distance(a: &[f64], b: &[f64]) -> f64 {
    let mut w = 0.0;
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            w += (a[i] * b[j] - a[j] * b[i]).powi(2);
        }
    }
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    w.sqrt() / (na * nb)
}

pub const COLLAPSE_DISTANCE: f64 = 1e-12;

/// Distance between `u(s)·(x, v)` and `u(s)·(x, w)` on a log grid of `points` values in `[1, s_max]`.
pub fn subpoly_divergence_probe(
    ctx: &LatticeContext,
    x: &Mat2,
    v: &[f64],
    w: &[f64],
    s_max: f64,
    points: usize,
) -> Result<DivergenceReport> {
    let dim = ctx.rep.dim();
    if v.len() != dim || w.len() != dim {
        return Err(RigError::InvalidArgument("fiber dimension mismatch".into()));
    }
    if projective_distance(v, w) < COLLAPSE_DISTANCE {
        return Err(RigError::InvalidArgument("v and w are projectively equal".into()));
    }
    if points < 2 || !(s_max > 1.0) {
        return Err(RigError::InvalidArgument("need at least 2 grid points in [1, s_max]".into()));
    }
    let mut s_grid = Vec::with_capacity(points);
    let mut dist = Vec::with_capacity(points);
    for k in 0..points {
        let s = s_max.powf(k as f64 / (points - 1) as f64);
        let r = reduce(ctx, &(Mat2::horocycle(s) * *x))?;
        let (a, _) = ctx.rep.apply(&r.gamma, &r.word, v);
        let (b, _) = ctx.rep.apply(&r.gamma, &r.word, w);
        s_grid.push(s);
        dist.push(projective_distance(&a, &b));
    }
    let collapsed = dist.iter().any(|d| *d < COLLAPSE_DISTANCE);
    let slope = if collapsed {
        None
    } else {
        let xs: Vec<f64> = s_grid.iter().map(|s| (1.0 + s).ln()).collect();
        let ys: Vec<f64> = dist.iter().map(|d| d.ln()).collect();
        let n = xs.len() as f64;
        let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        Some(sxy / sxx)
    };
    Ok(DivergenceReport { s: s_grid, distance: dist, slope, collapsed })
}

/// `B(g, x) = ρ(γ)` where `g·x0 = x1·γ` for the reduced representative `x0` of `x`; returns `(x1, B)`.
pub fn cocycle(ctx: &LatticeContext, g: &Mat2, x0: &Mat2) -> Result<(Mat2, DMatrix<f64>)> {
    let r = reduce(ctx, &(*g * *x0))?;
    Ok((r.g0, ctx.rep.matrix(&r.gamma, &r.word)))
}

/// Random `g = k(α) a(τ) k(β)` with `log‖g‖ = τ ≤ log max_norm`.
pub fn random_group_element(rng: &mut impl Rng, max_norm: f64) -> Mat2 {
    let tau = rng.gen_range(0.0..max_norm.ln());
    let a = rng.gen_range(0.0..std::f64::consts::TAU);
    let b = rng.gen_range(0.0..std::f64::consts::TAU);
    Mat2::rotation(a) * Mat2::geodesic(tau) * Mat2::rotation(b)
}

/// Least-squares `C` through the origin in `|log‖B(g, x)‖_op| ≈ C log‖g‖`, base `x = I`.
pub fn cocycle_growth_fit(ctx: &LatticeContext, n: usize, max_norm: f64, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for _ in 0..n {
        let g = random_group_element(&mut rng, max_norm);
        let (_, b) = cocycle(ctx, &g, &Mat2::IDENTITY)?;
        let op = b.singular_values().max();
        let x = g.op_norm().ln();
        sxy += x * op.ln().abs();
        sxx += x * x;
    }
    Ok(if sxx > 0.0 { sxy / sxx } else { 0.0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dictionary::base_values;

    #[test]
    fn orbit_of_sl2_z2() {
        assert_eq!(orbit(2, [1, 0, 0, 1]).unwrap().len(), 6);
        assert_eq!(orbit(3, [1, 0, 0, 1]).unwrap().len(), 24);
    }

    #[test]
    fn wedge_distance() {
        assert!((projective_distance(&[1.0, 0.0], &[0.0, 2.0]) - 1.0).abs() < 1e-15);
        assert_eq!(projective_distance(&[1.0, 1.0], &[-2.0, -2.0]), 0.0);
    }

    #[test]
    fn haar_reference_in_domain() {
        for g in haar_reference(500, 3) {
            let (x, y, _) = crate::dictionary::base_coordinates(&g);
            assert!(x.abs() <= 0.5 + 1e-12 && x * x + y * y >= 1.0 - 1e-12);
        }
    }

    #[test]
    fn base_factor_bounds() {
        assert!(base_values(&Mat2::IDENTITY).iter().all(|x| x.abs() <= 1.0));
    }
}
