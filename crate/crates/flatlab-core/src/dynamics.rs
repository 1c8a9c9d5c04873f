//! The `SL(2,R)` action, tremors, twist-torus sampling, the AGY norm and the stable and
//! unstable parametrizations.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cylinders::CylinderDecomposition;
use crate::error::{FlatError, Result};
use crate::flat::{FlatTri, COCIRCULAR_TOL};
use crate::geom::Vec2;
use crate::marked::MarkedSurface;
use crate::sl2::Mat2;
use crate::surface::{Polygon, TranslationSurface};

const MAX_FLIPS: usize = 1_000_000;

pub fn apply_matrix(g: &Mat2, s: &TranslationSurface) -> Result<TranslationSurface> {
    if !g.is_special(1e-12) {
        return Err(FlatError::InvalidArgument(format!("det {} != 1", g.det())));
    }
    s.map_points(|p| g.apply(p))
}

pub fn apply_matrix_marked(g: &Mat2, m: &MarkedSurface) -> Result<MarkedSurface> {
    if !g.is_special(1e-12) {
        return Err(FlatError::InvalidArgument(format!("det {} != 1", g.det())));
    }
    m.map_points(|p| g.apply(p))
}

/// `g_t u(s)` applied and re-cut along Delaunay cells.
pub fn flow(m: &MarkedSurface, t: f64, s: f64) -> Result<MarkedSurface> {
    let g = Mat2::geodesic(t) * Mat2::horocycle(s);
    let mut tri = FlatTri::from_marked(m)?;
    tri.apply_matrix(&g);
    tri.make_delaunay(MAX_FLIPS)?;
    tri.to_marked_surface(Some(&tri.cells(COCIRCULAR_TOL)))
}

/// Delaunay-cell presentation of the same surface.
pub fn recut(m: &MarkedSurface) -> Result<MarkedSurface> {
    flow(m, 0.0, 0.0)
}

/// Shears cylinder `C` of the decomposition by `u(shears[C])`. Gluings and edge classes are
/// those of the cylinder presentation.
pub fn twist_cylinders(d: &CylinderDecomposition, shears: &[f64]) -> Result<MarkedSurface> {
    if shears.len() != d.len() {
        return Err(FlatError::InvalidArgument(format!("{} shears for {} cylinders", shears.len(), d.len())));
    }
    let pres = &d.presentation;
    let polys: Vec<Polygon> = pres
        .surface
        .polygons()
        .iter()
        .zip(shears)
        .map(|(p, &s)| Polygon {
            vertices: p.vertices.iter().map(|v| Vec2::new(v.x + s * v.y, v.y)).collect(),
            label: p.label.clone(),
        })
        .collect();
    Ok(MarkedSurface { surface: pres.surface.with_polygons(polys)?, ..pres.clone() })
}

/// Tremor `Trem(q, τβ)` for `β ∈ Twist(q)`: `hol^x ↦ hol^x + τβ`, `hol^y` unchanged.
pub fn tremor(d: &CylinderDecomposition, beta: &[f64], tau: f64) -> Result<MarkedSurface> {
    let c = d.twist_coefficients(beta)?;
    let shears: Vec<f64> = c.iter().map(|x| tau * x).collect();
    let out = twist_cylinders(d, &shears)?;
    // post-condition, edge by edge
    let before = &d.presentation;
    for e in out.surface.edges() {
        let cls = out.edge_class(e);
        let db: f64 = cls.iter().zip(beta).map(|(&k, b)| k as f64 * b).sum();
        let v0 = before.surface.edge_vector(e);
        let v1 = out.surface.edge_vector(e);
        let scale = v0.norm().max(1.0);
        if (v1.x - v0.x - tau * db).abs() > 1e-9 * scale || (v1.y - v0.y).abs() > 1e-12 * scale {
            return Err(FlatError::NumericInstability(format!("tremor post-condition failed on edge {e}")));
        }
    }
    Ok(out)
}

/// A point of the twist torus: shear amounts `s_C ∈ [0, w_C/h_C)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwistTorusPoint {
    pub coords: Vec<f64>,
}

impl TwistTorusPoint {
    pub fn realize(&self, d: &CylinderDecomposition) -> Result<MarkedSurface> {
        twist_cylinders(d, &self.coords)
    }
}

/// I.i.d. uniform samples from the twist torus.
pub fn twist_torus_sample(d: &CylinderDecomposition, seed: u64, count: usize) -> Vec<TwistTorusPoint> {
    let periods = d.twist_torus_lattice().periods;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| TwistTorusPoint { coords: periods.iter().map(|&p| rng.gen::<f64>() * p).collect() })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct AgyNorm {
    pub value: f64,
    /// Truncation length.
    pub max_len: f64,
    pub saddle_connections: usize,
    /// Class of a saddle connection attaining the sup.
    pub argmax: Vec<i64>,
}

fn eval(v: &[Complex64], c: &[i64]) -> Complex64 {
    v.iter().zip(c).map(|(z, &k)| z * k as f64).sum()
}

/// `sup |v(γ)| / |hol(γ)|` over saddle connections `γ` with `|hol(γ)| <= max_len`.
pub fn agy_norm(tri: &FlatTri, v: &[Complex64], max_len: f64) -> Result<AgyNorm> {
    if v.len() != tri.rank() {
        return Err(FlatError::InvalidArgument(format!("class has {} entries, rank {}", v.len(), tri.rank())));
    }
    let scs = tri.unoriented_saddle_connections(max_len);
    if scs.is_empty() {
        return Err(FlatError::NoSaddleConnection(max_len));
    }
    let mut best = (0.0, Vec::new());
    for s in &scs {
        let r = eval(v, &s.class).norm() / s.hol.norm();
        if r > best.0 {
            best = (r, s.class.clone());
        }
    }
    Ok(AgyNorm { value: best.0, max_len, saddle_connections: scs.len(), argmax: best.1 })
}

/// The sup over a fixed list of classes, with holonomy taken from `hol`.
pub fn agy_norm_on(classes: &[Vec<i64>], hol: &[Complex64], v: &[Complex64]) -> f64 {
    classes.iter().map(|c| eval(v, c).norm() / eval(hol, c).norm()).fold(0.0, f64::max)
}

/// Projects a real vector into `{v : ⟨hol^x, v⟩ = 0}` along `hol^y` (vertical classes `iv`).
pub fn project_stable(omega: &crate::intlin::IntMatrix, hol: &[Complex64], v: &[f64]) -> Vec<f64> {
    let x: Vec<f64> = hol.iter().map(|z| z.re).collect();
    let y: Vec<f64> = hol.iter().map(|z| z.im).collect();
    let pair = |a: &[f64], b: &[f64]| -> f64 {
        let ob = omega.mul_vec_f64(b);
        a.iter().zip(&ob).map(|(p, q)| p * q).sum()
    };
    let k = pair(&x, v) / pair(&x, &y);
    v.iter().zip(&y).map(|(a, b)| a - k * b).collect()
}

#[derive(Clone, Copy, Debug)]
enum Side {
    Stable,
    Unstable,
}

fn param(m: &MarkedSurface, v: &[f64], max_len: f64, side: Side) -> Result<MarkedSurface> {
    let mut tri = FlatTri::from_marked(m)?;
    tri.make_delaunay(MAX_FLIPS)?;
    let hol0 = tri.reference_holonomy()?;
    let dv: Vec<Complex64> = v
        .iter()
        .map(|&x| match side {
            Side::Stable => Complex64::new(0.0, x),
            Side::Unstable => Complex64::new(x, 0.0),
        })
        .collect();
    if dv.iter().all(|z| z.norm() == 0.0) {
        return tri.to_marked_surface(Some(&tri.cells(COCIRCULAR_TOL)));
    }
    let n = agy_norm(&tri, &dv, max_len)?;
    if n.value >= 0.5 {
        return Err(FlatError::OutOfChart(n.value));
    }
    let (mut lam, mut step) = (0.0f64, 1.0f64);
    while lam < 1.0 {
        let target = (lam + step).min(1.0);
        let hol: Vec<Complex64> = hol0.iter().zip(&dv).map(|(h, d)| h + d * target).collect();
        let mut trial = tri.clone();
        if trial.set_holonomy(&hol).is_ok() {
            trial.make_delaunay(MAX_FLIPS)?;
            tri = trial;
            lam = target;
            step = (step * 2.0).min(1.0);
        } else {
            step /= 2.0;
            if step < 1e-12 {
                return Err(FlatError::ChartFailure(format!("path stalled at λ = {lam}")));
            }
        }
    }
    tri.to_marked_surface(Some(&tri.cells(COCIRCULAR_TOL)))
}

/// `Ψ^s_q(v)`: the surface with `hol^y` shifted by `v` (a real vector read as `iv`).
pub fn stable_param(m: &MarkedSurface, v: &[f64], max_len: f64) -> Result<MarkedSurface> {
    param(m, v, max_len, Side::Stable)
}

/// `Ψ^u_q(v)`: the surface with `hol^x` shifted by `v`.
pub fn unstable_param(m: &MarkedSurface, v: &[f64], max_len: f64) -> Result<MarkedSurface> {
    param(m, v, max_len, Side::Unstable)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::canonical_form_marked;
    use crate::cylinders::{decompose, Direction};
    use crate::origami::Origami;
    use crate::surface::build_regular_2ngon;

    #[test]
    fn tremor_zero_and_horocycle() {
        let (m, h) = MarkedSurface::own(&build_regular_2ngon(5).unwrap()).unwrap();
        let d = decompose(&m, Direction::Horizontal).unwrap();
        let base = canonical_form_marked(&m).unwrap();
        let t0 = tremor(&d, &d.twist0[0], 0.0).unwrap();
        assert!(canonical_form_marked(&t0).unwrap().equivalent(&base));
        let y = h.holonomy(&m.surface).imag();
        let t1 = tremor(&d, &y, 0.3).unwrap();
        let u = apply_matrix_marked(&Mat2::horocycle(0.3), &m).unwrap();
        assert!(canonical_form_marked(&t1).unwrap().equivalent(&canonical_form_marked(&u).unwrap()));
    }

    #[test]
    fn full_period_twist_is_trivial() {
        for s in [Origami::l_shape().to_surface(), build_regular_2ngon(5).unwrap()] {
            let (m, _) = MarkedSurface::own(&s).unwrap();
            let d = decompose(&m, Direction::Horizontal).unwrap();
            let base = canonical_form_marked(&m).unwrap();
            let p = d.twist_torus_lattice().periods;
            for i in 0..d.len() {
                let mut sh = vec![0.0; d.len()];
                sh[i] = p[i];
                let t = twist_cylinders(&d, &sh).unwrap();
                assert!(canonical_form_marked(&t).unwrap().equivalent(&base));
                sh[i] = 0.5 * p[i];
                let t = twist_cylinders(&d, &sh).unwrap();
                assert!(!canonical_form_marked(&t).unwrap().equivalent(&base));
            }
        }
    }

    #[test]
    fn agy_norm_of_holonomy() {
        let s = build_regular_2ngon(5).unwrap();
        let tri = FlatTri::from_surface(&s).unwrap();
        let hol = tri.reference_holonomy().unwrap();
        let n = agy_norm(&tri, &hol, 10.0).unwrap();
        assert!((n.value - 1.0).abs() < 1e-12);
        let two: Vec<Complex64> = hol.iter().map(|z| z * 2.0).collect();
        assert!((agy_norm(&tri, &two, 10.0).unwrap().value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn sampling_is_deterministic() {
        let (m, _) = MarkedSurface::own(&Origami::l_shape().to_surface()).unwrap();
        let d = decompose(&m, Direction::Horizontal).unwrap();
        assert!(twist_torus_sample(&d, 1, 0).is_empty());
        assert_eq!(twist_torus_sample(&d, 9, 50), twist_torus_sample(&d, 9, 50));
        let p = d.twist_torus_lattice().periods;
        for x in twist_torus_sample(&d, 3, 200) {
            assert!(x.coords.iter().zip(&p).all(|(c, q)| *c >= 0.0 && c < q));
        }
    }

    #[test]
    fn stable_param_moves_vertical_periods() {
        let (m, h) = MarkedSurface::own(&Origami::l_shape().to_surface()).unwrap();
        let hol = h.holonomy(&m.surface);
        let raw = vec![0.05, -0.02, 0.03, 0.01];
        let v = project_stable(h.omega(), &hol.values, &raw);
        let out = stable_param(&m, &v, 20.0).unwrap();
        let got = out.reference_holonomy().unwrap();
        for j in 0..h.rank() {
            assert!((got[j].re - hol.values[j].re).abs() < 1e-12);
            assert!((got[j].im - hol.values[j].im - v[j]).abs() < 1e-12);
        }
        let big: Vec<f64> = v.iter().map(|x| x * 100.0).collect();
        assert!(matches!(stable_param(&m, &big, 20.0), Err(FlatError::OutOfChart(_))));
    }
}
