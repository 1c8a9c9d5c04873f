//! Proxy coordinates on a stratum: the spectrum of short saddle connections.

use flatlab_core::canonical::canonical_form_marked;
use flatlab_core::marked::MarkedSurface;
use flatlab_core::{FlatTri, Mat2};
use serde::{Deserialize, Serialize};

pub const PROXY_ID: &str = "sc-spectrum-k8-v1";
pub const SPECTRUM_LEN: usize = 8;

/// Why a pushed sample was dropped.
#[derive(Clone, Debug, PartialEq)]
pub enum Exclusion {
    /// Systole below the floor, relative to `sqrt(area)`.
    Thin(f64),
    /// The geometry core failed on the sample.
    Failed(String),
}

/// `k` shortest saddle-connection lengths of the canonical representative, sorted and
/// normalized by `sqrt(area)`. Connections are unoriented and counted with multiplicity.
pub fn spectrum(m: &MarkedSurface, k: usize, systole_floor: f64) -> Result<Vec<f64>, Exclusion> {
    let fail = |e: flatlab_core::FlatError| Exclusion::Failed(e.to_string());
    let cf = canonical_form_marked(m).map_err(fail)?;
    let tri = FlatTri::from_surface(&cf.to_surface().map_err(fail)?).map_err(fail)?;
    let root = tri.area().sqrt();
    let sys = tri.systole() / root;
    if sys < systole_floor {
        return Err(Exclusion::Thin(sys));
    }
    let mut len = 2.0 * sys.max(0.5) * root;
    for _ in 0..40 {
        let mut l: Vec<f64> = tri.unoriented_saddle_connections(len).iter().map(|c| c.hol.norm() / root).collect();
        if l.len() >= k {
            l.truncate(k);
            return Ok(l);
        }
        len *= 1.5;
    }
    Err(Exclusion::Failed(format!("fewer than {k} saddle connections up to length {len:.3e}")))
}

/// The same spectrum for the unit-area lattice `g·Z²`: lengths of the `k` shortest primitive
/// vectors up to sign.
pub fn lattice_spectrum(g: &Mat2, k: usize) -> Vec<f64> {
    // Lagrange–Gauss reduction of the columns
    let (mut b1, mut b2) = ((g.a, g.c), (g.b, g.d));
    let n2 = |v: (f64, f64)| v.0 * v.0 + v.1 * v.1;
    loop {
        if n2(b2) < n2(b1) {
            std::mem::swap(&mut b1, &mut b2);
        }
        let mu = ((b1.0 * b2.0 + b1.1 * b2.1) / n2(b1)).round();
        if mu == 0.0 {
            break;
        }
        b2 = (b2.0 - mu * b1.0, b2.1 - mu * b1.1);
        if n2(b2) >= n2(b1) {
            break;
        }
    }
    shortest_primitive(n2(b1), b1.0 * b2.0 + b1.1 * b2.1, n2(b2), k)
}

/// Lattice spectrum of `g_t u(σ)·Z²` computed exactly in the integer coordinates
/// `(X, b) = (a·2⁵³ + m·b, b)` of `σ = m/2⁵³`, so it stays accurate at any `t`.
pub fn torus_spectrum(t: f64, sigma: f64, k: usize) -> Vec<f64> {
    const N: f64 = 9007199254740992.0; // 2^53
    let m = (sigma.rem_euclid(1.0) * N).round() as i128;
    let lam = (2.0 * t).exp() / (N * N);
    let mu = (-2.0 * t).exp();
    let q = |v: (i128, i128)| lam * (v.0 as f64).powi(2) + mu * (v.1 as f64).powi(2);
    let dot = |v: (i128, i128), w: (i128, i128)| lam * v.0 as f64 * w.0 as f64 + mu * v.1 as f64 * w.1 as f64;
    let (mut b1, mut b2) = ((1i128 << 53, 0i128), (m, 1i128));
    loop {
        if q(b2) < q(b1) {
            std::mem::swap(&mut b1, &mut b2);
        }
        let r = (dot(b1, b2) / q(b1)).round() as i128;
        if r == 0 {
            break;
        }
        b2 = (b2.0 - r * b1.0, b2.1 - r * b1.1);
        if q(b2) >= q(b1) {
            break;
        }
    }
    shortest_primitive(q(b1), dot(b1, b2), q(b2), k)
}

/// Lengths of the `k` shortest primitive vectors `i·b1 + j·b2` up to sign, for the Gram
/// matrix `[[g11, g12], [g12, g22]]`. Rows of fixed `j` are scanned outward from their
/// closest point, so thin lattices cost no more than thick ones.
pub fn shortest_primitive(g11: f64, g12: f64, g22: f64, k: usize) -> Vec<f64> {
    let h = ((g22 - g12 * g12 / g11).max(0.0)).sqrt();
    let len = |i: i64, j: i64| {
        let (i, j) = (i as f64, j as f64);
        (i * i * g11 + 2.0 * i * j * g12 + j * j * g22).max(0.0).sqrt()
    };
    let mut best = vec![g11.sqrt()];
    let bound = |b: &Vec<f64>| if b.len() >= k { b[k - 1] } else { f64::INFINITY };
    let mut j = 1i64;
    while (j as f64) * h <= bound(&best) {
        let c = (-(j as f64) * g12 / g11).round() as i64;
        for dir in [1i64, -1] {
            let mut i = if dir == 1 { c } else { c - 1 };
            let mut taken = 0;
            while taken < k {
                let l = len(i, j);
                if l > bound(&best) {
                    break;
                }
                if num_gcd(i, j) == 1 {
                    best.push(l);
                    taken += 1;
                }
                i += dir;
            }
        }
        best.sort_by(f64::total_cmp);
        best.truncate(k);
        j += 1;
    }
    best
}

fn num_gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    /// `log ℓ₁`.
    LogSystole,
    /// `log(ℓ_k/ℓ₁)`.
    LogSpread,
    /// `log ℓ_k`.
    LogLongest,
}

impl Axis {
    pub fn value(self, spec: &[f64]) -> f64 {
        let l1 = spec[0];
        let lk = *spec.last().expect("nonempty spectrum");
        match self {
            Axis::LogSystole => l1.ln(),
            Axis::LogSpread => (lk / l1).ln(),
            Axis::LogLongest => lk.ln(),
        }
    }
}

/// A `bins × bins` grid of cells on two proxy axes. Points outside the box fall in no cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProxyGrid {
    pub x: Axis,
    pub x_range: (f64, f64),
    pub y: Axis,
    pub y_range: (f64, f64),
    pub bins: usize,
}

impl ProxyGrid {
    /// The 64-cell partition used for covering fractions.
    pub fn density() -> Self {
        ProxyGrid { x: Axis::LogSystole, x_range: (-3.0, 0.0), y: Axis::LogSpread, y_range: (0.0, 3.0), bins: 8 }
    }

    /// The 16-cell partition used for the support probe, placed on the band where the
    /// spectra of `H(2)` concentrate.
    pub fn support() -> Self {
        ProxyGrid { x: Axis::LogSystole, x_range: (-2.0, -1.0), y: Axis::LogLongest, y_range: (-0.8, 0.0), bins: 4 }
    }

    pub fn cells(&self) -> usize {
        self.bins * self.bins
    }

    pub fn point(&self, spec: &[f64]) -> (f64, f64) {
        (self.x.value(spec), self.y.value(spec))
    }

    /// Position in cell units: cell `(i, j)` is `[i, i+1) × [j, j+1)`.
    fn scaled(&self, p: (f64, f64)) -> (f64, f64) {
        let b = self.bins as f64;
        (
            (p.0 - self.x_range.0) / (self.x_range.1 - self.x_range.0) * b,
            (p.1 - self.y_range.0) / (self.y_range.1 - self.y_range.0) * b,
        )
    }

    pub fn cell(&self, spec: &[f64]) -> Option<usize> {
        let (u, v) = self.scaled(self.point(spec));
        let b = self.bins as f64;
        if (0.0..b).contains(&u) && (0.0..b).contains(&v) {
            Some(u as usize * self.bins + v as usize)
        } else {
            None
        }
    }

    /// Sup-distance from a point to the centre of cell `c`, in half-widths: at most 1 inside
    /// the closed cell.
    pub fn distance_to_centre(&self, spec: &[f64], c: usize) -> f64 {
        let (u, v) = self.scaled(self.point(spec));
        let (i, j) = ((c / self.bins) as f64 + 0.5, (c % self.bins) as f64 + 0.5);
        2.0 * (u - i).abs().max((v - j).abs())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_lattice_spectrum() {
        let l = lattice_spectrum(&Mat2::IDENTITY, 8);
        let r2 = 2f64.sqrt();
        let r5 = 5f64.sqrt();
        let want = [1.0, 1.0, r2, r2, r5, r5, r5, r5];
        assert!(l.iter().zip(want).all(|(a, b)| (a - b).abs() < 1e-12), "{l:?}");
        // invariant under SL(2,Z) and under large shears
        let g = Mat2::geodesic(3.0) * Mat2::horocycle(0.123);
        let h = g * Mat2::new(2.0, 1.0, 1.0, 1.0);
        let (a, b) = (lattice_spectrum(&g, 8), lattice_spectrum(&h, 8));
        assert!(a.iter().zip(&b).all(|(x, y)| (x - y).abs() < 1e-9));
    }

    #[test]
    fn exact_torus_path_agrees() {
        for (t, s) in [(0.0, 0.0), (1.5, 0.3), (4.0, 0.771), (7.0, 0.123456)] {
            let a = torus_spectrum(t, s, 8);
            let b = lattice_spectrum(&(Mat2::geodesic(t) * Mat2::horocycle(s)), 8);
            assert!(a.iter().zip(&b).all(|(x, y)| (x - y).abs() < 1e-8 * x.max(1.0)), "{a:?} {b:?}");
        }
        // deep in time the shortest vector stays of order one for a generic σ
        let l = torus_spectrum(30.0, 0.318309886183791, 8);
        assert!(l[0] > 1e-4 && l[0] <= 1.08);
    }

    #[test]
    fn cells_and_distances() {
        let g = ProxyGrid::density();
        let spec = [(-2.9f64).exp(), 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, (0.1f64).exp() * (-2.9f64).exp()];
        let c = g.cell(&spec).unwrap();
        assert_eq!(c, 0);
        assert!(g.distance_to_centre(&spec, c) <= 1.0);
        assert!(g.distance_to_centre(&spec, 9) > 1.0);
    }
}
