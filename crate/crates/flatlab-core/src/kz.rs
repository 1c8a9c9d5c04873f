//! The Kontsevich–Zorich cocycle on origamis: homology transport along `T`, `S` and their
//! inverses, computed by matching canonical forms, and products along words.
//!
//! Matrices act on column vectors of relative homology coordinates: `F·a` is the image of the
//! class `a`. Cohomology classes transform by `F^{-T}`.

use std::collections::{HashMap, VecDeque};

use nalgebra::DVector;
use num_complex::Complex64;
use serde::Serialize;

use crate::canonical::canonical_form_marked;
use crate::cylinders::{decompose, Direction};
use crate::dynamics::{agy_norm, agy_norm_on, apply_matrix_marked, AgyNorm};
use crate::error::{FlatError, Result};
use crate::flat::FlatTri;
use crate::homology::Homology;
use crate::intlin::IntMatrix;
use crate::marked::MarkedSurface;
use crate::origami::Origami;
use crate::sl2::{reduce, IntMat2, Letter, Mat2, Word};

fn act(o: &Origami, l: Letter) -> Origami {
    match l {
        Letter::T => o.act_t(),
        Letter::Ti => o.act_t_inv(),
        Letter::S => o.act_s(),
        Letter::Si => o.act_s_inv(),
    }
}

fn letter_index(l: Letter) -> usize {
    match l {
        Letter::T => 0,
        Letter::Ti => 1,
        Letter::S => 2,
        Letter::Si => 3,
    }
}

/// Marked square-tiled surface of a canonical origami.
pub fn marked_origami(o: &Origami) -> Result<(MarkedSurface, Homology)> {
    MarkedSurface::own(&o.to_surface())
}

/// Homology transport `H₁(o) → H₁(L·o)` for the affine map with derivative `L`.
pub fn letter_transport(o: &Origami, l: Letter) -> Result<(Origami, IntMatrix)> {
    let (m, _) = marked_origami(o)?;
    let img = apply_matrix_marked(&l.matrix().to_real(), &m)?;
    let a = canonical_form_marked(&img)?;
    let target = act(o, l).canonical().0;
    let (m2, _) = marked_origami(&target)?;
    let b = canonical_form_marked(&m2)?;
    if !a.equivalent(&b) {
        return Err(FlatError::NumericInstability(format!(
            "{}·o is not the square tiling of its combinatorial image",
            l.symbol()
        )));
    }
    let ra: Vec<&Vec<i64>> = a.classes.iter().flatten().collect();
    let rb: Vec<&Vec<i64>> = b.classes.iter().flatten().collect();
    Ok((target, solve_integer_map(&ra, &rb, m.rank)?))
}

/// Integer `F` with `F a_k = b_k` for every pair, verified exactly.
pub fn solve_integer_map(a: &[&Vec<i64>], b: &[&Vec<i64>], r: usize) -> Result<IntMatrix> {
    let s = a.len();
    let am = nalgebra::DMatrix::from_fn(r, s, |i, k| a[k][i] as f64);
    let bm = nalgebra::DMatrix::from_fn(r, s, |i, k| b[k][i] as f64);
    let gram = &am * am.transpose();
    let inv = gram
        .try_inverse()
        .ok_or_else(|| FlatError::MalformedSurface("side classes do not span".into()))?;
    let f = bm * am.transpose() * inv;
    let mut out = IntMatrix::zeros(r, r);
    for i in 0..r {
        for j in 0..r {
            let x = f[(i, j)];
            if (x - x.round()).abs() > 1e-6 {
                return Err(FlatError::NumericInstability(format!("non-integral transport entry {x}")));
            }
            out[(i, j)] = x.round() as i64;
        }
    }
    for k in 0..s {
        if out.mul_vec(a[k]) != *b[k] {
            return Err(FlatError::NumericInstability("transport inconsistent on a side".into()));
        }
    }
    Ok(out)
}

/// The `SL(2,Z)`-orbit of a canonical origami with all letter transports.
#[derive(Clone, Debug)]
pub struct OrigamiOrbit {
    pub nodes: Vec<Origami>,
    index: HashMap<Origami, usize>,
    /// `edges[i][letter] = (j, F)`.
    edges: Vec<[(usize, IntMatrix); 4]>,
}

#[derive(Clone, Debug, Serialize)]
pub struct GeneratorAction {
    pub g: IntMat2,
    pub fingerprint: String,
    /// Homology action, column convention.
    pub matrix: IntMatrix,
}

impl GeneratorAction {
    /// Rows are images of generators.
    pub fn row_convention(&self) -> IntMatrix {
        self.matrix.transpose()
    }

    /// `F^{-T}`, the action on cohomology coordinates.
    pub fn cohomology(&self) -> IntMatrix {
        cohomology_matrix(&self.matrix)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CocycleWord {
    pub letters: Word,
    pub group_element: IntMat2,
    pub source: usize,
    pub target: usize,
    pub product_matrix: IntMatrix,
}

pub fn cohomology_matrix(f: &IntMatrix) -> IntMatrix {
    f.inverse_unimodular().expect("transport matrices are unimodular").transpose()
}

impl OrigamiOrbit {
    pub fn build(o: &Origami, max_size: usize) -> Result<Self> {
        let root = o.canonical().0;
        let mut nodes = vec![root.clone()];
        let mut index = HashMap::from([(root, 0usize)]);
        let mut raw: Vec<Vec<(usize, IntMatrix)>> = Vec::new();
        let mut q = VecDeque::from([0usize]);
        let mut pending: Vec<Option<Vec<(Origami, IntMatrix)>>> = vec![None];
        while let Some(i) = q.pop_front() {
            let mut out = Vec::new();
            for l in Letter::ALL {
                let (t, f) = letter_transport(&nodes[i], l)?;
                if !index.contains_key(&t) {
                    if nodes.len() >= max_size {
                        return Err(FlatError::NoReturn(format!("orbit larger than {max_size}")));
                    }
                    index.insert(t.clone(), nodes.len());
                    nodes.push(t.clone());
                    pending.push(None);
                    q.push_back(nodes.len() - 1);
                }
                out.push((t, f));
            }
            pending[i] = Some(out);
        }
        for p in pending {
            let row = p.expect("every node expanded");
            raw.push(row.into_iter().map(|(t, f)| (index[&t], f)).collect());
        }
        let edges = raw
            .into_iter()
            .map(|r| {
                let mut it = r.into_iter();
                [it.next().unwrap(), it.next().unwrap(), it.next().unwrap(), it.next().unwrap()]
            })
            .collect();
        Ok(OrigamiOrbit { nodes, index, edges })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn index_of(&self, o: &Origami) -> Option<usize> {
        self.index.get(&o.canonical().0).copied()
    }

    pub fn step(&self, i: usize, l: Letter) -> (usize, &IntMatrix) {
        let (j, f) = &self.edges[i][letter_index(l)];
        (*j, f)
    }

    /// `KZ(w, o_i)`: the rightmost letter acts first.
    pub fn word_action(&self, i: usize, w: &Word) -> CocycleWord {
        let r = self.edges[i][0].1.rows();
        let mut m = IntMatrix::identity(r);
        let mut cur = i;
        for &l in w.0.iter().rev() {
            let (j, f) = self.step(cur, l);
            m = f.mul(&m);
            cur = j;
        }
        CocycleWord {
            letters: w.clone(),
            group_element: w.product(),
            source: i,
            target: cur,
            product_matrix: m,
        }
    }

    /// Action of a Veech group element of node `i`.
    pub fn generator_action(&self, i: usize, g: IntMat2) -> Result<GeneratorAction> {
        let w = crate::sl2::word_decompose(g)?;
        let c = self.word_action(i, &w);
        if c.target != i {
            return Err(FlatError::NotInVeechGroup);
        }
        let (_, h) = marked_origami(&self.nodes[i])?;
        Ok(GeneratorAction { g, fingerprint: h.fingerprint().to_string(), matrix: c.product_matrix })
    }

    /// Words from node 0 to each node along a breadth-first tree.
    fn tree_words(&self) -> Vec<Word> {
        let mut words: Vec<Option<Word>> = vec![None; self.len()];
        words[0] = Some(Word::default());
        let mut q = VecDeque::from([0usize]);
        while let Some(i) = q.pop_front() {
            for l in Letter::ALL {
                let (j, _) = self.step(i, l);
                if words[j].is_none() {
                    let mut w = vec![l];
                    w.extend(words[i].as_ref().unwrap().0.iter().copied());
                    words[j] = Some(Word(w));
                    q.push_back(j);
                }
            }
        }
        words.into_iter().map(|w| w.unwrap()).collect()
    }

    /// Schreier generators `p_j⁻¹ L p_i` of the Veech group of node 0.
    pub fn veech_generators(&self) -> Vec<Word> {
        let p = self.tree_words();
        let mut out = Vec::new();
        for i in 0..self.len() {
            for l in [Letter::T, Letter::S] {
                let (j, _) = self.step(i, l);
                let w = p[j].inverse().concat(&Word(vec![l])).concat(&p[i]);
                if !w.is_empty() && !out.contains(&w) {
                    out.push(w);
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FlowReturn {
    pub g0: Mat2,
    pub word: Word,
    /// Orbit node reached; the flowed surface is `g0 · (square tiling of that node)`.
    pub target: usize,
    pub kz: IntMatrix,
    /// `β(t,s)` on the basis of the target.
    pub beta: Vec<f64>,
    pub norm: Option<AgyNorm>,
}

/// Cohomology vector pushed by an integer homology transport.
pub fn push_cohomology(f: &IntMatrix, beta: &[f64]) -> Vec<f64> {
    cohomology_matrix(f).mul_vec_f64(beta)
}

/// `β(t,s) = e^t KZ(g_t, u(s)ω) β` and its truncated norm at the reduced surface.
pub fn kz_along_flow(
    orbit: &OrigamiOrbit,
    i: usize,
    t: f64,
    s: f64,
    beta: &[f64],
    max_len: Option<f64>,
) -> Result<FlowReturn> {
    let g = Mat2::geodesic(t) * Mat2::horocycle(s);
    let red = reduce(&g, 10_000).map_err(|e| FlatError::NoReturn(e.to_string()))?;
    let c = orbit.word_action(i, &red.word);
    let scale = t.exp();
    let b: Vec<f64> = push_cohomology(&c.product_matrix, beta).iter().map(|x| x * scale).collect();
    let norm = match max_len {
        Some(l) => {
            let (m, _) = marked_origami(&orbit.nodes[c.target])?;
            let mut tri = FlatTri::from_marked(&apply_matrix_marked(&red.g0, &m)?)?;
            tri.make_delaunay(1_000_000)?;
            let v: Vec<Complex64> = b.iter().map(|&x| Complex64::new(x, 0.0)).collect();
            Some(agy_norm(&tri, &v, l)?)
        }
        None => None,
    };
    Ok(FlowReturn { g0: red.g0, word: red.word, target: c.target, kz: c.product_matrix, beta: b, norm })
}

/// Span of the orbit of `Twist⁰` under the given Veech group words (and their inverses), and the
/// number of generations until the dimension stopped growing.
pub fn cyl0_span(orbit: &OrigamiOrbit, words: &[Word], max_generations: usize) -> Result<(Vec<Vec<f64>>, usize)> {
    let (m, _) = marked_origami(&orbit.nodes[0])?;
    let d = decompose(&m, Direction::Horizontal)?;
    let r = m.rank;
    let mut mats = Vec::new();
    for w in words {
        let c = orbit.word_action(0, w);
        if c.target != 0 {
            return Err(FlatError::NotInVeechGroup);
        }
        let coh = cohomology_matrix(&c.product_matrix);
        mats.push(coh.inverse_unimodular().expect("unimodular"));
        mats.push(coh);
    }
    let mut span = orthonormalize(&d.twist0, r);
    let mut generations = 0;
    for g in 0..max_generations {
        let mut cand = span.clone();
        for v in &span {
            for a in &mats {
                cand.push(a.mul_vec_f64(v));
            }
        }
        let next = orthonormalize(&cand, r);
        generations = g + 1;
        if next.len() == span.len() {
            break;
        }
        span = next;
    }
    Ok((span, generations))
}

fn orthonormalize(vs: &[Vec<f64>], r: usize) -> Vec<Vec<f64>> {
    let mut out: Vec<DVector<f64>> = Vec::new();
    for v in vs {
        let mut x = DVector::from_column_slice(v);
        for _ in 0..2 {
            for b in &out {
                let d = b.dot(&x);
                x -= b * d;
            }
        }
        let n = x.norm();
        if n > 1e-9 {
            out.push(x / n);
        }
        if out.len() == r {
            break;
        }
    }
    out.into_iter().map(|v| v.iter().copied().collect()).collect()
}

/// Truncated AGY norms of a vertical class `iv` at `q = o_i` and of `Dg_t(q)·iv` at `g_t q`,
/// both taken over the saddle connections of `q` shorter than `max_len`: at `g_t q` these are
/// transported by the KZ matrix.
#[derive(Clone, Debug, Serialize)]
pub struct StableNormFlow {
    pub t: f64,
    pub max_len: f64,
    pub saddle_connections: usize,
    pub before: f64,
    pub after: f64,
    /// Norm at `g_t q` over every saddle connection up to the longest transported one.
    pub after_enumerated: f64,
    /// Largest `|hol_{g_t q}(Fγ) - g_t hol_q(γ)|` over the transported saddle connections.
    pub holonomy_defect: f64,
}

pub fn stable_norm_under_flow(orbit: &OrigamiOrbit, i: usize, t: f64, v: &[f64], max_len: f64) -> Result<StableNormFlow> {
    let (q, _) = marked_origami(&orbit.nodes[i])?;
    let mut tq = FlatTri::from_marked(&q)?;
    tq.make_delaunay(1_000_000)?;
    let hol_q = tq.reference_holonomy()?;
    let scs = tq.unoriented_saddle_connections(max_len);
    if scs.is_empty() {
        return Err(FlatError::NoSaddleConnection(max_len));
    }
    let classes: Vec<Vec<i64>> = scs.iter().map(|s| s.class.clone()).collect();
    let iv: Vec<Complex64> = v.iter().map(|&x| Complex64::new(0.0, x)).collect();
    let before = agy_norm_on(&classes, &hol_q, &iv);

    let g = Mat2::geodesic(t);
    let red = reduce(&g, 10_000).map_err(|e| FlatError::NoReturn(e.to_string()))?;
    let c = orbit.word_action(i, &red.word);
    let (m, _) = marked_origami(&orbit.nodes[c.target])?;
    let mut ty = FlatTri::from_marked(&apply_matrix_marked(&red.g0, &m)?)?;
    ty.make_delaunay(1_000_000)?;
    let hol_y = ty.reference_holonomy()?;
    let moved: Vec<Vec<i64>> = classes.iter().map(|k| c.product_matrix.mul_vec(k)).collect();
    let scale = (-t).exp();
    let w: Vec<Complex64> =
        push_cohomology(&c.product_matrix, v).iter().map(|&x| Complex64::new(0.0, x * scale)).collect();
    let after = agy_norm_on(&moved, &hol_y, &w);

    let eval = |h: &[Complex64], k: &[i64]| -> Complex64 { h.iter().zip(k).map(|(z, &n)| z * n as f64).sum() };
    let mut defect = 0.0f64;
    let mut longest = 0.0f64;
    for (k, s) in moved.iter().zip(&scs) {
        let a = eval(&hol_y, k);
        let b = g.apply(s.hol);
        defect = defect.max((a - Complex64::new(b.x, b.y)).norm());
        longest = longest.max(a.norm());
    }
    let after_enumerated = agy_norm(&ty, &w, longest * (1.0 + 1e-9))?.value;
    Ok(StableNormFlow {
        t,
        max_len,
        saddle_connections: scs.len(),
        before,
        after,
        after_enumerated,
        holonomy_defect: defect,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn torus_t_matrix() {
        let orbit = OrigamiOrbit::build(&Origami::torus(), 10).unwrap();
        assert_eq!(orbit.len(), 1);
        let a = orbit.generator_action(0, Letter::T.matrix()).unwrap();
        assert_eq!(a.row_convention().to_rows(), vec![vec![1, 0], vec![1, 1]]);
        let id = orbit.generator_action(0, IntMat2::IDENTITY).unwrap();
        assert!(id.matrix.is_identity());
    }

    #[test]
    fn l_orbit_and_t_squared() {
        let orbit = OrigamiOrbit::build(&Origami::l_shape(), 100).unwrap();
        assert_eq!(orbit.len(), 3);
        let i = 0;
        let t = Letter::T.matrix();
        let a = orbit.generator_action(i, t * t).unwrap();
        assert_eq!(a.matrix.det().abs(), 1);
        let (m, h) = marked_origami(&orbit.nodes[i]).unwrap();
        let hol = h.holonomy(&m.surface);
        // F^T hol = g∘hol on the same basis
        let g = (t * t).to_real();
        let ft = a.matrix.transpose();
        let re = ft.mul_vec_f64(&hol.real());
        let im = ft.mul_vec_f64(&hol.imag());
        for j in 0..h.rank() {
            let z = g.apply_c(hol.values[j]);
            assert!((re[j] - z.re).abs() < 1e-9 && (im[j] - z.im).abs() < 1e-9);
        }
    }
}
