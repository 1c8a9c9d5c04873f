//! Square-tiled surfaces given by a pair of permutations.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{FlatError, Result};
use crate::geom::Vec2;
use crate::surface::{Edge, Polygon, TranslationSurface};

/// Square `i` has square `h[i]` to its right and `v[i]` above it (0-indexed internally).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Origami {
    h: Vec<usize>,
    v: Vec<usize>,
}

/// JSON form: 1-indexed permutations in image form.
#[derive(Serialize, Deserialize)]
struct OrigamiJson {
    n: usize,
    h: Vec<usize>,
    v: Vec<usize>,
}

impl Serialize for Origami {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        OrigamiJson {
            n: self.n(),
            h: self.h.iter().map(|x| x + 1).collect(),
            v: self.v.iter().map(|x| x + 1).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Origami {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = OrigamiJson::deserialize(d)?;
        if j.h.len() != j.n || j.v.len() != j.n {
            return Err(serde::de::Error::custom("permutation length differs from n"));
        }
        let conv = |p: &[usize]| -> std::result::Result<Vec<usize>, D::Error> {
            p.iter()
                .map(|&x| x.checked_sub(1).ok_or_else(|| serde::de::Error::custom("permutations are 1-indexed")))
                .collect()
        };
        Origami::new(conv(&j.h)?, conv(&j.v)?).map_err(serde::de::Error::custom)
    }
}

fn is_permutation(p: &[usize]) -> bool {
    let mut seen = vec![false; p.len()];
    for &x in p {
        if x >= p.len() || seen[x] {
            return false;
        }
        seen[x] = true;
    }
    true
}

pub fn invert(p: &[usize]) -> Vec<usize> {
    let mut q = vec![0; p.len()];
    for (i, &x) in p.iter().enumerate() {
        q[x] = i;
    }
    q
}

/// `(p ∘ q)(i) = p[q[i]]`.
pub fn compose(p: &[usize], q: &[usize]) -> Vec<usize> {
    q.iter().map(|&x| p[x]).collect()
}

/// Cycles of a permutation, each starting at its smallest element, ordered by that element.
pub fn cycles(p: &[usize]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; p.len()];
    let mut out = Vec::new();
    for i in 0..p.len() {
        if seen[i] {
            continue;
        }
        let mut c = Vec::new();
        let mut j = i;
        while !seen[j] {
            seen[j] = true;
            c.push(j);
            j = p[j];
        }
        out.push(c);
    }
    out
}

impl Origami {
    /// 0-indexed permutations. Fails unless both are permutations of the same size generating
    /// a transitive group.
    pub fn new(h: Vec<usize>, v: Vec<usize>) -> Result<Self> {
        if h.len() != v.len() || h.is_empty() || !is_permutation(&h) || !is_permutation(&v) {
            return Err(FlatError::InvalidParameter("h and v must be permutations of 0..N".into()));
        }
        let o = Origami { h, v };
        if !o.is_connected() {
            return Err(FlatError::InvalidParameter("origami is disconnected".into()));
        }
        Ok(o)
    }

    /// 1-indexed constructor matching the JSON convention.
    pub fn from_one_based(h: &[usize], v: &[usize]) -> Result<Self> {
        let sub = |p: &[usize]| -> Result<Vec<usize>> {
            p.iter()
                .map(|&x| x.checked_sub(1).ok_or_else(|| FlatError::InvalidParameter("0 in 1-indexed permutation".into())))
                .collect()
        };
        Origami::new(sub(h)?, sub(v)?)
    }

    /// Builds a permutation of `0..n` from cycle notation (1-indexed).
    pub fn perm_from_cycles(n: usize, cyc: &[&[usize]]) -> Vec<usize> {
        let mut p: Vec<usize> = (0..n).collect();
        for c in cyc {
            for k in 0..c.len() {
                p[c[k] - 1] = c[(k + 1) % c.len()] - 1;
            }
        }
        p
    }

    /// Unit-square torus.
    pub fn torus() -> Self {
        Origami { h: vec![0], v: vec![0] }
    }

    /// Three-square L: h = (1 2), v = (1 3).
    pub fn l_shape() -> Self {
        Origami {
            h: Self::perm_from_cycles(3, &[&[1, 2]]),
            v: Self::perm_from_cycles(3, &[&[1, 3]]),
        }
    }

    pub fn n(&self) -> usize {
        self.h.len()
    }

    pub fn h(&self) -> &[usize] {
        &self.h
    }

    pub fn v(&self) -> &[usize] {
        &self.v
    }

    pub fn is_connected(&self) -> bool {
        let n = self.n();
        let hi = invert(&self.h);
        let vi = invert(&self.v);
        let mut seen = vec![false; n];
        let mut q = VecDeque::from([0usize]);
        seen[0] = true;
        let mut count = 1;
        while let Some(i) = q.pop_front() {
            for j in [self.h[i], self.v[i], hi[i], vi[i]] {
                if !seen[j] {
                    seen[j] = true;
                    count += 1;
                    q.push_back(j);
                }
            }
        }
        count == n
    }

    /// The commutator `h v h⁻¹ v⁻¹` (as a map, `v⁻¹` applied first).
    pub fn commutator(&self) -> Vec<usize> {
        let hi = invert(&self.h);
        let vi = invert(&self.v);
        compose(&self.h, &compose(&self.v, &compose(&hi, &vi)))
    }

    /// Zero orders predicted by the commutator: a cycle of length `k` is a cone point of angle `2πk`.
    pub fn commutator_zero_orders(&self) -> Vec<u32> {
        let mut z: Vec<u32> = cycles(&self.commutator())
            .iter()
            .filter(|c| c.len() > 1)
            .map(|c| c.len() as u32 - 1)
            .collect();
        z.sort_unstable_by(|a, b| b.cmp(a));
        z
    }

    /// Number of vertex classes of the square tiling.
    pub fn num_vertices(&self) -> usize {
        cycles(&self.commutator()).len()
    }

    /// Square `i` is `[i, i+1] × [0, 1]`; edges are bottom, right, top, left.
    pub fn to_surface(&self) -> TranslationSurface {
        let polys: Vec<Polygon> = (0..self.n())
            .map(|i| {
                let x = i as f64;
                Polygon {
                    vertices: vec![
                        Vec2::new(x, 0.0),
                        Vec2::new(x + 1.0, 0.0),
                        Vec2::new(x + 1.0, 1.0),
                        Vec2::new(x, 1.0),
                    ],
                    label: format!("sq{}", i + 1),
                }
            })
            .collect();
        let mut gl = Vec::with_capacity(2 * self.n());
        for i in 0..self.n() {
            gl.push((Edge::new(i, 1), Edge::new(self.h[i], 3)));
            gl.push((Edge::new(i, 2), Edge::new(self.v[i], 0)));
        }
        TranslationSurface::new(polys, &gl).expect("origami squares always glue")
    }

    /// Relabels squares so that the result is the lexicographically smallest pair `(h, v)`
    /// over all breadth-first relabelings. Returns the canonical origami and `map[old] = new`.
    pub fn canonical(&self) -> (Origami, Vec<usize>) {
        let n = self.n();
        let mut best: Option<(Origami, Vec<usize>)> = None;
        for start in 0..n {
            let mut map = vec![usize::MAX; n];
            let mut order = Vec::with_capacity(n);
            map[start] = 0;
            order.push(start);
            let mut k = 0;
            while k < order.len() {
                let i = order[k];
                k += 1;
                for j in [self.h[i], self.v[i]] {
                    if map[j] == usize::MAX {
                        map[j] = order.len();
                        order.push(j);
                    }
                }
            }
            debug_assert_eq!(order.len(), n, "h, v generate a transitive group");
            let mut h = vec![0; n];
            let mut v = vec![0; n];
            for i in 0..n {
                h[map[i]] = map[self.h[i]];
                v[map[i]] = map[self.v[i]];
            }
            let cand = Origami { h, v };
            if best.as_ref().is_none_or(|(b, _)| cand < *b) {
                best = Some((cand, map));
            }
        }
        best.expect("origami has at least one square")
    }

    /// Image under the shear `T = [[1,1],[0,1]]`, relabeled by bottom edges: `(h, v h⁻¹)`.
    pub fn act_t(&self) -> Origami {
        Origami { h: self.h.clone(), v: compose(&self.v, &invert(&self.h)) }
    }

    pub fn act_t_inv(&self) -> Origami {
        Origami { h: self.h.clone(), v: compose(&self.v, &self.h) }
    }

    /// Image under the rotation `S = [[0,-1],[1,0]]`: `(v⁻¹, h)`.
    pub fn act_s(&self) -> Origami {
        Origami { h: invert(&self.v), v: self.h.clone() }
    }

    pub fn act_s_inv(&self) -> Origami {
        Origami { h: self.v.clone(), v: invert(&self.h) }
    }
}
