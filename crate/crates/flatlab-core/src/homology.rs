//! Integral bases of relative and absolute homology built from polygon edges.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{FlatError, Result};
use crate::intlin::{kernel, smith_invariants, IntMatrix};
use crate::surface::{Edge, TranslationSurface};

/// A cohomology class: one complex value per relative basis generator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelCohomClass {
    pub fingerprint: String,
    #[serde(with = "complex_pairs")]
    pub values: Vec<Complex64>,
}

mod complex_pairs {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Complex64>, D::Error> {
        let v = Vec::<[f64; 2]>::deserialize(d)?;
        Ok(v.into_iter().map(|[a, b]| Complex64::new(a, b)).collect())
    }
}

impl RelCohomClass {
    pub fn real(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.re).collect()
    }

    pub fn imag(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.im).collect()
    }

    pub fn from_real(fingerprint: &str, v: &[f64]) -> Self {
        RelCohomClass {
            fingerprint: fingerprint.to_string(),
            values: v.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        }
    }

    pub fn from_imag(fingerprint: &str, v: &[f64]) -> Self {
        RelCohomClass {
            fingerprint: fingerprint.to_string(),
            values: v.iter().map(|&x| Complex64::new(0.0, x)).collect(),
        }
    }

    /// Evaluation on an integer chain written in the same basis.
    pub fn eval(&self, chain: &[i64]) -> Complex64 {
        self.values.iter().zip(chain).map(|(v, &k)| v * k as f64).sum()
    }

    pub fn check_basis(&self, h: &Homology) -> Result<()> {
        if self.fingerprint != h.fingerprint() || self.values.len() != h.rank() {
            return Err(FlatError::BasisMismatch {
                expected: h.fingerprint().to_string(),
                found: self.fingerprint.clone(),
            });
        }
        Ok(())
    }
}

/// Relative basis, absolute cycles, forgetful map and intersection data of one surface.
///
/// Generators are the glued edge pairs not in a spanning tree of the dual graph, each oriented
/// as the lower `(polygon, edge)` side traverses it counterclockwise. The basis depends only on
/// the combinatorics, so `g·s` shares the basis of `s`.
#[derive(Clone, Debug)]
pub struct Homology {
    pairs: Vec<Edge>,
    pair_of_edge: Vec<Vec<(usize, i64)>>,
    basis_pairs: Vec<usize>,
    edge_to_basis: IntMatrix,
    boundary: IntMatrix,
    cycles: IntMatrix,
    cycles_dual: IntMatrix,
    omega: IntMatrix,
    intersection: IntMatrix,
    num_vertices: usize,
    genus: usize,
    fingerprint: String,
}

/// Hash of the gluing combinatorics and the basis recipe.
pub fn combinatorial_fingerprint(s: &TranslationSurface) -> String {
    let mut h = Sha256::new();
    h.update(b"rel-basis-v1;");
    for p in s.polygons() {
        h.update((p.len() as u64).to_le_bytes());
    }
    for (a, b) in s.gluings() {
        for x in [a.poly, a.edge, b.poly, b.edge] {
            h.update((x as u64).to_le_bytes());
        }
    }
    let d = h.finalize();
    d.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

impl Homology {
    pub fn build(s: &TranslationSurface) -> Result<Self> {
        let mut pairs = Vec::new();
        let mut pair_of_edge: Vec<Vec<(usize, i64)>> =
            s.polygons().iter().map(|p| vec![(0, 0); p.len()]).collect();
        for e in s.edges() {
            let f = s.partner(e);
            if e < f {
                let k = pairs.len();
                pairs.push(e);
                pair_of_edge[e.poly][e.edge] = (k, 1);
                pair_of_edge[f.poly][f.edge] = (k, -1);
            }
        }
        let ne = pairs.len();
        let nf = s.polygons().len();

        // spanning tree of the dual graph, Kruskal in pair order
        let mut uf: Vec<usize> = (0..nf).collect();
        fn find(uf: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while uf[r] != r {
                r = uf[r];
            }
            let mut y = x;
            while uf[y] != r {
                let n = uf[y];
                uf[y] = r;
                y = n;
            }
            r
        }
        let mut in_tree = vec![false; ne];
        let mut tree_adj: Vec<Vec<usize>> = vec![Vec::new(); nf];
        for (k, &e) in pairs.iter().enumerate() {
            let f = s.partner(e);
            if e.poly == f.poly {
                continue;
            }
            let (ra, rb) = (find(&mut uf, e.poly), find(&mut uf, f.poly));
            if ra != rb {
                uf[ra] = rb;
                in_tree[k] = true;
                tree_adj[e.poly].push(k);
                tree_adj[f.poly].push(k);
            }
        }
        let basis_pairs: Vec<usize> = (0..ne).filter(|&k| !in_tree[k]).collect();
        let r = basis_pairs.len();
        let mut expr: Vec<Option<Vec<i64>>> = vec![None; ne];
        for (j, &k) in basis_pairs.iter().enumerate() {
            let mut v = vec![0; r];
            v[j] = 1;
            expr[k] = Some(v);
        }
        // eliminate tree edges from the leaves inward
        let mut degree: Vec<usize> = tree_adj.iter().map(|a| a.len()).collect();
        let mut removed = vec![false; ne];
        loop {
            let Some(p) = (0..nf).find(|&p| degree[p] == 1) else { break };
            let t = *tree_adj[p].iter().find(|&&k| !removed[k]).expect("leaf has a tree edge");
            let mut acc = vec![0i64; r];
            let mut st = 0;
            for i in 0..s.polygons()[p].len() {
                let (k, sg) = pair_of_edge[p][i];
                if k == t {
                    st = sg;
                    continue;
                }
                let x = expr[k].as_ref().expect("non-leaf edges resolved first");
                for j in 0..r {
                    acc[j] += sg * x[j];
                }
            }
            for a in acc.iter_mut() {
                *a *= -st;
            }
            expr[t] = Some(acc);
            removed[t] = true;
            let e = pairs[t];
            let f = s.partner(e);
            degree[e.poly] -= 1;
            degree[f.poly] -= 1;
        }
        let rows: Vec<Vec<i64>> = expr
            .into_iter()
            .map(|x| x.ok_or_else(|| FlatError::MalformedSurface("disconnected dual graph".into())))
            .collect::<Result<_>>()?;
        let edge_to_basis = IntMatrix::from_rows(&rows).unwrap_or_else(|| IntMatrix::zeros(0, r));

        // torsion-freeness of C1 / ∂C2
        let mut rel = IntMatrix::zeros(ne, nf);
        for p in 0..nf {
            for &(k, sg) in &pair_of_edge[p] {
                rel[(k, p)] += sg;
            }
        }
        let inv = smith_invariants(&rel);
        if inv.iter().any(|&d| d != 1) || inv.len() + 1 != nf {
            return Err(FlatError::MalformedSurface(format!("relation matrix invariants {inv:?}")));
        }

        let nv = s.num_vertices();
        let genus = s.genus() as usize;
        if r != 2 * genus + nv - 1 {
            return Err(FlatError::MalformedSurface(format!(
                "relative rank {r} != 2g + |Σ| - 1 = {}",
                2 * genus + nv - 1
            )));
        }
        let mut boundary = IntMatrix::zeros(nv, r);
        for (j, &k) in basis_pairs.iter().enumerate() {
            let e = pairs[k];
            let kk = s.polygons()[e.poly].len();
            let a = s.vertex_of_corner(e.poly, e.edge);
            let b = s.vertex_of_corner(e.poly, (e.edge + 1) % kk);
            boundary[(b, j)] += 1;
            boundary[(a, j)] -= 1;
        }
        let ker = kernel(&boundary);
        if ker.basis.cols() != 2 * genus {
            return Err(FlatError::MalformedSurface(format!(
                "absolute rank {} != 2g = {}",
                ker.basis.cols(),
                2 * genus
            )));
        }

        let mut hom = Homology {
            pairs,
            pair_of_edge,
            basis_pairs,
            edge_to_basis,
            boundary,
            cycles: ker.basis,
            cycles_dual: ker.dual,
            omega: IntMatrix::zeros(r, r),
            intersection: IntMatrix::zeros(2 * genus, 2 * genus),
            num_vertices: nv,
            genus,
            fingerprint: combinatorial_fingerprint(s),
        };
        hom.omega = hom.cochain_pairing_matrix(s)?;
        // Ω = C K Cᵀ with K = J^{-T}; D is a left inverse of C
        let d = &hom.cycles_dual;
        let k = d.transpose().mul(&hom.omega).mul(d);
        if hom.cycles.mul(&k).mul(&hom.cycles.transpose()) != hom.omega {
            return Err(FlatError::MalformedSurface("pairing does not factor through absolute homology".into()));
        }
        hom.intersection = k
            .transpose()
            .inverse_unimodular()
            .ok_or_else(|| FlatError::MalformedSurface("intersection form is not unimodular".into()))?;
        Ok(hom)
    }

    /// `Ω[j][k] = ∫ e_j* ∧ e_k*` via the boundary-potential formula on each polygon.
    fn cochain_pairing_matrix(&self, s: &TranslationSurface) -> Result<IntMatrix> {
        let r = self.rank();
        let mut two_omega = IntMatrix::zeros(r, r);
        for (p, poly) in s.polygons().iter().enumerate() {
            let k = poly.len();
            // values of every unit cochain on the edges of p
            let vals: Vec<Vec<i64>> = (0..k).map(|i| self.edge_class(Edge::new(p, i))).collect();
            for a in 0..r {
                let mut f = vec![0i64; k + 1];
                for i in 0..k {
                    f[i + 1] = f[i] + vals[i][a];
                }
                if f[k] != 0 {
                    return Err(FlatError::MalformedSurface("cochain not closed on a polygon".into()));
                }
                for i in 0..k {
                    let w = f[i] + f[i + 1];
                    if w == 0 {
                        continue;
                    }
                    for b in 0..r {
                        two_omega[(a, b)] += vals[i][b] * w;
                    }
                }
            }
        }
        let mut omega = IntMatrix::zeros(r, r);
        for a in 0..r {
            for b in 0..r {
                let v = two_omega[(a, b)];
                if v % 2 != 0 {
                    return Err(FlatError::MalformedSurface("non-integral pairing".into()));
                }
                omega[(a, b)] = v / 2;
            }
        }
        Ok(omega)
    }

    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    pub fn rank(&self) -> usize {
        self.basis_pairs.len()
    }

    pub fn abs_rank(&self) -> usize {
        2 * self.genus
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    /// Canonical edge of basis generator `j`.
    pub fn generator_edge(&self, j: usize) -> Edge {
        self.pairs[self.basis_pairs[j]]
    }

    /// Class of edge `e`, oriented counterclockwise in its polygon, in basis coordinates.
    pub fn edge_class(&self, e: Edge) -> Vec<i64> {
        let (k, sg) = self.pair_of_edge[e.poly][e.edge];
        self.edge_to_basis.row(k).iter().map(|&x| sg * x).collect()
    }

    /// Boundary map `Z^rank → Z^|Σ|`.
    pub fn boundary(&self) -> &IntMatrix {
        &self.boundary
    }

    /// Absolute cycles as columns in relative basis coordinates.
    pub fn cycles(&self) -> &IntMatrix {
        &self.cycles
    }

    /// Relative pairing matrix: `⟨a, b⟩ = aᵀ Ω b`.
    pub fn omega(&self) -> &IntMatrix {
        &self.omega
    }

    /// `J[k][l] = c_k · c_l` on the absolute cycles.
    pub fn intersection_matrix(&self) -> &IntMatrix {
        &self.intersection
    }

    pub fn holonomy(&self, s: &TranslationSurface) -> RelCohomClass {
        let values = (0..self.rank())
            .map(|j| {
                let v = s.edge_vector(self.generator_edge(j));
                Complex64::new(v.x, v.y)
            })
            .collect();
        RelCohomClass { fingerprint: self.fingerprint.clone(), values }
    }

    /// Forgetful map `p`: values on the absolute cycles.
    pub fn forget(&self, a: &[f64]) -> Vec<f64> {
        self.cycles.tmul_vec_f64(a)
    }

    pub fn pairing(&self, a: &[f64], b: &[f64]) -> f64 {
        let ob = self.omega.mul_vec_f64(b);
        a.iter().zip(&ob).map(|(x, y)| x * y).sum()
    }

    pub fn pairing_c(&self, a: &[Complex64], b: &[Complex64]) -> Complex64 {
        let r = self.rank();
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..r {
            for j in 0..r {
                let w = self.omega[(i, j)];
                if w != 0 {
                    acc += a[i] * b[j] * w as f64;
                }
            }
        }
        acc
    }

    /// Pairing of two real classes given as [`RelCohomClass`] (real parts are used).
    pub fn intersection_pairing(&self, a: &RelCohomClass, b: &RelCohomClass) -> Result<f64> {
        a.check_basis(self)?;
        b.check_basis(self)?;
        Ok(self.pairing(&a.real(), &b.real()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::origami::Origami;
    use crate::surface::build_regular_2ngon;

    #[test]
    fn torus_basis() {
        let s = Origami::torus().to_surface();
        let h = Homology::build(&s).unwrap();
        assert_eq!(h.rank(), 2);
        assert_eq!(h.abs_rank(), 2);
        let hol = h.holonomy(&s);
        assert_eq!(hol.values, vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)]);
        assert_eq!(h.intersection_matrix().to_rows(), vec![vec![0, 1], vec![-1, 0]]);
        assert!((h.pairing(&hol.real(), &hol.imag()) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn ranks_of_examples() {
        let dec = build_regular_2ngon(5).unwrap();
        let h = Homology::build(&dec).unwrap();
        assert_eq!((h.rank(), h.abs_rank()), (5, 4));
        let l = Origami::l_shape().to_surface();
        assert_eq!(Homology::build(&l).unwrap().rank(), 4);
    }

    #[test]
    fn decagon_area_pairing() {
        let dec = build_regular_2ngon(5).unwrap();
        let h = Homology::build(&dec).unwrap();
        let hol = h.holonomy(&dec);
        let area = 10.0 / 4.0 / (std::f64::consts::PI / 10.0).tan();
        assert!((h.pairing(&hol.real(), &hol.imag()) - area).abs() < 1e-9);
    }

    #[test]
    fn intersection_form_is_symplectic() {
        for n in 4..=9 {
            let s = build_regular_2ngon(n).unwrap();
            let h = Homology::build(&s).unwrap();
            let j = h.intersection_matrix();
            assert_eq!(j.transpose(), {
                let mut m = j.clone();
                for i in 0..m.rows() {
                    for k in 0..m.cols() {
                        m[(i, k)] = -j[(i, k)];
                    }
                }
                m
            });
            assert_eq!(j.det().abs(), 1);
        }
    }

    #[test]
    fn edge_classes_sum_to_zero_around_polygons() {
        let s = build_regular_2ngon(7).unwrap();
        let h = Homology::build(&s).unwrap();
        for (p, poly) in s.polygons().iter().enumerate() {
            let mut acc = vec![0; h.rank()];
            for i in 0..poly.len() {
                for (a, b) in acc.iter_mut().zip(h.edge_class(Edge::new(p, i))) {
                    *a += b;
                }
            }
            assert!(acc.iter().all(|&x| x == 0));
        }
    }
}
