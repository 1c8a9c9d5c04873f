//! Small dense integer matrices: kernels, Smith invariants, unimodular inverses.

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.to_rows())
    }
}

impl Serialize for IntMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rows = Vec::<Vec<i64>>::deserialize(d)?;
        IntMatrix::from_rows(&rows).ok_or_else(|| serde::de::Error::custom("ragged matrix"))
    }
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Option<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != c) {
            return None;
        }
        Some(IntMatrix { rows: r, cols: c, data: rows.concat() })
    }

    pub fn from_cols(cols: &[Vec<i64>], rows: usize) -> Self {
        let mut m = Self::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for i in 0..rows {
                m[(i, j)] = c[i];
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<i64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn mul(&self, o: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, o.rows);
        let mut m = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0 {
                    continue;
                }
                for j in 0..o.cols {
                    m[(i, j)] += a * o[(k, j)];
                }
            }
        }
        m
    }

    pub fn mul_vec(&self, v: &[i64]) -> Vec<i64> {
        (0..self.rows).map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    pub fn mul_vec_f64(&self, v: &[f64]) -> Vec<f64> {
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(&a, b)| a as f64 * b).sum())
            .collect()
    }

    /// `selfᵀ v`.
    pub fn tmul_vec_f64(&self, v: &[f64]) -> Vec<f64> {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self[(i, j)] as f64 * v[i]).sum())
            .collect()
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols && *self == Self::identity(self.rows)
    }

    pub fn max_abs(&self) -> i64 {
        self.data.iter().map(|x| x.abs()).max().unwrap_or(0)
    }

    pub fn to_f64(&self) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)] as f64)
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// `col[dst] += k * col[src]`.
    fn add_col(&mut self, dst: usize, src: usize, k: i64) {
        for i in 0..self.rows {
            let v = self[(i, src)];
            self[(i, dst)] += k * v;
        }
    }

    fn neg_col(&mut self, j: usize) {
        for i in 0..self.rows {
            self[(i, j)] = -self[(i, j)];
        }
    }

    /// Determinant by fraction-free elimination.
    pub fn det(&self) -> i128 {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a: Vec<Vec<i128>> = (0..n).map(|i| self.row(i).iter().map(|&x| x as i128).collect()).collect();
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..n {
            if a[k][k] == 0 {
                match (k + 1..n).find(|&i| a[i][k] != 0) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return 0,
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
                }
            }
            prev = a[k][k];
        }
        if n == 0 {
            1
        } else {
            sign * a[n - 1][n - 1]
        }
    }

    /// Inverse of a matrix with determinant ±1.
    pub fn inverse_unimodular(&self) -> Option<IntMatrix> {
        if self.rows != self.cols || self.det().abs() != 1 {
            return None;
        }
        let n = self.rows;
        // column reduction of [A; I] to [I; A⁻¹]
        let mut aug = IntMatrix::zeros(2 * n, n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)];
            }
            aug[(n + i, i)] = 1;
        }
        for r in 0..n {
            gcd_reduce_row(&mut aug, r, r);
            if aug[(r, r)] < 0 {
                aug.neg_col(r);
            }
            if aug[(r, r)] != 1 {
                return None;
            }
            for j in 0..n {
                if j != r && aug[(r, j)] != 0 {
                    let k = aug[(r, j)];
                    aug.add_col(j, r, -k);
                }
            }
        }
        let mut inv = IntMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv[(i, j)] = aug[(n + i, j)];
            }
        }
        debug_assert!(self.mul(&inv).is_identity());
        Some(inv)
    }
}

/// Column operations on columns `>= start` so that only column `start` is nonzero in row `r`.
fn gcd_reduce_row(m: &mut IntMatrix, r: usize, start: usize) {
    loop {
        let mut piv: Option<usize> = None;
        for j in start..m.cols {
            let v = m[(r, j)];
            if v != 0 && piv.is_none_or(|p| v.abs() < m[(r, p)].abs()) {
                piv = Some(j);
            }
        }
        let Some(p) = piv else { return };
        if p != start {
            m.swap_cols(p, start);
        }
        let mut done = true;
        for j in start + 1..m.cols {
            let v = m[(r, j)];
            if v != 0 {
                let q = v.div_euclid(m[(r, start)]);
                m.add_col(j, start, -q);
                if m[(r, j)] != 0 {
                    done = false;
                }
            }
        }
        if done {
            return;
        }
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = i64;
    fn index(&self, (i, j): (usize, usize)) -> &i64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut i64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Integer kernel of `m` (as columns of `basis`) with a left inverse: `dualᵀ · basis = I`.
pub struct Kernel {
    pub basis: IntMatrix,
    pub dual: IntMatrix,
    pub rank: usize,
}

pub fn kernel(m: &IntMatrix) -> Kernel {
    let (r, c) = (m.rows(), m.cols());
    let mut aug = IntMatrix::zeros(r + c, c);
    for i in 0..r {
        for j in 0..c {
            aug[(i, j)] = m[(i, j)];
        }
    }
    for j in 0..c {
        aug[(r + j, j)] = 1;
    }
    let mut pivot = 0;
    for row in 0..r {
        if pivot == c {
            break;
        }
        gcd_reduce_row(&mut aug, row, pivot);
        if aug[(row, pivot)] != 0 {
            pivot += 1;
        }
    }
    let mut u = IntMatrix::zeros(c, c);
    for i in 0..c {
        for j in 0..c {
            u[(i, j)] = aug[(r + i, j)];
        }
    }
    let k = c - pivot;
    let mut basis = IntMatrix::zeros(c, k);
    for i in 0..c {
        for j in 0..k {
            basis[(i, j)] = u[(i, pivot + j)];
        }
    }
    let uinv = u.inverse_unimodular().expect("column operations are unimodular");
    let mut dual = IntMatrix::zeros(c, k);
    for i in 0..c {
        for j in 0..k {
            dual[(i, j)] = uinv[(pivot + j, i)];
        }
    }
    Kernel { basis, dual, rank: pivot }
}

/// Nonzero invariant factors of the Smith normal form.
pub fn smith_invariants(m: &IntMatrix) -> Vec<i64> {
    let mut a: Vec<Vec<i128>> = (0..m.rows()).map(|i| m.row(i).iter().map(|&x| x as i128).collect()).collect();
    let (rows, cols) = (m.rows(), m.cols());
    let mut out = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        // smallest nonzero entry in the remaining block
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if a[i][j] != 0 && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((bi, bj)) = best else { break };
        a.swap(t, bi);
        for row in a.iter_mut() {
            row.swap(t, bj);
        }
        loop {
            let p = a[t][t];
            let mut clean = true;
            for i in t + 1..rows {
                let q = a[i][t].div_euclid(p);
                if q != 0 {
                    for j in t..cols {
                        a[i][j] -= q * a[t][j];
                    }
                }
                if a[i][t] != 0 {
                    clean = false;
                }
            }
            for j in t + 1..cols {
                let q = a[t][j].div_euclid(p);
                if q != 0 {
                    for row in a.iter_mut() {
                        row[j] -= q * row[t];
                    }
                }
                if a[t][j] != 0 {
                    clean = false;
                }
            }
            if clean {
                // divisibility of the rest of the block
                let bad = (t + 1..rows).flat_map(|i| (t + 1..cols).map(move |j| (i, j))).find(|&(i, j)| a[i][j] % p != 0);
                match bad {
                    Some((i, _)) => {
                        for j in t..cols {
                            let v = a[i][j];
                            a[t][j] += v;
                        }
                        continue;
                    }
                    None => break,
                }
            }
            // move the smallest entry of row/column t to the pivot
            let mut bi = t;
            let mut bj = t;
            for i in t..rows {
                if a[i][t] != 0 && a[i][t].abs() < a[bi][bj].abs() {
                    bi = i;
                    bj = t;
                }
            }
            for j in t..cols {
                if a[t][j] != 0 && a[t][j].abs() < a[bi][bj].abs() {
                    bi = t;
                    bj = j;
                }
            }
            a.swap(t, bi);
            for row in a.iter_mut() {
                row.swap(t, bj);
            }
        }
        out.push(a[t][t].abs() as i64);
        t += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn smith_of_diag() {
        let m = IntMatrix::from_rows(&[vec![2, 0], vec![0, 3]]).unwrap();
        assert_eq!(smith_invariants(&m), vec![1, 6]);
        let z = IntMatrix::zeros(2, 3);
        assert!(smith_invariants(&z).is_empty());
    }

    #[test]
    fn kernel_of_boundary_row() {
        let m = IntMatrix::from_rows(&[vec![1, -1, 0], vec![0, 1, -1]]).unwrap();
        let k = kernel(&m);
        assert_eq!(k.rank, 2);
        assert_eq!(k.basis.cols(), 1);
        let v = k.basis.col(0);
        assert!(v == vec![1, 1, 1] || v == vec![-1, -1, -1]);
        assert!(k.dual.transpose().mul(&k.basis).is_identity());
    }

    proptest! {
        #[test]
        fn kernel_is_kernel(entries in proptest::collection::vec(-3i64..=3, 12)) {
            let m = IntMatrix::from_rows(&[entries[0..4].to_vec(), entries[4..8].to_vec(), entries[8..12].to_vec()]).unwrap();
            let k = kernel(&m);
            let prod = m.mul(&k.basis);
            prop_assert!(prod.max_abs() == 0);
            prop_assert!(k.dual.transpose().mul(&k.basis).is_identity());
            prop_assert_eq!(k.basis.cols() + k.rank, 4);
        }

        #[test]
        fn unimodular_inverse(a in -4i64..=4, b in -4i64..=4, c in -4i64..=4) {
            // upper and lower unipotent factors give det 1
            let u = IntMatrix::from_rows(&[vec![1, a, b], vec![0, 1, c], vec![0, 0, 1]]).unwrap();
            let l = IntMatrix::from_rows(&[vec![1, 0, 0], vec![c, 1, 0], vec![a, b, 1]]).unwrap();
            let m = u.mul(&l);
            let inv = m.inverse_unimodular().unwrap();
            prop_assert!(m.mul(&inv).is_identity());
            prop_assert_eq!(m.det(), 1);
        }
    }
}
