//! Surfaces whose edges carry classes in a fixed reference basis of relative homology.
//!
//! Re-cutting a surface (new polygons, new triangulations) changes its own edge basis; carrying
//! reference classes along lets holonomy and cohomology be compared across presentations.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{FlatError, Result};
use crate::geom::Vec2;
use crate::homology::Homology;
use crate::surface::{Edge, TranslationSurface};

#[derive(Clone, Debug)]
pub struct MarkedSurface {
    pub surface: TranslationSurface,
    /// `classes[p][e]`: class of edge `e` of polygon `p`, counterclockwise in `p`.
    pub classes: Vec<Vec<Vec<i64>>>,
    pub rank: usize,
    pub fingerprint: String,
}

impl MarkedSurface {
    /// Marks a surface by its own edge basis.
    pub fn own(s: &TranslationSurface) -> Result<(Self, Homology)> {
        let h = Homology::build(s)?;
        Ok((Self::with_basis(s, &h), h))
    }

    pub fn with_basis(s: &TranslationSurface, h: &Homology) -> Self {
        let classes = s
            .polygons()
            .iter()
            .enumerate()
            .map(|(p, poly)| (0..poly.len()).map(|i| h.edge_class(Edge::new(p, i))).collect())
            .collect();
        MarkedSurface {
            surface: s.clone(),
            classes,
            rank: h.rank(),
            fingerprint: h.fingerprint().to_string(),
        }
    }

    pub fn edge_class(&self, e: Edge) -> &[i64] {
        &self.classes[e.poly][e.edge]
    }

    /// Same marking, points moved by `f`.
    pub fn map_points(&self, f: impl Fn(Vec2) -> Vec2) -> Result<Self> {
        Ok(MarkedSurface { surface: self.surface.map_points(f)?, ..self.clone() })
    }

    /// Holonomy on the reference basis, recovered from edge vectors by least squares and
    /// checked to be consistent with every edge.
    pub fn reference_holonomy(&self) -> Result<Vec<Complex64>> {
        let edges: Vec<Edge> = self.surface.edges().collect();
        let vecs: Vec<Vec2> = edges.iter().map(|&e| self.surface.edge_vector(e)).collect();
        let cls: Vec<&[i64]> = edges.iter().map(|&e| self.edge_class(e)).collect();
        let scale = self.surface.length_scale();
        solve_holonomy(&cls, &vecs, self.rank, scale * 1e-8)
    }

    /// Values of a class on every edge, for checks against geometric edge vectors.
    pub fn evaluate_on_edges(&self, v: &[Complex64]) -> Vec<Vec<Complex64>> {
        self.classes
            .iter()
            .map(|row| row.iter().map(|c| c.iter().zip(v).map(|(&k, z)| z * k as f64).sum()).collect())
            .collect()
    }
}

/// Least-squares `hol` with `Σ_j c_j hol_j = v` for every `(c, v)`, failing if the residual
/// exceeds `tol` or the classes do not span.
pub fn solve_holonomy(classes: &[&[i64]], vecs: &[Vec2], rank: usize, tol: f64) -> Result<Vec<Complex64>> {
    let n = classes.len();
    let a = DMatrix::from_fn(n, rank, |i, j| classes[i][j] as f64);
    let bx = DVector::from_fn(n, |i, _| vecs[i].x);
    let by = DVector::from_fn(n, |i, _| vecs[i].y);
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    if svd.rank(smax * 1e-10) < rank {
        return Err(FlatError::MalformedSurface("edge classes do not span the reference basis".into()));
    }
    let x = svd.solve(&bx, 1e-12).map_err(|e| FlatError::NumericInstability(e.to_string()))?;
    let y = svd.solve(&by, 1e-12).map_err(|e| FlatError::NumericInstability(e.to_string()))?;
    let rx = (&a * &x - &bx).amax();
    let ry = (&a * &y - &by).amax();
    if rx.max(ry) > tol {
        return Err(FlatError::NumericInstability(format!(
            "edge vectors inconsistent with marking (residual {:.3e})",
            rx.max(ry)
        )));
    }
    Ok((0..rank).map(|j| Complex64::new(x[j], y[j])).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::build_regular_2ngon;

    #[test]
    fn own_marking_recovers_holonomy() {
        let s = build_regular_2ngon(5).unwrap();
        let (m, h) = MarkedSurface::own(&s).unwrap();
        let hol = m.reference_holonomy().unwrap();
        for (a, b) in hol.iter().zip(&h.holonomy(&s).values) {
            assert!((a - b).norm() < 1e-12);
        }
    }
}
