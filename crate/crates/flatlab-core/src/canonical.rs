//! Canonical forms for translation equivalence: Delaunay cells, encoded from every starting
//! flag, keeping the lexicographically least encoding.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::flat::{Cells, FlatTri, COCIRCULAR_TOL};
use crate::geom::Vec2;
use crate::marked::MarkedSurface;
use crate::surface::{Edge, Polygon, TranslationSurface, EPS_GEOM};

const MAX_FLIPS: usize = 1_000_000;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CanonicalForm {
    /// Side vectors of each cell, starting from its canonical side.
    pub cells: Vec<Vec<Vec2>>,
    /// `(cell, side)` glued to each side.
    pub glue: Vec<Vec<(usize, usize)>>,
    /// Reference classes of each side.
    pub classes: Vec<Vec<Vec<i64>>>,
    /// Set when cocircular triangles were merged into larger cells.
    pub merged_cocircular: bool,
    pub area: f64,
}

#[derive(Clone, Copy, Debug)]
enum Token {
    Int(i64),
    Real(f64),
}

fn cmp_tokens(a: &[Token], b: &[Token], tol: f64) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        let o = match (x, y) {
            (Token::Int(p), Token::Int(q)) => p.cmp(q),
            (Token::Real(p), Token::Real(q)) => {
                if (p - q).abs() <= tol {
                    Ordering::Equal
                } else {
                    p.total_cmp(q)
                }
            }
            (Token::Int(_), Token::Real(_)) => Ordering::Less,
            (Token::Real(_), Token::Int(_)) => Ordering::Greater,
        };
        if o != Ordering::Equal {
            return o;
        }
    }
    a.len().cmp(&b.len())
}

struct Encoding {
    tokens: Vec<Token>,
    order: Vec<usize>,
    start: Vec<usize>,
    label: Vec<usize>,
}

fn encode(tri: &FlatTri, cells: &Cells, c0: usize, s0: usize) -> Encoding {
    let n = cells.sides.len();
    let mut label = vec![usize::MAX; n];
    let mut start = vec![0; n];
    let mut order = vec![c0];
    label[c0] = 0;
    start[c0] = s0;
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let c = order[i];
        let k = cells.sides[c].len();
        tokens.push(Token::Int(k as i64));
        for j in 0..k {
            let h = cells.sides[c][(start[c] + j) % k];
            let v = tri.vec(h);
            tokens.push(Token::Real(v.x));
            tokens.push(Token::Real(v.y));
            let (c2, j2) = cells.position[tri.twin(h)].expect("side");
            if label[c2] == usize::MAX {
                label[c2] = order.len();
                start[c2] = j2;
                order.push(c2);
            }
            let k2 = cells.sides[c2].len();
            tokens.push(Token::Int(label[c2] as i64));
            tokens.push(Token::Int(((j2 + k2 - start[c2]) % k2) as i64));
        }
        i += 1;
    }
    Encoding { tokens, order, start, label }
}

/// Canonical form of a Delaunay triangulation (`tri` must already be Delaunay).
pub fn canonical_form_of_delaunay(tri: &FlatTri) -> CanonicalForm {
    let cells = tri.cells(COCIRCULAR_TOL);
    let tol = EPS_GEOM * tri.area().sqrt();
    let mut best: Option<Encoding> = None;
    for c in 0..cells.sides.len() {
        for s in 0..cells.sides[c].len() {
            let e = encode(tri, &cells, c, s);
            let better = match &best {
                None => true,
                Some(b) => cmp_tokens(&e.tokens, &b.tokens, tol) == Ordering::Less,
            };
            if better {
                best = Some(e);
            }
        }
    }
    let e = best.expect("surface has at least one cell");
    let mut out_cells = Vec::new();
    let mut glue = Vec::new();
    let mut classes = Vec::new();
    for &c in &e.order {
        let k = cells.sides[c].len();
        let mut vs = Vec::new();
        let mut gl = Vec::new();
        let mut cl = Vec::new();
        for j in 0..k {
            let h = cells.sides[c][(e.start[c] + j) % k];
            vs.push(tri.vec(h));
            cl.push(tri.class(h).to_vec());
            let (c2, j2) = cells.position[tri.twin(h)].expect("side");
            let k2 = cells.sides[c2].len();
            gl.push((e.label[c2], (j2 + k2 - e.start[c2]) % k2));
        }
        out_cells.push(vs);
        glue.push(gl);
        classes.push(cl);
    }
    CanonicalForm {
        cells: out_cells,
        glue,
        classes,
        merged_cocircular: cells.merged_cocircular,
        area: tri.area(),
    }
}

pub fn canonical_form_tri(tri: &FlatTri) -> Result<CanonicalForm> {
    let mut t = tri.clone();
    t.make_delaunay(MAX_FLIPS)?;
    Ok(canonical_form_of_delaunay(&t))
}

pub fn canonical_form_marked(m: &MarkedSurface) -> Result<CanonicalForm> {
    canonical_form_tri(&FlatTri::from_marked(m)?)
}

pub fn canonical_form(s: &TranslationSurface) -> Result<CanonicalForm> {
    canonical_form_tri(&FlatTri::from_surface(s)?)
}

impl CanonicalForm {
    /// Agreement of cell structure, gluings and side vectors within `tol`.
    pub fn matches(&self, other: &CanonicalForm, tol: f64) -> bool {
        self.cells.len() == other.cells.len()
            && self.glue == other.glue
            && self.cells.iter().zip(&other.cells).all(|(a, b)| {
                a.len() == b.len() && a.iter().zip(b).all(|(u, v)| (*u - *v).max_abs() <= tol)
            })
    }

    /// Largest side-vector difference, or infinity when the combinatorics differ.
    pub fn distance(&self, other: &CanonicalForm) -> f64 {
        if self.cells.len() != other.cells.len() || self.glue != other.glue {
            return f64::INFINITY;
        }
        self.cells
            .iter()
            .zip(&other.cells)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(u, v)| (*u - *v).max_abs()))
            .fold(0.0, f64::max)
    }

    /// Equivalence at the default tolerance `ε_geom·sqrt(area)`.
    pub fn equivalent(&self, other: &CanonicalForm) -> bool {
        self.matches(other, EPS_GEOM * self.area.sqrt().max(1.0))
    }

    pub fn to_surface(&self) -> Result<TranslationSurface> {
        let polys = self
            .cells
            .iter()
            .map(|vs| {
                let mut p = Vec2::ZERO;
                let mut verts = Vec::new();
                for &v in vs {
                    verts.push(p);
                    p += v;
                }
                Polygon::new(verts)
            })
            .collect();
        let mut gl = Vec::new();
        for (c, row) in self.glue.iter().enumerate() {
            for (i, &(c2, j)) in row.iter().enumerate() {
                if (c, i) < (c2, j) {
                    gl.push((Edge::new(c, i), Edge::new(c2, j)));
                }
            }
        }
        let scale = self.cells.iter().flatten().map(|v| v.norm()).fold(1.0, f64::max);
        TranslationSurface::with_eps(polys, &gl, EPS_GEOM * scale)
    }
}
