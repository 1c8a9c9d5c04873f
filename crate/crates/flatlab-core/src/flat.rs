//! Marked triangulations: the working representation for flips, Delaunay cells, straight-line
//! tracing and saddle-connection enumeration.
//!
//! Half-edge `3t + k` is side `k` of triangle `t`, running counterclockwise from vertex `k` to
//! vertex `k + 1`. Every half-edge carries its displacement vector, the vertex class it starts
//! at, and its class in a reference basis of relative homology.

use std::collections::HashMap;

use num_complex::Complex64;

use crate::error::{FlatError, Result};
use crate::geom::Vec2;
use crate::marked::{solve_holonomy, MarkedSurface};
use crate::sl2::Mat2;
use crate::surface::{Edge, Polygon, TranslationSurface};

/// Cotangent sums within this of zero are treated as cocircular.
pub const COCIRCULAR_TOL: f64 = 1e-7;

#[derive(Clone, Debug)]
pub struct FlatTri {
    vecs: Vec<Vec2>,
    twin: Vec<usize>,
    vert: Vec<usize>,
    cls: Vec<i64>,
    rank: usize,
    num_vertices: usize,
    fingerprint: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SaddleConnection {
    pub start: usize,
    pub end: usize,
    pub hol: Vec2,
    pub class: Vec<i64>,
}

/// Delaunay cells: convex polygons whose sides are unmerged half-edges.
#[derive(Clone, Debug)]
pub struct Cells {
    pub sides: Vec<Vec<usize>>,
    /// `(cell, index)` of each unmerged half-edge; `None` for merged ones.
    pub position: Vec<Option<(usize, usize)>>,
    pub merged_cocircular: bool,
}

#[inline]
pub fn next(h: usize) -> usize {
    if h % 3 == 2 {
        h - 2
    } else {
        h + 1
    }
}

#[inline]
pub fn prev(h: usize) -> usize {
    if h % 3 == 0 {
        h + 2
    } else {
        h - 1
    }
}

fn add_into(acc: &mut [i64], a: &[i64], sign: i64) {
    for (x, &y) in acc.iter_mut().zip(a) {
        *x += sign * y;
    }
}

/// Distance from the origin to the segment `[a, b]`.
pub fn segment_distance(a: Vec2, b: Vec2) -> f64 {
    let d = b - a;
    let l2 = d.norm2();
    if l2 == 0.0 {
        return a.norm();
    }
    let t = (-a.dot(d) / l2).clamp(0.0, 1.0);
    (a + d * t).norm()
}

impl FlatTri {
    /// Triangulates every polygon by ear clipping.
    pub fn from_marked(m: &MarkedSurface) -> Result<Self> {
        let s = &m.surface;
        let r = m.rank;
        let mut tri = FlatTri {
            vecs: Vec::new(),
            twin: Vec::new(),
            vert: Vec::new(),
            cls: Vec::new(),
            rank: r,
            num_vertices: s.num_vertices(),
            fingerprint: m.fingerprint.clone(),
        };
        let mut poly_he: Vec<Vec<usize>> = s.polygons().iter().map(|p| vec![usize::MAX; p.len()]).collect();
        let scale = s.length_scale();
        for (pi, poly) in s.polygons().iter().enumerate() {
            let k = poly.len();
            let mut pre = vec![vec![0i64; r]; k + 1];
            for i in 0..k {
                let mut c = pre[i].clone();
                add_into(&mut c, m.edge_class(Edge::new(pi, i)), 1);
                pre[i + 1] = c;
            }
            if pre[k].iter().any(|&x| x != 0) {
                return Err(FlatError::MalformedSurface(format!("edge classes of polygon {pi} do not close")));
            }
            let pts = &poly.vertices;
            let mut pending: HashMap<(usize, usize), usize> = HashMap::new();
            let mut emit = |tri: &mut FlatTri, idx: [usize; 3]| {
                let t = tri.vecs.len() / 3;
                for j in 0..3 {
                    let (u, v) = (idx[j], idx[(j + 1) % 3]);
                    let h = 3 * t + j;
                    tri.vecs.push(pts[v] - pts[u]);
                    tri.twin.push(usize::MAX);
                    tri.vert.push(s.vertex_of_corner(pi, u));
                    for c in 0..r {
                        tri.cls.push(pre[v][c] - pre[u][c]);
                    }
                    if v == (u + 1) % k {
                        poly_he[pi][u] = h;
                    } else if let Some(g) = pending.remove(&(v, u)) {
                        tri.twin[h] = g;
                        tri.twin[g] = h;
                    } else {
                        pending.insert((u, v), h);
                    }
                }
            };
            let mut rem: Vec<usize> = (0..k).collect();
            while rem.len() > 3 {
                let n = rem.len();
                let mut best: Option<(usize, f64)> = None;
                for j in 0..n {
                    let (a, b, c) = (rem[(j + n - 1) % n], rem[j], rem[(j + 1) % n]);
                    let (pa, pb, pc) = (pts[a], pts[b], pts[c]);
                    let area2 = (pb - pa).cross(pc - pa);
                    if area2 <= 1e-12 * scale * scale {
                        continue;
                    }
                    let tol = -1e-12 * scale * scale;
                    let blocked = rem.iter().any(|&q| {
                        q != a
                            && q != b
                            && q != c
                            && (pb - pa).cross(pts[q] - pa) >= tol
                            && (pc - pb).cross(pts[q] - pb) >= tol
                            && (pa - pc).cross(pts[q] - pc) >= tol
                    });
                    if blocked {
                        continue;
                    }
                    let l2 = (pb - pa).norm2().max((pc - pb).norm2()).max((pa - pc).norm2());
                    let quality = area2 / l2;
                    if best.is_none_or(|(_, q)| quality > q) {
                        best = Some((j, quality));
                    }
                }
                let Some((j, _)) = best else {
                    return Err(FlatError::MalformedSurface(format!("polygon {pi} has no ear")));
                };
                let n = rem.len();
                emit(&mut tri, [rem[(j + n - 1) % n], rem[j], rem[(j + 1) % n]]);
                rem.remove(j);
            }
            emit(&mut tri, [rem[0], rem[1], rem[2]]);
        }
        for e in s.edges() {
            let f = s.partner(e);
            let (a, b) = (poly_he[e.poly][e.edge], poly_he[f.poly][f.edge]);
            tri.twin[a] = b;
        }
        if tri.twin.iter().any(|&t| t == usize::MAX) {
            return Err(FlatError::MalformedSurface("unpaired half-edge after triangulation".into()));
        }
        Ok(tri)
    }

    pub fn from_surface(s: &TranslationSurface) -> Result<Self> {
        let (m, _) = MarkedSurface::own(s)?;
        Self::from_marked(&m)
    }

    pub fn num_tri(&self) -> usize {
        self.vecs.len() / 3
    }

    pub fn num_half_edges(&self) -> usize {
        self.vecs.len()
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    pub fn vec(&self, h: usize) -> Vec2 {
        self.vecs[h]
    }

    pub fn twin(&self, h: usize) -> usize {
        self.twin[h]
    }

    /// Vertex class at the start of `h`.
    pub fn vert(&self, h: usize) -> usize {
        self.vert[h]
    }

    pub fn class(&self, h: usize) -> &[i64] {
        &self.cls[h * self.rank..(h + 1) * self.rank]
    }

    /// Twice the area of triangle `t`.
    pub fn tri_area2(&self, t: usize) -> f64 {
        self.vecs[3 * t].cross(self.vecs[3 * t + 1])
    }

    pub fn area(&self) -> f64 {
        (0..self.num_tri()).map(|t| 0.5 * self.tri_area2(t)).sum()
    }

    pub fn length_scale(&self) -> f64 {
        self.vecs.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Position of vertex `i` of triangle `t` with vertex 0 at the origin.
    pub fn local_vertex(&self, t: usize, i: usize) -> Vec2 {
        (0..i).fold(Vec2::ZERO, |acc, j| acc + self.vecs[3 * t + j])
    }

    /// Class of the path from vertex 0 to vertex `i` inside triangle `t`.
    pub fn local_vertex_class(&self, t: usize, i: usize) -> Vec<i64> {
        let mut c = vec![0; self.rank];
        for j in 0..i {
            add_into(&mut c, self.class(3 * t + j), 1);
        }
        c
    }

    /// Smallest triangle area relative to the squared longest edge.
    pub fn min_shape(&self) -> f64 {
        let l2 = self.length_scale().powi(2);
        (0..self.num_tri()).map(|t| self.tri_area2(t) / l2).fold(f64::INFINITY, f64::min)
    }

    pub fn is_positively_oriented(&self) -> bool {
        self.min_shape() > 1e-14
    }

    /// `cot α + cot β` of the two angles opposite the edge of `h`.
    pub fn cot_sum(&self, h: usize) -> f64 {
        let g = self.twin[h];
        let (h1, h2) = (next(h), next(next(h)));
        let (g1, g2) = (next(g), next(next(g)));
        let (ca, cb) = (self.vecs[h2], -self.vecs[h1]);
        let (db, da) = (self.vecs[g2], -self.vecs[g1]);
        ca.dot(cb) / ca.cross(cb) + db.dot(da) / db.cross(da)
    }

    /// Replaces the diagonal `h` of its quadrilateral by the other diagonal.
    pub fn flip(&mut self, h: usize) {
        let g = self.twin[h];
        let (t, u) = (h / 3, g / 3);
        let (h1, h2) = (next(h), next(next(h)));
        let (g1, g2) = (next(g), next(next(g)));
        let r = self.rank;
        let moved = [g1, h2, g2, h1];
        let dest = [3 * t, 3 * t + 2, 3 * u, 3 * u + 1];
        let data: Vec<(Vec2, usize, usize, Vec<i64>)> =
            moved.iter().map(|&x| (self.vecs[x], self.vert[x], self.twin[x], self.class(x).to_vec())).collect();
        let map = |y: usize| moved.iter().position(|&m| m == y).map(|i| dest[i]).unwrap_or(y);
        let n_vec = self.vecs[g2] + self.vecs[h1];
        let mut n_cls = self.class(g2).to_vec();
        add_into(&mut n_cls, self.class(h1), 1);
        let (d_vert, c_vert) = (self.vert[g2], self.vert[h2]);
        for (i, (v, vt, tw, c)) in data.into_iter().enumerate() {
            let d = dest[i];
            self.vecs[d] = v;
            self.vert[d] = vt;
            self.cls[d * r..(d + 1) * r].copy_from_slice(&c);
            let nt = map(tw);
            self.twin[d] = nt;
            self.twin[nt] = d;
        }
        let (n, m) = (3 * t + 1, 3 * u + 2);
        self.vecs[n] = n_vec;
        self.vecs[m] = -n_vec;
        self.vert[n] = d_vert;
        self.vert[m] = c_vert;
        for c in 0..r {
            self.cls[n * r + c] = n_cls[c];
            self.cls[m * r + c] = -n_cls[c];
        }
        self.twin[n] = m;
        self.twin[m] = n;
    }

    /// Flips to a Delaunay triangulation. Returns the number of flips.
    pub fn make_delaunay(&mut self, max_flips: usize) -> Result<usize> {
        let mut stack: Vec<usize> = (0..self.vecs.len()).filter(|&h| h < self.twin[h]).collect();
        let mut flips = 0;
        while let Some(h) = stack.pop() {
            if self.cot_sum(h) < -1e-10 {
                let (t, u) = (h / 3, self.twin[h] / 3);
                self.flip(h);
                flips += 1;
                if flips > max_flips {
                    return Err(FlatError::NumericInstability(format!("Delaunay flips exceeded {max_flips}")));
                }
                stack.extend([3 * t, 3 * t + 2, 3 * u, 3 * u + 1]);
            }
        }
        Ok(flips)
    }

    pub fn is_delaunay(&self, tol: f64) -> bool {
        (0..self.vecs.len()).all(|h| self.cot_sum(h) >= -tol)
    }

    pub fn apply_matrix(&mut self, g: &Mat2) {
        for v in self.vecs.iter_mut() {
            *v = g.apply(*v);
        }
    }

    /// Replaces every edge vector by the value of `hol` on its class. Fails if a triangle
    /// degenerates or flips orientation; `self` is unchanged on failure.
    pub fn set_holonomy(&mut self, hol: &[Complex64]) -> Result<()> {
        let r = self.rank;
        let new: Vec<Vec2> = (0..self.vecs.len())
            .map(|h| {
                let z: Complex64 = self.cls[h * r..(h + 1) * r].iter().zip(hol).map(|(&k, z)| z * k as f64).sum();
                Vec2::new(z.re, z.im)
            })
            .collect();
        let old = std::mem::replace(&mut self.vecs, new);
        if !self.is_positively_oriented() {
            self.vecs = old;
            return Err(FlatError::ChartFailure("triangle orientation lost".into()));
        }
        Ok(())
    }

    pub fn reference_holonomy(&self) -> Result<Vec<Complex64>> {
        let cls: Vec<&[i64]> = (0..self.vecs.len()).map(|h| self.class(h)).collect();
        solve_holonomy(&cls, &self.vecs, self.rank, self.length_scale() * 1e-8)
    }

    /// Groups triangles across cocircular edges into Delaunay cells. Assumes `self` is Delaunay.
    pub fn cells(&self, tol: f64) -> Cells {
        let nt = self.num_tri();
        let mut uf: Vec<usize> = (0..nt).collect();
        fn find(uf: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while uf[r] != r {
                r = uf[r];
            }
            uf[x] = r;
            r
        }
        let mut merged = vec![false; self.vecs.len()];
        let mut any = false;
        for h in 0..self.vecs.len() {
            let g = self.twin[h];
            if h > g || self.cot_sum(h).abs() > tol {
                continue;
            }
            let (a, b) = (find(&mut uf, h / 3), find(&mut uf, g / 3));
            if a != b {
                uf[a] = b;
                merged[h] = true;
                merged[g] = true;
                any = true;
            }
        }
        let mut position = vec![None; self.vecs.len()];
        let mut sides = Vec::new();
        for h0 in 0..self.vecs.len() {
            if merged[h0] || position[h0].is_some() {
                continue;
            }
            let c = sides.len();
            let mut cyc = Vec::new();
            let mut h = h0;
            loop {
                position[h] = Some((c, cyc.len()));
                cyc.push(h);
                let mut n = next(h);
                while merged[n] {
                    n = next(self.twin[n]);
                }
                h = n;
                if h == h0 {
                    break;
                }
            }
            sides.push(cyc);
        }
        Cells { sides, position, merged_cocircular: any }
    }

    /// Polygon presentation from a set of cells (or from the triangles themselves).
    pub fn to_marked_surface(&self, cells: Option<&Cells>) -> Result<MarkedSurface> {
        let owned;
        let cells = match cells {
            Some(c) => c,
            None => {
                owned = Cells {
                    sides: (0..self.num_tri()).map(|t| vec![3 * t, 3 * t + 1, 3 * t + 2]).collect(),
                    position: (0..self.vecs.len()).map(|h| Some((h / 3, h % 3))).collect(),
                    merged_cocircular: false,
                };
                &owned
            }
        };
        let mut polys = Vec::new();
        let mut classes = Vec::new();
        let mut gl = Vec::new();
        for (ci, side) in cells.sides.iter().enumerate() {
            let mut p = Vec2::ZERO;
            let mut verts = Vec::new();
            let mut cl = Vec::new();
            for (i, &h) in side.iter().enumerate() {
                verts.push(p);
                p += self.vecs[h];
                cl.push(self.class(h).to_vec());
                let (cj, j) = cells.position[self.twin[h]].expect("twin of a side is a side");
                if (ci, i) < (cj, j) {
                    gl.push((Edge::new(ci, i), Edge::new(cj, j)));
                }
            }
            polys.push(Polygon::new(verts));
            classes.push(cl);
        }
        let scale = self.length_scale();
        let surface = TranslationSurface::with_eps(polys, &gl, 1e-9 * scale.max(1.0))?;
        Ok(MarkedSurface { surface, classes, rank: self.rank, fingerprint: self.fingerprint.clone() })
    }

    /// All saddle connections of length at most `max_len`, each reported from both ends.
    pub fn saddle_connections(&self, max_len: f64) -> Vec<SaddleConnection> {
        struct Wedge {
            g: usize,
            start: Vec2,
            start_cls: Vec<i64>,
            end: Vec2,
            end_cls: Vec<i64>,
            r: Vec2,
            l: Vec2,
        }
        let mut out = Vec::new();
        let mut stack = Vec::new();
        for h in 0..self.vecs.len() {
            let a = self.vert[h];
            let b = self.vecs[h];
            if b.norm() <= max_len {
                out.push(SaddleConnection { start: a, end: self.vert[next(h)], hol: b, class: self.class(h).to_vec() });
            }
            let p = prev(h);
            let c = -self.vecs[p];
            let mut c_cls = self.class(p).to_vec();
            c_cls.iter_mut().for_each(|x| *x = -*x);
            stack.push(Wedge {
                g: self.twin[next(h)],
                start: c,
                start_cls: c_cls,
                end: b,
                end_cls: self.class(h).to_vec(),
                r: b,
                l: c,
            });
            while let Some(w) = stack.pop() {
                if segment_distance(w.start, w.end) > max_len {
                    continue;
                }
                let gn = next(w.g);
                let gp = next(gn);
                let d = w.end + self.vecs[gn];
                let mut d_cls = w.end_cls.clone();
                add_into(&mut d_cls, self.class(gn), 1);
                let cr = w.r.cross(d) / (w.r.norm() * d.norm());
                let cl = d.cross(w.l) / (w.l.norm() * d.norm());
                const ANG: f64 = 1e-12;
                if cr > ANG && cl > ANG {
                    if d.norm() <= max_len {
                        out.push(SaddleConnection { start: a, end: self.vert[gp], hol: d, class: d_cls.clone() });
                    }
                    stack.push(Wedge {
                        g: self.twin[gn],
                        start: d,
                        start_cls: d_cls.clone(),
                        end: w.end,
                        end_cls: w.end_cls,
                        r: w.r,
                        l: d,
                    });
                    stack.push(Wedge {
                        g: self.twin[gp],
                        start: w.start,
                        start_cls: w.start_cls,
                        end: d,
                        end_cls: d_cls,
                        r: d,
                        l: w.l,
                    });
                } else if cl <= ANG {
                    stack.push(Wedge { g: self.twin[gn], start: d, start_cls: d_cls, end: w.end, end_cls: w.end_cls, ..w });
                } else {
                    stack.push(Wedge { g: self.twin[gp], start: w.start, start_cls: w.start_cls, end: d, end_cls: d_cls, ..w });
                }
            }
        }
        out
    }

    /// Saddle connections with holonomy in the upper half-plane (one per unoriented connection).
    pub fn unoriented_saddle_connections(&self, max_len: f64) -> Vec<SaddleConnection> {
        let mut v: Vec<SaddleConnection> = self
            .saddle_connections(max_len)
            .into_iter()
            .filter(|s| s.hol.y > 0.0 || (s.hol.y == 0.0 && s.hol.x > 0.0))
            .collect();
        v.sort_by(|a, b| a.hol.norm2().total_cmp(&b.hol.norm2()));
        v
    }

    /// Length of the shortest saddle connection.
    pub fn systole(&self) -> f64 {
        // every edge is a saddle connection; on a Delaunay triangulation the shortest edge is
        // the systole, in general it is an upper bound we refine
        let bound = self.vecs.iter().map(|v| v.norm()).fold(f64::INFINITY, f64::min);
        self.saddle_connections(bound).iter().map(|s| s.hol.norm()).fold(bound, f64::min)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::origami::Origami;
    use crate::surface::build_regular_2ngon;

    fn check_consistent(t: &FlatTri) {
        for h in 0..t.num_half_edges() {
            let g = t.twin(h);
            assert_eq!(t.twin(g), h);
            assert!((t.vec(h) + t.vec(g)).norm() < 1e-12);
            assert!(t.class(h).iter().zip(t.class(g)).all(|(a, b)| a + b == 0));
            assert_eq!(t.vert(next(h)), t.vert(g));
        }
        for tr in 0..t.num_tri() {
            let s = t.vec(3 * tr) + t.vec(3 * tr + 1) + t.vec(3 * tr + 2);
            assert!(s.norm() < 1e-12);
            assert!(t.tri_area2(tr) > 0.0);
        }
    }

    #[test]
    fn triangulate_and_flip() {
        let s = build_regular_2ngon(6).unwrap();
        let mut t = FlatTri::from_surface(&s).unwrap();
        assert_eq!(t.num_tri(), 10);
        check_consistent(&t);
        let hol = t.reference_holonomy().unwrap();
        t.apply_matrix(&Mat2::horocycle(3.7));
        t.make_delaunay(10_000).unwrap();
        check_consistent(&t);
        assert!(t.is_delaunay(1e-9));
        assert!((t.area() - s.area()).abs() < 1e-9);
        let h2 = t.reference_holonomy().unwrap();
        for (a, b) in hol.iter().zip(&h2) {
            assert!((a.re + 3.7 * a.im - b.re).abs() < 1e-9 && (a.im - b.im).abs() < 1e-9);
        }
    }

    #[test]
    fn cocircular_cells() {
        let s = Origami::l_shape().to_surface();
        let mut t = FlatTri::from_surface(&s).unwrap();
        t.make_delaunay(1000).unwrap();
        let c = t.cells(COCIRCULAR_TOL);
        assert_eq!(c.sides.len(), 3);
        assert!(c.sides.iter().all(|s| s.len() == 4));
        assert!(c.merged_cocircular);
        let dec = build_regular_2ngon(5).unwrap();
        let mut t = FlatTri::from_surface(&dec).unwrap();
        t.make_delaunay(1000).unwrap();
        let c = t.cells(COCIRCULAR_TOL);
        assert_eq!(c.sides.len(), 1);
        assert_eq!(c.sides[0].len(), 10);
    }

    #[test]
    fn torus_saddle_connection_count() {
        let s = Origami::torus().to_surface();
        let t = FlatTri::from_surface(&s).unwrap();
        let sc = t.unoriented_saddle_connections(10.0);
        // primitive vectors of Z^2 of length <= 10 in the upper half-plane
        let mut n = 0;
        for x in -10i64..=10 {
            for y in 0i64..=10 {
                if (y > 0 || x > 0) && x * x + y * y <= 100 && gcd(x.abs(), y) == 1 {
                    n += 1;
                }
            }
        }
        assert_eq!(sc.len(), n);
        for c in &sc {
            let hol = t.reference_holonomy().unwrap();
            let z: Complex64 = c.class.iter().zip(&hol).map(|(&k, z)| z * k as f64).sum();
            assert!((z.re - c.hol.x).abs() < 1e-9 && (z.im - c.hol.y).abs() < 1e-9);
        }
    }

    fn gcd(a: i64, b: i64) -> i64 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }

    #[test]
    fn cells_roundtrip_to_surface() {
        let s = build_regular_2ngon(7).unwrap();
        let mut t = FlatTri::from_surface(&s).unwrap();
        t.apply_matrix(&Mat2::geodesic(0.8));
        t.make_delaunay(10_000).unwrap();
        let cells = t.cells(COCIRCULAR_TOL);
        let m = t.to_marked_surface(Some(&cells)).unwrap();
        assert_eq!(m.surface.stratum().unwrap().zero_orders, vec![2, 2]);
        assert!((m.surface.area() - s.area()).abs() < 1e-9);
    }
}
