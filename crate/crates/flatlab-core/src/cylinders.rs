//! Horizontal cylinder decompositions by separatrix tracing, twist classes and balanced
//! projections.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{FlatError, Result};
use crate::flat::{next, prev, FlatTri};
use crate::geom::Vec2;
use crate::homology::Homology;
use crate::marked::MarkedSurface;
use crate::sl2::Mat2;
use crate::surface::{Edge, Polygon, TranslationSurface, EPS_GEOM};

/// Separatrices longer than this multiple of the longest edge count as non-closing.
pub const L_MAX_FACTOR: f64 = 1e3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Horizontal,
    Vertical,
}

impl Direction {
    /// Rotation taking this direction to the horizontal.
    pub fn normalizer(self) -> Mat2 {
        match self {
            Direction::Horizontal => Mat2::IDENTITY,
            Direction::Vertical => Mat2::new(0.0, 1.0, -1.0, 0.0),
        }
    }
}

/// A horizontal saddle connection, oriented eastward.
#[derive(Clone, Debug, Serialize)]
pub struct HorizontalSaddle {
    pub start_vertex: usize,
    pub end_vertex: usize,
    pub length: f64,
    pub class: Vec<i64>,
    #[serde(skip)]
    end_corner: usize,
}

/// A stretch of a saddle connection inside one triangle, in that triangle's local frame.
#[derive(Clone, Debug)]
struct Piece {
    tri: usize,
    y: f64,
    x0: f64,
    x1: f64,
    sc: usize,
    /// Parameter along the saddle connection at local `x = 0`.
    offset: f64,
    /// Class of the path from the saddle connection's start to local vertex 0.
    cls0: Vec<i64>,
    above: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Cylinder {
    pub height: f64,
    pub circumference: f64,
    pub modulus: f64,
    pub area: f64,
    /// Saddle connections on the bottom and top boundaries, west to east.
    pub bottom: Vec<usize>,
    pub top: Vec<usize>,
    pub core_class: Vec<i64>,
    /// From the start of `bottom[0]` to the start of `top[0]` across the cylinder.
    pub transversal: Vec2,
    pub transversal_class: Vec<i64>,
    /// `β_C` on the reference basis.
    pub twist_class: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TwistLattice {
    /// `h/w` per cylinder.
    pub moduli: Vec<f64>,
    /// Shear amount returning each cylinder to itself, `w/h`.
    pub periods: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CylinderDecomposition {
    pub direction: Direction,
    pub fingerprint: String,
    pub rank: usize,
    pub cylinders: Vec<Cylinder>,
    pub saddle_connections: Vec<HorizontalSaddle>,
    /// Orthonormal basis of `{c : Σ c_C area_C = 0}` in cylinder coordinates.
    pub twist0_coeffs: Vec<Vec<f64>>,
    /// The same basis as classes on the reference basis.
    pub twist0: Vec<Vec<f64>>,
    /// Cylinder `i` is polygon `i`: bottom, right side, reversed top, left side.
    #[serde(skip)]
    pub presentation: MarkedSurface,
}

fn add_into(acc: &mut [i64], a: &[i64], sign: i64) {
    for (x, &y) in acc.iter_mut().zip(a) {
        *x += sign * y;
    }
}

fn sub(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

struct Tracer<'a> {
    tri: &'a FlatTri,
    eps: f64,
    l_max: f64,
}

impl Tracer<'_> {
    fn is_east(&self, d: Vec2) -> bool {
        d.y.abs() <= self.eps && d.x > 0.0
    }

    /// 0: no, 1: along the outgoing edge, 2: strictly inside.
    fn contains(&self, c: usize, west: bool) -> u8 {
        let t = self.tri;
        let out = t.vec(c);
        let inn = -t.vec(prev(c));
        let (out, inn) = if west { (-out, -inn) } else { (out, inn) };
        if self.is_east(out) {
            1
        } else if self.is_east(inn) {
            0
        } else if out.y < 0.0 && inn.y > 0.0 {
            2
        } else {
            0
        }
    }

    fn trace(&self, c: usize, sc: usize, pieces: &mut Vec<Piece>) -> Result<HorizontalSaddle> {
        let t = self.tri;
        let tc = c / 3;
        let kc = c % 3;
        let loc = t.local_vertex(tc, kc);
        let loc_cls = t.local_vertex_class(tc, kc);
        let neg = |v: &[i64]| v.iter().map(|x| -x).collect::<Vec<i64>>();
        if self.contains(c, false) == 1 {
            let v = t.vec(c);
            pieces.push(Piece {
                tri: tc,
                y: loc.y,
                x0: loc.x,
                x1: loc.x + v.x,
                sc,
                offset: -loc.x,
                cls0: neg(&loc_cls),
                above: true,
            });
            let tw = t.twin(c);
            let (tt, kt) = (tw / 3, (tw % 3 + 1) % 3);
            let la = t.local_vertex(tt, kt);
            pieces.push(Piece {
                tri: tt,
                y: la.y,
                x0: la.x,
                x1: la.x + v.x,
                sc,
                offset: -la.x,
                cls0: neg(&t.local_vertex_class(tt, kt)),
                above: false,
            });
            return Ok(HorizontalSaddle {
                start_vertex: t.vert(c),
                end_vertex: t.vert(next(c)),
                length: v.x,
                class: t.class(c).to_vec(),
                end_corner: tw,
            });
        }
        // strictly inside: cross the opposite edge of the corner's triangle
        let b = t.vec(c);
        let b_cls = t.class(c).to_vec();
        let cpos = -t.vec(prev(c));
        let c_cls = neg(t.class(prev(c)));
        let cross_y = |p: Vec2, q: Vec2| {
            let lam = p.y / (p.y - q.y);
            p.x + lam * (q.x - p.x)
        };
        let mut x_in = 0.0;
        let mut x_out = cross_y(cpos, b);
        pieces.push(Piece {
            tri: tc,
            y: -(-loc).y,
            x0: x_in + loc.x,
            x1: x_out + loc.x,
            sc,
            offset: -loc.x,
            cls0: neg(&loc_cls),
            above: true,
        });
        let mut g = t.twin(next(c));
        let (mut p, mut p_cls, mut q, mut q_cls) = (cpos, c_cls, b, b_cls);
        loop {
            x_in = x_out;
            if x_in > self.l_max {
                return Err(FlatError::NotHorizontallyPeriodic { vertex: t.vert(c), bound: self.l_max });
            }
            let u = g / 3;
            let k = g % 3;
            let v0 = p - t.local_vertex(u, k);
            let v0_cls = sub(&p_cls, &t.local_vertex_class(u, k));
            let gn = next(g);
            let d = q + t.vec(gn);
            let mut d_cls = q_cls.clone();
            add_into(&mut d_cls, t.class(gn), 1);
            if d.y.abs() <= self.eps {
                pieces.push(Piece {
                    tri: u,
                    y: -v0.y,
                    x0: x_in - v0.x,
                    x1: d.x - v0.x,
                    sc,
                    offset: v0.x,
                    cls0: v0_cls,
                    above: true,
                });
                return Ok(HorizontalSaddle {
                    start_vertex: t.vert(c),
                    end_vertex: t.vert(prev(g)),
                    length: d.x,
                    class: d_cls,
                        end_corner: prev(g),
                });
            }
            if d.y.abs() <= 1e3 * self.eps {
                return Err(FlatError::DegenerateDirection(format!(
                    "separatrix passes {:.2e} from a zero",
                    d.y.abs()
                )));
            }
            if d.y > 0.0 {
                x_out = cross_y(d, q);
                pieces.push(Piece {
                    tri: u,
                    y: -v0.y,
                    x0: x_in - v0.x,
                    x1: x_out - v0.x,
                    sc,
                    offset: v0.x,
                    cls0: v0_cls,
                    above: true,
                });
                g = t.twin(gn);
                p = d;
                p_cls = d_cls;
            } else {
                x_out = cross_y(p, d);
                pieces.push(Piece {
                    tri: u,
                    y: -v0.y,
                    x0: x_in - v0.x,
                    x1: x_out - v0.x,
                    sc,
                    offset: v0.x,
                    cls0: v0_cls,
                    above: true,
                });
                g = t.twin(next(gn));
                q = d;
                q_cls = d_cls;
            }
        }
    }

    /// Walks north from parameter `a` on saddle connection `sc` to the first saddle connection
    /// above. Returns (height, hit saddle, parameter on it, class from start of `sc` to start of
    /// the hit saddle), or `None` if the walk passes too close to a vertex.
    fn vertical(&self, pieces: &[Piece], by_tri: &[Vec<usize>], sc: usize, a: f64) -> Option<(f64, usize, f64, Vec<i64>)> {
        let t = self.tri;
        let start = pieces.iter().position(|pc| {
            pc.sc == sc && pc.above && a >= pc.x0 + pc.offset && a <= pc.x1 + pc.offset
        })?;
        let pc = &pieces[start];
        let mut cur = pc.tri;
        let mut pt = Vec2::new(a - pc.offset, pc.y);
        let mut cls_v0 = pc.cls0.clone();
        let mut height = 0.0;
        let tiny = self.eps;
        for _ in 0..100_000 {
            let mut best: Option<(f64, usize)> = None;
            for &pi in &by_tri[cur] {
                let q = &pieces[pi];
                if q.y > pt.y + tiny && pt.x >= q.x0 - tiny && pt.x <= q.x1 + tiny && best.is_none_or(|(y, _)| q.y < y) {
                    best = Some((q.y, pi));
                }
            }
            if let Some((y, pi)) = best {
                let q = &pieces[pi];
                let b = pt.x + q.offset;
                if b < tiny || b > t.vec(0).norm().max(1.0) * 1e9 {
                    return None;
                }
                return Some((height + y - pt.y, q.sc, b, sub(&cls_v0, &q.cls0)));
            }
            let mut exit: Option<(f64, usize, f64)> = None;
            for j in 0..3 {
                let pa = t.local_vertex(cur, j);
                let pb = t.local_vertex(cur, j + 1);
                let dx = pb.x - pa.x;
                if dx.abs() < tiny {
                    continue;
                }
                let lam = (pt.x - pa.x) / dx;
                if !(-1e-12..=1.0 + 1e-12).contains(&lam) {
                    continue;
                }
                let y = pa.y + lam * (pb.y - pa.y);
                if exit.is_none_or(|(ey, _, _)| y > ey) {
                    exit = Some((y, j, lam));
                }
            }
            let (y, j, lam) = exit?;
            let edge_len = t.vec(3 * cur + j).norm();
            if lam * edge_len < 1e3 * tiny || (1.0 - lam) * edge_len < 1e3 * tiny {
                return None;
            }
            height += y - pt.y;
            let h = 3 * cur + j;
            let tw = t.twin(h);
            let (nt, kj) = (tw / 3, tw % 3);
            let mut nc = cls_v0.clone();
            add_into(&mut nc, &t.local_vertex_class(cur, j), 1);
            let nc = sub(&nc, &t.local_vertex_class(nt, kj + 1));
            pt = t.local_vertex(nt, kj) + t.vec(tw) * (1.0 - lam);
            cur = nt;
            cls_v0 = nc;
        }
        None
    }
}

/// Horizontal (or vertical, after rotating it to horizontal) cylinder decomposition.
pub fn decompose(m: &MarkedSurface, dir: Direction) -> Result<CylinderDecomposition> {
    let rot = dir.normalizer();
    let m = if dir == Direction::Horizontal { m.clone() } else { m.map_points(|p| rot.apply(p))? };
    let tri = FlatTri::from_marked(&m)?;
    decompose_tri(&tri, dir)
}

pub fn horizontal_decomposition(s: &TranslationSurface) -> Result<CylinderDecomposition> {
    let (m, _) = MarkedSurface::own(s)?;
    decompose(&m, Direction::Horizontal)
}

pub fn decompose_tri(tri: &FlatTri, dir: Direction) -> Result<CylinderDecomposition> {
    let scale = tri.length_scale();
    let tr = Tracer { tri, eps: EPS_GEOM * scale.max(1.0), l_max: L_MAX_FACTOR * scale };
    let nh = tri.num_half_edges();
    let mut scs = Vec::new();
    let mut pieces = Vec::new();
    let mut sc_of_corner = vec![usize::MAX; nh];
    for c in 0..nh {
        if tr.contains(c, false) != 0 {
            let id = scs.len();
            sc_of_corner[c] = id;
            scs.push(tr.trace(c, id, &mut pieces)?);
        }
    }
    if scs.is_empty() {
        return Err(FlatError::MalformedSurface("no horizontal separatrices".into()));
    }
    let n = scs.len();
    let mut bottom_next = vec![usize::MAX; n];
    let mut top_next = vec![usize::MAX; n];
    for (i, s) in scs.iter().enumerate() {
        for (cw, out) in [(true, &mut bottom_next), (false, &mut top_next)] {
            let mut c = s.end_corner;
            for _ in 0..nh {
                c = if cw { next(tri.twin(c)) } else { tri.twin(prev(c)) };
                if sc_of_corner[c] != usize::MAX {
                    out[i] = sc_of_corner[c];
                    break;
                }
            }
            if out[i] == usize::MAX {
                return Err(FlatError::MalformedSurface("corner cycle without eastward separatrix".into()));
            }
        }
    }
    let cycles_of = |nx: &[usize]| {
        let mut seen = vec![false; n];
        let mut cyc = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            let mut c = vec![];
            let mut x = s;
            while !seen[x] {
                seen[x] = true;
                c.push(x);
                x = nx[x];
            }
            cyc.push(c);
        }
        cyc
    };
    let bottoms = cycles_of(&bottom_next);
    let tops = cycles_of(&top_next);
    if bottoms.len() != tops.len() {
        return Err(FlatError::MalformedSurface("top and bottom boundary counts differ".into()));
    }
    let mut top_cycle_of = vec![0; n];
    let mut top_pos = vec![0; n];
    for (ci, c) in tops.iter().enumerate() {
        for (j, &s) in c.iter().enumerate() {
            top_cycle_of[s] = ci;
            top_pos[s] = j;
        }
    }
    let mut by_tri = vec![Vec::new(); tri.num_tri()];
    for (i, p) in pieces.iter().enumerate() {
        by_tri[p.tri].push(i);
    }

    let r = tri.rank();
    let mut cyls = Vec::new();
    let mut used_tops = vec![false; tops.len()];
    for b in &bottoms {
        let sigma = b[0];
        let w: f64 = b.iter().map(|&s| scs[s].length).sum();
        let len = scs[sigma].length;
        let mut hit = None;
        for frac in [0.381966011250105, 0.5, 0.276393202250021, 0.723606797749979, 0.1, 0.9, 0.618033988749895] {
            if let Some(h) = tr.vertical(&pieces, &by_tri, sigma, frac * len) {
                hit = Some((frac * len, h));
                break;
            }
        }
        let Some((a, (height, tau, bpar, mut tcls))) = hit else {
            return Err(FlatError::DegenerateDirection("vertical transversal passes through zeros".into()));
        };
        let tc = top_cycle_of[tau];
        if used_tops[tc] {
            return Err(FlatError::MalformedSurface("top boundary reached from two cylinders".into()));
        }
        used_tops[tc] = true;
        let top = &tops[tc];
        let k = top.len();
        let mut j = top_pos[tau];
        let mut x_off = a - bpar;
        while x_off < -tr.eps {
            x_off += scs[top[j]].length;
            add_into(&mut tcls, &scs[top[j]].class, 1);
            j = (j + 1) % k;
        }
        while x_off >= w - tr.eps {
            j = (j + k - 1) % k;
            x_off -= scs[top[j]].length;
            add_into(&mut tcls, &scs[top[j]].class, -1);
        }
        let top_order: Vec<usize> = (0..k).map(|i| top[(j + i) % k]).collect();
        let wt: f64 = top_order.iter().map(|&s| scs[s].length).sum();
        if (wt - w).abs() > 1e-7 * w.max(1.0) {
            return Err(FlatError::MalformedSurface(format!("cylinder widths differ: bottom {w}, top {wt}")));
        }
        let mut core = vec![0; r];
        for &s in b {
            add_into(&mut core, &scs[s].class, 1);
        }
        cyls.push(Cylinder {
            height,
            circumference: w,
            modulus: height / w,
            area: height * w,
            bottom: b.clone(),
            top: top_order,
            core_class: core,
            transversal: Vec2::new(x_off, height),
            transversal_class: tcls,
            twist_class: Vec::new(),
        });
    }
    let total: f64 = cyls.iter().map(|c| c.area).sum();
    if (total - tri.area()).abs() > 1e-7 * tri.area() {
        return Err(FlatError::MalformedSurface(format!(
            "cylinder areas sum to {total}, surface area {}",
            tri.area()
        )));
    }
    solve_twist_classes(&mut cyls, &scs, r, scale)?;
    let presentation = build_presentation(&cyls, &scs, r, tri.fingerprint(), scale)?;
    let (twist0_coeffs, twist0) = twist0_basis(&cyls);
    Ok(CylinderDecomposition {
        direction: dir,
        fingerprint: tri.fingerprint().to_string(),
        rank: r,
        cylinders: cyls,
        saddle_connections: scs,
        twist0_coeffs,
        twist0,
        presentation,
    })
}

fn solve_twist_classes(cyls: &mut [Cylinder], scs: &[HorizontalSaddle], r: usize, scale: f64) -> Result<()> {
    let nc = cyls.len();
    let rows: Vec<Vec<i64>> = scs
        .iter()
        .map(|s| s.class.clone())
        .chain(cyls.iter().map(|c| c.transversal_class.clone()))
        .collect();
    let a = DMatrix::from_fn(rows.len(), r, |i, j| rows[i][j] as f64);
    let svd = a.clone().svd(true, true);
    if svd.rank(svd.singular_values.max() * 1e-10) < r {
        return Err(FlatError::MalformedSurface("cylinder edges do not span relative homology".into()));
    }
    for ci in 0..nc {
        let mut rhs = DVector::zeros(rows.len());
        rhs[scs.len() + ci] = cyls[ci].height;
        let x = svd.solve(&rhs, 1e-12).map_err(|e| FlatError::NumericInstability(e.to_string()))?;
        let res = (&a * &x - &rhs).amax();
        if res > 1e-8 * scale.max(1.0) {
            return Err(FlatError::NumericInstability(format!("twist class residual {res:.3e}")));
        }
        cyls[ci].twist_class = x.iter().copied().collect();
    }
    Ok(())
}

fn build_presentation(
    cyls: &[Cylinder],
    scs: &[HorizontalSaddle],
    r: usize,
    fingerprint: &str,
    scale: f64,
) -> Result<MarkedSurface> {
    let mut polys = Vec::new();
    let mut classes = Vec::new();
    let mut bottom_edge = vec![Edge::new(0, 0); scs.len()];
    let mut top_edge = vec![Edge::new(0, 0); scs.len()];
    let mut gl = Vec::new();
    for (ci, c) in cyls.iter().enumerate() {
        let mut verts = Vec::new();
        let mut cl = Vec::new();
        let mut p = Vec2::ZERO;
        for &s in &c.bottom {
            bottom_edge[s] = Edge::new(ci, verts.len());
            verts.push(p);
            cl.push(scs[s].class.clone());
            p.x += scs[s].length;
        }
        let right = verts.len();
        verts.push(p);
        cl.push(c.transversal_class.clone());
        let mut tops = Vec::new();
        let mut q = c.transversal;
        for &s in &c.top {
            tops.push((s, q));
            q.x += scs[s].length;
        }
        for &(s, start) in tops.iter().rev() {
            top_edge[s] = Edge::new(ci, verts.len());
            verts.push(start + Vec2::new(scs[s].length, 0.0));
            cl.push(scs[s].class.iter().map(|x| -x).collect());
        }
        let left = verts.len();
        verts.push(c.transversal);
        cl.push(c.transversal_class.iter().map(|x| -x).collect());
        gl.push((Edge::new(ci, right), Edge::new(ci, left)));
        polys.push(Polygon::new(verts));
        classes.push(cl);
    }
    for s in 0..scs.len() {
        gl.push((bottom_edge[s], top_edge[s]));
    }
    let surface = TranslationSurface::with_eps(polys, &gl, EPS_GEOM * scale.max(1.0))?;
    Ok(MarkedSurface { surface, classes, rank: r, fingerprint: fingerprint.to_string() })
}

fn twist0_basis(cyls: &[Cylinder]) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let n = cyls.len();
    let a: Vec<f64> = cyls.iter().map(|c| c.area).collect();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut kept: Vec<Vec<f64>> = vec![a.iter().map(|x| x / na).collect()];
    for i in 0..n {
        if kept.len() == n {
            break;
        }
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        for k in &kept {
            let d: f64 = v.iter().zip(k).map(|(x, y)| x * y).sum();
            for (x, y) in v.iter_mut().zip(k) {
                *x -= d * y;
            }
        }
        let nv = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if nv > 1e-9 {
            kept.push(v.iter().map(|x| x / nv).collect());
        }
    }
    let coeffs: Vec<Vec<f64>> = kept.into_iter().skip(1).collect();
    let classes = coeffs.iter().map(|c| combine(cyls, c)).collect();
    (coeffs, classes)
}

fn combine(cyls: &[Cylinder], coeffs: &[f64]) -> Vec<f64> {
    let r = cyls[0].twist_class.len();
    let mut out = vec![0.0; r];
    for (c, &k) in cyls.iter().zip(coeffs) {
        for (o, x) in out.iter_mut().zip(&c.twist_class) {
            *o += k * x;
        }
    }
    out
}

impl CylinderDecomposition {
    pub fn len(&self) -> usize {
        self.cylinders.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cylinders.is_empty()
    }

    pub fn heights(&self) -> Vec<f64> {
        self.cylinders.iter().map(|c| c.height).collect()
    }

    pub fn circumferences(&self) -> Vec<f64> {
        self.cylinders.iter().map(|c| c.circumference).collect()
    }

    pub fn moduli(&self) -> Vec<f64> {
        self.cylinders.iter().map(|c| c.modulus).collect()
    }

    pub fn areas(&self) -> Vec<f64> {
        self.cylinders.iter().map(|c| c.area).collect()
    }

    /// `Σ c_C β_C` on the reference basis.
    pub fn twist_combination(&self, coeffs: &[f64]) -> Vec<f64> {
        combine(&self.cylinders, coeffs)
    }

    /// Writes `β` as `Σ c_C β_C`; fails when `β` is not in `Twist(ω)`.
    pub fn twist_coefficients(&self, beta: &[f64]) -> Result<Vec<f64>> {
        if beta.len() != self.rank {
            return Err(FlatError::InvalidArgument(format!(
                "class has {} entries, basis rank {}",
                beta.len(),
                self.rank
            )));
        }
        let n = self.cylinders.len();
        let a = DMatrix::from_fn(self.rank, n, |i, j| self.cylinders[j].twist_class[i]);
        let b = DVector::from_column_slice(beta);
        let svd = a.clone().svd(true, true);
        let c = svd.solve(&b, 1e-12).map_err(|e| FlatError::NumericInstability(e.to_string()))?;
        let scale = b.amax().max(1.0);
        let res = (&a * &c - &b).amax();
        if res > 1e-8 * scale {
            return Err(FlatError::InvalidArgument(format!("class is not a twist class (residual {res:.3e})")));
        }
        Ok(c.iter().copied().collect())
    }

    pub fn twist_torus_lattice(&self) -> TwistLattice {
        TwistLattice {
            moduli: self.moduli(),
            periods: self.cylinders.iter().map(|c| c.circumference / c.height).collect(),
        }
    }
}

pub fn twist_torus_lattice(d: &CylinderDecomposition) -> TwistLattice {
    d.twist_torus_lattice()
}

/// Component of `a` symplectically orthogonal to `span{hol^x, hol^y}`.
pub fn balanced_projection(h: &Homology, hol: &[Complex64], a: &[f64]) -> Result<Vec<f64>> {
    let x: Vec<f64> = hol.iter().map(|z| z.re).collect();
    let y: Vec<f64> = hol.iter().map(|z| z.im).collect();
    let area = h.pairing(&x, &y);
    if area.abs() < 1e-12 {
        return Err(FlatError::MalformedSurface("degenerate tautological pairing".into()));
    }
    let cy = h.pairing(&x, a) / area;
    let cx = -h.pairing(&y, a) / area;
    Ok(a.iter().zip(x.iter().zip(&y)).map(|(ai, (xi, yi))| ai - cx * xi - cy * yi).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::origami::Origami;
    use crate::surface::build_regular_2ngon;

    #[test]
    fn torus_one_cylinder() {
        let d = horizontal_decomposition(&Origami::torus().to_surface()).unwrap();
        assert_eq!(d.len(), 1);
        let c = &d.cylinders[0];
        assert!((c.height - 1.0).abs() < 1e-12 && (c.circumference - 1.0).abs() < 1e-12);
        assert!(d.twist0.is_empty());
    }

    #[test]
    fn l_shape_cylinders() {
        let d = horizontal_decomposition(&Origami::l_shape().to_surface()).unwrap();
        let mut w = d.circumferences();
        w.sort_by(f64::total_cmp);
        assert_eq!(w, vec![1.0, 2.0]);
        assert!(d.heights().iter().all(|&h| (h - 1.0).abs() < 1e-12));
        let lat = d.twist_torus_lattice();
        let mut m = lat.moduli.clone();
        m.sort_by(f64::total_cmp);
        assert!((m[0] - 0.5).abs() < 1e-12 && (m[1] - 1.0).abs() < 1e-12);
        assert_eq!(d.twist0.len(), 1);
    }

    #[test]
    fn decagon_two_cylinders() {
        let s = build_regular_2ngon(5).unwrap();
        let d = horizontal_decomposition(&s).unwrap();
        assert_eq!(d.len(), 2);
        let mut w = d.circumferences();
        w.sort_by(f64::total_cmp);
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((w[1] / w[0] - phi).abs() < 1e-9);
        assert!((d.areas().iter().sum::<f64>() - s.area()).abs() < 1e-9);
        assert!((d.presentation.surface.area() - s.area()).abs() < 1e-9);
    }

    #[test]
    fn twist_classes_pair_to_areas() {
        for n in 4..=9 {
            let s = build_regular_2ngon(n).unwrap();
            let (m, h) = MarkedSurface::own(&s).unwrap();
            let d = decompose(&m, Direction::Horizontal).unwrap();
            let hol = h.holonomy(&s);
            let x = hol.real();
            let y = hol.imag();
            let mut sum = vec![0.0; h.rank()];
            for c in &d.cylinders {
                assert!((h.pairing(&x, &c.twist_class) - c.area).abs() < 1e-9);
                let core: Vec<f64> = c.core_class.iter().map(|&k| k as f64).collect();
                let v: f64 = core.iter().zip(&c.twist_class).map(|(a, b)| a * b).sum();
                assert!(v.abs() < 1e-9);
                for (a, b) in sum.iter_mut().zip(&c.twist_class) {
                    *a += b;
                }
            }
            for (a, b) in sum.iter().zip(&y) {
                assert!((a - b).abs() < 1e-9);
            }
            for b in &d.twist0 {
                assert!(h.pairing(&x, b).abs() < 1e-9);
                let p = balanced_projection(&h, &hol.values, b).unwrap();
                assert!(p.iter().zip(b).all(|(u, v)| (u - v).abs() < 1e-9));
            }
        }
    }

    #[test]
    fn vertical_direction_of_l() {
        let (m, _) = MarkedSurface::own(&Origami::l_shape().to_surface()).unwrap();
        let d = decompose(&m, Direction::Vertical).unwrap();
        let mut w = d.circumferences();
        w.sort_by(f64::total_cmp);
        assert_eq!(w, vec![1.0, 2.0]);
    }
}
