//! Translation surfaces as Euclidean polygons glued along parallel edges.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{FlatError, Result};
use crate::geom::{ccw_angle, signed_area2, Vec2};

/// Default tolerance for geometric predicates, relative to the longest edge.
pub const EPS_GEOM: f64 = 1e-9;

/// Cone angles are accepted when within this distance of a multiple of 2π.
const ANGLE_TOL: f64 = 1e-7;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Polygon {
    /// Counterclockwise; edge `i` runs from `vertices[i]` to `vertices[i + 1]`.
    pub vertices: Vec<Vec2>,
    #[serde(default)]
    pub label: String,
}

impl Polygon {
    pub fn new(vertices: Vec<Vec2>) -> Self {
        Polygon { vertices, label: String::new() }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn edge(&self, i: usize) -> Vec2 {
        let k = self.vertices.len();
        self.vertices[(i + 1) % k] - self.vertices[i]
    }

    pub fn area(&self) -> f64 {
        0.5 * signed_area2(&self.vertices)
    }

    /// Interior angle at vertex `i`.
    pub fn angle(&self, i: usize) -> f64 {
        let k = self.vertices.len();
        ccw_angle(self.edge(i), -self.edge((i + k - 1) % k))
    }
}

/// An edge `edge` of polygon `poly`. Serializes as `[poly, edge]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[usize; 2]", into = "[usize; 2]")]
pub struct Edge {
    pub poly: usize,
    pub edge: usize,
}

impl Edge {
    pub const fn new(poly: usize, edge: usize) -> Self {
        Edge { poly, edge }
    }
}

impl From<[usize; 2]> for Edge {
    fn from(a: [usize; 2]) -> Self {
        Edge::new(a[0], a[1])
    }
}

impl From<Edge> for [usize; 2] {
    fn from(e: Edge) -> Self {
        [e.poly, e.edge]
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.poly, self.edge)
    }
}

/// One violated invariant found by [`validate_parts`].
#[derive(Clone, Debug, PartialEq)]
pub enum Diagnostic {
    TooFewVertices { poly: usize },
    NotCounterclockwise { poly: usize },
    SelfIntersecting { poly: usize, edges: (usize, usize) },
    EdgeOutOfRange { edge: Edge },
    NotInvolution { edge: Edge, detail: String },
    EdgeLengthMismatch { a: Edge, b: Edge, len_a: f64, len_b: f64 },
    NotOppositeTranslates { a: Edge, b: Edge },
    ConeAngle { vertex: usize, angle: f64 },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::TooFewVertices { poly } => write!(f, "polygon {poly} has fewer than 3 vertices"),
            Diagnostic::NotCounterclockwise { poly } => {
                write!(f, "polygon {poly} is not counterclockwise")
            }
            Diagnostic::SelfIntersecting { poly, edges } => write!(
                f,
                "polygon {poly} is self-intersecting (edges {} and {})",
                edges.0, edges.1
            ),
            Diagnostic::EdgeOutOfRange { edge } => write!(f, "gluing refers to missing edge {edge}"),
            Diagnostic::NotInvolution { edge, detail } => {
                write!(f, "gluing not involution at edge {edge}: {detail}")
            }
            Diagnostic::EdgeLengthMismatch { a, b, len_a, len_b } => {
                write!(f, "edge length mismatch: {a} has length {len_a}, {b} has length {len_b}")
            }
            Diagnostic::NotOppositeTranslates { a, b } => {
                write!(f, "edges {a} and {b} are not parallel with opposite orientation")
            }
            Diagnostic::ConeAngle { vertex, angle } => write!(
                f,
                "cone angle at vertex class {vertex} is {angle}, not a multiple of 2π"
            ),
        }
    }
}

fn segments_cross(p1: Vec2, p2: Vec2, q1: Vec2, q2: Vec2, tol: f64) -> bool {
    let d1 = (p2 - p1).cross(q1 - p1);
    let d2 = (p2 - p1).cross(q2 - p1);
    let d3 = (q2 - q1).cross(p1 - q1);
    let d4 = (q2 - q1).cross(p2 - q1);
    let strict = ((d1 > tol && d2 < -tol) || (d1 < -tol && d2 > tol))
        && ((d3 > tol && d4 < -tol) || (d3 < -tol && d4 > tol));
    if strict {
        return true;
    }
    // touching: an endpoint lying on the other segment
    let on = |a: Vec2, b: Vec2, p: Vec2, d: f64| {
        d.abs() <= tol && (p - a).dot(p - b) <= tol * (b - a).norm()
    };
    on(p1, p2, q1, d1) || on(p1, p2, q2, d2) || on(q1, q2, p1, d3) || on(q1, q2, p2, d4)
}

fn length_scale(polygons: &[Polygon]) -> f64 {
    polygons
        .iter()
        .flat_map(|p| (0..p.len()).map(move |i| p.edge(i).norm()))
        .fold(1.0f64, f64::max)
}

/// Checks raw polygon and gluing data; an empty result means the data define a surface.
pub fn validate_parts(polygons: &[Polygon], gluings: &[(Edge, Edge)], eps: f64) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let scale = length_scale(polygons);
    let tol = eps * scale;
    for (pi, p) in polygons.iter().enumerate() {
        let k = p.len();
        if k < 3 {
            out.push(Diagnostic::TooFewVertices { poly: pi });
            continue;
        }
        if p.area() <= tol * scale {
            out.push(Diagnostic::NotCounterclockwise { poly: pi });
        }
        'outer: for i in 0..k {
            for j in i + 1..k {
                if j == i + 1 || (i == 0 && j == k - 1) {
                    continue;
                }
                let (a1, a2) = (p.vertices[i], p.vertices[(i + 1) % k]);
                let (b1, b2) = (p.vertices[j], p.vertices[(j + 1) % k]);
                if segments_cross(a1, a2, b1, b2, tol * scale) {
                    out.push(Diagnostic::SelfIntersecting { poly: pi, edges: (i, j) });
                    break 'outer;
                }
            }
        }
    }
    let exists = |e: Edge| e.poly < polygons.len() && e.edge < polygons[e.poly].len();
    let mut partner: BTreeMap<Edge, Edge> = BTreeMap::new();
    for &(a, b) in gluings {
        let mut ok = true;
        for e in [a, b] {
            if !exists(e) {
                out.push(Diagnostic::EdgeOutOfRange { edge: e });
                ok = false;
            }
        }
        if !ok {
            continue;
        }
        if a == b {
            out.push(Diagnostic::NotInvolution { edge: a, detail: "glued to itself".into() });
            continue;
        }
        for (x, y) in [(a, b), (b, a)] {
            if let Some(prev) = partner.get(&x) {
                if *prev != y {
                    out.push(Diagnostic::NotInvolution {
                        edge: x,
                        detail: format!("glued to both {prev} and {y}"),
                    });
                }
            } else {
                partner.insert(x, y);
            }
        }
    }
    for (pi, p) in polygons.iter().enumerate() {
        for i in 0..p.len() {
            let e = Edge::new(pi, i);
            if !partner.contains_key(&e) {
                out.push(Diagnostic::NotInvolution { edge: e, detail: "edge has no partner".into() });
            }
        }
    }
    for (&a, &b) in &partner {
        if a > b || !exists(a) || !exists(b) {
            continue;
        }
        let va = polygons[a.poly].edge(a.edge);
        let vb = polygons[b.poly].edge(b.edge);
        let (la, lb) = (va.norm(), vb.norm());
        if (la - lb).abs() > tol {
            out.push(Diagnostic::EdgeLengthMismatch { a, b, len_a: la, len_b: lb });
        } else if (va + vb).norm() > tol {
            out.push(Diagnostic::NotOppositeTranslates { a, b });
        }
    }
    if out.is_empty() {
        let corners = CornerData::trace(polygons, &partner);
        for (v, &ang) in corners.angles.iter().enumerate() {
            let k = ang / TAU;
            if (k - k.round()).abs() > ANGLE_TOL || k.round() < 1.0 {
                out.push(Diagnostic::ConeAngle { vertex: v, angle: ang });
            }
        }
    }
    out
}

/// Vertex classes found by walking around corners.
#[derive(Clone, Debug, PartialEq)]
struct CornerData {
    vertex_of_corner: Vec<Vec<usize>>,
    angles: Vec<f64>,
    corners: Vec<Vec<Edge>>,
}

impl CornerData {
    /// Corner `(p, i)` is vertex `i` of polygon `p`. Turning counterclockwise past edge `i - 1`
    /// enters the partner polygon at the corner where the partner edge starts.
    fn trace(polygons: &[Polygon], partner: &BTreeMap<Edge, Edge>) -> CornerData {
        let mut vertex_of_corner: Vec<Vec<usize>> =
            polygons.iter().map(|p| vec![usize::MAX; p.len()]).collect();
        let mut angles = Vec::new();
        let mut corners = Vec::new();
        for pi in 0..polygons.len() {
            for i in 0..polygons[pi].len() {
                if vertex_of_corner[pi][i] != usize::MAX {
                    continue;
                }
                let id = angles.len();
                let mut total = 0.0;
                let mut cyc = Vec::new();
                let mut c = Edge::new(pi, i);
                loop {
                    vertex_of_corner[c.poly][c.edge] = id;
                    total += polygons[c.poly].angle(c.edge);
                    cyc.push(c);
                    let k = polygons[c.poly].len();
                    c = partner[&Edge::new(c.poly, (c.edge + k - 1) % k)];
                    if vertex_of_corner[c.poly][c.edge] != usize::MAX {
                        break;
                    }
                }
                angles.push(total);
                corners.push(cyc);
            }
        }
        CornerData { vertex_of_corner, angles, corners }
    }
}

/// Zero orders of a stratum `H(k_1, ..., k_n)`, sorted in decreasing order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StratumSignature {
    pub zero_orders: Vec<u32>,
    pub hyperelliptic: Option<bool>,
}

impl StratumSignature {
    pub fn genus(&self) -> u32 {
        (self.zero_orders.iter().sum::<u32>() + 2) / 2
    }
}

impl fmt::Display for StratumSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.zero_orders.iter().map(|k| k.to_string()).collect();
        write!(f, "H({})", parts.join(","))
    }
}

/// A validated translation surface.
#[derive(Clone, Debug, PartialEq)]
pub struct TranslationSurface {
    polygons: Vec<Polygon>,
    partner: Vec<Vec<Edge>>,
    eps: f64,
    corners: CornerData,
}

impl TranslationSurface {
    /// Builds a surface, failing with the full diagnostics list if any invariant is violated.
    pub fn new(polygons: Vec<Polygon>, gluings: &[(Edge, Edge)]) -> Result<Self> {
        Self::with_eps(polygons, gluings, EPS_GEOM)
    }

    pub fn with_eps(polygons: Vec<Polygon>, gluings: &[(Edge, Edge)], eps: f64) -> Result<Self> {
        let diags = validate_parts(&polygons, gluings, eps);
        if !diags.is_empty() {
            let msg: Vec<String> = diags.iter().map(|d| d.to_string()).collect();
            return Err(FlatError::MalformedSurface(msg.join("; ")));
        }
        Ok(Self::assemble(polygons, gluings, eps))
    }

    fn assemble(polygons: Vec<Polygon>, gluings: &[(Edge, Edge)], eps: f64) -> Self {
        let mut map = BTreeMap::new();
        for &(a, b) in gluings {
            map.insert(a, b);
            map.insert(b, a);
        }
        let partner = polygons
            .iter()
            .enumerate()
            .map(|(pi, p)| (0..p.len()).map(|i| map[&Edge::new(pi, i)]).collect())
            .collect();
        let corners = CornerData::trace(&polygons, &map);
        TranslationSurface { polygons, partner, eps, corners }
    }

    /// Same gluings, new vertex positions. The caller keeps the polygons valid.
    pub fn with_polygons(&self, polygons: Vec<Polygon>) -> Result<Self> {
        Self::with_eps(polygons, &self.gluings(), self.eps)
    }

    pub fn polygons(&self) -> &[Polygon] {
        &self.polygons
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn partner(&self, e: Edge) -> Edge {
        self.partner[e.poly][e.edge]
    }

    /// Each glued pair once, lower edge first, in lexicographic order.
    pub fn gluings(&self) -> Vec<(Edge, Edge)> {
        let mut out = Vec::new();
        for (pi, row) in self.partner.iter().enumerate() {
            for (i, &b) in row.iter().enumerate() {
                let a = Edge::new(pi, i);
                if a < b {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub fn edge_vector(&self, e: Edge) -> Vec2 {
        self.polygons[e.poly].edge(e.edge)
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.polygons
            .iter()
            .enumerate()
            .flat_map(|(pi, p)| (0..p.len()).map(move |i| Edge::new(pi, i)))
    }

    pub fn num_edges(&self) -> usize {
        self.polygons.iter().map(|p| p.len()).sum()
    }

    pub fn num_vertices(&self) -> usize {
        self.corners.angles.len()
    }

    /// Vertex class of corner `i` of polygon `p`.
    pub fn vertex_of_corner(&self, p: usize, i: usize) -> usize {
        self.corners.vertex_of_corner[p][i]
    }

    /// Corners of vertex class `v` in counterclockwise order.
    pub fn corners_of_vertex(&self, v: usize) -> &[Edge] {
        &self.corners.corners[v]
    }

    pub fn cone_angle(&self, v: usize) -> f64 {
        self.corners.angles[v]
    }

    /// Order `k` of vertex class `v` (cone angle `2π(k+1)`).
    pub fn vertex_order(&self, v: usize) -> u32 {
        (self.corners.angles[v] / TAU).round() as u32 - 1
    }

    pub fn area(&self) -> f64 {
        self.polygons.iter().map(|p| p.area()).sum()
    }

    pub fn length_scale(&self) -> f64 {
        length_scale(&self.polygons)
    }

    pub fn euler_characteristic(&self) -> i64 {
        let v = self.num_vertices() as i64;
        let e = (self.num_edges() / 2) as i64;
        let f = self.polygons.len() as i64;
        v - e + f
    }

    pub fn genus(&self) -> u32 {
        ((2 - self.euler_characteristic()) / 2) as u32
    }

    pub fn stratum(&self) -> Result<StratumSignature> {
        let mut orders = Vec::new();
        for (v, &a) in self.corners.angles.iter().enumerate() {
            let k = a / TAU;
            if (k - k.round()).abs() > ANGLE_TOL {
                return Err(FlatError::MalformedSurface(format!(
                    "cone angle {a} at vertex {v} is not a multiple of 2π"
                )));
            }
            let k = k.round() as u32 - 1;
            if k > 0 {
                orders.push(k);
            }
        }
        orders.sort_unstable_by(|a, b| b.cmp(a));
        let sum: u32 = orders.iter().sum();
        if sum + 2 != 2 * self.genus() {
            return Err(FlatError::MalformedSurface(format!(
                "zero orders sum to {sum}, genus {}",
                self.genus()
            )));
        }
        Ok(StratumSignature { zero_orders: orders, hyperelliptic: None })
    }

    pub fn validate(&self) -> Vec<Diagnostic> {
        validate_parts(&self.polygons, &self.gluings(), self.eps)
    }

    /// Applies `f` to every vertex; gluings are kept.
    pub fn map_points(&self, f: impl Fn(Vec2) -> Vec2) -> Result<Self> {
        let polys = self
            .polygons
            .iter()
            .map(|p| Polygon { vertices: p.vertices.iter().map(|&v| f(v)).collect(), label: p.label.clone() })
            .collect();
        self.with_polygons(polys)
    }

    /// Reorders polygons by `perm` (new index of old polygon `i` is `perm[i]`) and cyclically
    /// rotates each polygon's vertex list by `shift[i]`. The underlying surface is unchanged.
    pub fn relabeled(&self, perm: &[usize], shift: &[usize]) -> Result<Self> {
        let n = self.polygons.len();
        let mut polys = vec![Polygon::new(Vec::new()); n];
        for i in 0..n {
            let p = &self.polygons[i];
            let k = p.len();
            let s = shift[i] % k;
            let verts = (0..k).map(|j| p.vertices[(j + s) % k]).collect();
            polys[perm[i]] = Polygon { vertices: verts, label: p.label.clone() };
        }
        let map = |e: Edge| {
            let k = self.polygons[e.poly].len();
            let s = shift[e.poly] % k;
            Edge::new(perm[e.poly], (e.edge + k - s) % k)
        };
        let gl: Vec<(Edge, Edge)> = self.gluings().into_iter().map(|(a, b)| (map(a), map(b))).collect();
        Self::with_eps(polys, &gl, self.eps)
    }
}

/// Regular 2n-gon with unit sides, a horizontal bottom edge, and opposite sides glued.
pub fn build_regular_2ngon(n: usize) -> Result<TranslationSurface> {
    if n < 4 {
        return Err(FlatError::InvalidParameter(format!("2n-gon needs n >= 4, got {n}")));
    }
    let m = 2 * n;
    let r = 1.0 / (2.0 * (PI / m as f64).sin());
    let theta = |j: usize| -PI / 2.0 - PI / m as f64 + (j as f64) * PI / n as f64;
    // vertices from the closed form rather than cumulative sums, so errors do not accumulate
    let raw: Vec<Vec2> = (0..m)
        .map(|j| {
            let (s, c) = theta(j).sin_cos();
            Vec2::new(r * c, r * s)
        })
        .collect();
    let origin = raw[0];
    let mut verts: Vec<Vec2> = raw.iter().map(|&v| v - origin).collect();
    verts[1].y = 0.0;
    verts[n + 1].y = verts[n].y;
    let gluings: Vec<(Edge, Edge)> = (0..n).map(|k| (Edge::new(0, k), Edge::new(0, k + n))).collect();
    let poly = Polygon { vertices: verts, label: format!("2ngon{n}") };
    TranslationSurface::new(vec![poly], &gluings)
}
