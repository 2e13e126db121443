//! Convex polygons, their shape metrics and the geometric quality conditions
//! (bounded aspect ratio, minimum vertex separation, maximum interior angle).
//!
//! Vertices are stored counterclockwise and indexed from 0; every vertex
//! index is taken modulo `n`.

use std::f64::consts::PI;

use nalgebra::Vector2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vec2 = Vector2<f64>;

/// Relative tolerance on cross products of consecutive edges.
const CONVEXITY_TOL: f64 = 1e-12;

#[inline]
pub fn cross(a: &Vec2, b: &Vec2) -> f64 {
    a.x * b.y - a.y * b.x
}

/// Twice the signed area of the triangle `(p, q, r)`.
#[inline]
pub fn orient(p: &Vec2, q: &Vec2, r: &Vec2) -> f64 {
    cross(&(q - p), &(r - p))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Polygon {
    vertices: Vec<Vec2>,
    flat: Vec<bool>,
}

impl Polygon {
    /// Strictly convex counterclockwise polygon.
    pub fn new(vertices: Vec<Vec2>) -> Result<Self> {
        Self::validate(vertices, false)
    }

    /// Like [`Polygon::new`] but accepts vertices with interior angle exactly
    /// pi, e.g. a square with an extra vertex at the midpoint of one edge.
    pub fn with_flat_vertices(vertices: Vec<Vec2>) -> Result<Self> {
        Self::validate(vertices, true)
    }

    pub fn from_coords(coords: &[[f64; 2]]) -> Result<Self> {
        Self::new(coords.iter().map(|c| Vec2::new(c[0], c[1])).collect())
    }

    fn validate(vertices: Vec<Vec2>, allow_flat: bool) -> Result<Self> {
        let n = vertices.len();
        if n < 3 {
            return Err(Error::TooFewVertices(n));
        }
        if vertices.iter().any(|v| !v.x.is_finite() || !v.y.is_finite()) {
            return Err(Error::Degenerate("non-finite coordinate".into()));
        }
        let diam = max_pairwise_distance(&vertices);
        if diam == 0.0 {
            return Err(Error::Degenerate("all vertices coincide".into()));
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if (vertices[i] - vertices[j]).norm() <= 1e-12 * diam {
                    return Err(Error::RepeatedVertex(j));
                }
            }
        }
        let area = shoelace(&vertices);
        if area.abs() <= 1e-14 * diam * diam {
            return Err(Error::Degenerate(format!("near-zero area {area:e}")));
        }
        if area < 0.0 {
            return Err(Error::NotCounterclockwise);
        }
        let mut flat = vec![false; n];
        for i in 0..n {
            let prev = vertices[(i + n - 1) % n];
            let next = vertices[(i + 1) % n];
            let e1 = vertices[i] - prev;
            let e2 = next - vertices[i];
            let c = cross(&e1, &e2);
            let scale = e1.norm() * e2.norm();
            if c < -CONVEXITY_TOL * scale {
                return Err(Error::NotConvex(i));
            }
            if c <= CONVEXITY_TOL * scale {
                if e1.dot(&e2) < 0.0 {
                    return Err(Error::NotConvex(i));
                }
                if !allow_flat {
                    return Err(Error::FlatVertex(i));
                }
                flat[i] = true;
            }
        }
        let polygon = Polygon { vertices, flat };
        // all left turns but winding more than once (star polygons)
        let angle_sum: f64 = polygon.interior_angles().iter().sum();
        if (angle_sum - (n as f64 - 2.0) * PI).abs() > 1e-9 {
            return Err(Error::NotConvex(0));
        }
        Ok(polygon)
    }

    /// Unit square `(0,0), (1,0), (1,1), (0,1)`.
    pub fn unit_square() -> Self {
        Self::from_coords(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap()
    }

    /// Regular `n`-gon inscribed in the circle of the given radius centred at
    /// the origin, with vertex `k` at angle `2 pi k / n`.
    pub fn regular(n: usize, radius: f64) -> Result<Self> {
        if n < 3 {
            return Err(Error::TooFewVertices(n));
        }
        let sigma = 2.0 * PI / n as f64;
        Self::new(
            (0..n)
                .map(|k| {
                    let t = sigma * k as f64;
                    Vec2::new(radius * t.cos(), radius * t.sin())
                })
                .collect(),
        )
    }

    /// The unit square with an extra vertex at the midpoint of its left edge,
    /// placed first so that it is `v_1` in 1-based numbering. The diagonal
    /// joining its two neighbours passes through it.
    pub fn degenerate_pentagon() -> Self {
        Self::with_flat_vertices(
            [[0.0, 0.5], [0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]
                .iter()
                .map(|c| Vec2::new(c[0], c[1]))
                .collect(),
        )
        .unwrap()
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    #[inline]
    pub fn vertex(&self, i: usize) -> Vec2 {
        self.vertices[i % self.n()]
    }

    /// Midpoint of edge `i`, which runs from `v_i` to `v_{i+1}`.
    pub fn edge_midpoint(&self, i: usize) -> Vec2 {
        0.5 * (self.vertex(i) + self.vertex(i + 1))
    }

    pub fn edge_vector(&self, i: usize) -> Vec2 {
        self.vertex(i + 1) - self.vertex(i)
    }

    pub fn edge_length(&self, i: usize) -> f64 {
        self.edge_vector(i).norm()
    }

    /// Inward unit normal of edge `i`.
    pub fn inward_normal(&self, i: usize) -> Vec2 {
        let e = self.edge_vector(i);
        Vec2::new(-e.y, e.x) / e.norm()
    }

    /// Signed distance from `p` to the line through edge `i`, positive inside.
    pub fn edge_distance(&self, i: usize, p: &Vec2) -> f64 {
        self.inward_normal(i).dot(&(p - self.vertex(i)))
    }

    /// Minimum signed distance to the edge lines; negative outside.
    pub fn boundary_distance(&self, p: &Vec2) -> f64 {
        (0..self.n())
            .map(|i| self.edge_distance(i, p))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn contains(&self, p: &Vec2, margin: f64) -> bool {
        self.boundary_distance(p) > margin
    }

    pub fn area(&self) -> f64 {
        shoelace(&self.vertices)
    }

    /// Area centroid.
    pub fn centroid(&self) -> Vec2 {
        let n = self.n();
        let mut c = Vec2::zeros();
        let mut a2 = 0.0;
        for i in 0..n {
            let p = self.vertices[i];
            let q = self.vertices[(i + 1) % n];
            let w = cross(&p, &q);
            a2 += w;
            c += w * (p + q);
        }
        c / (3.0 * a2)
    }

    /// Largest distance between two points of the polygon; for a convex
    /// polygon it is attained at a pair of vertices.
    pub fn diameter(&self) -> f64 {
        max_pairwise_distance(&self.vertices)
    }

    pub fn min_vertex_distance(&self) -> f64 {
        let n = self.n();
        let mut d = f64::INFINITY;
        for i in 0..n {
            for j in (i + 1)..n {
                d = d.min((self.vertices[i] - self.vertices[j]).norm());
            }
        }
        d
    }

    /// Interior angle at each vertex, in `(0, pi]`.
    pub fn interior_angles(&self) -> Vec<f64> {
        let n = self.n();
        (0..n)
            .map(|i| {
                let u = self.vertex(i + 1) - self.vertices[i];
                let w = self.vertex(i + n - 1) - self.vertices[i];
                let mut angle = cross(&u, &w).atan2(u.dot(&w));
                if angle < 0.0 {
                    angle += 2.0 * PI;
                }
                angle
            })
            .collect()
    }

    pub fn is_flat(&self, i: usize) -> bool {
        self.flat[i % self.n()]
    }

    pub fn has_flat_vertices(&self) -> bool {
        self.flat.iter().any(|&f| f)
    }

    /// Applies a map that preserves convexity and orientation, e.g. a
    /// similarity transform.
    pub fn map(&self, f: impl Fn(&Vec2) -> Vec2) -> Result<Self> {
        let vertices = self.vertices.iter().map(f).collect();
        Self::validate(vertices, self.has_flat_vertices())
    }

    /// Cyclic relabelling so that old vertex `k` becomes vertex 0.
    pub fn rotate_labels(&self, k: usize) -> Self {
        let n = self.n();
        Polygon {
            vertices: (0..n).map(|i| self.vertices[(i + k) % n]).collect(),
            flat: (0..n).map(|i| self.flat[(i + k) % n]).collect(),
        }
    }

    /// Copy translated to its centroid and scaled to unit diameter, together
    /// with the similarity used.
    pub fn normalized(&self) -> (Self, UnitScaling) {
        let scaling = UnitScaling {
            origin: self.centroid(),
            scale: 1.0 / self.diameter(),
        };
        let polygon = Polygon {
            vertices: self.vertices.iter().map(|v| scaling.apply(v)).collect(),
            flat: self.flat.clone(),
        };
        (polygon, scaling)
    }

    pub fn bounding_box(&self) -> (Vec2, Vec2) {
        let mut lo = Vec2::repeat(f64::INFINITY);
        let mut hi = Vec2::repeat(f64::NEG_INFINITY);
        for v in &self.vertices {
            lo = lo.inf(v);
            hi = hi.sup(v);
        }
        (lo, hi)
    }

    pub fn shape_metrics(&self) -> Result<ShapeMetrics> {
        shape_metrics(self)
    }
}

/// `x -> (x - origin) * scale`.
#[derive(Clone, Copy, Debug)]
pub struct UnitScaling {
    pub origin: Vec2,
    pub scale: f64,
}

impl UnitScaling {
    pub fn apply(&self, p: &Vec2) -> Vec2 {
        (p - self.origin) * self.scale
    }
}

fn shoelace(vertices: &[Vec2]) -> f64 {
    let n = vertices.len();
    0.5 * (0..n)
        .map(|i| cross(&vertices[i], &vertices[(i + 1) % n]))
        .sum::<f64>()
}

fn max_pairwise_distance(vertices: &[Vec2]) -> f64 {
    let mut d: f64 = 0.0;
    for i in 0..vertices.len() {
        for j in (i + 1)..vertices.len() {
            d = d.max((vertices[i] - vertices[j]).norm());
        }
    }
    d
}

/// JSON form `{"vertices": [[x, y], ...]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolygonFile {
    pub vertices: Vec<[f64; 2]>,
}

impl PolygonFile {
    pub fn from_polygon(polygon: &Polygon) -> Self {
        PolygonFile {
            vertices: polygon.vertices().iter().map(|v| [v.x, v.y]).collect(),
        }
    }

    /// Validates the vertex list; flat vertices are accepted.
    pub fn to_polygon(&self) -> Result<Polygon> {
        Polygon::with_flat_vertices(self.vertices.iter().map(|c| Vec2::new(c[0], c[1])).collect())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("polygon serializes")
    }
}

#[derive(Clone, Debug)]
pub struct ShapeMetrics {
    pub diameter: f64,
    pub inradius: f64,
    pub incenter: Vec2,
    pub aspect_ratio: f64,
    pub interior_angles: Vec<f64>,
}

/// Diameter, largest inscribed circle and interior angles.
///
/// The inscribed circle is the Chebyshev center of the edge half-planes. The
/// optimum of that small linear program sits where three edge constraints are
/// active, so every triple of edge lines is tried and the largest feasible
/// radius wins. Ties go to the lexicographically smallest center.
pub fn shape_metrics(polygon: &Polygon) -> Result<ShapeMetrics> {
    let n = polygon.n();
    let diameter = polygon.diameter();
    let tol = 1e-9 * diameter;
    let normals: Vec<Vec2> = (0..n).map(|i| polygon.inward_normal(i)).collect();
    let offsets: Vec<f64> = (0..n).map(|i| normals[i].dot(&polygon.vertex(i))).collect();

    let mut best: Option<(f64, Vec2)> = None;
    for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                let m = nalgebra::Matrix3::new(
                    normals[i].x, normals[i].y, -1.0,
                    normals[j].x, normals[j].y, -1.0,
                    normals[k].x, normals[k].y, -1.0,
                );
                if m.determinant().abs() < 1e-12 {
                    continue;
                }
                let Some(inv) = m.try_inverse() else { continue };
                let sol = inv * nalgebra::Vector3::new(offsets[i], offsets[j], offsets[k]);
                let center = Vec2::new(sol.x, sol.y);
                let r = sol.z;
                if r <= 0.0 {
                    continue;
                }
                let feasible = (0..n).all(|e| normals[e].dot(&center) - offsets[e] >= r - tol);
                if !feasible {
                    continue;
                }
                best = match best {
                    None => Some((r, center)),
                    Some((br, bc)) => {
                        if r > br + 1e-12 * diameter
                            || ((r - br).abs() <= 1e-12 * diameter && lex_less(&center, &bc, tol))
                        {
                            Some((r, center))
                        } else {
                            Some((br, bc))
                        }
                    }
                };
            }
        }
    }
    let (inradius, incenter) =
        best.ok_or_else(|| Error::Degenerate("no inscribed circle found".into()))?;
    Ok(ShapeMetrics {
        diameter,
        inradius,
        incenter,
        aspect_ratio: diameter / inradius,
        interior_angles: polygon.interior_angles(),
    })
}

fn lex_less(a: &Vec2, b: &Vec2, tol: f64) -> bool {
    if (a.x - b.x).abs() > tol {
        a.x < b.x
    } else {
        a.y < b.y - tol
    }
}

/// Thresholds `gamma*`, `d*` and `beta*` of the shape conditions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShapeThresholds {
    pub gamma_star: f64,
    pub d_star: f64,
    pub beta_star: f64,
    /// Let the angle condition fail on one consecutive run of vertices.
    pub relaxed_angles: bool,
}

impl ShapeThresholds {
    pub fn new(gamma_star: f64, d_star: f64, beta_star: f64) -> Result<Self> {
        if !(gamma_star > 0.0 && d_star > 0.0 && beta_star > 0.0) {
            return Err(Error::InvalidArgument("shape thresholds must be positive".into()));
        }
        if beta_star >= PI {
            return Err(Error::InvalidArgument("beta* must be below pi".into()));
        }
        Ok(ShapeThresholds {
            gamma_star,
            d_star,
            beta_star,
            relaxed_angles: false,
        })
    }

    pub fn relaxed(mut self) -> Self {
        self.relaxed_angles = true;
        self
    }

    /// `d* sin((pi - beta*) / 2)`.
    pub fn epsilon_star(&self) -> f64 {
        self.d_star * ((PI - self.beta_star) / 2.0).sin()
    }
}

#[derive(Clone, Debug)]
pub struct ShapeConditions {
    pub thresholds: ShapeThresholds,
    pub epsilon_star: f64,
    pub aspect_ratio_ok: bool,
    pub min_edge_ok: bool,
    pub max_angle_ok: bool,
    /// Vertices whose interior angle is not below `beta*`.
    pub large_angle_vertices: Vec<usize>,
}

impl ShapeConditions {
    pub fn all_pass(&self) -> bool {
        self.aspect_ratio_ok && self.min_edge_ok && self.max_angle_ok
    }
}

pub fn check_conditions(polygon: &Polygon, thresholds: &ShapeThresholds) -> Result<ShapeConditions> {
    let metrics = shape_metrics(polygon)?;
    let large: Vec<usize> = metrics
        .interior_angles
        .iter()
        .enumerate()
        .filter(|(_, &b)| b >= thresholds.beta_star)
        .map(|(i, _)| i)
        .collect();
    let max_angle_ok = if thresholds.relaxed_angles {
        let n = polygon.n();
        let flagged: Vec<bool> = (0..n).map(|i| large.contains(&i)).collect();
        let runs = (0..n).filter(|&i| flagged[i] && !flagged[(i + n - 1) % n]).count();
        runs <= 1
    } else {
        large.is_empty()
    };
    Ok(ShapeConditions {
        thresholds: *thresholds,
        epsilon_star: thresholds.epsilon_star(),
        aspect_ratio_ok: metrics.aspect_ratio < thresholds.gamma_star,
        min_edge_ok: polygon.min_vertex_distance() > thresholds.d_star,
        max_angle_ok,
        large_angle_vertices: large,
    })
}

/// Rigid motion taking `v_a` to `(-l, 0)` and `v_b` to `(l, 0)`.
#[derive(Clone, Copy, Debug)]
pub struct DiagonalFrame {
    center: Vec2,
    cos: f64,
    sin: f64,
    pub half_length: f64,
}

impl DiagonalFrame {
    pub fn apply(&self, p: &Vec2) -> Vec2 {
        let d = p - self.center;
        Vec2::new(self.cos * d.x + self.sin * d.y, -self.sin * d.x + self.cos * d.y)
    }

    pub fn inverse(&self, q: &Vec2) -> Vec2 {
        Vec2::new(self.cos * q.x - self.sin * q.y, self.sin * q.x + self.cos * q.y) + self.center
    }
}

pub fn diagonal_frame(polygon: &Polygon, a: usize, b: usize) -> Result<DiagonalFrame> {
    let n = polygon.n();
    for index in [a, b] {
        if index >= n {
            return Err(Error::IndexOutOfRange { index, len: n });
        }
    }
    if a == b || (a + 1) % n == b || (b + 1) % n == a {
        return Err(Error::NotADiagonal { a, b });
    }
    let va = polygon.vertex(a);
    let vb = polygon.vertex(b);
    let d = vb - va;
    let len = d.norm();
    Ok(DiagonalFrame {
        center: 0.5 * (va + vb),
        cos: d.x / len,
        sin: d.y / len,
        half_length: 0.5 * len,
    })
}
