//! Generalized barycentric coordinates on convex polygons and their pairwise
//! products.
//!
//! Three constructions are provided: Wachspress (rational), mean value
//! (Floater's tan-half-angle weights) and piecewise-linear coordinates on the
//! fan triangulation from vertex 0. All of them are evaluated together with
//! analytic gradients. Interior formulas degenerate on the boundary, so
//! boundary values go through [`eval_boundary`], which is exact and the same
//! for every kind.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{cross, orient, Polygon, Vec2};
use crate::index::IndexSets;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoordinateKind {
    Wachspress,
    MeanValue,
    Triangulation,
}

impl CoordinateKind {
    pub const ALL: [CoordinateKind; 3] = [
        CoordinateKind::Wachspress,
        CoordinateKind::MeanValue,
        CoordinateKind::Triangulation,
    ];
}

impl fmt::Display for CoordinateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CoordinateKind::Wachspress => "wachspress",
            CoordinateKind::MeanValue => "meanvalue",
            CoordinateKind::Triangulation => "triangulation",
        })
    }
}

impl FromStr for CoordinateKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "wachspress" | "wach" => Ok(CoordinateKind::Wachspress),
            "meanvalue" | "mval" | "mv" => Ok(CoordinateKind::MeanValue),
            "triangulation" | "tri" => Ok(CoordinateKind::Triangulation),
            _ => Err(Error::InvalidArgument(format!("unknown coordinate kind `{s}`"))),
        }
    }
}

/// Coordinate values and gradients at one point.
#[derive(Clone, Debug)]
pub struct CoordEval {
    pub point: Vec2,
    pub values: Vec<f64>,
    pub gradients: Vec<Vec2>,
}

/// Products `mu_ab = lambda_a lambda_b` in the order of [`IndexSets`].
#[derive(Clone, Debug)]
pub struct PairwiseEval {
    pub values: Vec<f64>,
    pub gradients: Vec<Vec2>,
}

#[derive(Clone, Debug)]
struct FanTriangle {
    k: usize,
    double_area: f64,
}

/// Coordinates of one kind bound to one polygon, with the vertex-only
/// quantities precomputed.
#[derive(Clone, Debug)]
pub struct BarycentricCoordinates {
    polygon: Polygon,
    kind: CoordinateKind,
    index: IndexSets,
    boundary_eps: f64,
    /// Twice the signed area of `(v_{i-1}, v_i, v_{i+1})`.
    corner_areas: Vec<f64>,
    fan: Vec<FanTriangle>,
}

impl BarycentricCoordinates {
    pub fn new(polygon: &Polygon, kind: CoordinateKind) -> Result<Self> {
        let n = polygon.n();
        let diam = polygon.diameter();
        let corner_areas: Vec<f64> = (0..n)
            .map(|i| orient(&polygon.vertex(i + n - 1), &polygon.vertex(i), &polygon.vertex(i + 1)))
            .collect();
        if kind == CoordinateKind::Wachspress {
            // Wachspress weights vanish identically at a flat vertex
            if let Some(i) = (0..n).find(|&i| polygon.is_flat(i)) {
                return Err(Error::FlatVertex(i));
            }
        }
        let fan = (1..n - 1)
            .map(|k| FanTriangle {
                k,
                double_area: orient(&polygon.vertex(0), &polygon.vertex(k), &polygon.vertex(k + 1)),
            })
            .filter(|t| t.double_area > 1e-14 * diam * diam)
            .collect();
        Ok(BarycentricCoordinates {
            polygon: polygon.clone(),
            kind,
            index: IndexSets::new(n)?,
            boundary_eps: 1e-10 * diam,
            corner_areas,
            fan,
        })
    }

    /// Points closer than `eps` to the boundary are rejected by the interior
    /// evaluators.
    pub fn with_boundary_eps(mut self, eps: f64) -> Self {
        self.boundary_eps = eps;
        self
    }

    pub fn polygon(&self) -> &Polygon {
        &self.polygon
    }

    pub fn kind(&self) -> CoordinateKind {
        self.kind
    }

    pub fn index(&self) -> &IndexSets {
        &self.index
    }

    pub fn eval(&self, x: &Vec2) -> Result<CoordEval> {
        if !self.polygon.contains(x, self.boundary_eps) {
            return Err(Error::OutsidePolygon { x: x.x, y: x.y });
        }
        let (values, gradients) = match self.kind {
            CoordinateKind::Wachspress => self.wachspress(x),
            CoordinateKind::MeanValue => self.mean_value(x),
            CoordinateKind::Triangulation => self.triangulation(x)?,
        };
        Ok(CoordEval {
            point: *x,
            values,
            gradients,
        })
    }

    pub fn eval_pairwise(&self, x: &Vec2) -> Result<PairwiseEval> {
        Ok(pairwise(&self.index, &self.eval(x)?))
    }

    fn wachspress(&self, x: &Vec2) -> (Vec<f64>, Vec<Vec2>) {
        let n = self.polygon.n();
        let d: Vec<Vec2> = self.polygon.vertices().iter().map(|v| v - x).collect();
        // double areas of (x, v_i, v_{i+1}) and their gradients
        let mut area = Vec::with_capacity(n);
        let mut grad_area = Vec::with_capacity(n);
        for i in 0..n {
            let a = d[i];
            let b = d[(i + 1) % n];
            area.push(cross(&a, &b));
            grad_area.push(Vec2::new(a.y - b.y, b.x - a.x));
        }
        let mut w = Vec::with_capacity(n);
        let mut grad_w = Vec::with_capacity(n);
        for i in 0..n {
            let p = (i + n - 1) % n;
            let wi = self.corner_areas[i] / (area[p] * area[i]);
            w.push(wi);
            grad_w.push(-wi * (grad_area[p] / area[p] + grad_area[i] / area[i]));
        }
        normalize(w, grad_w)
    }

    fn mean_value(&self, x: &Vec2) -> (Vec<f64>, Vec<Vec2>) {
        let n = self.polygon.n();
        let d: Vec<Vec2> = self.polygon.vertices().iter().map(|v| v - x).collect();
        let r: Vec<f64> = d.iter().map(|v| v.norm()).collect();
        let grad_r: Vec<Vec2> = d.iter().zip(&r).map(|(v, &ri)| -v / ri).collect();

        // t_i = tan(alpha_i / 2), alpha_i the angle at x subtended by edge i
        let mut t = Vec::with_capacity(n);
        let mut grad_t = Vec::with_capacity(n);
        for i in 0..n {
            let j = (i + 1) % n;
            let (a, b) = (d[i], d[j]);
            let sin_part = cross(&a, &b);
            let cos_part = a.dot(&b);
            let rr = r[i] * r[j];
            let g_sin = Vec2::new(a.y - b.y, b.x - a.x);
            let g_cos = -(a + b);
            let g_rr = r[j] * grad_r[i] + r[i] * grad_r[j];
            // tan(alpha/2) = sin / (rr + cos) = (rr - cos) / sin; pick the
            // form without cancellation
            if cos_part >= 0.0 {
                let den = rr + cos_part;
                let ti = sin_part / den;
                t.push(ti);
                grad_t.push((g_sin - ti * (g_rr + g_cos)) / den);
            } else {
                let ti = (rr - cos_part) / sin_part;
                t.push(ti);
                grad_t.push((g_rr - g_cos - ti * g_sin) / sin_part);
            }
        }
        let mut w = Vec::with_capacity(n);
        let mut grad_w = Vec::with_capacity(n);
        for i in 0..n {
            let p = (i + n - 1) % n;
            let wi = (t[p] + t[i]) / r[i];
            w.push(wi);
            grad_w.push((grad_t[p] + grad_t[i]) / r[i] - wi * grad_r[i] / r[i]);
        }
        normalize(w, grad_w)
    }

    fn triangulation(&self, x: &Vec2) -> Result<(Vec<f64>, Vec<Vec2>)> {
        let n = self.polygon.n();
        let p0 = self.polygon.vertex(0);
        let tol = 1e-12;
        for tri in &self.fan {
            let p1 = self.polygon.vertex(tri.k);
            let p2 = self.polygon.vertex(tri.k + 1);
            let b0 = orient(x, &p1, &p2) / tri.double_area;
            let b1 = orient(&p0, x, &p2) / tri.double_area;
            let b2 = orient(&p0, &p1, x) / tri.double_area;
            if b0 >= -tol && b1 >= -tol && b2 >= -tol {
                let mut values = vec![0.0; n];
                let mut grads = vec![Vec2::zeros(); n];
                values[0] = b0;
                values[tri.k] = b1;
                values[tri.k + 1] = b2;
                grads[0] = Vec2::new(p1.y - p2.y, p2.x - p1.x) / tri.double_area;
                grads[tri.k] = Vec2::new(p2.y - p0.y, p0.x - p2.x) / tri.double_area;
                grads[tri.k + 1] = Vec2::new(p0.y - p1.y, p1.x - p0.x) / tri.double_area;
                return Ok((values, grads));
            }
        }
        Err(Error::OutsidePolygon { x: x.x, y: x.y })
    }
}

fn normalize(w: Vec<f64>, grad_w: Vec<Vec2>) -> (Vec<f64>, Vec<Vec2>) {
    let total: f64 = w.iter().sum();
    let grad_total: Vec2 = grad_w.iter().sum();
    let values: Vec<f64> = w.iter().map(|wi| wi / total).collect();
    let grads = grad_w
        .iter()
        .zip(&values)
        .map(|(g, l)| (g - *l * grad_total) / total)
        .collect();
    (values, grads)
}

/// Coordinates of the given kind at an interior point.
pub fn eval_coords(polygon: &Polygon, kind: CoordinateKind, x: &Vec2) -> Result<CoordEval> {
    BarycentricCoordinates::new(polygon, kind)?.eval(x)
}

/// Coordinate values at `(1 - t) v_i + t v_{i+1}` on edge `i`. On the boundary
/// every kind is linear along each edge and zero on the other edges.
pub fn eval_boundary(polygon: &Polygon, edge: usize, t: f64) -> Result<Vec<f64>> {
    let n = polygon.n();
    if edge >= n {
        return Err(Error::IndexOutOfRange { index: edge, len: n });
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidArgument(format!("edge parameter {t} not in [0, 1]")));
    }
    let mut values = vec![0.0; n];
    values[edge] = 1.0 - t;
    values[(edge + 1) % n] += t;
    Ok(values)
}

pub fn pairwise(index: &IndexSets, coords: &CoordEval) -> PairwiseEval {
    let l = &coords.values;
    let g = &coords.gradients;
    let (values, gradients) = index
        .pairs()
        .iter()
        .map(|&(a, b)| (l[a] * l[b], l[a] * g[b] + l[b] * g[a]))
        .unzip();
    PairwiseEval { values, gradients }
}

pub fn pairwise_values(index: &IndexSets, values: &[f64]) -> Vec<f64> {
    index.pairs().iter().map(|&(a, b)| values[a] * values[b]).collect()
}
