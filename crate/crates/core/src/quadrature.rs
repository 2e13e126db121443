//! Quadrature on triangles and convex polygons.
//!
//! Triangle rules are collapsed Gauss-Legendre products: the square
//! `[0,1]^2` is mapped onto the reference triangle by `(u, v) -> (u, (1-u) v)`
//! and a tensor Gauss rule integrates the pulled-back integrand, Jacobian
//! included. The edge `u = 1` collapses onto the reference vertex `(1, 0)`, so
//! integrands that are smooth in polar coordinates about that vertex (such as
//! gradients of mean value coordinates near a polygon corner) stay smooth
//! after the pull-back.
//!
//! Polygon rules fan from the area centroid and split each fan triangle at the
//! edge midpoint, so every polygon vertex is a collapsed vertex.

use crate::error::{Error, Result};
use crate::geometry::{orient, Polygon, Vec2};

pub const MAX_DEGREE: usize = 20;
/// Lowest degree at which Wachspress and mean value stiffness entries on a
/// mesh trapezoid change by less than `1e-8` relative when the degree is
/// raised by four.
pub const DEFAULT_ASSEMBLY_DEGREE: usize = 16;
pub const DEFAULT_NORM_DEGREE: usize = 14;

/// Gauss-Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    for i in 0..m.div_ceil(2) {
        // Tricomi initial guess, then Newton on P_m
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(m, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(m, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = 0.5 * (1.0 - x);
        nodes[m - 1 - i] = 0.5 * (1.0 + x);
        weights[i] = 0.5 * w;
        weights[m - 1 - i] = 0.5 * w;
    }
    (nodes, weights)
}

/// `P_m(x)` and `P_m'(x)` by the three-term recurrence.
fn legendre(m: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if m == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=m {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let dp = m as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Points and weights on the reference triangle `(0,0), (1,0), (0,1)`.
#[derive(Clone, Debug)]
pub struct TriangleRule {
    pub points: Vec<Vec2>,
    pub weights: Vec<f64>,
    pub degree: usize,
}

/// Rule exact for polynomials of total degree `degree` on the reference
/// triangle.
pub fn triangle_rule(degree: usize) -> Result<TriangleRule> {
    if degree == 0 || degree > MAX_DEGREE {
        return Err(Error::UnsupportedDegree(degree));
    }
    if degree == 1 {
        return Ok(TriangleRule {
            points: vec![Vec2::new(1.0 / 3.0, 1.0 / 3.0)],
            weights: vec![0.5],
            degree,
        });
    }
    // the Jacobian 1 - u adds one degree in u
    let (u_nodes, u_weights) = gauss_legendre((degree + 2).div_ceil(2));
    let (v_nodes, v_weights) = gauss_legendre((degree + 1).div_ceil(2));
    let mut points = Vec::with_capacity(u_nodes.len() * v_nodes.len());
    let mut weights = Vec::with_capacity(points.capacity());
    for (u, wu) in u_nodes.iter().zip(&u_weights) {
        for (v, wv) in v_nodes.iter().zip(&v_weights) {
            points.push(Vec2::new(*u, (1.0 - u) * v));
            weights.push(wu * wv * (1.0 - u));
        }
    }
    Ok(TriangleRule {
        points,
        weights,
        degree,
    })
}

#[derive(Clone, Debug)]
pub struct QuadratureRule {
    pub points: Vec<Vec2>,
    pub weights: Vec<f64>,
    pub degree: usize,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(&Vec2) -> f64) -> f64 {
        self.points.iter().zip(&self.weights).map(|(p, w)| w * f(p)).sum()
    }

    /// Mapped copy of a reference-triangle rule on `(p0, p1, p2)`; the
    /// collapsed vertex `(1, 0)` goes to `p1`.
    pub fn on_triangle(reference: &TriangleRule, p0: &Vec2, p1: &Vec2, p2: &Vec2) -> Self {
        let mut rule = QuadratureRule {
            points: Vec::with_capacity(reference.points.len()),
            weights: Vec::with_capacity(reference.points.len()),
            degree: reference.degree,
        };
        rule.push_triangle(reference, p0, p1, p2);
        rule
    }

    fn push_triangle(&mut self, reference: &TriangleRule, p0: &Vec2, p1: &Vec2, p2: &Vec2) {
        let jac = orient(p0, p1, p2).abs();
        let e1 = p1 - p0;
        let e2 = p2 - p0;
        for (q, w) in reference.points.iter().zip(&reference.weights) {
            self.points.push(p0 + q.x * e1 + q.y * e2);
            self.weights.push(w * jac);
        }
    }
}

/// Rule of the given degree on a convex polygon: `2n` triangles
/// `(c, v_i, m_i)` and `(m_i, v_{i+1}, c)` with `c` the centroid and `m_i`
/// the midpoint of edge `i`.
pub fn polygon_rule(polygon: &Polygon, degree: usize) -> Result<QuadratureRule> {
    let reference = triangle_rule(degree)?;
    polygon_rule_from(polygon, &reference)
}

/// As [`polygon_rule`] with a precomputed reference rule.
pub fn polygon_rule_from(polygon: &Polygon, reference: &TriangleRule) -> Result<QuadratureRule> {
    let n = polygon.n();
    let apex = polygon.centroid();
    let diam = polygon.diameter();
    let mut rule = QuadratureRule {
        points: Vec::with_capacity(2 * n * reference.points.len()),
        weights: Vec::with_capacity(2 * n * reference.points.len()),
        degree: reference.degree,
    };
    for i in 0..n {
        let a = polygon.vertex(i);
        let b = polygon.vertex(i + 1);
        if orient(&apex, &a, &b) <= 1e-14 * diam * diam {
            return Err(Error::Degenerate(format!("fan triangle {i} has no area")));
        }
        let m = 0.5 * (a + b);
        rule.push_triangle(reference, &apex, &a, &m);
        rule.push_triangle(reference, &m, &b, &apex);
    }
    Ok(rule)
}
