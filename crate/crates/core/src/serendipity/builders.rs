use std::f64::consts::PI;

use super::{DiagonalAux, DiagonalCoefficients, SerendipityMap, Strategy};
use crate::error::{Error, Result};
use crate::geometry::{diagonal_frame, Polygon, Vec2};
use crate::index::IndexSets;

const REGULAR_TOL: f64 = 1e-9;

/// Equal vertex radii about the centroid and equal central angles, both to a
/// relative tolerance of `1e-9`.
pub fn is_regular(polygon: &Polygon) -> bool {
    let n = polygon.n();
    let c = polygon.centroid();
    let radii: Vec<f64> = polygon.vertices().iter().map(|v| (v - c).norm()).collect();
    let mean = radii.iter().sum::<f64>() / n as f64;
    if radii.iter().any(|r| (r - mean).abs() > REGULAR_TOL * mean) {
        return false;
    }
    let sigma = 2.0 * PI / n as f64;
    (0..n).all(|i| {
        let p = polygon.vertex(i) - c;
        let q = polygon.vertex(i + 1) - c;
        let angle = (p.x * q.y - p.y * q.x).atan2(p.dot(&q));
        (angle - sigma).abs() <= REGULAR_TOL * sigma
    })
}

pub(super) fn is_parallelogram(polygon: &Polygon) -> bool {
    polygon.n() == 4 && {
        let v = polygon.vertices();
        (v[0] + v[2] - v[1] - v[3]).norm() <= 1e-12 * polygon.diameter()
    }
}

/// `(c_0, c_-, c_+)` for a diagonal of a regular `n`-gon whose endpoints are
/// `k` steps apart along the shorter side, `2 <= k <= n / 2`.
pub fn regular_coefficients(n: usize, k: usize) -> (f64, f64, f64) {
    let sigma = 2.0 * PI / n as f64;
    let (cs, sn) = (sigma.cos(), sigma.sin());
    if 2 * k == n {
        // limit at theta = pi / 2
        let c0 = (1.0 + cs) / (cs - 1.0);
        let ce = 1.0 / (2.0 * (1.0 - cs));
        return (c0, ce, ce);
    }
    let theta = 0.5 * k as f64 * sigma;
    let (ct, st) = (theta.cos(), theta.sin());
    let c0 = ((cs - 1.0) * ct * ct + (1.0 + cs) * st * st) / (cs - 1.0);
    let den = 2.0 * sn * (cs - 1.0);
    let c_minus = ((cs - 1.0) * st * ct - sn * st * st) / den;
    let c_plus = ((1.0 - cs) * st * ct - sn * st * st) / den;
    (c0, c_minus, c_plus)
}

impl SerendipityMap {
    /// The exact map of the unit square (and of any parallelogram, since the
    /// constraints are affine invariant).
    pub fn unit_square() -> Self {
        let diagonals = [(0, 2), (1, 3)]
            .iter()
            .map(|&(a, b)| DiagonalCoefficients {
                a,
                b,
                vertex_a: -1.0,
                vertex_b: -1.0,
                edge_before_a: 0.5,
                edge_after_a: 0.5,
                edge_before_b: 0.5,
                edge_after_b: 0.5,
                aux: DiagonalAux::Quadrilateral { d: 0.0 },
            })
            .collect();
        Self::from_diagonals(4, Strategy::UnitSquare, diagonals).expect("n = 4")
    }

    /// Map shared by every regular `n`-gon labelled counterclockwise.
    pub fn regular(n: usize) -> Result<Self> {
        let index = IndexSets::new(n)?;
        if n == 3 {
            return Self::from_diagonals(3, Strategy::RegularPolygon, Vec::new());
        }
        let sigma = 2.0 * PI / n as f64;
        let diagonals = index
            .diagonal_pairs()
            .iter()
            .map(|&(p, q)| {
                let forward = q - p;
                // a is the endpoint from which the shorter arc runs clockwise
                let (a, b, k) = if 2 * forward <= n { (q, p, forward) } else { (p, q, n - forward) };
                let (c0, c_minus, c_plus) = regular_coefficients(n, k);
                let (edge_before_a, edge_after_a, edge_before_b, edge_after_b) = (c_minus, c_plus, c_plus, c_minus);
                // stored with a < b
                let coeffs = if a < b {
                    (a, b, edge_before_a, edge_after_a, edge_before_b, edge_after_b)
                } else {
                    (b, a, edge_before_b, edge_after_b, edge_before_a, edge_after_a)
                };
                DiagonalCoefficients {
                    a: coeffs.0,
                    b: coeffs.1,
                    vertex_a: c0,
                    vertex_b: c0,
                    edge_before_a: coeffs.2,
                    edge_after_a: coeffs.3,
                    edge_before_b: coeffs.4,
                    edge_after_b: coeffs.5,
                    aux: DiagonalAux::Regular {
                        theta: 0.5 * k as f64 * sigma,
                    },
                }
            })
            .collect();
        Self::from_diagonals(n, Strategy::RegularPolygon, diagonals)
    }

    pub fn quadrilateral(polygon: &Polygon) -> Result<Self> {
        if polygon.n() != 4 {
            return Err(Error::StrategyMismatch {
                strategy: Strategy::Quadrilateral.to_string(),
                reason: format!("polygon has {} vertices, not 4", polygon.n()),
            });
        }
        let mut diagonals = Vec::with_capacity(2);
        for a in 0..2 {
            let b = a + 2;
            let frame = diagonal_frame(polygon, a, b)?;
            let below = frame.apply(&polygon.vertex(a + 1));
            let above = frame.apply(&polygon.vertex(a + 3));
            // weights putting the combination of v_{a+1} and v_{a+3} on the x-axis
            let w_below = above.y / (above.y - below.y);
            let w_above = below.y / (below.y - above.y);
            let d = (w_below * below.x + w_above * above.x) / frame.half_length;
            diagonals.push(DiagonalCoefficients {
                a,
                b,
                vertex_a: d - 1.0,
                vertex_b: -d - 1.0,
                edge_before_a: w_above,
                edge_after_a: w_below,
                edge_before_b: w_below,
                edge_after_b: w_above,
                aux: DiagonalAux::Quadrilateral { d },
            });
        }
        Self::from_diagonals(4, Strategy::Quadrilateral, diagonals)
    }

    pub fn generic(polygon: &Polygon) -> Result<Self> {
        let n = polygon.n();
        if n == 4 {
            return Err(Error::StrategyMismatch {
                strategy: Strategy::Generic.to_string(),
                reason: "quadrilaterals use the quadrilateral construction".into(),
            });
        }
        let index = IndexSets::new(n)?;
        let diagonals = index
            .diagonal_pairs()
            .iter()
            .map(|&(a, b)| generic_column(polygon, a, b))
            .collect::<Result<Vec<_>>>()?;
        Self::from_diagonals(n, Strategy::Generic, diagonals)
    }
}

/// Weights `(w_p, w_q)` summing to 1 that put `w_p p + w_q q` on the x-axis,
/// and the x-coordinate of that point.
fn axis_crossing(p: &Vec2, q: &Vec2, a: usize, b: usize) -> Result<(f64, f64, f64)> {
    let den = p.y - q.y;
    if den.abs() <= 1e-14 * (p.norm() + q.norm()) {
        return Err(Error::Degenerate(format!(
            "neighbours of diagonal ({a}, {b}) endpoint lie on the diagonal line"
        )));
    }
    let w_p = -q.y / den;
    let w_q = p.y / den;
    Ok((w_p, w_q, w_p * p.x + w_q * q.x))
}

fn generic_column(polygon: &Polygon, a: usize, b: usize) -> Result<DiagonalCoefficients> {
    let frame = diagonal_frame(polygon, a, b)?;
    let ell = frame.half_length;
    let at = |i: usize| frame.apply(&polygon.vertex(i));
    let n = polygon.n();
    let (a_prev, a_next) = (at(a + n - 1), at(a + 1));
    let (b_prev, b_next) = (at(b + n - 1), at(b + 1));

    let (wa_prev, wa_next, xa) = axis_crossing(&a_prev, &a_next, a, b)?;
    let (wb_prev, wb_next, xb) = axis_crossing(&b_prev, &b_next, a, b)?;
    let d_a = -xa / ell;
    let d_b = xb / ell;
    let sum = d_a + d_b;
    if sum >= 2.0 - 1e-12 {
        return Err(Error::CoefficientBlowup { a, b, sum });
    }
    let s = 2.0 / (2.0 - sum);

    let (edge_before_a, edge_after_a) = (s * wa_prev, s * wa_next);
    let (edge_before_b, edge_after_b) = (s * wb_prev, s * wb_next);
    let consistency_a = (edge_before_a * a_prev.x + edge_after_a * a_next.x + s * d_a * ell).abs() / ell;
    let consistency_b = (edge_before_b * b_prev.x + edge_after_b * b_next.x - s * d_b * ell).abs() / ell;

    Ok(DiagonalCoefficients {
        a,
        b,
        vertex_a: (-2.0 - 2.0 * d_a) / (2.0 - sum),
        vertex_b: (-2.0 - 2.0 * d_b) / (2.0 - sum),
        edge_before_a,
        edge_after_a,
        edge_before_b,
        edge_after_b,
        aux: DiagonalAux::Generic {
            d_a,
            d_b,
            s,
            half_length: ell,
            consistency: consistency_a.max(consistency_b),
        },
    })
}
