//! Residuals of the precision constraints and the coefficient bound.
//!
//! The moment of a pair `(a, b)` is `m (1, (v_a + v_b) / 2, (v_a v_b^T +
//! v_b v_a^T) / 2)` with multiplicity `m = 1` for `a = b` and `2` otherwise.
//! A column `{a, b}` of `A` is admissible when the moments of its rows,
//! weighted by its entries, add up to the moment of `{a, b}`. All residuals are
//! taken after mapping the polygon to unit diameter.

use nalgebra::Matrix2;
use serde::Serialize;

use super::SerendipityMap;
use crate::error::{Error, Result};
use crate::geometry::{Polygon, ShapeConditions, Vec2};

pub const CONSTRAINT_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug)]
struct Moment {
    mass: f64,
    first: Vec2,
    second: Matrix2<f64>,
}

impl Moment {
    fn of_pair(v: &[Vec2], a: usize, b: usize) -> Self {
        let (va, vb) = (v[a], v[b]);
        let mult = if a == b { 1.0 } else { 2.0 };
        Moment {
            mass: mult,
            first: mult * 0.5 * (va + vb),
            second: mult * 0.5 * (va * vb.transpose() + vb * va.transpose()),
        }
    }

    fn zero() -> Self {
        Moment {
            mass: 0.0,
            first: Vec2::zeros(),
            second: Matrix2::zeros(),
        }
    }

    fn add_scaled(&mut self, other: &Moment, c: f64) {
        self.mass += c * other.mass;
        self.first += c * other.first;
        self.second += c * other.second;
    }

    /// `(|mass|, max |first|, max |second|)` of `self - other`.
    fn residual(&self, other: &Moment) -> (f64, f64, f64) {
        (
            (self.mass - other.mass).abs(),
            (self.first - other.first).amax(),
            (self.second - other.second).amax(),
        )
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ColumnResidual {
    pub a: usize,
    pub b: usize,
    pub constant: f64,
    pub linear: f64,
    pub quadratic: f64,
}

impl ColumnResidual {
    pub fn max(&self) -> f64 {
        self.constant.max(self.linear).max(self.quadratic)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ConstraintReport {
    pub columns: Vec<ColumnResidual>,
    pub max_residual: f64,
    /// Column with the largest residual.
    pub worst_column: Option<(usize, usize)>,
    pub pass: bool,
}

/// Per-column constraint residuals of `A` on the polygon.
pub fn verify_constraints(polygon: &Polygon, map: &SerendipityMap) -> ConstraintReport {
    let (unit, _) = polygon.normalized();
    let v = unit.vertices();
    let n = map.n();
    let pairs = map.index().pairs();
    let a = map.a_matrix();
    let mut columns = Vec::with_capacity(pairs.len());
    for (col, &(p, q)) in pairs.iter().enumerate() {
        let mut sum = Moment::zero();
        for (row, &(r, s)) in pairs.iter().take(2 * n).enumerate() {
            let c = a[(row, col)];
            if c != 0.0 {
                sum.add_scaled(&Moment::of_pair(v, r, s), c);
            }
        }
        let (constant, linear, quadratic) = sum.residual(&Moment::of_pair(v, p, q));
        columns.push(ColumnResidual {
            a: p,
            b: q,
            constant,
            linear,
            quadratic,
        });
    }
    let worst = columns
        .iter()
        .max_by(|x, y| x.max().total_cmp(&y.max()));
    let max_residual = worst.map_or(0.0, |c| c.max());
    ConstraintReport {
        worst_column: worst.map(|c| (c.a, c.b)),
        pass: max_residual <= CONSTRAINT_TOLERANCE,
        max_residual,
        columns,
    }
}

/// Largest deviation of `sum_k values[k] * moment(pairs[k])` from
/// `(1, x, x x^T)`: the constant, linear and quadratic precision identities
/// for `mu` (all pairs) or `xi` (the first `2n` pairs), in unit-diameter
/// coordinates.
pub fn moment_residual(polygon: &Polygon, pairs: &[(usize, usize)], values: &[f64], x: &Vec2) -> f64 {
    let (unit, scaling) = polygon.normalized();
    let v = unit.vertices();
    let mut sum = Moment::zero();
    for (&(a, b), &c) in pairs.iter().zip(values) {
        sum.add_scaled(&Moment::of_pair(v, a, b), c);
    }
    let y = scaling.apply(x);
    let target = Moment {
        mass: 1.0,
        first: y,
        second: y * y.transpose(),
    };
    let (c, l, q) = sum.residual(&target);
    c.max(l).max(q)
}

/// Largest error in reproducing `1, x, y, x^2, xy, y^2` (unit-diameter
/// coordinates) by nodal interpolation with the given `psi` values.
pub fn psi_reproduction_residual(polygon: &Polygon, nodes: &[Vec2], psi: &[f64], x: &Vec2) -> f64 {
    let (_, scaling) = polygon.normalized();
    let monomials = |p: &Vec2| {
        let q = scaling.apply(p);
        [1.0, q.x, q.y, q.x * q.x, q.x * q.y, q.y * q.y]
    };
    let mut sum = [0.0; 6];
    for (node, &w) in nodes.iter().zip(psi) {
        for (s, m) in sum.iter_mut().zip(monomials(node)) {
            *s += w * m;
        }
    }
    sum.iter()
        .zip(monomials(x))
        .map(|(s, m)| (s - m).abs())
        .fold(0.0, f64::max)
}

fn unit_epsilon(polygon: &Polygon, conditions: &ShapeConditions) -> Result<f64> {
    if conditions.epsilon_star.is_nan() || conditions.epsilon_star <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "epsilon* must be positive, got {}",
            conditions.epsilon_star
        )));
    }
    Ok(conditions.epsilon_star / polygon.diameter())
}

/// `max((4 - 4e) / (1 + 2e), 2 / (1 + 2e), 1)` with `e = epsilon* / diam`.
pub fn coefficient_bound(polygon: &Polygon, conditions: &ShapeConditions) -> Result<f64> {
    let e = unit_epsilon(polygon, conditions)?;
    Ok(((4.0 - 4.0 * e) / (1.0 + 2.0 * e)).max(2.0 / (1.0 + 2.0 * e)).max(1.0))
}

/// `max(1/e - 1, 1/(2e), 1)` with `e = epsilon* / diam`.
///
/// Each endpoint's neighbour line crosses the diagonal at least `epsilon*`
/// inside it, so `d_a + d_b <= 2 - 2e / ell` with `ell <= 1/2` in unit
/// diameter. This gives `s <= 1/(2e)` and `|c^{aa}| = s (1 + d_a) <=
/// 1/e - 1`.
pub fn corrected_coefficient_bound(polygon: &Polygon, conditions: &ShapeConditions) -> Result<f64> {
    let e = unit_epsilon(polygon, conditions)?;
    Ok((1.0 / e - 1.0).max(0.5 / e).max(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{check_conditions, ShapeThresholds};
    use crate::serendipity::{build_map, StrategyChoice};

    fn conditions_with(eps_unit: f64, polygon: &Polygon) -> ShapeConditions {
        let mut c = check_conditions(polygon, &ShapeThresholds::new(10.0, 0.1, 2.0).unwrap()).unwrap();
        c.epsilon_star = eps_unit * polygon.diameter();
        c
    }

    #[test]
    fn bound_values() {
        let sq = Polygon::unit_square();
        assert_close!(coefficient_bound(&sq, &conditions_with(0.25, &sq)).unwrap(), 2.0, 1e-15);
        assert_close!(coefficient_bound(&sq, &conditions_with(1e-300, &sq)).unwrap(), 4.0, 1e-12);
        assert!(coefficient_bound(&sq, &conditions_with(0.0, &sq)).is_err());
        assert_close!(corrected_coefficient_bound(&sq, &conditions_with(0.25, &sq)).unwrap(), 3.0, 1e-15);
    }

    #[test]
    fn square_map_is_exact() {
        let report = verify_constraints(&Polygon::unit_square(), &SerendipityMap::unit_square());
        assert!(report.max_residual <= 1e-14);
        assert!(report.pass);
    }

    #[test]
    fn corrupted_column_is_identified() {
        let polygon = Polygon::regular(6, 1.0).unwrap();
        let mut map = build_map(&polygon, StrategyChoice::Auto).unwrap();
        let target = (map.diagonals()[4].a, map.diagonals()[4].b);
        map.diagonals_mut()[4].edge_after_b += 1e-3;
        let report = verify_constraints(&polygon, &map);
        assert!(!report.pass);
        assert_eq!(report.worst_column, Some(target));
    }

    #[test]
    fn hexagon_long_diagonal_exceeds_closed_form_bound() {
        // regular hexagon, diagonal {0, 3}: d_a = d_b = 1/2, s = 2, c^{aa} = -3
        let hex = Polygon::regular(6, 1.0).unwrap();
        let side = hex.edge_length(0);
        let thresholds = ShapeThresholds::new(10.0, side, 2.0 * std::f64::consts::PI / 3.0 + 0.01).unwrap();
        let conditions = check_conditions(&hex, &thresholds).unwrap();
        let generic = SerendipityMap::generic(&hex).unwrap();
        let long = generic.diagonals().iter().find(|c| (c.a, c.b) == (0, 3)).unwrap();
        assert_close!(long.vertex_a, -3.0, 1e-12);
        let closed_form = coefficient_bound(&hex, &conditions).unwrap();
        assert!(closed_form < 2.1);
        assert!(generic.max_coefficient() > closed_form);
        assert!(generic.max_coefficient() <= corrected_coefficient_bound(&hex, &conditions).unwrap());
    }
}
