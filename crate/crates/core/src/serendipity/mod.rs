//! The reduction `xi = A mu` and the Lagrange transform `psi = B xi`.
//!
//! Rows of `A` (and of `B`) are ordered as the `2n` vertex and edge pairs of
//! [`IndexSets`]; columns of `A` follow the full pair ordering. `A = [I | A']`,
//! and each diagonal column of `A'` has six nonzeros: both diagonal endpoints
//! and the four boundary edges incident to them.

mod builders;
mod element;
mod verify;

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Polygon;
use crate::index::IndexSets;

pub use builders::{is_regular, regular_coefficients};
pub use element::{BoundaryEval, SerendipityElement, SerendipityEval};
pub use verify::{
    coefficient_bound, corrected_coefficient_bound, moment_residual, psi_reproduction_residual,
    verify_constraints, ColumnResidual, ConstraintReport, CONSTRAINT_TOLERANCE,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// No diagonals: `A` is the identity.
    Triangle,
    UnitSquare,
    RegularPolygon,
    Quadrilateral,
    Generic,
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Triangle => "triangle",
            Strategy::UnitSquare => "unit-square",
            Strategy::RegularPolygon => "regular",
            Strategy::Quadrilateral => "quadrilateral",
            Strategy::Generic => "generic",
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum StrategyChoice {
    #[default]
    Auto,
    Forced(Strategy),
}

impl FromStr for StrategyChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "auto" => StrategyChoice::Auto,
            "triangle" => StrategyChoice::Forced(Strategy::Triangle),
            "unit-square" | "square" => StrategyChoice::Forced(Strategy::UnitSquare),
            "regular" | "regular-polygon" => StrategyChoice::Forced(Strategy::RegularPolygon),
            "quadrilateral" | "quad" => StrategyChoice::Forced(Strategy::Quadrilateral),
            "generic" => StrategyChoice::Forced(Strategy::Generic),
            _ => return Err(Error::InvalidArgument(format!("unknown strategy `{s}`"))),
        })
    }
}

/// Construction data kept alongside one diagonal column.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DiagonalAux {
    None,
    /// Half of the central angle subtended by the diagonal.
    Regular { theta: f64 },
    /// Normalized x-intercept of the line through the other two vertices.
    Quadrilateral { d: f64 },
    Generic {
        d_a: f64,
        d_b: f64,
        s: f64,
        half_length: f64,
        /// Largest x-component mismatch of the two edge-pair combinations,
        /// relative to the half length.
        consistency: f64,
    },
}

/// The six nonzero entries of the `A'` column for the diagonal `{a, b}`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalCoefficients {
    pub a: usize,
    pub b: usize,
    pub vertex_a: f64,
    pub vertex_b: f64,
    /// Edge `(a-1, a)`.
    pub edge_before_a: f64,
    /// Edge `(a, a+1)`.
    pub edge_after_a: f64,
    /// Edge `(b-1, b)`.
    pub edge_before_b: f64,
    /// Edge `(b, b+1)`.
    pub edge_after_b: f64,
    pub aux: DiagonalAux,
}

impl DiagonalCoefficients {
    /// `(row, coefficient)` pairs in the row ordering of `A`.
    pub fn entries(&self, n: usize) -> [(usize, f64); 6] {
        let (a, b) = (self.a, self.b);
        [
            (a, self.vertex_a),
            (b, self.vertex_b),
            (n + (a + n - 1) % n, self.edge_before_a),
            (n + a, self.edge_after_a),
            (n + (b + n - 1) % n, self.edge_before_b),
            (n + b, self.edge_after_b),
        ]
    }

    pub fn max_abs(&self) -> f64 {
        [
            self.vertex_a,
            self.vertex_b,
            self.edge_before_a,
            self.edge_after_a,
            self.edge_before_b,
            self.edge_after_b,
        ]
        .iter()
        .fold(0.0f64, |m, c| m.max(c.abs()))
    }
}

/// `A` (identity block plus one sparse column per diagonal) and the fixed
/// `B` for an `n`-gon.
#[derive(Clone, Debug)]
pub struct SerendipityMap {
    strategy: Strategy,
    index: IndexSets,
    diagonals: Vec<DiagonalCoefficients>,
}

impl SerendipityMap {
    fn from_diagonals(n: usize, strategy: Strategy, diagonals: Vec<DiagonalCoefficients>) -> Result<Self> {
        let index = IndexSets::new(n)?;
        debug_assert_eq!(diagonals.len(), index.diagonal_pairs().len());
        Ok(SerendipityMap {
            strategy,
            index,
            diagonals,
        })
    }

    pub fn identity(n: usize) -> Result<Self> {
        if n != 3 {
            return Err(Error::StrategyMismatch {
                strategy: Strategy::Triangle.to_string(),
                reason: format!("{n}-gon has diagonals"),
            });
        }
        Self::from_diagonals(n, Strategy::Triangle, Vec::new())
    }

    pub fn n(&self) -> usize {
        self.index.n()
    }

    /// Number of basis functions, `2n`.
    pub fn dim(&self) -> usize {
        2 * self.n()
    }

    pub fn strategy(&self) -> Strategy {
        self.strategy
    }

    pub fn index(&self) -> &IndexSets {
        &self.index
    }

    /// One entry per diagonal pair, in the column order of `A`.
    pub fn diagonals(&self) -> &[DiagonalCoefficients] {
        &self.diagonals
    }

    pub fn diagonals_mut(&mut self) -> &mut [DiagonalCoefficients] {
        &mut self.diagonals
    }

    /// Dense `2n x n(n+1)/2` matrix `A`.
    pub fn a_matrix(&self) -> DMatrix<f64> {
        let n = self.n();
        let mut a = DMatrix::zeros(2 * n, self.index.len());
        for i in 0..2 * n {
            a[(i, i)] = 1.0;
        }
        for (k, diag) in self.diagonals.iter().enumerate() {
            for (row, c) in diag.entries(n) {
                a[(row, 2 * n + k)] += c;
            }
        }
        a
    }

    /// Dense `2n x 2n` matrix `B`.
    pub fn b_matrix(&self) -> DMatrix<f64> {
        lagrange_transform(self.n())
    }

    /// `A y` for a vector of pair quantities in column order.
    pub fn apply_a<T>(&self, pairs: &[T]) -> Vec<T>
    where
        T: Copy + std::ops::AddAssign + std::ops::Mul<f64, Output = T>,
    {
        let n = self.n();
        let mut out = pairs[..2 * n].to_vec();
        for (k, diag) in self.diagonals.iter().enumerate() {
            let y = pairs[2 * n + k];
            for (row, c) in diag.entries(n) {
                out[row] += y * c;
            }
        }
        out
    }

    /// `B y` for a vector of `xi` quantities.
    pub fn apply_b<T>(&self, xi: &[T]) -> Vec<T>
    where
        T: Copy + std::ops::Sub<Output = T> + std::ops::Mul<f64, Output = T>,
    {
        let n = self.n();
        let mut out = Vec::with_capacity(2 * n);
        for i in 0..n {
            out.push(xi[i] - xi[n + i] - xi[n + (i + n - 1) % n]);
        }
        for i in 0..n {
            out.push(xi[n + i] * 4.0);
        }
        out
    }

    /// Largest `|c|` over all diagonal columns.
    pub fn max_coefficient(&self) -> f64 {
        self.diagonals.iter().fold(0.0f64, |m, d| m.max(d.max_abs()))
    }

    /// Maximum absolute row sum of `A`.
    pub fn a_norm(&self) -> f64 {
        let a = self.a_matrix();
        a.row_iter()
            .map(|row| row.iter().map(|c| c.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// `A` as CSV, one row per line.
    pub fn a_csv(&self) -> String {
        let a = self.a_matrix();
        let mut out = String::new();
        for row in a.row_iter() {
            let line: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }
}

/// `B`: `psi_ii = xi_ii - xi_{i,i+1} - xi_{i-1,i}`, `psi_{i,i+1} = 4 xi_{i,i+1}`.
pub fn lagrange_transform(n: usize) -> DMatrix<f64> {
    let mut b = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        b[(i, i)] = 1.0;
        b[(i, n + i)] = -1.0;
        b[(i, n + (i + n - 1) % n)] = -1.0;
        b[(n + i, n + i)] = 4.0;
    }
    b
}

/// Map for the polygon under the requested strategy. `Auto` picks the
/// identity for triangles, the quadrilateral construction for `n = 4`, the
/// regular construction for regular polygons and the generic one otherwise.
pub fn build_map(polygon: &Polygon, choice: StrategyChoice) -> Result<SerendipityMap> {
    let n = polygon.n();
    let strategy = match choice {
        StrategyChoice::Forced(s) => s,
        StrategyChoice::Auto => match n {
            3 => Strategy::Triangle,
            4 => Strategy::Quadrilateral,
            _ if is_regular(polygon) => Strategy::RegularPolygon,
            _ => Strategy::Generic,
        },
    };
    let mismatch = |reason: String| Error::StrategyMismatch {
        strategy: strategy.to_string(),
        reason,
    };
    match strategy {
        Strategy::Triangle => SerendipityMap::identity(n),
        Strategy::UnitSquare => {
            if !builders::is_parallelogram(polygon) {
                return Err(mismatch("polygon is not an affine image of the unit square".into()));
            }
            Ok(SerendipityMap::unit_square())
        }
        Strategy::RegularPolygon => {
            if !is_regular(polygon) {
                return Err(mismatch("polygon is not regular".into()));
            }
            SerendipityMap::regular(n)
        }
        Strategy::Quadrilateral => {
            if n != 4 {
                return Err(mismatch(format!("polygon has {n} vertices, not 4")));
            }
            SerendipityMap::quadrilateral(polygon)
        }
        Strategy::Generic => match n {
            3 => SerendipityMap::from_diagonals(3, Strategy::Generic, Vec::new()),
            4 => Err(mismatch("quadrilaterals use the quadrilateral construction".into())),
            _ => SerendipityMap::generic(polygon),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn b_matrix_structure() {
        let b = lagrange_transform(4);
        // psi_00 row: -1 on edges (0,1) and (3,0)
        assert_eq!(b[(0, 0)], 1.0);
        assert_eq!(b[(0, 4)], -1.0);
        assert_eq!(b[(0, 7)], -1.0);
        for n in 3..10 {
            let b = lagrange_transform(n);
            for (i, row) in b.row_iter().enumerate() {
                let sum: f64 = row.iter().map(|v| v.abs()).sum();
                assert_eq!(sum, if i < n { 3.0 } else { 4.0 });
                assert!(row.iter().all(|v| [-1.0, 0.0, 1.0, 4.0].contains(v)));
            }
        }
    }

    #[test]
    fn apply_b_matches_matrix() {
        let map = SerendipityMap::regular(5).unwrap();
        let xi: Vec<f64> = (0..10).map(|i| (i as f64 * 0.7).sin()).collect();
        let dense = map.b_matrix() * nalgebra::DVector::from_vec(xi.clone());
        let applied = map.apply_b(&xi);
        for i in 0..10 {
            assert_close!(applied[i], dense[i], 1e-15);
        }
    }

    #[test]
    fn apply_a_matches_matrix() {
        let map = SerendipityMap::regular(7).unwrap();
        let mu: Vec<f64> = (0..28).map(|i| (i as f64 * 0.3).cos()).collect();
        let dense = map.a_matrix() * nalgebra::DVector::from_vec(mu.clone());
        let applied = map.apply_a(&mu);
        for i in 0..14 {
            assert_close!(applied[i], dense[i], 1e-14);
        }
    }

    #[test]
    fn auto_dispatch() {
        let tri = Polygon::from_coords(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap();
        let map = build_map(&tri, StrategyChoice::Auto).unwrap();
        assert_eq!(map.strategy(), Strategy::Triangle);
        assert_eq!(map.a_matrix(), DMatrix::identity(6, 6));
        let map = build_map(&Polygon::unit_square(), StrategyChoice::Auto).unwrap();
        assert_eq!(map.strategy(), Strategy::Quadrilateral);
        let map = build_map(&Polygon::regular(7, 2.0).unwrap(), StrategyChoice::Auto).unwrap();
        assert_eq!(map.strategy(), Strategy::RegularPolygon);
        let map = build_map(&Polygon::degenerate_pentagon(), StrategyChoice::Auto).unwrap();
        assert_eq!(map.strategy(), Strategy::Generic);
    }

    #[test]
    fn forced_mismatches() {
        let forced = |s| StrategyChoice::Forced(s);
        let sq = Polygon::unit_square();
        assert!(matches!(build_map(&sq, forced(Strategy::Generic)), Err(Error::StrategyMismatch { .. })));
        let pent = Polygon::degenerate_pentagon();
        for s in [Strategy::RegularPolygon, Strategy::Quadrilateral, Strategy::UnitSquare, Strategy::Triangle] {
            assert!(matches!(build_map(&pent, forced(s)), Err(Error::StrategyMismatch { .. })));
        }
        let kite = Polygon::from_coords(&[[0.0, 0.0], [2.0, -1.0], [3.0, 0.0], [2.0, 1.0]]).unwrap();
        assert!(build_map(&kite, forced(Strategy::UnitSquare)).is_err());
        let para = Polygon::from_coords(&[[0.0, 0.0], [2.0, 0.0], [3.0, 1.0], [1.0, 1.0]]).unwrap();
        assert_eq!(
            build_map(&para, forced(Strategy::UnitSquare)).unwrap().strategy(),
            Strategy::UnitSquare
        );
    }

    #[test]
    fn strategy_parsing() {
        assert_eq!("auto".parse::<StrategyChoice>().unwrap(), StrategyChoice::Auto);
        assert_eq!(
            "unit-square".parse::<StrategyChoice>().unwrap(),
            StrategyChoice::Forced(Strategy::UnitSquare)
        );
        assert!("best".parse::<StrategyChoice>().is_err());
        for s in [
            Strategy::Triangle,
            Strategy::UnitSquare,
            Strategy::RegularPolygon,
            Strategy::Quadrilateral,
            Strategy::Generic,
        ] {
            assert_eq!(s.to_string().parse::<StrategyChoice>().unwrap(), StrategyChoice::Forced(s));
        }
    }
}
