use nalgebra::DMatrix;

use super::{build_map, SerendipityMap, StrategyChoice};
use crate::barycentric::{eval_boundary, pairwise, pairwise_values, BarycentricCoordinates, CoordinateKind};
use crate::error::{Error, Result};
use crate::geometry::{Polygon, Vec2};

/// `xi` and `psi` with gradients at an interior point.
#[derive(Clone, Debug)]
pub struct SerendipityEval {
    pub point: Vec2,
    pub xi_values: Vec<f64>,
    pub xi_gradients: Vec<Vec2>,
    pub psi_values: Vec<f64>,
    pub psi_gradients: Vec<Vec2>,
}

/// Values on the boundary, from the exact edge traces of the coordinates.
#[derive(Clone, Debug)]
pub struct BoundaryEval {
    pub xi_values: Vec<f64>,
    pub psi_values: Vec<f64>,
}

/// Barycentric coordinates and a reduction map on one polygon.
#[derive(Clone, Debug)]
pub struct SerendipityElement {
    coords: BarycentricCoordinates,
    map: SerendipityMap,
}

impl SerendipityElement {
    pub fn new(polygon: &Polygon, kind: CoordinateKind, strategy: StrategyChoice) -> Result<Self> {
        let map = build_map(polygon, strategy)?;
        Self::from_parts(BarycentricCoordinates::new(polygon, kind)?, map)
    }

    pub fn from_parts(coords: BarycentricCoordinates, map: SerendipityMap) -> Result<Self> {
        if coords.polygon().n() != map.n() {
            return Err(Error::InvalidArgument(format!(
                "map for {}-gon used on a {}-gon",
                map.n(),
                coords.polygon().n()
            )));
        }
        Ok(SerendipityElement { coords, map })
    }

    pub fn polygon(&self) -> &Polygon {
        self.coords.polygon()
    }

    pub fn coords(&self) -> &BarycentricCoordinates {
        &self.coords
    }

    pub fn map(&self) -> &SerendipityMap {
        &self.map
    }

    pub fn kind(&self) -> CoordinateKind {
        self.coords.kind()
    }

    pub fn n(&self) -> usize {
        self.map.n()
    }

    /// Number of basis functions, `2n`.
    pub fn dim(&self) -> usize {
        self.map.dim()
    }

    /// Vertices followed by edge midpoints; node `k` is where `psi_k` is 1.
    pub fn nodes(&self) -> Vec<Vec2> {
        let p = self.polygon();
        (0..p.n())
            .map(|i| p.vertex(i))
            .chain((0..p.n()).map(|i| p.edge_midpoint(i)))
            .collect()
    }

    pub fn eval(&self, x: &Vec2) -> Result<SerendipityEval> {
        let lambda = self.coords.eval(x)?;
        let mu = pairwise(self.coords.index(), &lambda);
        let xi_values = self.map.apply_a(&mu.values);
        let xi_gradients = self.map.apply_a(&mu.gradients);
        let psi_values = self.map.apply_b(&xi_values);
        let psi_gradients = self.map.apply_b(&xi_gradients);
        Ok(SerendipityEval {
            point: *x,
            xi_values,
            xi_gradients,
            psi_values,
            psi_gradients,
        })
    }

    /// Values at `(1 - t) v_i + t v_{i+1}`.
    pub fn eval_boundary(&self, edge: usize, t: f64) -> Result<BoundaryEval> {
        let lambda = eval_boundary(self.polygon(), edge, t)?;
        let mu = pairwise_values(self.coords.index(), &lambda);
        let xi_values = self.map.apply_a(&mu);
        let psi_values = self.map.apply_b(&xi_values);
        Ok(BoundaryEval { xi_values, psi_values })
    }

    /// `psi` at node `k` (see [`nodes`](Self::nodes)).
    pub fn eval_at_node(&self, k: usize) -> Result<Vec<f64>> {
        let n = self.n();
        if k >= 2 * n {
            return Err(Error::IndexOutOfRange { index: k, len: 2 * n });
        }
        let (edge, t) = if k < n { (k, 0.0) } else { (k - n, 0.5) };
        Ok(self.eval_boundary(edge, t)?.psi_values)
    }

    /// Entry `(k, j)` is `psi_j` at node `k`.
    pub fn nodal_table(&self) -> DMatrix<f64> {
        let m = self.dim();
        let mut table = DMatrix::zeros(m, m);
        for k in 0..m {
            let row = self.eval_at_node(k).expect("node index in range");
            for (j, v) in row.into_iter().enumerate() {
                table[(k, j)] = v;
            }
        }
        table
    }
}
