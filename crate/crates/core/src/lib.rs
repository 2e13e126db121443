//! Quadratic serendipity finite elements on convex polygons.
//!
//! Generalized barycentric coordinates `lambda_i` on an `n`-gon give
//! `n(n+1)/2` pairwise products `mu_ab`. A sparse reduction matrix `A` folds the
//! interior-diagonal products into the vertex and edge products, giving `2n`
//! functions `xi` that still reproduce every quadratic polynomial. A fixed
//! matrix `B` turns them into the Lagrange-like basis `psi`, one function per
//! vertex and per edge midpoint.
//!
//! The [`fem`] module uses that basis to solve the Poisson problem on meshes of
//! convex polygons.

#[cfg(test)]
macro_rules! assert_close {
    ($a:expr, $b:expr, $tol:expr) => {{
        let (a, b): (f64, f64) = ($a, $b);
        assert!((a - b).abs() <= $tol, "{} vs {} (tol {:e})", a, b, $tol);
    }};
}

pub mod barycentric;
pub mod corpus;
pub mod error;
pub mod fem;
pub mod geometry;
pub mod index;
pub mod linalg;
pub mod quadrature;
pub mod serendipity;

pub use barycentric::{BarycentricCoordinates, CoordEval, CoordinateKind, PairwiseEval};
pub use error::{Error, Result};
pub use geometry::{Polygon, Vec2};
pub use index::IndexSets;
pub use serendipity::{SerendipityElement, SerendipityMap, Strategy, StrategyChoice};
