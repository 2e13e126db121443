use rayon::prelude::*;

use super::dofs::DofMap;
use super::mesh::PolyMesh;
use crate::barycentric::CoordinateKind;
use crate::error::Result;
use crate::geometry::Vec2;
use crate::linalg::{cg_solve, CgOptions, SparseMatrix};
use crate::quadrature::{polygon_rule_from, triangle_rule};
use crate::serendipity::{SerendipityElement, StrategyChoice};

/// Serendipity space on a mesh: one element per cell plus the global DOF
/// numbering.
#[derive(Clone, Debug)]
pub struct FemSpace {
    mesh: PolyMesh,
    dofs: DofMap,
    elements: Vec<SerendipityElement>,
}

/// Global stiffness matrix and load vector over all DOFs.
#[derive(Clone, Debug)]
pub struct LinearSystem {
    pub matrix: SparseMatrix,
    pub rhs: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct DiscreteSolution {
    pub coefficients: Vec<f64>,
    pub iterations: usize,
    pub relative_residual: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrorNorms {
    pub l2_error: f64,
    pub h1_semi_error: f64,
}

impl FemSpace {
    pub fn new(mesh: PolyMesh, kind: CoordinateKind) -> Result<Self> {
        Self::with_strategy(mesh, kind, StrategyChoice::Auto)
    }

    pub fn with_strategy(mesh: PolyMesh, kind: CoordinateKind, strategy: StrategyChoice) -> Result<Self> {
        let elements = (0..mesh.n_cells())
            .into_par_iter()
            .map(|c| SerendipityElement::new(&mesh.cell_polygon(c)?, kind, strategy))
            .collect::<Result<Vec<_>>>()?;
        let dofs = DofMap::new(&mesh);
        Ok(FemSpace { mesh, dofs, elements })
    }

    pub fn mesh(&self) -> &PolyMesh {
        &self.mesh
    }

    pub fn dofs(&self) -> &DofMap {
        &self.dofs
    }

    pub fn element(&self, c: usize) -> &SerendipityElement {
        &self.elements[c]
    }

    /// Stiffness `int grad psi_p . grad psi_q` and load `int f psi_p`.
    /// Cells are integrated in parallel; their triplets are concatenated
    /// before the sparse matrix is formed.
    pub fn assemble(&self, source: &(dyn Fn(&Vec2) -> f64 + Sync), degree: usize) -> Result<LinearSystem> {
        let reference = triangle_rule(degree)?;
        let per_cell = self
            .elements
            .par_iter()
            .enumerate()
            .map(|(c, element)| {
                let m = element.dim();
                let rule = polygon_rule_from(element.polygon(), &reference)?;
                let mut k = vec![0.0; m * m];
                let mut f = vec![0.0; m];
                for (x, w) in rule.points.iter().zip(&rule.weights) {
                    let e = element.eval(x)?;
                    let fx = source(x);
                    for p in 0..m {
                        f[p] += w * fx * e.psi_values[p];
                        let gp = e.psi_gradients[p];
                        for q in p..m {
                            k[p * m + q] += w * gp.dot(&e.psi_gradients[q]);
                        }
                    }
                }
                let global = self.dofs.cell_dofs(c);
                let mut triplets = Vec::with_capacity(m * m);
                for p in 0..m {
                    for q in 0..m {
                        let v = if q >= p { k[p * m + q] } else { k[q * m + p] };
                        triplets.push((global[p], global[q], v));
                    }
                }
                let loads: Vec<(usize, f64)> = global.iter().copied().zip(f).collect();
                Ok((triplets, loads))
            })
            .collect::<Result<Vec<_>>>()?;

        let mut rhs = vec![0.0; self.dofs.len()];
        let mut triplets = Vec::with_capacity(per_cell.iter().map(|(t, _)| t.len()).sum());
        for (t, loads) in per_cell {
            triplets.extend(t);
            for (d, v) in loads {
                rhs[d] += v;
            }
        }
        Ok(LinearSystem {
            matrix: SparseMatrix::from_triplets(self.dofs.len(), &triplets)?,
            rhs,
        })
    }

    /// Nodal interpolant: the coefficient of each DOF is `u` at its node.
    pub fn interpolate(&self, u: &dyn Fn(&Vec2) -> f64) -> Vec<f64> {
        self.dofs.nodes().iter().map(u).collect()
    }

    /// Boundary DOFs take `g` at their nodes and are eliminated; the
    /// remaining SPD system is solved by conjugate gradients.
    pub fn solve_dirichlet(
        &self,
        system: &LinearSystem,
        g: &dyn Fn(&Vec2) -> f64,
        options: &CgOptions,
    ) -> Result<DiscreteSolution> {
        let n = self.dofs.len();
        let fixed: Vec<Option<f64>> = (0..n)
            .map(|d| self.dofs.is_boundary(d).then(|| g(&self.dofs.node(d))))
            .collect();
        let free = self.dofs.interior_dofs();
        let (reduced, coupling) = system.matrix.eliminate(&free, &fixed);
        let rhs: Vec<f64> = free.iter().zip(&coupling).map(|(&d, c)| system.rhs[d] - c).collect();
        let (solution, iterations, relative_residual) = if free.is_empty() {
            (Vec::new(), 0, 0.0)
        } else {
            let report = cg_solve(&reduced, &rhs, options)?;
            (report.solution, report.iterations, report.relative_residual)
        };
        let mut coefficients: Vec<f64> = fixed.iter().map(|v| v.unwrap_or(0.0)).collect();
        for (&d, v) in free.iter().zip(solution) {
            coefficients[d] = v;
        }
        Ok(DiscreteSolution {
            coefficients,
            iterations,
            relative_residual,
        })
    }

    /// `u_h` and its gradient at an interior point of cell `c`.
    pub fn eval_in_cell(&self, coefficients: &[f64], c: usize, x: &Vec2) -> Result<(f64, Vec2)> {
        let e = self.elements[c].eval(x)?;
        let mut value = 0.0;
        let mut grad = Vec2::zeros();
        for (k, &d) in self.dofs.cell_dofs(c).iter().enumerate() {
            value += coefficients[d] * e.psi_values[k];
            grad += coefficients[d] * e.psi_gradients[k];
        }
        Ok((value, grad))
    }

    /// `u_h` at `(1 - t) v_i + t v_{i+1}` on local edge `i` of cell `c`.
    pub fn eval_on_cell_edge(&self, coefficients: &[f64], c: usize, edge: usize, t: f64) -> Result<f64> {
        let e = self.elements[c].eval_boundary(edge, t)?;
        Ok(self
            .dofs
            .cell_dofs(c)
            .iter()
            .zip(&e.psi_values)
            .map(|(&d, v)| coefficients[d] * v)
            .sum())
    }

    /// `L2` norm of `u - u_h` and of `grad u - grad u_h`.
    pub fn error_norms(
        &self,
        coefficients: &[f64],
        u: &(dyn Fn(&Vec2) -> f64 + Sync),
        grad_u: &(dyn Fn(&Vec2) -> Vec2 + Sync),
        degree: usize,
    ) -> Result<ErrorNorms> {
        let reference = triangle_rule(degree)?;
        let sums = (0..self.elements.len())
            .into_par_iter()
            .map(|c| {
                let rule = polygon_rule_from(self.elements[c].polygon(), &reference)?;
                let mut l2 = 0.0;
                let mut h1 = 0.0;
                for (x, w) in rule.points.iter().zip(&rule.weights) {
                    let (value, grad) = self.eval_in_cell(coefficients, c, x)?;
                    l2 += w * (u(x) - value).powi(2);
                    h1 += w * (grad_u(x) - grad).norm_squared();
                }
                Ok((l2, h1))
            })
            .collect::<Result<Vec<(f64, f64)>>>()?;
        let (l2, h1) = sums.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
        Ok(ErrorNorms {
            l2_error: l2.sqrt(),
            h1_semi_error: h1.sqrt(),
        })
    }
}
