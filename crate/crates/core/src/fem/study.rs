use serde::Serialize;

use super::mesh::trapezoid_mesh;
use super::space::{ErrorNorms, FemSpace};
use crate::barycentric::CoordinateKind;
use crate::error::{Error, Result};
use crate::geometry::Vec2;
use crate::linalg::CgOptions;
use crate::quadrature::{DEFAULT_ASSEMBLY_DEGREE, DEFAULT_NORM_DEGREE};

/// Poisson problem `-laplace u = f` with exact solution `u`, used both for
/// the Dirichlet data and for the error norms.
#[derive(Clone, Copy)]
pub struct Problem {
    pub name: &'static str,
    pub u: fn(&Vec2) -> f64,
    pub grad_u: fn(&Vec2) -> Vec2,
    pub source: fn(&Vec2) -> f64,
}

impl Problem {
    /// `u = sin(x) e^y`, harmonic.
    pub fn sin_exp() -> Self {
        Problem {
            name: "sin(x)exp(y)",
            u: |p| p.x.sin() * p.y.exp(),
            grad_u: |p| Vec2::new(p.x.cos() * p.y.exp(), p.x.sin() * p.y.exp()),
            source: |_| 0.0,
        }
    }

    pub fn x_squared() -> Self {
        Problem {
            name: "x^2",
            u: |p| p.x * p.x,
            grad_u: |p| Vec2::new(2.0 * p.x, 0.0),
            source: |_| -2.0,
        }
    }

    pub fn xy() -> Self {
        Problem {
            name: "xy",
            u: |p| p.x * p.y,
            grad_u: |p| Vec2::new(p.y, p.x),
            source: |_| 0.0,
        }
    }

    pub fn y_squared() -> Self {
        Problem {
            name: "y^2",
            u: |p| p.y * p.y,
            grad_u: |p| Vec2::new(0.0, 2.0 * p.y),
            source: |_| -2.0,
        }
    }

    pub fn quadratics() -> [Self; 3] {
        [Self::x_squared(), Self::xy(), Self::y_squared()]
    }

    /// Assemble, solve with Dirichlet data from `u`, and measure the error.
    pub fn solve_on(
        &self,
        space: &FemSpace,
        assembly_degree: usize,
        norm_degree: usize,
        cg: &CgOptions,
    ) -> Result<(ErrorNorms, usize)> {
        let system = space.assemble(&self.source, assembly_degree)?;
        let solution = space.solve_dirichlet(&system, &self.u, cg)?;
        let norms = space.error_norms(&solution.coefficients, &self.u, &self.grad_u, norm_degree)?;
        Ok((norms, solution.iterations))
    }
}

#[derive(Clone, Debug)]
pub struct StudyConfig {
    pub levels: Vec<usize>,
    pub kind: CoordinateKind,
    pub offset: f64,
    pub assembly_degree: usize,
    pub norm_degree: usize,
    pub cg: CgOptions,
}

impl Default for StudyConfig {
    fn default() -> Self {
        StudyConfig {
            levels: vec![2, 4, 8, 16, 32, 64],
            kind: CoordinateKind::MeanValue,
            offset: 0.25,
            assembly_degree: DEFAULT_ASSEMBLY_DEGREE,
            norm_degree: DEFAULT_NORM_DEGREE,
            cg: CgOptions::default(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct StudyRow {
    pub n: usize,
    pub dofs: usize,
    pub l2_error: f64,
    pub l2_rate: Option<f64>,
    pub h1_error: f64,
    pub h1_rate: Option<f64>,
    pub cg_iterations: usize,
}

/// Errors on the trapezoid meshes of each level with rates
/// `log2(e_{n/2} / e_n)`. Levels must double.
pub fn convergence_study(config: &StudyConfig, problem: &Problem) -> Result<Vec<StudyRow>> {
    if config.levels.is_empty() {
        return Err(Error::InvalidArgument("no levels given".into()));
    }
    if config.levels.windows(2).any(|w| w[1] != 2 * w[0]) {
        return Err(Error::InvalidArgument(format!(
            "levels must double at each step: {:?}",
            config.levels
        )));
    }
    let mut rows: Vec<StudyRow> = Vec::with_capacity(config.levels.len());
    for &n in &config.levels {
        let space = FemSpace::new(trapezoid_mesh(n, config.offset)?, config.kind)?;
        let (norms, iterations) = problem.solve_on(&space, config.assembly_degree, config.norm_degree, &config.cg)?;
        let rate = |previous: Option<f64>, current: f64| previous.map(|p| (p / current).log2());
        let last = rows.last();
        rows.push(StudyRow {
            n,
            dofs: space.dofs().len(),
            l2_rate: rate(last.map(|r| r.l2_error), norms.l2_error),
            h1_rate: rate(last.map(|r| r.h1_error), norms.h1_semi_error),
            l2_error: norms.l2_error,
            h1_error: norms.h1_semi_error,
            cg_iterations: iterations,
        });
    }
    Ok(rows)
}

fn fmt_rate(rate: Option<f64>) -> String {
    rate.map(|r| format!("{r:.2}")).unwrap_or_default()
}

/// CSV with header `n,dofs,l2_error,l2_rate,h1_error,h1_rate`; rates are
/// empty on the first row.
pub fn table_csv(rows: &[StudyRow]) -> String {
    let mut out = String::from("n,dofs,l2_error,l2_rate,h1_error,h1_rate\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{:.6e},{},{:.6e},{}\n",
            r.n,
            r.dofs,
            r.l2_error,
            fmt_rate(r.l2_rate),
            r.h1_error,
            fmt_rate(r.h1_rate)
        ));
    }
    out
}

pub fn table_markdown(rows: &[StudyRow]) -> String {
    let mut out = String::from("| n | dofs | L2 error | rate | H1 error | rate |\n|---|---|---|---|---|---|\n");
    for r in rows {
        out.push_str(&format!(
            "| {} | {} | {:.2e} | {} | {:.2e} | {} |\n",
            r.n,
            r.dofs,
            r.l2_error,
            fmt_rate(r.l2_rate),
            r.h1_error,
            fmt_rate(r.h1_rate)
        ));
    }
    out
}
