//! Command-line front end for polygonal serendipity elements.
//!
//! Exit codes: 0 success, 1 numerical check failed, 2 invalid input,
//! 3 linear solver failure.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use nalgebra::DMatrix;
use polyserendipity::corpus::{random_interior_point, seeded_rng};
use polyserendipity::fem::{convergence_study, table_csv, table_markdown, trapezoid_mesh, Problem, StudyConfig};
use polyserendipity::geometry::PolygonFile;
use polyserendipity::quadrature::{DEFAULT_ASSEMBLY_DEGREE, DEFAULT_NORM_DEGREE};
use polyserendipity::serendipity::{moment_residual, psi_reproduction_residual, verify_constraints, CONSTRAINT_TOLERANCE};
use polyserendipity::{CoordinateKind, Polygon, SerendipityElement, StrategyChoice, Vec2};
use serde::Serialize;

pub const LAGRANGE_TOLERANCE: f64 = 1e-10;
pub const PRECISION_TOLERANCE: f64 = 1e-9;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Numerical(String),
    #[error("{0}")]
    Solver(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Numerical(_) => 1,
            CliError::Input(_) => 2,
            CliError::Solver(_) => 3,
        }
    }
}

impl From<polyserendipity::Error> for CliError {
    fn from(e: polyserendipity::Error) -> Self {
        use polyserendipity::Error as E;
        match e {
            E::NotConverged(_) | E::ZeroDiagonal(_) => CliError::Solver(e.to_string()),
            E::CoefficientBlowup { .. } => CliError::Numerical(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::Input(format!("{}: {e}", path.display()))
}

#[derive(Debug, Parser)]
#[command(name = "polyser", version, about = "Quadratic serendipity elements on convex polygons")]
pub struct Cli {
    /// Worker threads for assembly (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the precision constraints and the Lagrange property on a polygon.
    Verify(VerifyArgs),
    /// Evaluate the basis on a grid and write CSV.
    Sample(SampleArgs),
    /// Poisson convergence study on trapezoid meshes.
    Convergence(ConvergenceArgs),
    /// Write a trapezoid mesh as JSON.
    Meshgen(MeshgenArgs),
}

#[derive(Debug, Args)]
pub struct ElementArgs {
    /// Polygon JSON file `{"vertices": [[x, y], ...]}`, counterclockwise.
    pub polygon: PathBuf,
    /// wachspress, meanvalue or triangulation.
    #[arg(long, default_value = "meanvalue")]
    pub kind: CoordinateKind,
    /// auto, unit-square, regular, quadrilateral, generic or triangle.
    #[arg(long, default_value = "auto")]
    pub strategy: StrategyChoice,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub element: ElementArgs,
    /// Print the report as JSON.
    #[arg(long)]
    pub json: bool,
    /// Write the dense reduction matrix as CSV.
    #[arg(long = "dump-A", value_name = "PATH")]
    pub dump_a: Option<PathBuf>,
    /// Random interior points for the precision check.
    #[arg(long, default_value_t = 50)]
    pub points: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub element: ElementArgs,
    /// Grid points per axis over the bounding box.
    #[arg(long, default_value_t = 21)]
    pub resolution: usize,
    /// Output CSV (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ConvergenceArgs {
    /// Mesh levels, each double the previous.
    #[arg(long, value_delimiter = ',', default_values_t = [2usize, 4, 8, 16, 32, 64])]
    pub levels: Vec<usize>,
    /// Append levels 128 and 256.
    #[arg(long)]
    pub deep: bool,
    #[arg(long, default_value = "meanvalue")]
    pub kind: CoordinateKind,
    #[arg(long, default_value_t = 0.25)]
    pub offset: f64,
    #[arg(long, default_value_t = DEFAULT_ASSEMBLY_DEGREE)]
    pub assembly_degree: usize,
    #[arg(long, default_value_t = DEFAULT_NORM_DEGREE)]
    pub norm_degree: usize,
    /// Output CSV; the markdown table always goes to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MeshgenArgs {
    /// Cells per side.
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0.25)]
    pub offset: f64,
    /// Output JSON (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(cli: Cli, stdout: &mut dyn Write) -> Result<i32, CliError> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Input(format!("thread pool: {e}")))?;
    }
    match cli.command {
        Command::Verify(args) => verify(&args, stdout),
        Command::Sample(args) => sample(&args, stdout),
        Command::Convergence(args) => convergence(&args, stdout),
        Command::Meshgen(args) => meshgen(&args, stdout),
    }
}

pub fn load_polygon(path: &Path) -> Result<Polygon, CliError> {
    let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    Ok(PolygonFile::from_json(&text)?.to_polygon()?)
}

fn write_output(path: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| io_error(p, e)),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Input(format!("stdout: {e}"))),
    }
}

#[derive(Debug, Serialize)]
pub struct VerifyReport {
    pub vertices: usize,
    pub kind: String,
    pub strategy: String,
    pub max_coefficient: f64,
    pub constraint_residual: f64,
    pub worst_column: Option<(usize, usize)>,
    pub lagrange_deviation: f64,
    pub precision_residual: f64,
    pub reproduction_residual: f64,
    pub points: usize,
    pub pass: bool,
}

pub fn verify_element(element: &SerendipityElement, points: usize, seed: u64) -> Result<VerifyReport, CliError> {
    let polygon = element.polygon();
    let constraints = verify_constraints(polygon, element.map());
    let table = element.nodal_table();
    let lagrange_deviation = (table - DMatrix::<f64>::identity(element.dim(), element.dim())).amax();

    let mut rng = seeded_rng(seed);
    let nodes = element.nodes();
    let xi_pairs = &element.map().index().pairs()[..element.dim()];
    let mut precision: f64 = 0.0;
    let mut reproduction: f64 = 0.0;
    for _ in 0..points {
        let x = random_interior_point(&mut rng, polygon, 1e-6);
        let e = element.eval(&x)?;
        precision = precision.max(moment_residual(polygon, xi_pairs, &e.xi_values, &x));
        reproduction = reproduction.max(psi_reproduction_residual(polygon, &nodes, &e.psi_values, &x));
    }
    let pass = constraints.max_residual <= CONSTRAINT_TOLERANCE
        && lagrange_deviation <= LAGRANGE_TOLERANCE
        && precision <= PRECISION_TOLERANCE
        && reproduction <= PRECISION_TOLERANCE;
    Ok(VerifyReport {
        vertices: polygon.n(),
        kind: element.kind().to_string(),
        strategy: element.map().strategy().to_string(),
        max_coefficient: element.map().max_coefficient(),
        constraint_residual: constraints.max_residual,
        worst_column: constraints.worst_column,
        lagrange_deviation,
        precision_residual: precision,
        reproduction_residual: reproduction,
        points,
        pass,
    })
}

fn verify(args: &VerifyArgs, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let polygon = load_polygon(&args.element.polygon)?;
    let element = SerendipityElement::new(&polygon, args.element.kind, args.element.strategy)?;
    if let Some(path) = &args.dump_a {
        fs::write(path, element.map().a_csv()).map_err(|e| io_error(path, e))?;
    }
    let report = verify_element(&element, args.points, args.seed)?;
    let text = if args.json {
        serde_json::to_string_pretty(&report).expect("report serializes") + "\n"
    } else {
        let column = report
            .worst_column
            .map(|(a, b)| format!(" (column {a},{b})"))
            .unwrap_or_default();
        format!(
            "polygon: {} vertices, kind {}, strategy {}\n\
             max |coefficient|:   {:.6}\n\
             constraint residual: {:.3e}{column}\n\
             lagrange deviation:  {:.3e}\n\
             precision residual:  {:.3e} ({} points)\n\
             reproduction:        {:.3e}\n\
             {}\n",
            report.vertices,
            report.kind,
            report.strategy,
            report.max_coefficient,
            report.constraint_residual,
            report.lagrange_deviation,
            report.precision_residual,
            report.points,
            report.reproduction_residual,
            if report.pass { "PASS" } else { "FAIL" }
        )
    };
    write_output(None, &text, stdout)?;
    Ok(if report.pass { 0 } else { 1 })
}

/// Grid coordinates `lo + i (hi - lo) / (r - 1)`; a single point sits at the
/// centre.
fn grid_axis(lo: f64, hi: f64, r: usize) -> Vec<f64> {
    match r {
        0 => Vec::new(),
        1 => vec![0.5 * (lo + hi)],
        _ => (0..r).map(|i| lo + (hi - lo) * i as f64 / (r - 1) as f64).collect(),
    }
}

pub fn sample_csv(element: &SerendipityElement, resolution: usize) -> Result<String, CliError> {
    let m = element.dim();
    let mut out = String::from("x,y");
    for k in 1..=m {
        out.push_str(&format!(",psi_{k}"));
    }
    out.push('\n');
    let (lo, hi) = element.polygon().bounding_box();
    let xs = grid_axis(lo.x, hi.x, resolution);
    let ys = grid_axis(lo.y, hi.y, resolution);
    for &y in &ys {
        for &x in &xs {
            let e = match element.eval(&Vec2::new(x, y)) {
                Ok(e) => e,
                Err(polyserendipity::Error::OutsidePolygon { .. }) => continue,
                Err(e) => return Err(e.into()),
            };
            out.push_str(&format!("{x},{y}"));
            for v in &e.psi_values {
                out.push_str(&format!(",{v}"));
            }
            out.push('\n');
        }
    }
    Ok(out)
}

fn sample(args: &SampleArgs, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let polygon = load_polygon(&args.element.polygon)?;
    let element = SerendipityElement::new(&polygon, args.element.kind, args.element.strategy)?;
    let csv = sample_csv(&element, args.resolution)?;
    write_output(args.out.as_deref(), &csv, stdout)?;
    Ok(0)
}

fn convergence(args: &ConvergenceArgs, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let mut levels = args.levels.clone();
    if args.deep {
        for extra in [128, 256] {
            if !levels.contains(&extra) {
                levels.push(extra);
            }
        }
    }
    let config = StudyConfig {
        levels,
        kind: args.kind,
        offset: args.offset,
        assembly_degree: args.assembly_degree,
        norm_degree: args.norm_degree,
        ..StudyConfig::default()
    };
    let rows = convergence_study(&config, &Problem::sin_exp())?;
    if let Some(path) = &args.out {
        fs::write(path, table_csv(&rows)).map_err(|e| io_error(path, e))?;
    }
    write_output(None, &table_markdown(&rows), stdout)?;
    Ok(0)
}

fn meshgen(args: &MeshgenArgs, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let mesh = trapezoid_mesh(args.n, args.offset)?;
    write_output(args.out.as_deref(), &(mesh.to_json() + "\n"), stdout)?;
    Ok(0)
}
