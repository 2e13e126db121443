//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.
//!
//! `cargo test --test acceptance -- --deep` (or `POLYSER_DEEP=1`) appends
//! the n = 128 and n = 256 levels to the convergence criterion.

mod common;

use std::time::{Duration, Instant};

use common::{fd_gradients, gradient_error};
use nalgebra::DMatrix;
use polyserendipity::corpus::{
    blowup_hexagon, corpus_thresholds, named_corpus, random_convex_polygon, random_interior_point, seeded_rng,
    shape_corpus,
};
use polyserendipity::fem::{convergence_study, mixed_mesh, trapezoid_mesh, FemSpace, Problem, StudyConfig, StudyRow};
use polyserendipity::geometry::check_conditions;
use polyserendipity::linalg::CgOptions;
use polyserendipity::quadrature::{DEFAULT_ASSEMBLY_DEGREE, DEFAULT_NORM_DEGREE};
use polyserendipity::serendipity::{
    build_map, coefficient_bound, corrected_coefficient_bound, moment_residual, DiagonalAux,
};
use polyserendipity::{
    BarycentricCoordinates, CoordinateKind, Polygon, SerendipityElement, SerendipityMap, Strategy,
    StrategyChoice, Vec2,
};
use rayon::prelude::*;

/// Errors for `u = sin(x) e^y` with mean value coordinates on trapezoid
/// meshes: `(n, l2, h1)`.
const REFERENCE_TABLE: [(usize, f64, f64); 8] = [
    (2, 2.34e-3, 2.22e-2),
    (4, 3.03e-4, 6.10e-3),
    (8, 3.87e-5, 1.59e-3),
    (16, 4.88e-6, 4.04e-4),
    (32, 6.13e-7, 1.02e-4),
    (64, 7.67e-8, 2.56e-5),
    (128, 9.59e-9, 6.40e-6),
    (256, 1.20e-9, 1.64e-6),
];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn kinds_for(polygon: &Polygon) -> Vec<CoordinateKind> {
    CoordinateKind::ALL
        .into_iter()
        .filter(|&k| k != CoordinateKind::Wachspress || !polygon.has_flat_vertices())
        .collect()
}

/// Largest Qxi residual over `points` random interior points.
fn xi_residual(polygon: &Polygon, map: &SerendipityMap, kind: CoordinateKind, points: usize, seed: u64) -> f64 {
    let coords = BarycentricCoordinates::new(polygon, kind).expect("coordinates");
    let el = SerendipityElement::from_parts(coords, map.clone()).expect("element");
    let pairs = &map.index().pairs()[..map.dim()];
    let mut rng = seeded_rng(seed);
    (0..points)
        .map(|_| {
            let x = random_interior_point(&mut rng, polygon, 1e-6);
            let e = el.eval(&x).expect("interior point");
            moment_residual(polygon, pairs, &e.xi_values, &x)
        })
        .fold(0.0, f64::max)
}

fn precision_suite() -> Outcome {
    let start = Instant::now();
    let forced = |s| StrategyChoice::Forced(s);
    let mut cases: Vec<(String, Polygon, Vec<StrategyChoice>)> = vec![(
        "unit square".into(),
        Polygon::unit_square(),
        vec![forced(Strategy::UnitSquare), forced(Strategy::Quadrilateral)],
    )];
    let mut rng = seeded_rng(1);
    for k in 0..1000 {
        cases.push((format!("quad {k}"), random_convex_polygon(&mut rng, 4), vec![forced(Strategy::Quadrilateral)]));
    }
    for n in 5..=12 {
        cases.push((
            format!("regular {n}-gon"),
            Polygon::regular(n, 1.0).unwrap(),
            vec![forced(Strategy::RegularPolygon), forced(Strategy::Generic)],
        ));
    }
    for (k, p) in shape_corpus(2, 200, 5..=9).into_iter().enumerate() {
        cases.push((format!("shape {k}"), p, vec![forced(Strategy::Generic)]));
    }
    let results: Vec<(f64, String)> = cases
        .par_iter()
        .enumerate()
        .flat_map_iter(|(i, (name, polygon, strategies))| {
            strategies.iter().flat_map(move |&choice| {
                let map = build_map(polygon, choice).expect("map");
                CoordinateKind::ALL.into_iter().map(move |kind| {
                    let r = xi_residual(polygon, &map, kind, 50, i as u64);
                    (r, format!("{name}, {}, {kind}", map.strategy()))
                })
            })
        })
        .collect();
    let checks = results.len();
    let (worst, at) = results
        .into_iter()
        .fold((0.0, String::new()), |acc, r| if r.0 > acc.0 { r } else { acc });
    let elapsed = start.elapsed();
    outcome(
        worst <= 1e-9 && elapsed < Duration::from_secs(120),
        format!(
            "{checks} polygon/strategy/kind cases x 50 points, max residual {worst:.2e} ({at}), {:.1} s",
            elapsed.as_secs_f64()
        ),
    )
}

fn maps_for(polygon: &Polygon) -> Vec<SerendipityMap> {
    let mut maps = vec![build_map(polygon, StrategyChoice::Auto).expect("map")];
    if polygon.n() >= 5 {
        maps.push(SerendipityMap::generic(polygon).expect("generic map"));
    }
    maps
}

fn lagrange_suite() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut at = String::new();
    let mut checks = 0;
    for named in named_corpus(0) {
        for map in maps_for(&named.polygon) {
            for kind in kinds_for(&named.polygon) {
                let coords = BarycentricCoordinates::new(&named.polygon, kind).expect("coordinates");
                let el = SerendipityElement::from_parts(coords, map.clone()).expect("element");
                let m = el.dim();
                let dev = (el.nodal_table() - DMatrix::<f64>::identity(m, m)).amax();
                checks += 1;
                if dev > worst {
                    worst = dev;
                    at = format!("{}, {}, {kind}", named.name, map.strategy());
                }
            }
        }
    }
    // the diagonal joining the neighbours of the flat vertex has d_a = d_b = 0
    let pentagon = Polygon::degenerate_pentagon();
    let map = SerendipityMap::generic(&pentagon).expect("generic map");
    let column = map.diagonals().iter().find(|c| (c.a, c.b) == (1, 4)).expect("diagonal (1, 4)");
    let (d_a, d_b, s) = match column.aux {
        DiagonalAux::Generic { d_a, d_b, s, .. } => (d_a, d_b, s),
        _ => (f64::NAN, f64::NAN, f64::NAN),
    };
    let flat_ok = d_a.abs() <= 1e-12 && d_b.abs() <= 1e-12 && (s - 1.0).abs() <= 1e-12;
    outcome(
        worst <= 1e-10 && flat_ok,
        format!(
            "{checks} tables, max deviation {worst:.2e} ({at}); degenerate pentagon d = ({d_a:.1e}, {d_b:.1e}), s = {s}"
        ),
    )
}

fn unit_square_exactness() -> Outcome {
    let square = Polygon::unit_square();
    let map = SerendipityMap::quadrilateral(&square).expect("map");
    let mut exact = DMatrix::<f64>::zeros(8, 10);
    for i in 0..8 {
        exact[(i, i)] = 1.0;
    }
    let col02 = [-1.0, 0.0, -1.0, 0.0, 0.5, 0.5, 0.5, 0.5];
    let col13 = [0.0, -1.0, 0.0, -1.0, 0.5, 0.5, 0.5, 0.5];
    for r in 0..8 {
        exact[(r, 8)] = col02[r];
        exact[(r, 9)] = col13[r];
    }
    let a_err = (map.a_matrix() - exact).amax();

    // x^2 y = xi at vertex (1,1) plus xi on edge (1,0)-(1,1);
    // x y^2 = xi at vertex (1,1) plus xi on edge (1,1)-(0,1)
    let coords = BarycentricCoordinates::new(&square, CoordinateKind::Wachspress).unwrap();
    let el = SerendipityElement::from_parts(coords, map).unwrap();
    let mut rng = seeded_rng(3);
    let mut span_err: f64 = 0.0;
    for _ in 0..100 {
        let x = random_interior_point(&mut rng, &square, 1e-6);
        let xi = el.eval(&x).unwrap().xi_values;
        span_err = span_err.max((x.x * x.x * x.y - (xi[2] + xi[4 + 1])).abs());
        span_err = span_err.max((x.x * x.y * x.y - (xi[2] + xi[4 + 2])).abs());
    }
    outcome(
        a_err <= 1e-14 && span_err <= 1e-12,
        format!("A entrywise error {a_err:.1e}; x^2 y and x y^2 reproduction error {span_err:.1e} at 100 points"),
    )
}

fn bound_suite() -> Outcome {
    let mut rng = seeded_rng(4);
    let mut quad_fail = 0;
    let mut max_vertex: f64 = 0.0;
    let (mut edge_lo, mut edge_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for _ in 0..10_000 {
        let p = random_convex_polygon(&mut rng, 4);
        let map = SerendipityMap::quadrilateral(&p).expect("map");
        for c in map.diagonals() {
            let edges = [c.edge_before_a, c.edge_after_a, c.edge_before_b, c.edge_after_b];
            let vertex = c.vertex_a.abs().max(c.vertex_b.abs());
            max_vertex = max_vertex.max(vertex);
            for e in edges {
                edge_lo = edge_lo.min(e);
                edge_hi = edge_hi.max(e);
            }
            if vertex > 2.0 || edges.iter().any(|&e| e <= 0.0 || e >= 1.0) {
                quad_fail += 1;
            }
        }
    }

    let corpus = shape_corpus(5, 200, 5..=9);
    let (mut bound_fail, mut corrected_fail) = (0, 0);
    let mut worst_ratio: f64 = 0.0;
    for p in &corpus {
        let conditions = check_conditions(p, &corpus_thresholds(p)).unwrap();
        let bound = coefficient_bound(p, &conditions).unwrap();
        let max = SerendipityMap::generic(p).expect("generic map").max_coefficient();
        worst_ratio = worst_ratio.max(max / bound);
        if max > bound {
            bound_fail += 1;
        }
        if max > corrected_coefficient_bound(p, &conditions).unwrap() {
            corrected_fail += 1;
        }
    }

    // shrink edge (v2, v3) of the hexagon towards 1e-3 of the diameter
    let mut s_values = Vec::new();
    let mut delta = 0.4;
    loop {
        let p = blowup_hexagon(delta);
        let ratio = p.edge_length(2) / p.diameter();
        let s = SerendipityMap::generic(&p)
            .map(|m| {
                m.diagonals()
                    .iter()
                    .filter_map(|c| match c.aux {
                        DiagonalAux::Generic { s, .. } => Some(s),
                        _ => None,
                    })
                    .fold(0.0, f64::max)
            })
            .unwrap_or(f64::INFINITY);
        s_values.push((ratio, s));
        if ratio <= 1e-3 {
            break;
        }
        delta *= 0.5;
    }
    let monotone = s_values.windows(2).all(|w| w[1].1 > w[0].1);
    let (last_ratio, last_s) = *s_values.last().unwrap();
    let blowup_ok = monotone && last_s > 10.0;

    outcome(
        quad_fail == 0 && bound_fail == 0 && blowup_ok,
        format!(
            "quads: {quad_fail} violations, edge coefficients in [{edge_lo:.2e}, {edge_hi:.6}], max |c^aa| {max_vertex:.3}; \
             generic: {bound_fail}/{} polygons above coefficient_bound (worst ratio {worst_ratio:.3}), \
             {corrected_fail} above corrected_coefficient_bound; \
             blowup: s = {} at edge/diam = {last_ratio:.1e}, monotone {monotone}",
            corpus.len(),
            format_s(last_s)
        ),
    )
}

fn format_s(s: f64) -> String {
    if s.is_finite() {
        format!("{s:.1}")
    } else {
        "inf".into()
    }
}

fn gradient_suite() -> Outcome {
    let results: Vec<(f64, String, usize)> = named_corpus(0)
        .par_iter()
        .flat_map_iter(|named| {
            kinds_for(&named.polygon).into_iter().map(move |kind| {
                let p = &named.polygon;
                let el = SerendipityElement::new(p, kind, StrategyChoice::Auto).expect("element");
                let h = 1e-6 * p.diameter();
                let scale = 1.0 / p.diameter();
                let stencil = [Vec2::new(h, 0.0), Vec2::new(-h, 0.0), Vec2::new(0.0, h), Vec2::new(0.0, -h)];
                let mut rng = seeded_rng(6);
                let mut worst: f64 = 0.0;
                let mut skipped = 0;
                for _ in 0..20 {
                    let x = random_interior_point(&mut rng, p, 1e-3);
                    let lambda = el.coords().eval(&x).unwrap();
                    if kind == CoordinateKind::Triangulation {
                        // piecewise linear: skip stencils crossing a fan edge
                        let kink = stencil.iter().any(|d| {
                            let g = el.coords().eval(&(x + d)).unwrap().gradients;
                            gradient_error(&g, &lambda.gradients, scale) > 0.0
                        });
                        if kink {
                            skipped += 1;
                            continue;
                        }
                    }
                    let fd = fd_gradients(&|y| el.coords().eval(y).unwrap().values, &x, h);
                    worst = worst.max(gradient_error(&lambda.gradients, &fd, scale));
                    let mu = el.coords().eval_pairwise(&x).unwrap();
                    let fd = fd_gradients(&|y| el.coords().eval_pairwise(y).unwrap().values, &x, h);
                    worst = worst.max(gradient_error(&mu.gradients, &fd, scale));
                    let psi = el.eval(&x).unwrap();
                    let fd = fd_gradients(&|y| el.eval(y).unwrap().psi_values, &x, h);
                    worst = worst.max(gradient_error(&psi.psi_gradients, &fd, scale));
                }
                (worst, format!("{}, {kind}", named.name), skipped)
            })
        })
        .collect();
    let skipped: usize = results.iter().map(|r| r.2).sum();
    let cases = results.len();
    let (worst, at, _) = results
        .into_iter()
        .fold((0.0, String::new(), 0), |acc, r| if r.0 > acc.0 { r } else { acc });
    outcome(
        worst <= 1e-5,
        format!(
            "{cases} polygon/kind cases x 20 points, max relative error {worst:.2e} ({at}); \
             {skipped} triangulation stencils on fan edges skipped"
        ),
    )
}

fn patch_test() -> Outcome {
    let meshes = [
        ("trapezoid n=2", trapezoid_mesh(2, 0.25).unwrap()),
        ("trapezoid n=4", trapezoid_mesh(4, 0.25).unwrap()),
        ("mixed", mixed_mesh()),
    ];
    let mut worst: f64 = 0.0;
    let mut at = String::new();
    for (name, mesh) in meshes {
        let space = FemSpace::new(mesh, CoordinateKind::MeanValue).expect("space");
        for problem in Problem::quadratics() {
            let (norms, _) = problem
                .solve_on(&space, DEFAULT_ASSEMBLY_DEGREE, DEFAULT_NORM_DEGREE, &CgOptions::default())
                .expect("solve");
            let e = norms.l2_error.max(norms.h1_semi_error);
            if e > worst {
                worst = e;
                at = format!("{name}, u = {}", problem.name);
            }
        }
    }
    outcome(worst <= 1e-7, format!("max L2/H1 error {worst:.2e} ({at})"))
}

fn run_study(levels: Vec<usize>, assembly_degree: usize) -> Vec<StudyRow> {
    let config = StudyConfig {
        levels,
        assembly_degree,
        ..StudyConfig::default()
    };
    convergence_study(&config, &Problem::sin_exp()).expect("convergence study")
}

fn convergence_table(deep: bool) -> Outcome {
    let mut levels = vec![2, 4, 8, 16, 32, 64];
    if deep {
        levels.extend([128, 256]);
    }
    let start = Instant::now();
    let rows = run_study(levels, DEFAULT_ASSEMBLY_DEGREE);
    let elapsed = start.elapsed();
    for r in &rows {
        println!(
            "    n={:<4} L2 {:.2e} rate {:>5}  H1 {:.2e} rate {:>5}",
            r.n,
            r.l2_error,
            r.l2_rate.map(|x| format!("{x:.2}")).unwrap_or_default(),
            r.h1_error,
            r.h1_rate.map(|x| format!("{x:.2}")).unwrap_or_default()
        );
    }
    let at64 = rows.iter().find(|r| r.n == 64).expect("n = 64 row");
    let l2_rate = at64.l2_rate.unwrap();
    let h1_rate = at64.h1_rate.unwrap();
    let rates_ok = (2.9..=3.1).contains(&l2_rate) && (1.9..=2.1).contains(&h1_rate);
    let mut factor: f64 = 1.0;
    for r in &rows {
        let &(_, l2, h1) = REFERENCE_TABLE.iter().find(|t| t.0 == r.n).unwrap();
        for (ours, theirs) in [(r.l2_error, l2), (r.h1_error, h1)] {
            factor = factor.max(ours / theirs).max(theirs / ours);
        }
    }
    let limit = if deep { Duration::from_secs(1800) } else { Duration::from_secs(120) };
    outcome(
        rates_ok && factor <= 3.0 && elapsed <= limit,
        format!(
            "n=64 rates L2 {l2_rate:.2}, H1 {h1_rate:.2}; max factor to reference errors {factor:.2}; {:.1} s",
            elapsed.as_secs_f64()
        ),
    )
}

fn quadrature_guard() -> Outcome {
    let low = &run_study(vec![8], 10)[0];
    let high = &run_study(vec![8], 14)[0];
    let l2 = (low.l2_error - high.l2_error).abs() / high.l2_error;
    let h1 = (low.h1_error - high.h1_error).abs() / high.h1_error;
    outcome(
        l2 <= 0.01 && h1 <= 0.01,
        format!("n=8 relative change from degree 10 to 14: L2 {l2:.2e}, H1 {h1:.2e}"),
    )
}

fn main() {
    let deep = std::env::args().any(|a| a == "--deep") || std::env::var_os("POLYSER_DEEP").is_some();
    let criteria: [(&str, &dyn Fn() -> Outcome); 8] = [
        ("precision suite", &precision_suite),
        ("lagrange suite", &lagrange_suite),
        ("unit square exactness", &unit_square_exactness),
        ("bound suite", &bound_suite),
        ("gradient checks", &gradient_suite),
        ("patch test", &patch_test),
        ("convergence table", &|| convergence_table(deep)),
        ("quadrature guard", &quadrature_guard),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let result = check();
        if !result.pass {
            failed += 1;
        }
        println!(
            "{} {}. {name}: {}",
            if result.pass { "PASS" } else { "FAIL" },
            k + 1,
            result.detail
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
