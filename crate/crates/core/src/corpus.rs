//! Seeded polygon families used by the verification suites.

use std::f64::consts::PI;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::{check_conditions, Polygon, ShapeThresholds, Vec2};

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random convex `n`-gon in `[0, 1]^2` (Valtr's construction: random edge
/// vectors sorted by angle), rescaled so its bounding box is the unit square.
pub fn random_convex_polygon<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Polygon {
    assert!(n >= 3, "polygon needs at least 3 vertices");
    loop {
        let xs = chain_vectors(rng, n);
        let mut ys = chain_vectors(rng, n);
        ys.shuffle(rng);
        let mut edges: Vec<Vec2> = xs.into_iter().zip(ys).map(|(x, y)| Vec2::new(x, y)).collect();
        edges.sort_by(|p, q| p.y.atan2(p.x).total_cmp(&q.y.atan2(q.x)));
        let mut vertices = Vec::with_capacity(n);
        let mut p = Vec2::zeros();
        for e in &edges {
            vertices.push(p);
            p += e;
        }
        let (lo, hi) = bounds(&vertices);
        let span = hi - lo;
        let vertices = vertices
            .iter()
            .map(|v| Vec2::new((v.x - lo.x) / span.x, (v.y - lo.y) / span.y))
            .collect();
        if let Ok(polygon) = Polygon::new(vertices) {
            return polygon;
        }
    }
}

fn bounds(points: &[Vec2]) -> (Vec2, Vec2) {
    let mut lo = Vec2::repeat(f64::INFINITY);
    let mut hi = Vec2::repeat(f64::NEG_INFINITY);
    for p in points {
        lo = lo.inf(p);
        hi = hi.sup(p);
    }
    (lo, hi)
}

/// Differences along two monotone chains between the extreme coordinates;
/// they sum to zero.
fn chain_vectors<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    let mut coords: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
    coords.sort_by(f64::total_cmp);
    let (min, max) = (coords[0], coords[n - 1]);
    let mut out = Vec::with_capacity(n);
    let (mut last_a, mut last_b) = (min, min);
    for &c in &coords[1..n - 1] {
        if rng.gen_bool(0.5) {
            out.push(c - last_a);
            last_a = c;
        } else {
            out.push(last_b - c);
            last_b = c;
        }
    }
    out.push(max - last_a);
    out.push(last_b - max);
    out
}

/// Uniform point at distance more than `margin * diam` from the boundary.
/// On polygons thinner than the margin it is halved after every 1000
/// rejected samples, so the call always terminates.
pub fn random_interior_point<R: Rng + ?Sized>(rng: &mut R, polygon: &Polygon, margin: f64) -> Vec2 {
    let (lo, hi) = polygon.bounding_box();
    let mut eps = margin * polygon.diameter();
    for attempt in 1usize.. {
        let p = Vec2::new(rng.gen_range(lo.x..hi.x), rng.gen_range(lo.y..hi.y));
        if polygon.contains(&p, eps) {
            return p;
        }
        if attempt % 1000 == 0 {
            eps *= 0.5;
        }
    }
    unreachable!()
}

/// `gamma* = 6`, `d* = 0.05 diam`, `beta* = 0.95 pi`.
pub fn corpus_thresholds(polygon: &Polygon) -> ShapeThresholds {
    ShapeThresholds::new(6.0, 0.05 * polygon.diameter(), 0.95 * PI).expect("valid thresholds")
}

/// `count` random polygons with vertex counts drawn from `sizes` that meet
/// all three shape conditions of [`corpus_thresholds`].
pub fn shape_corpus(seed: u64, count: usize, sizes: std::ops::RangeInclusive<usize>) -> Vec<Polygon> {
    let mut rng = seeded_rng(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let n = rng.gen_range(sizes.clone());
        let polygon = random_convex_polygon(&mut rng, n);
        let ok = check_conditions(&polygon, &corpus_thresholds(&polygon))
            .map(|c| c.all_pass())
            .unwrap_or(false);
        if ok {
            out.push(polygon);
        }
    }
    out
}

/// Centrally symmetric hexagon whose edges `(v_2, v_3)` and `(v_5, v_0)` have
/// length of order `delta`. Along the diagonal `{0, 3}`, `d_a = d_b -> 1` and
/// `s ~ 2 / (3 delta)` as `delta -> 0`.
pub fn blowup_hexagon(delta: f64) -> Polygon {
    Polygon::from_coords(&[
        [-1.0, 0.0],
        [0.0, -1.0],
        [1.0 - 0.5 * delta, -delta],
        [1.0, 0.0],
        [0.0, 1.0],
        [-1.0 + 0.5 * delta, delta],
    ])
    .expect("convex for 0 < delta < 1")
}

#[derive(Clone, Debug)]
pub struct NamedPolygon {
    pub name: String,
    pub polygon: Polygon,
}

/// Fixed shapes plus seeded random ones: the unit square, the square with a
/// flat fifth vertex, regular 3- to 12-gons, a trapezoid, 10 random
/// quadrilaterals and 20 random 5- to 9-gons meeting the shape conditions.
pub fn named_corpus(seed: u64) -> Vec<NamedPolygon> {
    let named = |name: String, polygon: Polygon| NamedPolygon { name, polygon };
    let mut out = vec![
        named("unit-square".into(), Polygon::unit_square()),
        named("degenerate-pentagon".into(), Polygon::degenerate_pentagon()),
        named(
            "trapezoid".into(),
            Polygon::from_coords(&[[0.0, 0.0], [1.0, 0.0], [0.75, 1.0], [0.25, 1.0]]).unwrap(),
        ),
    ];
    for n in 3..=12 {
        out.push(named(format!("regular-{n}"), Polygon::regular(n, 1.0).unwrap()));
    }
    let mut rng = seeded_rng(seed);
    for k in 0..10 {
        out.push(named(format!("random-quad-{k}"), random_convex_polygon(&mut rng, 4)));
    }
    for (k, polygon) in shape_corpus(seed.wrapping_add(1), 20, 5..=9).into_iter().enumerate() {
        out.push(named(format!("shape-{k}-{}gon", polygon.n()), polygon));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_polygons_are_valid() {
        let mut rng = seeded_rng(7);
        for n in 3..12 {
            for _ in 0..20 {
                let p = random_convex_polygon(&mut rng, n);
                assert_eq!(p.n(), n);
                let (lo, hi) = p.bounding_box();
                assert_close!(lo.x, 0.0, 1e-15);
                assert_close!(hi.y, 1.0, 1e-15);
            }
        }
    }

    #[test]
    fn corpus_is_deterministic() {
        let a = shape_corpus(3, 5, 5..=9);
        let b = shape_corpus(3, 5, 5..=9);
        assert_eq!(a, b);
    }

    #[test]
    fn interior_points_respect_margin() {
        let mut rng = seeded_rng(1);
        let p = Polygon::regular(5, 1.0).unwrap();
        for _ in 0..100 {
            let x = random_interior_point(&mut rng, &p, 1e-3);
            assert!(p.boundary_distance(&x) > 1e-3 * p.diameter());
        }
    }

    #[test]
    fn blowup_hexagon_shrinks() {
        for delta in [0.5, 0.1, 1e-3] {
            let h = blowup_hexagon(delta);
            assert!(h.edge_length(2) < 1.2 * delta);
        }
    }
}
