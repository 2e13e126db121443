//! Reference computations shared by the integration tests. None of them go
//! through the crate's own quadrature.

#![allow(dead_code)]

use polyserendipity::{Polygon, Vec2};

/// Radon's 7-point degree-5 rule: barycentric points and weights summing to 1.
fn radon() -> [([f64; 3], f64); 7] {
    let r = 15f64.sqrt();
    let (a1, b1) = ((6.0 - r) / 21.0, (9.0 + 2.0 * r) / 21.0);
    let (a2, b2) = ((6.0 + r) / 21.0, (9.0 - 2.0 * r) / 21.0);
    let (w1, w2) = ((155.0 - r) / 1200.0, (155.0 + r) / 1200.0);
    [
        ([1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0], 9.0 / 40.0),
        ([a1, a1, b1], w1),
        ([a1, b1, a1], w1),
        ([b1, a1, a1], w1),
        ([a2, a2, b2], w2),
        ([a2, b2, a2], w2),
        ([b2, a2, a2], w2),
    ]
}

fn area(p: &Vec2, q: &Vec2, r: &Vec2) -> f64 {
    0.5 * ((q - p).perp(&(r - p))).abs()
}

fn radon_on(f: &dyn Fn(&Vec2) -> f64, p: &Vec2, q: &Vec2, r: &Vec2) -> f64 {
    let a = area(p, q, r);
    radon()
        .iter()
        .map(|(l, w)| w * f(&(l[0] * p + l[1] * q + l[2] * r)))
        .sum::<f64>()
        * a
}

fn adapt(f: &dyn Fn(&Vec2) -> f64, p: &Vec2, q: &Vec2, r: &Vec2, coarse: f64, tol: f64, depth: usize) -> f64 {
    let (m_pq, m_qr, m_rp) = (0.5 * (p + q), 0.5 * (q + r), 0.5 * (r + p));
    let kids = [(*p, m_pq, m_rp), (m_pq, *q, m_qr), (m_rp, m_qr, *r), (m_qr, m_rp, m_pq)];
    let parts: Vec<f64> = kids.iter().map(|(a, b, c)| radon_on(f, a, b, c)).collect();
    let fine: f64 = parts.iter().sum();
    if depth == 0 || (fine - coarse).abs() <= tol {
        return fine;
    }
    kids.iter()
        .zip(parts)
        .map(|((a, b, c), part)| adapt(f, a, b, c, part, tol / 2.0, depth - 1))
        .sum()
}

/// Adaptive 4-way subdivision of a triangle with Radon's rule until the
/// local change drops below `tol`.
pub fn adaptive_triangle(f: &dyn Fn(&Vec2) -> f64, p: &Vec2, q: &Vec2, r: &Vec2, tol: f64) -> f64 {
    adapt(f, p, q, r, radon_on(f, p, q, r), tol, 22)
}

/// [`adaptive_triangle`] over the fan of a convex polygon from its vertex
/// average.
pub fn adaptive_polygon(f: &dyn Fn(&Vec2) -> f64, polygon: &Polygon, tol: f64) -> f64 {
    let n = polygon.n();
    let c = polygon.vertices().iter().sum::<Vec2>() / n as f64;
    (0..n)
        .map(|i| adaptive_triangle(f, &c, &polygon.vertex(i), &polygon.vertex(i + 1), tol / n as f64))
        .sum()
}

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_pow(a: &[f64], k: usize) -> Vec<f64> {
    (0..k).fold(vec![1.0], |acc, _| poly_mul(&acc, a))
}

/// `int x^i y^j` over a polygon by Green's theorem,
/// `1/(i+1) * (closed integral of x^(i+1) y^j dy)`, with each edge integral
/// expanded exactly in the edge parameter.
pub fn monomial_integral(polygon: &Polygon, i: usize, j: usize) -> f64 {
    let mut total = 0.0;
    for k in 0..polygon.n() {
        let (p, q) = (polygon.vertex(k), polygon.vertex(k + 1));
        let x = [p.x, q.x - p.x];
        let y = [p.y, q.y - p.y];
        let integrand = poly_mul(&poly_pow(&x, i + 1), &poly_pow(&y, j));
        let line: f64 = integrand.iter().enumerate().map(|(d, c)| c / (d as f64 + 1.0)).sum();
        total += line * y[1];
    }
    total / (i as f64 + 1.0)
}

/// Central differences of every component of `f` with step `h`.
pub fn fd_gradients(f: &dyn Fn(&Vec2) -> Vec<f64>, x: &Vec2, h: f64) -> Vec<Vec2> {
    let (xp, xm) = (f(&(x + Vec2::new(h, 0.0))), f(&(x - Vec2::new(h, 0.0))));
    let (yp, ym) = (f(&(x + Vec2::new(0.0, h))), f(&(x - Vec2::new(0.0, h))));
    (0..xp.len())
        .map(|k| Vec2::new((xp[k] - xm[k]) / (2.0 * h), (yp[k] - ym[k]) / (2.0 * h)))
        .collect()
}

/// Largest `|g - fd| / max(|fd|, scale)` over the components.
pub fn gradient_error(analytic: &[Vec2], fd: &[Vec2], scale: f64) -> f64 {
    analytic
        .iter()
        .zip(fd)
        .map(|(g, d)| (g - d).norm() / d.norm().max(scale))
        .fold(0.0, f64::max)
}
