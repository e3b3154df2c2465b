//! Distance formulas for the model charts and triangle geometry from edge lengths.

use std::f64::consts::{PI, TAU};

use super::ChartKind;

/// Triangle area from side lengths (Kahan's stable Heron formula). Returns 0 for
/// degenerate or violating triples.
pub fn heron(sides: [f64; 3]) -> f64 {
    let mut s = sides;
    s.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    let [a, b, c] = s;
    let p = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c));
    if p <= 0.0 || !p.is_finite() {
        0.0
    } else {
        0.25 * p.sqrt()
    }
}

/// Cotangent of the angle opposite side `a` in a triangle with sides `a, b, c`.
pub fn cot_opposite(a: f64, b: f64, c: f64, area: f64) -> f64 {
    (b * b + c * c - a * a) / (4.0 * area)
}

/// Interior angle opposite side `a`.
pub fn angle_opposite(a: f64, b: f64, c: f64) -> f64 {
    let cos = ((b * b + c * c - a * a) / (2.0 * b * c)).clamp(-1.0, 1.0);
    cos.acos()
}

pub fn euclid(p: [f64; 2], q: [f64; 2]) -> f64 {
    (p[0] - q[0]).hypot(p[1] - q[1])
}

fn polar(p: [f64; 2]) -> (f64, f64) {
    (p[0].hypot(p[1]), p[1].atan2(p[0]))
}

fn wrap(d: f64) -> f64 {
    let w = d.rem_euclid(TAU);
    if w > PI {
        w - TAU
    } else {
        w
    }
}

/// Geodesic distance in H² between points given in geodesic polar coordinates
/// `xy = r (cos θ, sin θ)`.
pub fn hyperbolic_polar(p: [f64; 2], q: [f64; 2]) -> f64 {
    let (r1, t1) = polar(p);
    let (r2, t2) = polar(q);
    let dr = (0.5 * (r1 - r2)).sinh();
    let st = (0.5 * wrap(t1 - t2)).sin();
    let s = dr * dr + r1.sinh() * r2.sinh() * st * st;
    2.0 * s.sqrt().asinh()
}

/// Geodesic distance on the hyperbolic cylinder `dt² + (neck/2π)² cosh²t dθ²`
/// between `(t, θ)` points, using the shortest lift.
pub fn fermi(neck: f64, p: [f64; 2], q: [f64; 2]) -> f64 {
    let ds = neck / TAU * wrap(p[1] - q[1]);
    let a = (0.5 * (p[0] - q[0])).sinh();
    let b = (0.5 * ds).sinh();
    let s = a * a + p[0].cosh() * q[0].cosh() * b * b;
    2.0 * s.sqrt().asinh()
}

/// Geodesic distance in the Poincaré disk model.
pub fn poincare(p: [f64; 2], q: [f64; 2]) -> f64 {
    let num = euclid(p, q);
    let den = ((1.0 - p[0] * p[0] - p[1] * p[1]) * (1.0 - q[0] * q[0] - q[1] * q[1])).sqrt();
    2.0 * (num / den).asinh()
}

/// Poincaré-disk point at geodesic polar position `(r, θ)`.
pub fn poincare_from_polar(r: f64, theta: f64) -> [f64; 2] {
    let rho = (0.5 * r).tanh();
    [rho * theta.cos(), rho * theta.sin()]
}

/// Geodesic polar position `(r, θ)` of a Poincaré-disk point.
pub fn polar_from_poincare(p: [f64; 2]) -> (f64, f64) {
    let rho = p[0].hypot(p[1]);
    (2.0 * rho.atanh(), p[1].atan2(p[0]))
}

/// Poincaré-disk point at geodesic distance `r` and direction `theta` from `center`.
pub fn poincare_offset(center: [f64; 2], r: f64, theta: f64) -> [f64; 2] {
    // Möbius translation of the origin-based point to the center.
    let w = poincare_from_polar(r, theta);
    let (a, b) = (center[0], center[1]);
    let (x, y) = (w[0], w[1]);
    // (w + c) / (1 + conj(c) w)
    let nr = x + a;
    let ni = y + b;
    let dr = 1.0 + a * x + b * y;
    let di = a * y - b * x;
    let d = dr * dr + di * di;
    [(nr * dr + ni * di) / d, (ni * dr - nr * di) / d]
}

/// Chart distance according to `kind`; `None` for charts without a coordinate metric.
pub fn chart_distance(kind: ChartKind, p: [f64; 2], q: [f64; 2]) -> Option<f64> {
    match kind {
        ChartKind::Euclidean => Some(euclid(p, q)),
        ChartKind::HyperbolicPolar => Some(hyperbolic_polar(p, q)),
        ChartKind::Fermi { neck } => Some(fermi(neck, p, q)),
        ChartKind::PiecewiseFlat => None,
    }
}

fn lorentz_normalize(v: [f64; 3]) -> [f64; 3] {
    let n = (v[0] * v[0] - v[1] * v[1] - v[2] * v[2]).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

/// Geodesic midpoint of two chart points.
pub fn chart_midpoint(kind: ChartKind, p: [f64; 2], q: [f64; 2]) -> [f64; 2] {
    match kind {
        ChartKind::Euclidean | ChartKind::PiecewiseFlat => {
            [0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])]
        }
        ChartKind::HyperbolicPolar => {
            let lift = |p: [f64; 2]| {
                let (r, t) = polar(p);
                [r.cosh(), r.sinh() * t.cos(), r.sinh() * t.sin()]
            };
            let (a, b) = (lift(p), lift(q));
            let m = lorentz_normalize([a[0] + b[0], a[1] + b[1], a[2] + b[2]]);
            let r = m[0].max(1.0).acosh();
            let h = m[1].hypot(m[2]);
            if h == 0.0 {
                [0.0, 0.0]
            } else {
                [r * m[1] / h, r * m[2] / h]
            }
        }
        ChartKind::Fermi { neck } => {
            let k = neck / TAU;
            let s1 = k * p[1];
            let s2 = s1 + k * wrap(q[1] - p[1]);
            let lift = |t: f64, s: f64| [t.cosh() * s.cosh(), t.cosh() * s.sinh(), t.sinh()];
            let (a, b) = (lift(p[0], s1), lift(q[0], s2));
            let m = lorentz_normalize([a[0] + b[0], a[1] + b[1], a[2] + b[2]]);
            let t = m[2].asinh();
            let s = (m[1] / m[0]).atanh();
            [t, s / k]
        }
    }
}

/// Hyperbolic disk area `2π(cosh R − 1)` by Simpson quadrature of `2π sinh r`.
pub fn hyperbolic_disk_area(r_max: f64) -> f64 {
    let n = 2000;
    let h = r_max / n as f64;
    let mut acc = 0.0;
    for i in 0..=n {
        let w = if i == 0 || i == n {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        acc += w * (i as f64 * h).sinh();
    }
    TAU * acc * h / 3.0
}
