//! Closed forms and quadratures that reports compare against.

use std::f64::consts::TAU;

/// Capacity of the flat annulus `r_in < r < r_out`.
pub fn flat_capacity(r_in: f64, r_out: f64) -> f64 {
    TAU / (r_out / r_in).ln()
}

/// Capacity of the hyperbolic annulus between geodesic radii `r_in` and `r_out`;
/// `r_out = ∞` gives the capacity of the end.
pub fn hyperbolic_capacity(r_in: f64, r_out: f64) -> f64 {
    let outer = if r_out.is_finite() { (0.5 * r_out).tanh().ln() } else { 0.0 };
    TAU / (outer - (0.5 * r_in).tanh().ln())
}

/// Green's function of the flat disk of radius `big_r`, pole at the center.
pub fn flat_green(r: f64, big_r: f64) -> f64 {
    (big_r / r).ln() / TAU
}

/// Green's function of the hyperbolic disk of geodesic radius `big_r`; `∞` gives
/// `(1/2π)|log tanh(r/2)|`.
pub fn hyperbolic_green(r: f64, big_r: f64) -> f64 {
    let outer = if big_r.is_finite() { (0.5 * big_r).tanh().ln() } else { 0.0 };
    (outer - (0.5 * r).tanh().ln()) / TAU
}

/// `λ(r) = 1 + (α+1) / (r² (log r)^(α+2))` for `φ = -t^(-α)/α` and `f = log r`.
pub fn power_factor(r: f64, alpha: f64) -> f64 {
    1.0 + (alpha + 1.0) / (r * r * r.ln().powf(alpha + 2.0))
}

/// `∫ √λ(r) dr` over `log r ∈ [s, big_s]`, by composite Simpson in `u = log log r`.
pub fn radial_length(s: f64, big_s: f64, alpha: f64) -> f64 {
    let n = 20_000;
    let (a, b) = (s.ln(), big_s.ln());
    let h = (b - a) / n as f64;
    let g = |u: f64| {
        let t = u.exp();
        let r = t.exp();
        power_factor(r, alpha).sqrt() * r * t
    };
    let mut acc = g(a) + g(b);
    for k in 1..n {
        acc += g(a + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * h / 3.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_values() {
        assert!((flat_capacity(1.0, 4.0) - 4.532360).abs() < 1e-6);
        assert!((hyperbolic_capacity(1.0, f64::INFINITY) - 8.13954).abs() < 1e-4);
        assert!((flat_green(1.0, 4.0) - 0.220636).abs() < 1e-6);
        assert!((hyperbolic_green(1.0, f64::INFINITY) - 0.1228576).abs() < 1e-6);
        assert!((power_factor(2.0, 1.0) - 2.501390).abs() < 1e-6);
    }

    #[test]
    fn radial_length_exceeds_its_lower_bound() {
        let bound = 2.0 * 2f64.sqrt() * (10.0 - 2.0);
        let l = radial_length(0.01, 0.25, 1.0);
        assert!(l > bound && l < 1.01 * bound);
    }
}
