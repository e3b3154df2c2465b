//! Extrapolation models for capacity sequences.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    /// `E = L`
    Constant,
    /// `E = L + c / log R`
    InverseLog,
    /// `E = L + c R^(-p)`
    Power,
}

impl Model {
    fn params(self) -> usize {
        match self {
            Model::Constant => 1,
            Model::InverseLog => 2,
            Model::Power => 3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fit {
    pub model: Model,
    pub limit: f64,
    pub coeff: f64,
    pub exponent: Option<f64>,
    /// Root mean square of the relative residuals `(fit - E) / E`.
    pub rel_rms: f64,
}

impl Fit {
    pub fn eval(&self, r: f64) -> f64 {
        match self.model {
            Model::Constant => self.limit,
            Model::InverseLog => self.limit + self.coeff / r.ln(),
            Model::Power => self.limit + self.coeff * r.powf(-self.exponent.unwrap_or(0.0)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelFits {
    pub constant: Fit,
    pub inverse_log: Fit,
    pub power: Fit,
    pub selected: Model,
}

impl ModelFits {
    pub fn best(&self) -> &Fit {
        match self.selected {
            Model::Constant => &self.constant,
            Model::InverseLog => &self.inverse_log,
            Model::Power => &self.power,
        }
    }
}

/// A model with more parameters replaces a simpler one only if it cuts the
/// relative RMS by at least this factor.
pub const PARSIMONY: f64 = 0.5;

fn rel_rms(r: &[f64], e: &[f64], f: impl Fn(f64) -> f64) -> f64 {
    let s: f64 = r.iter().zip(e).map(|(&x, &y)| ((f(x) - y) / y).powi(2)).sum();
    (s / r.len() as f64).sqrt()
}

/// Weighted least squares for `E ≈ L + c·g` with weights `1/E²`, with `L`
/// clamped at zero when the unconstrained optimum is negative.
fn affine(g: &[f64], e: &[f64]) -> (f64, f64) {
    let (mut sw, mut sg, mut se, mut sgg, mut sge) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (&x, &y) in g.iter().zip(e) {
        let w = 1.0 / (y * y);
        sw += w;
        sg += w * x;
        se += w * y;
        sgg += w * x * x;
        sge += w * x * y;
    }
    let det = sw * sgg - sg * sg;
    if det.abs() > 1e-300 {
        let l = (sgg * se - sg * sge) / det;
        let c = (sw * sge - sg * se) / det;
        if l >= 0.0 {
            return (l, c);
        }
    }
    (0.0, if sgg > 0.0 { sge / sgg } else { 0.0 })
}

fn power_at(r: &[f64], e: &[f64], p: f64) -> Fit {
    let g: Vec<f64> = r.iter().map(|x| x.powf(-p)).collect();
    let (l, c) = affine(&g, e);
    let rms = rel_rms(r, e, |x| l + c * x.powf(-p));
    Fit {
        model: Model::Power,
        limit: l,
        coeff: c,
        exponent: Some(p),
        rel_rms: rms,
    }
}

/// Fits the three models to `(radius, energy)` pairs. Radii must exceed 1.
pub fn fit_models(r: &[f64], e: &[f64]) -> ModelFits {
    let mean = e.iter().sum::<f64>() / e.len() as f64;
    let constant = Fit {
        model: Model::Constant,
        limit: mean,
        coeff: 0.0,
        exponent: None,
        rel_rms: rel_rms(r, e, |_| mean),
    };
    let g: Vec<f64> = r.iter().map(|x| 1.0 / x.ln()).collect();
    let (l, c) = affine(&g, e);
    let inverse_log = Fit {
        model: Model::InverseLog,
        limit: l,
        coeff: c,
        exponent: None,
        rel_rms: rel_rms(r, e, |x| l + c / x.ln()),
    };
    // log-spaced grid on p, then golden-section refinement around the best node
    let grid: Vec<f64> = (0..=120).map(|k| 10f64.powf(-2.0 + 4.0 * k as f64 / 120.0)).collect();
    let mut best = power_at(r, e, grid[0]);
    let mut best_k = 0;
    for (k, &p) in grid.iter().enumerate().skip(1) {
        let f = power_at(r, e, p);
        if f.rel_rms < best.rel_rms {
            best = f;
            best_k = k;
        }
    }
    let (mut a, mut b) = (
        grid[best_k.saturating_sub(1)].ln(),
        grid[(best_k + 1).min(grid.len() - 1)].ln(),
    );
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..60 {
        let x1 = b - phi * (b - a);
        let x2 = a + phi * (b - a);
        if power_at(r, e, x1.exp()).rel_rms < power_at(r, e, x2.exp()).rel_rms {
            b = x2;
        } else {
            a = x1;
        }
    }
    let refined = power_at(r, e, (0.5 * (a + b)).exp());
    let power = if refined.rel_rms < best.rel_rms { refined } else { best };

    let mut selected = constant;
    for cand in [inverse_log, power] {
        if cand.model.params() > selected.model.params() && cand.rel_rms < PARSIMONY * selected.rel_rms {
            selected = cand;
        }
    }
    ModelFits {
        constant,
        inverse_log,
        power,
        selected: selected.model,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_inverse_log() {
        let r = [4.0, 8.0, 16.0, 32.0];
        let e: Vec<f64> = r.iter().map(|x: &f64| 6.0 / x.ln()).collect();
        let f = fit_models(&r, &e);
        assert_eq!(f.selected, Model::InverseLog);
        assert!(f.best().limit.abs() < 1e-10);
        assert!(f.best().rel_rms < 1e-12);
    }

    #[test]
    fn recovers_power_law() {
        let r = [2.0, 4.0, 8.0, 16.0, 32.0];
        let e: Vec<f64> = r.iter().map(|x: &f64| 3.0 + 5.0 * x.powf(-1.5)).collect();
        let f = fit_models(&r, &e);
        assert_eq!(f.selected, Model::Power);
        assert!((f.best().limit - 3.0).abs() < 1e-6, "{:?}", f.best());
        assert!((f.best().exponent.unwrap() - 1.5).abs() < 1e-4);
    }

    #[test]
    fn constant_data_keeps_constant_model() {
        let r = [4.0, 8.0, 16.0, 32.0];
        let f = fit_models(&r, &[2.0; 4]);
        assert_eq!(f.selected, Model::Constant);
        assert_eq!(f.best().limit, 2.0);
    }
}
