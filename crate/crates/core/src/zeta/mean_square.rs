//! Composite Gauss–Legendre quadrature of `∫₀^T |ζ(½+it)|² dt`.

use rayon::prelude::*;
use serde::Serialize;

use super::zeta_half_line;
use crate::error::{Error, Result};
use crate::numerics::{Constants, ExactSum};

pub const MEAN_SQUARE_MIN_T: f64 = 10.0;

/// Panel width and rule order. `step = None` selects `π/(2 log T)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraturePolicy {
    pub step: Option<f64>,
    pub nodes: usize,
}

impl Default for QuadraturePolicy {
    fn default() -> Self {
        QuadraturePolicy {
            step: None,
            nodes: 8,
        }
    }
}

impl QuadraturePolicy {
    pub fn with_step(step: f64) -> Self {
        QuadraturePolicy {
            step: Some(step),
            ..Self::default()
        }
    }

    pub fn default_step(t_max: f64) -> f64 {
        std::f64::consts::PI / (2.0 * t_max.ln())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanSquare {
    #[serde(rename = "T")]
    pub t_max: f64,
    pub integral: f64,
    /// `T log T + (2γ − 1 − log 2π) T`
    pub main_term: f64,
    #[serde(rename = "E_T")]
    pub e_t: f64,
    pub step: f64,
    pub panels: u64,
}

/// Gauss–Legendre nodes and weights on `[−1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    (x, w)
}

pub fn continuous_mean_square(t_max: f64, policy: QuadraturePolicy) -> Result<MeanSquare> {
    if !(t_max >= MEAN_SQUARE_MIN_T) || !t_max.is_finite() {
        return Err(Error::Domain(format!("mean square needs T ≥ 10, got {t_max}")));
    }
    let step = policy.step.unwrap_or_else(|| QuadraturePolicy::default_step(t_max));
    if !(step > 0.0) || policy.nodes < 2 {
        return Err(Error::Domain("quadrature step must be positive".into()));
    }
    let panels = (t_max / step).ceil() as u64;
    let h = t_max / panels as f64;
    let (xs, ws) = gauss_legendre(policy.nodes);
    let parts: Vec<Result<f64>> = (0..panels)
        .into_par_iter()
        .map(|i| {
            let lo = i as f64 * h;
            let mid = lo + h / 2.0;
            let mut acc = ExactSum::new();
            for (x, w) in xs.iter().zip(&ws) {
                let v = zeta_half_line(mid + x * h / 2.0)?.zeta_abs_sq;
                acc.add(w * v * h / 2.0);
            }
            Ok(acc.value())
        })
        .collect();
    let mut total = ExactSum::new();
    for p in parts {
        total.add(p?);
    }
    let integral = total.value();
    let c = Constants::f64();
    let main_term = t_max * t_max.ln() + (2.0 * c.gamma_euler - 1.0 - c.log_2pi) * t_max;
    Ok(MeanSquare {
        t_max,
        integral,
        main_term,
        e_t: integral - main_term,
        step: h,
        panels,
    })
}
