//! The zeta function on the critical line.
//!
//! [`zeta_half_line`] uses Riemann–Siegel with ten correction terms for
//! `t ≥ 30` and Euler–Maclaurin below. Error budget for `|ζ|²`:
//!
//! | correction order | worst error on `30 ≤ t ≤ 200` |
//! |------------------|-------------------------------|
//! | 4                | 1.8·10⁻⁶                      |
//! | 6                | 6.8·10⁻⁸                      |
//! | 10 (default)     | 1.0·10⁻¹⁰                     |
//!
//! The truncation error decays like `t^{−(2K+3)/4}`, so it only shrinks for
//! larger `t`; above `t ≈ 10⁶` the dominant error is rounding in the main
//! sum, about `√N · 10⁻¹⁶` relative.

pub mod afe;
pub mod euler_maclaurin;
pub mod gamma;
pub mod mean_square;
pub mod riemann_siegel;

use num_complex::Complex64;
use serde::Serialize;

pub use afe::{afe_decompose, motohashi_check, AfeDecomposition, MotohashiCheck, MOTOHASHI_C};
pub use gamma::{chi, theta};
pub use mean_square::{continuous_mean_square, MeanSquare, QuadraturePolicy};

use crate::error::{Error, Result};

/// Below this ordinate Euler–Maclaurin is used.
pub const RS_THRESHOLD: f64 = 30.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    RiemannSiegel,
    EulerMaclaurin,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalPoint {
    pub t: f64,
    pub zeta_abs_sq: f64,
    pub method: Method,
}

fn check_t(t: f64) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("ordinate must be positive, got {t}")));
    }
    Ok(())
}

/// `|ζ(½+it)|²`.
pub fn zeta_half_line(t: f64) -> Result<CriticalPoint> {
    check_t(t)?;
    let (zeta_abs_sq, method) = if t < RS_THRESHOLD {
        let z = euler_maclaurin::zeta_em(Complex64::new(0.5, t))?.value;
        (z.norm_sqr(), Method::EulerMaclaurin)
    } else {
        let z = riemann_siegel::hardy_z(t, riemann_siegel::DEFAULT_ORDER)?;
        (z * z, Method::RiemannSiegel)
    };
    Ok(CriticalPoint {
        t,
        zeta_abs_sq,
        method,
    })
}

/// `ζ(½+it)` itself.
pub fn zeta_critical(t: f64) -> Result<Complex64> {
    check_t(t)?;
    if t < RS_THRESHOLD {
        return Ok(euler_maclaurin::zeta_em(Complex64::new(0.5, t))?.value);
    }
    let z = riemann_siegel::hardy_z(t, riemann_siegel::DEFAULT_ORDER)?;
    let th = theta(t);
    Ok(Complex64::from_polar(z, -th))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn near_zero_ordinate() {
        let p = zeta_half_line(1e-3).unwrap();
        assert_eq!(p.method, Method::EulerMaclaurin);
        assert!((p.zeta_abs_sq - 2.13263).abs() < 1e-3);
        assert!(zeta_half_line(0.0).is_err());
        assert!(zeta_half_line(-1.0).is_err());
    }

    #[test]
    fn first_zero_vanishes() {
        assert!(zeta_half_line(14.134_725_142).unwrap().zeta_abs_sq <= 1e-6);
    }

    #[test]
    fn both_routes_agree_on_complex_value() {
        for &t in &[30.5, 47.0, 120.0] {
            let a = zeta_critical(t).unwrap();
            let b = euler_maclaurin::zeta_em(Complex64::new(0.5, t)).unwrap().value;
            assert!((a - b).norm() < 1e-6, "t={t}");
        }
    }
}
