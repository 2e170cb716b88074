//! Waldschmidt's bound `|e^{πk/a} − p/q| > exp{−2⁷²(log 2k)(log 2a)(log p)(log log p)}`.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use serde::Serialize;

use super::as_decimal;
use crate::error::{Error, Result};

const LN_C: f64 = 72.0 * std::f64::consts::LN_2;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WaldschmidtBound {
    pub k: u64,
    pub a: u64,
    #[serde(with = "as_decimal")]
    pub p: BigInt,
    pub log_p: f64,
    /// Natural log of the lower bound; the bound itself underflows.
    pub log_bound: f64,
}

/// `ln p` for arbitrarily large `p > 0`.
fn ln_big(p: &BigInt) -> f64 {
    let bits = p.bits();
    if bits <= 1000 {
        return p.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top = (p >> shift as usize).to_f64().unwrap_or(f64::NAN);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

fn product(k: u64, a: u64) -> f64 {
    ((2 * k) as f64).ln() * ((2 * a) as f64).ln()
}

pub fn waldschmidt_floor(k: u64, a: u64, p: &BigInt) -> Result<WaldschmidtBound> {
    if k == 0 || a == 0 {
        return Err(Error::Domain("k and a must be positive".into()));
    }
    if p < &BigInt::from(3) || !p.is_positive() {
        return Err(Error::Domain(format!("log log p needs p ≥ 3, got {p}")));
    }
    let log_p = ln_big(p);
    let log_bound = -(LN_C.exp() * product(k, a) * log_p * log_p.ln());
    Ok(WaldschmidtBound {
        k,
        a,
        p: p.clone(),
        log_p,
        log_bound,
    })
}

/// Smallest `log p` compatible with `|e^{πk/a} − p/q| ≤ e^{log_target}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ImpliedFloor {
    pub k: u64,
    pub a: u64,
    pub log_target: f64,
    /// Floor on `(log p)(log log p)`.
    pub product_floor: f64,
    /// `y − 1` for the root `y` of `y log y = product_floor`; kept separately
    /// because the floor is `1 + O(2⁻⁷²)` at practical targets.
    pub log_p_excess: f64,
    pub log_p_floor: f64,
    /// Whether the floor beats the trivial `log p ≥ log 3`.
    pub informative: bool,
}

/// Floor on `log p` implied by the bound: the approximation can only be
/// that good if `(log p)(log log p) ≥ −log_target / (2⁷² log 2k log 2a)`.
pub fn implied_log_p_floor(k: u64, a: u64, log_target: f64) -> Result<ImpliedFloor> {
    if k == 0 || a == 0 {
        return Err(Error::Domain("k and a must be positive".into()));
    }
    if !log_target.is_finite() {
        return Err(Error::Domain("target must be finite".into()));
    }
    let c = (-log_target / (LN_C.exp() * product(k, a))).max(0.0);
    // (1+u) ln(1+u) = c, solved for u ≥ 0
    let mut u = if c < 1.0 { c } else { c / c.ln().max(1.0) };
    for _ in 0..100 {
        let f = (1.0 + u) * u.ln_1p() - c;
        let df = u.ln_1p() + 1.0;
        let next = (u - f / df).max(0.0);
        if (next - u).abs() <= 1e-17 * next.max(f64::MIN_POSITIVE) {
            u = next;
            break;
        }
        u = next;
    }
    let log_p_floor = 1.0 + u;
    Ok(ImpliedFloor {
        k,
        a,
        log_target,
        product_floor: c,
        log_p_excess: u,
        log_p_floor,
        informative: log_p_floor > 3f64.ln(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vacuous_at_small_p() {
        let b = waldschmidt_floor(1, 1, &BigInt::from(23)).unwrap();
        let actual: f64 = (std::f64::consts::PI.exp() - 23.0).abs();
        assert!((actual - 0.140_692_632_779_27).abs() < 1e-9);
        assert!(actual.ln() >= b.log_bound);
        assert!(b.log_bound < -1e21);
        assert!(waldschmidt_floor(1, 1, &BigInt::from(2)).is_err());
    }

    #[test]
    fn monotone_in_p() {
        let mut last = 0.0;
        for e in [3u32, 10, 100, 1000, 5000] {
            let p = num_traits::pow(BigInt::from(10), e as usize);
            let b = waldschmidt_floor(2, 3, &p).unwrap().log_bound;
            assert!(b < last);
            last = b;
        }
        let big = num_traits::pow(BigInt::from(7), 2000);
        let lp = waldschmidt_floor(1, 1, &big).unwrap().log_p;
        assert!((lp - 2000.0 * 7f64.ln()).abs() < 1e-9 * lp);
    }

    #[test]
    fn implied_floor_at_million() {
        // target e^{π}/√T at T = 10⁶
        let target = std::f64::consts::PI - 0.5 * 1e6f64.ln();
        let f = implied_log_p_floor(1, 1, target).unwrap();
        let c = -target / (2f64.powi(72) * 2f64.ln() * 2f64.ln());
        assert!((f.product_floor / c - 1.0).abs() < 1e-14);
        assert!((f.log_p_excess / c - 1.0).abs() < 1e-12);
        assert!(!f.informative);
        // a target of e^{−10³⁰} forces a large p
        let f = implied_log_p_floor(1, 1, -1e30).unwrap();
        assert!(f.informative);
        let y = f.log_p_floor;
        assert!((y * y.ln() / f.product_floor - 1.0).abs() < 1e-12);
    }
}
