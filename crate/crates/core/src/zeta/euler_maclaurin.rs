//! Euler–Maclaurin summation for `ζ(s)` at moderate `|s|`:
//!
//! ```text
//! ζ(s) = Σ_{n<N} n^{−s} + N^{1−s}/(s−1) + N^{−s}/2
//!        + Σ_{k=1}^{K} B_{2k}/(2k)! · s(s+1)⋯(s+2k−2) · N^{−s−2k+1} + E
//! ```

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::bernoulli::even_bernoulli_f64;
use crate::numerics::dd::{ln_int, mul_mod_two_pi};
use crate::numerics::ComplexSum;

const MAX_TERMS: usize = 30;

/// ζ(s) together with the size of the first omitted tail term.
#[derive(Debug, Clone, Copy)]
pub struct EmValue {
    pub value: Complex64,
    pub err: f64,
}

fn n_pow_neg_s(n: u64, s: Complex64) -> Complex64 {
    let ln = ln_int(n);
    let mag = (-s.re * ln.to_f64()).exp();
    let ph = -mul_mod_two_pi(s.im, ln);
    Complex64::from_polar(mag, ph)
}

pub fn zeta_em(s: Complex64) -> Result<EmValue> {
    if !(s.re.is_finite() && s.im.is_finite()) {
        return Err(Error::Domain(format!("ζ needs finite argument, got {s}")));
    }
    if s == Complex64::new(1.0, 0.0) {
        return Err(Error::Domain("ζ has a pole at s = 1".into()));
    }
    let n = (((s.norm() + 2.0 * MAX_TERMS as f64) / std::f64::consts::PI).ceil() as u64).max(20);
    let mut acc = ComplexSum::new();
    for k in 1..n {
        acc.add(n_pow_neg_s(k, s));
    }
    let nf = n as f64;
    let ns = n_pow_neg_s(n, s);
    acc.add(ns * nf / (s - 1.0));
    acc.add(ns * 0.5);

    let b = even_bernoulli_f64();
    let inv_n2 = 1.0 / (nf * nf);
    // s(s+1)⋯(s+2k−2)/(2k)! · N^{−s−2k+1}
    let mut factor = s * ns / nf / 2.0;
    let mut err = 0.0;
    for k in 1..=MAX_TERMS {
        let term = factor * b[k];
        acc.add(term);
        err = term.norm();
        let kk = k as f64;
        factor = factor * (s + 2.0 * kk - 1.0) * (s + 2.0 * kk) * inv_n2
            / ((2.0 * kk + 1.0) * (2.0 * kk + 2.0));
        let next = (factor * b[k + 1]).norm();
        if next < 1e-18 * acc.value().norm().max(1e-300) {
            err = next;
            break;
        }
    }
    let value = acc.value();
    Ok(EmValue {
        value,
        err: err + 8.0 * f64::EPSILON * value.norm().max(1.0),
    })
}
