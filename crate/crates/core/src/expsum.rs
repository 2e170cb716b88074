//! Exponential sums `Σ_{m≤M} d(m) e(αm)` with divisor coefficients.
//!
//! Three evaluators: direct accumulation over a sieved table, the Dirichlet
//! hyperbola identity
//!
//! ```text
//! Σ_{m≤M} d(m)e(αm) = 2 Σ_{u≤√M} Σ_{u<v≤M/u} e(αuv) + Σ_{u≤√M} e(αu²)
//! ```
//!
//! with closed-form inner sums, and residue-class bucketing for rational `α`.
//!
//! Every result carries `accuracy`, a bound on the absolute error. The phase
//! `αm` is formed in double-double from `α` taken as exact input, so the
//! bound is dominated by one `f64` rounding per term plus `|α|·M·2⁻¹⁰⁰`.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};
use rayon::prelude::*;
use serde::Serialize;

use crate::divisor::DivisorTable;
use crate::error::{Error, Result};
use crate::numerics::bigfloat::ratio_to_f64;
use crate::numerics::dd::frac_mul;
use crate::numerics::{unit, ComplexSum, Constants, Dd, ExactSum};

/// Below this distance from an integer the geometric closed form is replaced
/// by direct accumulation.
pub const NEAR_INTEGER: f64 = 1.0 / (1u64 << 20) as f64;

/// Constant in `|Σ d(m)e(mr/s) − main| ≤ C(√x + s) log 2s`, calibrated on
/// `x ∈ {10², 10³, 10⁴}`, `s ∈ {2, 3, 5, 7}` and every reduced `r mod s`
/// (largest observed ratio 0.237, at x = 10³, r/s = 1/2).
pub const RATIONAL_RESIDUAL_C: f64 = 0.3;

const EPS: f64 = f64::EPSILON;
const DD_REL: f64 = 1.0 / (1u128 << 100) as f64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Direct,
    Hyperbola,
    RationalClosedForm,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExpSumResult {
    #[serde(rename = "M")]
    pub m: u64,
    pub alpha: f64,
    #[serde(with = "crate::zeta::afe::complex_pair")]
    pub value: Complex64,
    pub algorithm: Algorithm,
    pub accuracy: f64,
}

/// Signed fraction of `x` in `[−½, ½)` for a double-double `x`.
fn signed_frac(x: Dd) -> Dd {
    let r = x - x.round();
    if r.hi >= 0.5 {
        r - Dd::ONE
    } else {
        r
    }
}

/// `Σ_{n1<n≤n2} e(βn)` with its error bound, for a reduced `β ∈ [−½, ½)`
/// known to within `beta_err`.
fn geometric_dd(beta: Dd, beta_err: f64, n1: i64, n2: i64) -> (Complex64, f64) {
    let len = n2 - n1;
    if len <= 0 {
        return (Complex64::new(0.0, 0.0), 0.0);
    }
    let b = beta.to_f64();
    if b == 0.0 && beta.lo == 0.0 {
        return (Complex64::new(len as f64, 0.0), 0.0);
    }
    let span = n1.unsigned_abs().max(n2.unsigned_abs()) as f64;
    // |∂G/∂β| ≤ 2π·L·span
    let drift = 2.0 * std::f64::consts::PI * len as f64 * span * beta_err;
    if b.abs() < NEAR_INTEGER {
        let mut acc = ComplexSum::new();
        for n in (n1 + 1)..=n2 {
            acc.add(unit(frac_mul(n as f64, beta)));
        }
        let err = len as f64 * 8.0 * EPS + drift;
        return (acc.value(), err);
    }
    // e(β(n1 + (L+1)/2)) · sin(πLβ)/sin(πβ)
    let half = Dd::new(beta.hi * 0.5, beta.lo * 0.5);
    let centre = frac_mul((2 * n1 + len + 1) as f64, half);
    let x = 2.0 * frac_mul(len as f64, half);
    let num = (std::f64::consts::PI * x).sin();
    let den = (std::f64::consts::PI * b).sin();
    let g = unit(centre) * (num / den);
    let err = EPS * (2.0 * std::f64::consts::PI / den.abs() + 16.0 * g.norm())
        + drift
        + 8.0 * std::f64::consts::PI * span * DD_REL;
    (g, err)
}

/// `Σ_{n1<n≤n2} e(αn)` in closed form; `α ∈ ℤ` gives `n2 − n1`.
pub fn geometric_sum(alpha: f64, n1: i64, n2: i64) -> Result<Complex64> {
    if n1 > n2 {
        return Err(Error::Contract(format!("geometric_sum needs n1 ≤ n2, got {n1} > {n2}")));
    }
    if !alpha.is_finite() {
        return Err(Error::Domain(format!("α must be finite, got {alpha}")));
    }
    Ok(geometric_dd(signed_frac(Dd::from_f64(alpha)), 0.0, n1, n2).0)
}

/// Direct sum with `α` given to double-double accuracy (treated as exact).
pub fn divisor_expsum_direct_dd(table: &DivisorTable, m: u64, alpha: Dd) -> Result<ExpSumResult> {
    divisor_expsum_window_dd(table, 0, m, alpha)
}

/// `Σ_{m1<m≤m2} d(m) e(αm)` by direct accumulation; `m` in the result is `m2`.
pub fn divisor_expsum_window_dd(table: &DivisorTable, m1: u64, m2: u64, alpha: Dd) -> Result<ExpSumResult> {
    if m2 > table.limit() {
        return Err(Error::OutOfRange {
            what: "M",
            value: m2 as f64,
            limit: table.limit(),
        });
    }
    if m1 > m2 {
        return Err(Error::Contract(format!("window needs m1 ≤ m2, got {m1} > {m2}")));
    }
    if !alpha.is_finite() {
        return Err(Error::Domain("α must be finite".into()));
    }
    let d = table.d_values();
    const CHUNK: u64 = 1 << 14;
    let chunks: Vec<ComplexSum> = (0..(m2 - m1).div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut acc = ComplexSum::new();
            let lo = m1 + c * CHUNK + 1;
            let hi = (m1 + (c + 1) * CHUNK).min(m2);
            for k in lo..=hi {
                acc.add(unit(frac_mul(k as f64, alpha)) * d[(k - 1) as usize] as f64);
            }
            acc
        })
        .collect();
    let mut total = ComplexSum::new();
    for c in &chunks {
        total.merge(c);
    }
    let dsum = (table.divisor_sum_int(m2) - table.divisor_sum_int(m1)) as f64;
    let accuracy = dsum * (8.0 * EPS + 8.0 * alpha.hi.abs().max(1.0) * m2 as f64 * DD_REL);
    Ok(ExpSumResult {
        m: m2,
        alpha: alpha.to_f64(),
        value: total.value(),
        algorithm: Algorithm::Direct,
        accuracy,
    })
}

/// `Σ_{m1<m≤m2} d(m) e(mp/q)` with the residues `mp mod q` kept exact.
pub fn divisor_expsum_window_rational(
    table: &DivisorTable,
    m1: u64,
    m2: u64,
    p: &BigInt,
    q: &BigInt,
) -> Result<ExpSumResult> {
    if m2 > table.limit() {
        return Err(Error::OutOfRange {
            what: "M",
            value: m2 as f64,
            limit: table.limit(),
        });
    }
    if m1 > m2 || !q.is_positive() {
        return Err(Error::Contract("window needs m1 ≤ m2 and q > 0".into()));
    }
    let d = table.d_values();
    let step = p.mod_floor(q);
    let mut acc = ComplexSum::new();
    if let (Some(qq), Some(st)) = (q.to_u64(), step.to_u64()) {
        let (qq, st) = (qq as u128, st as u128);
        let mut res = (m1 as u128 * st) % qq;
        for k in m1 + 1..=m2 {
            res = (res + st) % qq;
            acc.add(unit(res as f64 / qq as f64) * d[(k - 1) as usize] as f64);
        }
    } else {
        let qf = ratio_to_f64(&BigInt::one(), q);
        let mut res = (BigInt::from(m1) * &step).mod_floor(q);
        for k in m1 + 1..=m2 {
            res += &step;
            if &res >= q {
                res -= q;
            }
            // res/q as f64 without forming a huge float
            let f = ratio_to_f64(&res, q).min(1.0 - qf);
            acc.add(unit(f) * d[(k - 1) as usize] as f64);
        }
    }
    let dsum = (table.divisor_sum_int(m2) - table.divisor_sum_int(m1)) as f64;
    Ok(ExpSumResult {
        m: m2,
        alpha: ratio_to_f64(p, q),
        value: acc.value(),
        algorithm: Algorithm::RationalClosedForm,
        accuracy: dsum * 8.0 * EPS,
    })
}

pub fn divisor_expsum_direct(table: &DivisorTable, m: u64, alpha: f64) -> Result<ExpSumResult> {
    divisor_expsum_direct_dd(table, m, Dd::from_f64(alpha))
}

/// Hyperbola-method sum; needs no table. `O(√M)` closed-form evaluations.
pub fn divisor_expsum_hyperbola_dd(m: u64, alpha: Dd) -> Result<ExpSumResult> {
    if m < 1 {
        return Err(Error::Domain("M must be at least 1".into()));
    }
    if !alpha.is_finite() {
        return Err(Error::Domain("α must be finite".into()));
    }
    let root = m.isqrt();
    let parts: Vec<(Complex64, Complex64, f64)> = (1..=root)
        .into_par_iter()
        .map(|u| {
            let au = alpha.mul_f64(u as f64);
            let beta = signed_frac(au);
            let beta_err = au.hi.abs() * DD_REL;
            let (g, eg) = geometric_dd(beta, beta_err, u as i64, (m / u) as i64);
            let sq = unit(frac_mul((u * u) as f64, alpha));
            let phase_err = alpha.hi.abs().max(1.0) * (u * u) as f64 * DD_REL;
            (g, sq, 2.0 * eg + 4.0 * EPS + 8.0 * phase_err)
        })
        .collect();
    let mut total = ComplexSum::new();
    let mut acc = ExactSum::new();
    for (g, sq, e) in &parts {
        total.add(g * 2.0);
        total.add(*sq);
        acc.add(*e);
    }
    let value = total.value();
    Ok(ExpSumResult {
        m,
        alpha: alpha.to_f64(),
        value,
        algorithm: Algorithm::Hyperbola,
        accuracy: acc.value() * (1.0 + 1e-10) + 4.0 * EPS * value.norm(),
    })
}

pub fn divisor_expsum_hyperbola(m: u64, alpha: f64) -> Result<ExpSumResult> {
    divisor_expsum_hyperbola_dd(m, Dd::from_f64(alpha))
}

/// Rational-α sum with its predicted main term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RationalExpSum {
    pub x: f64,
    pub r: i64,
    pub s: u64,
    #[serde(with = "crate::zeta::afe::complex_pair")]
    pub value: Complex64,
    /// `(x/s)(log x + 2γ − 1 − 2 log s)`
    pub predicted_main: f64,
    /// `|value − predicted_main|`
    pub residual: f64,
    pub accuracy: f64,
}

impl RationalExpSum {
    /// The residual bound `(√x + s) log 2s`, without the constant.
    pub fn bound_shape(&self) -> f64 {
        (self.x.sqrt() + self.s as f64) * (2.0 * self.s as f64).ln()
    }
}

/// `Σ_{m≤x} d(m) e(mr/s)` by bucketing `m mod s`.
pub fn divisor_expsum_rational(table: &DivisorTable, x: f64, r: i64, s: u64) -> Result<RationalExpSum> {
    if s < 1 {
        return Err(Error::Contract("denominator must be positive".into()));
    }
    if r.unsigned_abs().gcd(&s) != 1 {
        return Err(Error::Contract(format!("gcd({r}, {s}) ≠ 1")));
    }
    if !(x >= 1.0) || !x.is_finite() {
        return Err(Error::Domain(format!("x must be ≥ 1, got {x}")));
    }
    let n = x.floor() as u64;
    if n > table.limit() {
        return Err(Error::OutOfRange {
            what: "x",
            value: x,
            limit: table.limit(),
        });
    }
    let mut buckets = vec![0u64; s as usize];
    for (i, &dv) in table.d_values()[..n as usize].iter().enumerate() {
        buckets[((i as u64 + 1) % s) as usize] += dv as u64;
    }
    let rm = r.rem_euclid(s as i64) as u64;
    let mut acc = ComplexSum::new();
    for (j, &b) in buckets.iter().enumerate() {
        let k = (j as u64 * rm) % s;
        acc.add(unit(k as f64 / s as f64) * b as f64);
    }
    let value = acc.value();
    let c = Constants::f64();
    let sf = s as f64;
    let predicted_main = x / sf * (x.ln() + 2.0 * c.gamma_euler - 1.0 - 2.0 * sf.ln());
    let total = table.divisor_sum_int(n) as f64;
    Ok(RationalExpSum {
        x,
        r,
        s,
        value,
        predicted_main,
        residual: (value - predicted_main).norm(),
        accuracy: total * 8.0 * EPS,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::divisor::sieve;
    use proptest::prelude::*;

    #[test]
    fn geometric_examples() {
        assert!(geometric_sum(0.25, 0, 4).unwrap().norm() < 1e-15);
        assert_eq!(geometric_sum(0.0, 0, 7).unwrap(), Complex64::new(7.0, 0.0));
        assert_eq!(geometric_sum(3.0, 2, 7).unwrap(), Complex64::new(5.0, 0.0));
        assert_eq!(geometric_sum(0.3, 5, 5).unwrap(), Complex64::new(0.0, 0.0));
        assert!(geometric_sum(0.3, 6, 5).is_err());
    }

    #[test]
    fn geometric_matches_termwise() {
        for &(a, n1, n2) in &[(0.1, 0, 10), (0.37, -5, 40), (0.999, 3, 1000), (1e-7, 0, 500), (-0.4, 10, 12)] {
            let g = geometric_sum(a, n1, n2).unwrap();
            let mut direct = Complex64::new(0.0, 0.0);
            for n in (n1 + 1)..=n2 {
                direct += crate::numerics::e_of(a * n as f64).unwrap();
            }
            assert!((g - direct).norm() < 1e-11, "{a} {n1} {n2}: {g} vs {direct}");
        }
    }

    #[test]
    fn direct_examples() {
        let t = sieve(100).unwrap();
        let one = divisor_expsum_direct(&t, 1, 0.3).unwrap();
        assert!((one.value - crate::numerics::e_of(0.3).unwrap()).norm() < 1e-15);
        let half = divisor_expsum_direct(&t, 6, 0.5).unwrap();
        assert!((half.value - Complex64::new(4.0, 0.0)).norm() < 1e-14);
        assert_eq!(divisor_expsum_direct(&t, 6, 0.0).unwrap().value, Complex64::new(14.0, 0.0));
        assert!(matches!(divisor_expsum_direct(&t, 101, 0.1), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn windows_split_the_direct_sum() {
        let table = sieve(5000).unwrap();
        let alpha = Dd::from_f64(std::f64::consts::FRAC_1_PI);
        let whole = divisor_expsum_direct_dd(&table, 5000, alpha).unwrap().value;
        let a = divisor_expsum_window_dd(&table, 0, 1234, alpha).unwrap().value;
        let b = divisor_expsum_window_dd(&table, 1234, 5000, alpha).unwrap().value;
        assert!((whole - a - b).norm() < 1e-9);
        assert!(divisor_expsum_window_dd(&table, 10, 5, alpha).is_err());
        assert_eq!(divisor_expsum_window_dd(&table, 7, 7, alpha).unwrap().value, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn rational_window_matches_float_phase() {
        let table = sieve(3000).unwrap();
        let (p, q) = (BigInt::from(-22), BigInt::from(7));
        let exact = divisor_expsum_window_rational(&table, 100, 3000, &p, &q).unwrap().value;
        let float = divisor_expsum_window_dd(&table, 100, 3000, Dd::from_f64(-22.0).div_f64(7.0)).unwrap().value;
        assert!((exact - float).norm() < 1e-8);
        // a denominator beyond u64
        let q = num_traits::pow(BigInt::from(3), 50);
        let p = &q * 2 + 1;
        let big = divisor_expsum_window_rational(&table, 0, 50, &p, &q).unwrap().value;
        let alpha = Dd::from_f64(1.0 / 3f64.powi(50));
        let near = divisor_expsum_window_dd(&table, 0, 50, alpha).unwrap().value;
        assert!((big - near).norm() < 1e-12);
    }

    #[test]
    fn hyperbola_examples() {
        let h = divisor_expsum_hyperbola(1, 0.3).unwrap();
        assert!((h.value - crate::numerics::e_of(0.3).unwrap()).norm() < 1e-15);
        let h = divisor_expsum_hyperbola(6, 0.5).unwrap();
        assert!((h.value - Complex64::new(4.0, 0.0)).norm() < 1e-13);
        let t = sieve(10_000).unwrap();
        let e = std::f64::consts::E;
        let a = divisor_expsum_hyperbola(10_000, e).unwrap();
        let b = divisor_expsum_direct(&t, 10_000, e).unwrap();
        assert!((a.value - b.value).norm() < 1e-4);
        assert!((a.value - b.value).norm() <= a.accuracy + b.accuracy);
    }

    #[test]
    fn rational_examples() {
        let t = sieve(100).unwrap();
        let r = divisor_expsum_rational(&t, 10.0, 1, 1).unwrap();
        assert!((r.value - Complex64::new(27.0, 0.0)).norm() < 1e-12);
        assert!((r.residual - 2.43).abs() < 0.01);
        let r = divisor_expsum_rational(&t, 6.0, 1, 2).unwrap();
        assert!((r.value - Complex64::new(4.0, 0.0)).norm() < 1e-12);
        assert!((r.predicted_main - 1.6797).abs() < 1e-4);
        assert!((r.residual - 2.32).abs() < 0.01);
        assert!(matches!(divisor_expsum_rational(&t, 10.0, 2, 4), Err(Error::Contract(_))));
        let d = divisor_expsum_direct(&t, 97, 3.0 / 7.0).unwrap();
        let q = divisor_expsum_rational(&t, 97.5, 3, 7).unwrap();
        assert!((d.value - q.value).norm() < 1e-9);
    }

    proptest! {
        #[test]
        fn hyperbola_equals_direct(m in 1u64..3000, a in -10.0f64..10.0) {
            let t = sieve(3000).unwrap();
            let h = divisor_expsum_hyperbola(m, a).unwrap();
            let d = divisor_expsum_direct(&t, m, a).unwrap();
            prop_assert!((h.value - d.value).norm() <= h.accuracy + d.accuracy);
        }

        #[test]
        fn conjugation_and_period(m in 1u64..2000, k in 0i64..1_000_000) {
            // dyadic α so that −α and α+1 are exact
            let a = k as f64 / 65536.0;
            let x = divisor_expsum_hyperbola(m, a).unwrap();
            let y = divisor_expsum_hyperbola(m, -a).unwrap();
            let z = divisor_expsum_hyperbola(m, a + 1.0).unwrap();
            prop_assert!((x.value - y.value.conj()).norm() <= x.accuracy + y.accuracy);
            prop_assert!((x.value - z.value).norm() <= x.accuracy + z.accuracy);
        }

        #[test]
        fn geometric_bound(a in -5.0f64..5.0, n1 in -1000i64..1000, len in 0i64..5000) {
            let g = geometric_sum(a, n1, n1 + len).unwrap();
            let d = crate::numerics::dist_to_nearest_int(a);
            let bound = if d == 0.0 { len as f64 } else { (len as f64).min(1.0 / (2.0 * d)) };
            prop_assert!(g.norm() <= bound + 1.0);
        }
    }
}
