use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

/// Exact Bernoulli numbers `B_0, …, B_n` (with `B_1 = -1/2`).
pub fn bernoulli_numbers(n: usize) -> Vec<BigRational> {
    // B_m = -1/(m+1) Σ_{k<m} C(m+1, k) B_k
    let mut b: Vec<BigRational> = Vec::with_capacity(n + 1);
    b.push(BigRational::from_integer(BigInt::from(1)));
    for m in 1..=n {
        if m > 1 && m % 2 == 1 {
            b.push(BigRational::zero());
            continue;
        }
        let mut binom = BigInt::from(1); // C(m+1, 0)
        let mut acc = BigRational::zero();
        for (k, bk) in b.iter().enumerate().take(m) {
            if !bk.is_zero() {
                acc += bk * BigRational::from_integer(binom.clone());
            }
            binom = binom * BigInt::from(m + 1 - k) / BigInt::from(k + 1);
        }
        b.push(-acc / BigRational::from_integer(BigInt::from(m + 1)));
    }
    b
}

/// `B_{2k}` for `k = 0..=60` as `f64`.
pub fn even_bernoulli_f64() -> &'static [f64] {
    static T: OnceLock<Vec<f64>> = OnceLock::new();
    T.get_or_init(|| {
        let b = bernoulli_numbers(120);
        (0..=60)
            .map(|k| {
                let r = &b[2 * k];
                super::bigfloat::ratio_to_f64(r.numer(), r.denom())
            })
            .collect()
    })
}

/// `B_{2k}` for `k ≤ kmax`, exact.
pub fn even_bernoulli_exact(kmax: usize) -> Vec<BigRational> {
    let b = bernoulli_numbers(2 * kmax);
    (0..=kmax).map(|k| b[2 * k].clone()).collect()
}

#[allow(dead_code)]
fn approx(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}
