//! Oracles for the integration tests, written without the library's own
//! numerics.
#![allow(dead_code)]

use std::f64::consts::{PI, TAU};

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};

const P: usize = 200;
const RM: RoundingMode = RoundingMode::ToEven;

pub fn d_trial(n: u64) -> u64 {
    let mut c = 0;
    let mut i = 1;
    while i * i <= n {
        if n.is_multiple_of(i) {
            c += if i * i == n { 1 } else { 2 };
        }
        i += 1;
    }
    c
}

/// `B_{2j}/(2j)!` for `j = 1..=count`.
fn bernoulli_over_factorial(count: usize) -> Vec<BigRational> {
    let n = 2 * count;
    let mut b = vec![BigRational::one()];
    for m in 1..=n {
        let mut acc = BigRational::zero();
        let mut binom = BigInt::one();
        for (k, bk) in b.iter().enumerate() {
            acc += BigRational::from_integer(binom.clone()) * bk;
            binom = binom * BigInt::from(m + 1 - k) / BigInt::from(k + 1);
        }
        b.push(-acc / BigRational::from_integer(BigInt::from(m + 1)));
    }
    let mut fact = BigInt::one();
    let mut out = Vec::new();
    for (m, bm) in b.iter().enumerate().skip(1) {
        fact *= BigInt::from(m);
        if m % 2 == 0 {
            out.push(bm / BigRational::from_integer(fact.clone()));
        }
    }
    out
}

#[derive(Clone)]
struct Cx {
    re: BigFloat,
    im: BigFloat,
}

impl Cx {
    fn add(&self, o: &Cx) -> Cx {
        Cx {
            re: self.re.add(&o.re, P, RM),
            im: self.im.add(&o.im, P, RM),
        }
    }
    fn mul(&self, o: &Cx) -> Cx {
        Cx {
            re: self.re.mul(&o.re, P, RM).sub(&self.im.mul(&o.im, P, RM), P, RM),
            im: self.re.mul(&o.im, P, RM).add(&self.im.mul(&o.re, P, RM), P, RM),
        }
    }
    fn scale(&self, x: &BigFloat) -> Cx {
        Cx {
            re: self.re.mul(x, P, RM),
            im: self.im.mul(x, P, RM),
        }
    }
    fn div(&self, o: &Cx) -> Cx {
        let den = o.re.mul(&o.re, P, RM).add(&o.im.mul(&o.im, P, RM), P, RM);
        let conj = Cx {
            re: o.re.clone(),
            im: o.im.neg(),
        };
        let n = self.mul(&conj);
        Cx {
            re: n.re.div(&den, P, RM),
            im: n.im.div(&den, P, RM),
        }
    }
}

fn big(x: f64) -> BigFloat {
    BigFloat::from_f64(x, P)
}

fn to_f64(x: &BigFloat, cc: &mut Consts) -> f64 {
    x.format(Radix::Dec, RM, cc).unwrap().parse().unwrap()
}

fn rational(q: &BigRational, cc: &mut Consts) -> BigFloat {
    let n = BigFloat::parse(&q.numer().to_string(), Radix::Dec, P, RM, cc);
    let d = BigFloat::parse(&q.denom().to_string(), Radix::Dec, P, RM, cc);
    n.div(&d, P, RM)
}

/// `n^{-s}` for `s = ½ + it`.
fn pow_neg_s(n: u64, t: &BigFloat, cc: &mut Consts) -> Cx {
    let nb = BigFloat::from_u64(n, P);
    let ln = nb.ln(P, RM, cc);
    let arg = t.mul(&ln, P, RM);
    let r = BigFloat::from_u64(1, P).div(&nb.sqrt(P, RM), P, RM);
    Cx {
        re: arg.cos(P, RM, cc).mul(&r, P, RM),
        im: arg.sin(P, RM, cc).mul(&r, P, RM).neg(),
    }
}

/// `ζ(½+it)` by Euler–Maclaurin at 200 bits.
pub fn zeta_oracle(t: f64) -> Complex64 {
    const J: usize = 30;
    let mut cc = Consts::new().unwrap();
    let coeffs = bernoulli_over_factorial(J);
    let tb = big(t);
    let s = Cx {
        re: big(0.5),
        im: tb.clone(),
    };
    let n = t.abs() as u64 + 30;
    let mut sum = Cx {
        re: BigFloat::from_u64(0, P),
        im: BigFloat::from_u64(0, P),
    };
    for k in 1..n {
        sum = sum.add(&pow_neg_s(k, &tb, &mut cc));
    }
    let nb = BigFloat::from_u64(n, P);
    let n_s = pow_neg_s(n, &tb, &mut cc);
    let s_minus_1 = Cx {
        re: big(-0.5),
        im: tb.clone(),
    };
    // N^{1−s}/(s−1) + N^{−s}/2
    sum = sum.add(&n_s.scale(&nb).div(&s_minus_1));
    sum = sum.add(&n_s.scale(&big(0.5)));
    let inv_n = BigFloat::from_u64(1, P).div(&nb, P, RM);
    let inv_n2 = inv_n.mul(&inv_n, P, RM);
    let mut poch = s.clone();
    let mut tail = n_s.scale(&inv_n);
    for (j, c) in coeffs.iter().enumerate() {
        let term = poch.mul(&tail).scale(&rational(c, &mut cc));
        sum = sum.add(&term);
        let j = (j + 1) as f64;
        let a = Cx {
            re: big(0.5 + 2.0 * j - 1.0),
            im: tb.clone(),
        };
        let b = Cx {
            re: big(0.5 + 2.0 * j),
            im: tb.clone(),
        };
        poch = poch.mul(&a).mul(&b);
        tail = tail.scale(&inv_n2);
    }
    Complex64::new(to_f64(&sum.re, &mut cc), to_f64(&sum.im, &mut cc))
}

#[derive(Debug, Clone, Copy)]
pub enum Window {
    Refined,
    Intro,
}

/// The key sum as a double loop over `(k, m)` with trial-division `d(m)`.
pub fn brute_key_sum(a: f64, b: f64, t: f64, window: Window) -> Complex64 {
    let mut total = Complex64::new(0.0, 0.0);
    let mut k = 1u64;
    while a / TAU * (t / PI).ln() > k as f64 {
        let l = TAU * k as f64 / a;
        let alpha = l.exp();
        let (lo, hi) = match window {
            Window::Refined => (t / TAU / alpha, t / PI / alpha),
            Window::Intro => (0.0, t / alpha),
        };
        let mut inner = Complex64::new(0.0, 0.0);
        // T e^{−l} is an integer for rational ratios; keep that endpoint open
        let hi = hi * (1.0 - 1e-12);
        let mut m = 1u64;
        while (m as f64) < hi {
            if m as f64 > lo {
                let phase = (m as f64 * alpha).fract();
                inner += d_trial(m) as f64 * Complex64::from_polar(1.0, -TAU * phase);
            }
            m += 1;
        }
        let weight = match window {
            Window::Refined => Complex64::from_polar((l / 2.0).exp(), b * l),
            Window::Intro => Complex64::new((l / 2.0).exp(), 0.0),
        };
        total += weight * inner;
        k += 1;
    }
    total
}
