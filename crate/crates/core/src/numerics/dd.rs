//! Double-double arithmetic (an unevaluated sum `hi + lo` of two `f64`s,
//! about 106 significand bits).
//!
//! Used on the hot paths where the full arbitrary-precision backend is too
//! slow: phase reduction of `t·ln n` and `α·m`, and the θ function of the
//! Riemann–Siegel formula. The conversion constants (π, ln 2) are derived from
//! the arbitrary-precision backend once per process.

use std::ops::{Add, Mul, Neg, Sub};
use std::sync::OnceLock;

use super::bigfloat;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    #[inline]
    pub const fn from_f64(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    #[inline]
    pub fn new(hi: f64, lo: f64) -> Self {
        let (hi, lo) = quick_two_sum(hi, lo);
        Dd { hi, lo }
    }

    /// Exact product of two doubles.
    #[inline]
    pub fn from_prod(a: f64, b: f64) -> Self {
        let (hi, lo) = two_prod(a, b);
        Dd { hi, lo }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.hi.is_finite() && self.lo.is_finite()
    }

    #[inline]
    pub fn mul_f64(self, b: f64) -> Self {
        let (p, e) = two_prod(self.hi, b);
        let e = e + self.lo * b;
        Dd::new(p, e)
    }

    pub fn div(self, b: Dd) -> Self {
        let q1 = self.hi / b.hi;
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        Dd::new(q1, q2) + Dd::from_f64(q3)
    }

    pub fn div_f64(self, b: f64) -> Self {
        self.div(Dd::from_f64(b))
    }

    pub fn floor(self) -> Self {
        let hi = self.hi.floor();
        if hi == self.hi {
            Dd::new(hi, self.lo.floor())
        } else {
            Dd { hi, lo: 0.0 }
        }
    }

    pub fn round(self) -> Self {
        (self + Dd::from_f64(0.5)).floor()
    }

    /// `self mod m` in `[0, m)` for positive `m`.
    pub fn rem_euclid(self, m: Dd) -> Self {
        let k = self.div(m).floor();
        let mut r = self - m * k;
        if r.hi < 0.0 {
            r = r + m;
        }
        if r >= m {
            r = r - m;
        }
        r
    }

    /// `ln 2` at double-double precision.
    pub fn ln2() -> Dd {
        consts().ln2
    }

    pub fn pi() -> Dd {
        consts().pi
    }

    pub fn two_pi() -> Dd {
        consts().two_pi
    }

    /// `exp(self)`; overflows to infinity beyond ≈709.
    pub fn exp(self) -> Self {
        if self.hi > 709.0 {
            return Dd::from_f64(f64::INFINITY);
        }
        if self.hi < -745.0 {
            return Dd::ZERO;
        }
        let ln2 = Dd::ln2();
        let k = (self.hi / ln2.hi).round();
        let r = self - ln2.mul_f64(k);
        // |r| ≤ ln2/2; scale down by 2^10 so the Taylor series converges fast.
        let r = Dd::new(r.hi / 1024.0, r.lo / 1024.0);
        // expm1(r) by Taylor series.
        let mut term = r;
        let mut y = r;
        for n in 2..=14 {
            term = (term * r).div_f64(n as f64);
            y = y + term;
            if term.hi.abs() < 1e-36 {
                break;
            }
        }
        // (1+y)^2 - 1 = 2y + y^2, repeated ten times.
        for _ in 0..10 {
            y = y.mul_f64(2.0) + y * y;
        }
        let e = y + Dd::ONE;
        let scale = 2f64.powi(k as i32);
        Dd {
            hi: e.hi * scale,
            lo: e.lo * scale,
        }
    }

    /// Natural logarithm for positive arguments (NaN otherwise).
    pub fn ln(self) -> Self {
        if !(self.hi > 0.0) {
            return Dd::from_f64(f64::NAN);
        }
        let y0 = Dd::from_f64(self.hi.ln());
        // One Newton step on exp(y) = x doubles the number of correct bits.
        y0 + self * (-y0).exp() - Dd::ONE
    }
}

impl Add for Dd {
    type Output = Dd;
    #[inline]
    fn add(self, b: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let e = e + t;
        let (s, e) = quick_two_sum(s, e);
        let e = e + f;
        let (hi, lo) = quick_two_sum(s, e);
        Dd { hi, lo }
    }
}

impl Sub for Dd {
    type Output = Dd;
    #[inline]
    fn sub(self, b: Dd) -> Dd {
        self + (-b)
    }
}

impl Neg for Dd {
    type Output = Dd;
    #[inline]
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Mul for Dd {
    type Output = Dd;
    #[inline]
    fn mul(self, b: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        Dd::new(p, e)
    }
}

impl PartialOrd for Dd {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(std::cmp::Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            o => o,
        }
    }
}

impl From<f64> for Dd {
    fn from(x: f64) -> Self {
        Dd::from_f64(x)
    }
}

struct DdConsts {
    pi: Dd,
    two_pi: Dd,
    ln2: Dd,
}

fn consts() -> &'static DdConsts {
    static C: OnceLock<DdConsts> = OnceLock::new();
    C.get_or_init(|| {
        let c = bigfloat::with_consts(|cc| {
            let p = 192;
            let pi = cc.pi(p, bigfloat::RM);
            let ln2 = cc.ln_2(p, bigfloat::RM);
            (pi, ln2)
        });
        let pi = bigfloat::to_dd(&c.0);
        DdConsts {
            pi,
            two_pi: Dd {
                hi: pi.hi * 2.0,
                lo: pi.lo * 2.0,
            },
            ln2: bigfloat::to_dd(&c.1),
        }
    })
}

/// Cached `ln n` for small `n`.
const LN_CACHE: usize = 1 << 16;

/// `ln n` at double-double precision.
pub fn ln_int(n: u64) -> Dd {
    static TABLE: OnceLock<Vec<Dd>> = OnceLock::new();
    if (n as usize) < LN_CACHE {
        let t = TABLE.get_or_init(|| {
            (0..LN_CACHE)
                .map(|k| {
                    if k == 0 {
                        Dd::from_f64(f64::NEG_INFINITY)
                    } else {
                        Dd::from_f64(k as f64).ln()
                    }
                })
                .collect()
        });
        t[n as usize]
    } else {
        Dd::from_f64(n as f64).ln()
    }
}

/// `(x·c) mod 2π` in `[-π, π)` for a double `x` and double-double `c`.
#[inline]
pub fn mul_mod_two_pi(x: f64, c: Dd) -> f64 {
    let p = Dd::from_prod(x, c.hi) + Dd::from_f64(x * c.lo);
    reduce_angle(p)
}

/// Reduce a double-double angle into `[-π, π)` and round to `f64`.
#[inline]
pub fn reduce_angle(p: Dd) -> f64 {
    let tp = Dd::two_pi();
    let k = (p.hi / tp.hi).round();
    let r = p - (Dd::from_prod(k, tp.hi) + Dd::from_f64(k * tp.lo));
    r.to_f64()
}

/// Fractional part of `m·α` for an integer `m` and double-double `α`, in `[0, 1)`.
#[inline]
pub fn frac_mul(m: f64, alpha: Dd) -> f64 {
    let p = Dd::from_prod(m, alpha.hi) + Dd::from_f64(m * alpha.lo);
    let f = p - p.floor();
    let v = f.to_f64();
    if v >= 1.0 {
        v - 1.0
    } else if v < 0.0 {
        v + 1.0
    } else {
        v
    }
}
