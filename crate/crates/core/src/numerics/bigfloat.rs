//! Glue around the arbitrary-precision backend (`astro-float`): constant
//! caches, exact conversion to rationals and rounding down to `f64`/[`Dd`].

use std::cell::RefCell;

use astro_float::{BigFloat, Consts, Radix, RoundingMode, Sign};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::dd::Dd;

pub const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("constant cache"));
}

/// Run `f` with this thread's constant cache.
pub fn with_consts<R>(f: impl FnOnce(&mut Consts) -> R) -> R {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

pub fn from_f64(x: f64, p: usize) -> BigFloat {
    BigFloat::from_f64(x, p)
}

pub fn from_u64(x: u64, p: usize) -> BigFloat {
    BigFloat::from_u64(x, p)
}

pub fn from_i64(x: i64, p: usize) -> BigFloat {
    BigFloat::from_i64(x, p)
}

pub fn pi(p: usize) -> BigFloat {
    with_consts(|cc| cc.pi(p, RM))
}

fn ldexp(mut x: f64, mut e: i64) -> f64 {
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
        if x.is_infinite() {
            return x;
        }
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
        if x == 0.0 {
            return x;
        }
    }
    x * 2f64.powi(e as i32)
}

/// Nearest `f64` (the top 128 mantissa bits are rounded once).
pub fn to_f64(x: &BigFloat) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x.is_inf_pos() {
        return f64::INFINITY;
    }
    if x.is_inf_neg() {
        return f64::NEG_INFINITY;
    }
    if x.is_zero() {
        return 0.0;
    }
    let (m, _n, s, e, _) = x.as_raw_parts().expect("finite value");
    let len = m.len();
    let top = m[len - 1] as u128;
    let next = if len >= 2 { m[len - 2] as u128 } else { 0 };
    let sticky = m[..len.saturating_sub(2)].iter().any(|&w| w != 0);
    let mut word = (top << 64) | next;
    if sticky {
        word |= 1;
    }
    let v = ldexp(word as f64, e as i64 - 128);
    if s == Sign::Neg {
        -v
    } else {
        v
    }
}

/// Split into a double-double `hi + lo`.
pub fn to_dd(x: &BigFloat) -> Dd {
    let hi = to_f64(x);
    if !hi.is_finite() || hi == 0.0 {
        return Dd::from_f64(hi);
    }
    let p = x.precision().unwrap_or(128).max(128);
    let rest = x.sub(&BigFloat::from_f64(hi, p), p, RM);
    Dd::new(hi, to_f64(&rest))
}

/// Exact value as a rational number.
pub fn to_rational(x: &BigFloat) -> Option<BigRational> {
    if x.is_nan() || x.is_inf() {
        return None;
    }
    if x.is_zero() {
        return Some(BigRational::zero());
    }
    let (m, _n, s, e, _) = x.as_raw_parts()?;
    let mut bytes = Vec::with_capacity(m.len() * 8);
    for w in m {
        bytes.extend_from_slice(&w.to_le_bytes());
    }
    let mant = BigInt::from(BigUint::from_bytes_le(&bytes));
    let mant = if s == Sign::Neg { -mant } else { mant };
    let shift = e as i64 - 64 * m.len() as i64;
    let r = if shift >= 0 {
        BigRational::from_integer(mant << (shift as usize))
    } else {
        BigRational::new(mant, BigInt::one() << ((-shift) as usize))
    };
    Some(r)
}

/// Exact rational `f64` value.
pub fn f64_to_rational(x: f64) -> Option<BigRational> {
    BigRational::from_float(x)
}

pub fn from_bigint(i: &BigInt, p: usize) -> BigFloat {
    if let Ok(v) = i64::try_from(i) {
        return BigFloat::from_i64(v, p);
    }
    let s = i.to_string();
    with_consts(|cc| BigFloat::parse(&s, Radix::Dec, p, RM, cc))
}

pub fn from_rational(r: &BigRational, p: usize) -> BigFloat {
    let n = from_bigint(r.numer(), p + 64);
    let d = from_bigint(r.denom(), p + 64);
    n.div(&d, p, RM)
}

/// Parse a decimal literal at precision `p`.
pub fn parse_decimal(s: &str, p: usize) -> Option<BigFloat> {
    let v = with_consts(|cc| BigFloat::parse(s, Radix::Dec, p, RM, cc));
    if v.is_nan() {
        None
    } else {
        Some(v)
    }
}

/// Floor of a finite value as an exact integer.
pub fn floor_to_bigint(x: &BigFloat) -> Option<BigInt> {
    let r = to_rational(x)?;
    Some(r.floor().to_integer())
}

/// Decimal rendering with `digits` significant figures (for reports).
pub fn to_decimal_string(x: &BigFloat) -> String {
    with_consts(|cc| x.format(Radix::Dec, RM, cc).unwrap_or_else(|_| "NaN".into()))
}

/// `|x|` as `f64`, rounded up by one relative ulp-ish margin.
pub fn abs_upper_f64(x: &BigFloat) -> f64 {
    let v = to_f64(x).abs();
    v * (1.0 + 4.0 * f64::EPSILON)
}

pub fn rational_abs_to_f64_upper(r: &BigRational) -> f64 {
    let num = r.numer().abs();
    let den = r.denom().clone();
    let v = ratio_to_f64(&num, &den);
    v * (1.0 + 4.0 * f64::EPSILON)
}

/// Approximate `num/den` as `f64` for arbitrarily large operands.
pub fn ratio_to_f64(num: &BigInt, den: &BigInt) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    let nb = num.bits() as i64;
    let db = den.bits() as i64;
    // Scale both to ~64 significant bits.
    let shift_n = (nb - 64).max(0);
    let shift_d = (db - 64).max(0);
    let n = (num.abs() >> shift_n as usize).to_f64().unwrap_or(f64::NAN);
    let d = (den.abs() >> shift_d as usize).to_f64().unwrap_or(f64::NAN);
    let v = ldexp(n / d, shift_n - shift_d);
    if num.is_negative() != den.is_negative() {
        -v
    } else {
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f64_roundtrip() {
        for &x in &[1.0, 0.75, -3.5, 1e-5, 123456789.125, 6.02e23] {
            assert_eq!(to_f64(&from_f64(x, 128)), x);
            let r = to_rational(&from_f64(x, 128)).unwrap();
            assert_eq!(r, f64_to_rational(x).unwrap());
        }
    }

    #[test]
    fn pi_dd_split() {
        let p = pi(256);
        let d = to_dd(&p);
        assert_eq!(d.hi, std::f64::consts::PI);
        assert!(d.lo.abs() > 0.0 && d.lo.abs() < 1e-15);
    }

    #[test]
    fn big_integer_conversion() {
        let i: BigInt = "123456789012345678901234567890".parse().unwrap();
        let f = from_bigint(&i, 256);
        assert_eq!(floor_to_bigint(&f).unwrap(), i);
        assert!((ratio_to_f64(&i, &BigInt::from(7)) - 1.763668414462081e28).abs() / 1.7e28 < 1e-14);
    }
}
