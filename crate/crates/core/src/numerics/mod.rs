//! Extended-precision plumbing shared by every other module: the precision
//! context and constants, double-double and arbitrary-precision helpers,
//! exact summation, and the unit-circle map `e(x) = exp(2πix)`.

pub mod bernoulli;
pub mod bigfloat;
pub mod dd;
pub mod expr;
pub mod precision;
pub mod sum;

use astro_float::BigFloat;
use num_complex::Complex64;

pub use dd::Dd;
pub use expr::{Approx, RealExpr};
pub use precision::{Constants, F64Constants, PrecisionContext};
pub use sum::{exact_sum, ComplexSum, ExactSum};

use crate::error::{Error, Result};

/// `x mod 1` in `[0, 1)`. Exact for every finite `f64`, except that values
/// within half an ulp below an integer round up to that integer and are
/// mapped to `0`.
pub fn reduce_mod_one(x: f64) -> f64 {
    let f = x - x.floor();
    if f >= 1.0 {
        0.0
    } else {
        f
    }
}

/// A reduced phase with the absolute error inherited from its source.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reduced {
    pub frac: f64,
    pub err: f64,
}

/// Reduce a double-double value mod 1.
pub fn reduce_dd_mod_one(x: Dd) -> Reduced {
    let f = (x - x.floor()).to_f64();
    let frac = if f >= 1.0 { f - 1.0 } else if f < 0.0 { f + 1.0 } else { f };
    // One rounding to f64 plus the double-double representation error.
    let err = f64::EPSILON + x.hi.abs() * 2f64.powi(-104);
    Reduced { frac, err }
}

/// Reduce an arbitrary-precision value mod 1. `x` is taken to carry the
/// relative error `2^(1−bits)` of its context, which is propagated into the
/// returned bound.
pub fn reduce_big_mod_one(x: &BigFloat, ctx: PrecisionContext) -> Reduced {
    let p = x.precision().unwrap_or(ctx.bits()).max(ctx.bits());
    let fl = x.floor();
    let f = x.sub(&fl, p, bigfloat::RM);
    let frac = reduce_mod_one(bigfloat::to_f64(&f));
    let err = bigfloat::abs_upper_f64(x) * ctx.epsilon() + f64::EPSILON;
    Reduced { frac, err }
}

/// `‖x‖`, the distance from `x` to the nearest integer.
pub fn dist_to_nearest_int(x: f64) -> f64 {
    let f = reduce_mod_one(x);
    f.min(1.0 - f)
}

/// `exp(2πix)`; non-finite input is a domain error.
pub fn e_of(x: f64) -> Result<Complex64> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("e(x) needs finite x, got {x}")));
    }
    Ok(unit(reduce_mod_one(x)))
}

/// `exp(2πif)` for `f` already reduced to `[0, 1)` (any finite value works,
/// but accuracy degrades with `|f|`). Quarter turns are exact.
#[inline]
pub fn unit(f: f64) -> Complex64 {
    let y = 4.0 * f;
    let q = y.round();
    let r = (y - q) * 0.25;
    let (s, c) = (std::f64::consts::TAU * r).sin_cos();
    match (q as i64).rem_euclid(4) {
        0 => Complex64::new(c, s),
        1 => Complex64::new(-s, c),
        2 => Complex64::new(-c, -s),
        _ => Complex64::new(s, -c),
    }
}

/// `exp(iθ)` for an angle already reduced to a few units.
#[inline]
pub fn cis(theta: f64) -> Complex64 {
    let (s, c) = theta.sin_cos();
    Complex64::new(c, s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn quarter_turns_are_exact() {
        assert_eq!(e_of(0.0).unwrap(), Complex64::new(1.0, 0.0));
        assert_eq!(e_of(0.5).unwrap(), Complex64::new(-1.0, -0.0));
        let q = e_of(0.25).unwrap();
        assert_eq!((q.re, q.im), (-0.0, 1.0));
        assert_eq!(e_of(3.75).unwrap(), Complex64::new(0.0, -1.0));
        assert!(e_of(f64::NAN).is_err());
        assert!(e_of(f64::INFINITY).is_err());
    }

    #[test]
    fn mod_one_examples() {
        assert_eq!(reduce_mod_one(3.25), 0.25);
        assert_eq!(reduce_mod_one(-0.25), 0.75);
        assert_eq!(reduce_mod_one(535.4916555), 535.4916555 - 535.0);
        assert!((reduce_mod_one(535.4916555) - 0.4916555).abs() < 1e-12);
        assert_eq!(reduce_mod_one(-1e-20), 0.0);
    }

    #[test]
    fn nearest_int_examples() {
        assert_eq!(dist_to_nearest_int(0.5), 0.5);
        assert!((dist_to_nearest_int(3.1) - 0.1).abs() < 1e-15);
        assert_eq!(dist_to_nearest_int(-2.75), 0.25);
    }

    #[test]
    fn big_reduction_tracks_error() {
        let ctx = PrecisionContext::default();
        let x = RealExpr::parse("exp(2*pi)").unwrap().eval(ctx.bits()).unwrap();
        let r = reduce_big_mod_one(&x.value, ctx);
        assert!((r.frac - 0.491_655_524_764_7).abs() < 1e-12);
        assert!(r.err < 1e-15);
        let d = reduce_dd_mod_one(x.to_dd());
        assert!((d.frac - r.frac).abs() <= d.err + r.err);
    }

    proptest! {
        #[test]
        fn unit_modulus(x in -1e12f64..1e12) {
            let z = e_of(x).unwrap();
            prop_assert!((z.norm() - 1.0).abs() <= 2.0 * f64::EPSILON);
        }

        #[test]
        fn period_one(x in -1.0e12f64..1.0e12) {
            // keep x+1 exactly representable
            let x = (x * 1024.0).round() / 1024.0;
            let a = e_of(x).unwrap();
            let b = e_of(x + 1.0).unwrap();
            prop_assert!((a - b).norm() <= 4.0 * f64::EPSILON);
        }

        #[test]
        fn nearest_int_symmetry(x in -1e9f64..1e9) {
            let x = (x * 65536.0).round() / 65536.0;
            let d = dist_to_nearest_int(x);
            prop_assert_eq!(d, dist_to_nearest_int(x + 1.0));
            prop_assert_eq!(d, dist_to_nearest_int(-x));
            prop_assert!((0.0..=0.5).contains(&d));
        }
    }
}
