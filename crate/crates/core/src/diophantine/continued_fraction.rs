//! Continued fractions certified from a rational enclosure, and Dirichlet
//! approximants built from their convergents.

use num_bigint::BigInt;
use num_integer::Roots;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::as_decimal;
use crate::error::{Error, Result};
use crate::numerics::bigfloat::rational_abs_to_f64_upper;
use crate::numerics::precision::MAX_BITS;
use crate::numerics::{Approx, PrecisionContext, RealExpr};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContinuedFraction {
    #[serde(with = "as_decimal")]
    pub a0: BigInt,
    #[serde(with = "as_decimal::seq")]
    pub partial_quotients: Vec<BigInt>,
    #[serde(with = "as_decimal::pairs")]
    pub convergents: Vec<(BigInt, BigInt)>,
    pub requested: usize,
    /// The value is rational and its expansion is complete.
    pub terminated: bool,
    pub bits: usize,
}

impl ContinuedFraction {
    /// Number of certified terms, `a0` included.
    pub fn len(&self) -> usize {
        1 + self.partial_quotients.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_truncated(&self) -> bool {
        self.len() < self.requested && !self.terminated
    }
}

/// Floor-based expansion of every real in `[lo, hi]` simultaneously. A
/// quotient is emitted only when both endpoints agree on it.
pub(crate) struct CfStream {
    lo: BigRational,
    hi: BigRational,
    done: bool,
    pub terminated: bool,
}

impl CfStream {
    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        debug_assert!(lo <= hi);
        CfStream {
            lo,
            hi,
            done: false,
            terminated: false,
        }
    }

    pub fn from_approx(x: &Approx) -> Self {
        let (lo, hi) = x.enclosure();
        CfStream::new(lo, hi)
    }

    pub fn next_quotient(&mut self) -> Option<BigInt> {
        if self.done {
            return None;
        }
        let a = self.lo.floor();
        if self.hi.floor() != a {
            self.done = true;
            return None;
        }
        let l = &self.lo - &a;
        let h = &self.hi - &a;
        if l.is_zero() {
            // lo is the integer a: exact only when the interval is a point
            self.done = true;
            self.terminated = h.is_zero();
        } else {
            self.lo = h.recip();
            self.hi = l.recip();
        }
        Some(a.to_integer())
    }
}

fn convergents_of(quotients: &[BigInt]) -> Vec<(BigInt, BigInt)> {
    let (mut p0, mut q0) = (BigInt::one(), BigInt::zero());
    let (mut p1, mut q1) = (quotients[0].clone(), BigInt::one());
    let mut out = vec![(p1.clone(), q1.clone())];
    for a in &quotients[1..] {
        let p2 = a * &p1 + &p0;
        let q2 = a * &q1 + &q0;
        p0 = std::mem::replace(&mut p1, p2);
        q0 = std::mem::replace(&mut q1, q2);
        out.push((p1.clone(), q1.clone()));
    }
    out
}

/// Up to `n_terms` certified terms (`a0` counts as one) of the expansion of
/// a value known up to its error bound.
pub fn continued_fraction_of(alpha: &Approx, n_terms: usize) -> Result<ContinuedFraction> {
    if n_terms == 0 {
        return Err(Error::Contract("n_terms must be at least 1".into()));
    }
    let mut stream = CfStream::from_approx(alpha);
    if !stream.lo.is_positive() {
        return Err(Error::Domain("continued fraction needs alpha > 0".into()));
    }
    let mut qs = Vec::new();
    while qs.len() < n_terms {
        match stream.next_quotient() {
            Some(a) => qs.push(a),
            None => break,
        }
    }
    if qs.is_empty() {
        return Err(Error::Precision(format!(
            "{} bits do not determine the integer part",
            alpha.bits
        )));
    }
    let convergents = convergents_of(&qs);
    let a0 = qs.remove(0);
    Ok(ContinuedFraction {
        a0,
        partial_quotients: qs,
        convergents,
        requested: n_terms,
        terminated: stream.terminated,
        bits: alpha.bits,
    })
}

pub fn continued_fraction(
    alpha: &RealExpr,
    n_terms: usize,
    ctx: PrecisionContext,
) -> Result<ContinuedFraction> {
    continued_fraction_of(&alpha.eval(ctx.bits())?, n_terms)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ApproxKind {
    Convergent,
    Intermediate,
}

/// `p/q` with `q ≤ √M` and `|α − p/q| ≤ err ≤ 1/(q√M)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RationalApprox {
    #[serde(with = "as_decimal")]
    pub p: BigInt,
    #[serde(with = "as_decimal")]
    pub q: BigInt,
    pub err: f64,
    #[serde(rename = "M")]
    pub m: u64,
    pub alpha: f64,
    pub kind: ApproxKind,
    pub bits: usize,
}

enum Attempt {
    Done(BigInt, BigInt, ApproxKind),
    NeedBits,
}

/// Distances from the enclosure to `p/q`: (nearest point, farthest point).
fn distance_range(lo: &BigRational, hi: &BigRational, x: &BigRational) -> (BigRational, BigRational) {
    let dl = (lo - x).abs();
    let dh = (hi - x).abs();
    let far = dl.clone().max(dh.clone());
    let near = if lo <= x && x <= hi {
        BigRational::zero()
    } else {
        dl.min(dh)
    };
    (near, far)
}

/// `d²q²M ≤ 1`
fn within(d: &BigRational, q: &BigInt, m: u64) -> bool {
    let lhs = d * d * BigRational::from_integer(q * q * BigInt::from(m));
    lhs <= BigRational::one()
}

fn attempt(alpha: &Approx, m: u64) -> Attempt {
    let big_q = BigInt::from(m.sqrt());
    let (lo, hi) = alpha.enclosure();
    let mut stream = CfStream::new(lo.clone(), hi.clone());
    let Some(a0) = stream.next_quotient() else {
        return Attempt::NeedBits;
    };
    let (mut p0, mut q0) = (BigInt::one(), BigInt::zero());
    let (mut p1, mut q1) = (a0, BigInt::one());
    loop {
        let Some(a) = stream.next_quotient() else {
            if stream.terminated {
                return Attempt::Done(p1, q1, ApproxKind::Convergent);
            }
            return Attempt::NeedBits;
        };
        let q2 = &a * &q1 + &q0;
        if q2 <= big_q {
            let p2 = &a * &p1 + &p0;
            p0 = std::mem::replace(&mut p1, p2);
            q0 = std::mem::replace(&mut q1, q2);
            continue;
        }
        // |qα − p| grows as the intermediate index drops, so only the
        // largest admissible one can beat the convergent.
        let j = ((&big_q - &q0) / &q1).min(&a - 1u32);
        let qj = &q0 + &j * &q1;
        if j.is_positive() && qj > q1 {
            let pj = &p0 + &j * &p1;
            let x = BigRational::new(pj.clone(), qj.clone());
            let (near, far) = distance_range(&lo, &hi, &x);
            if within(&far, &qj, m) {
                return Attempt::Done(pj, qj, ApproxKind::Intermediate);
            }
            if within(&near, &qj, m) {
                return Attempt::NeedBits;
            }
        }
        let x = BigRational::new(p1.clone(), q1.clone());
        let (_, far) = distance_range(&lo, &hi, &x);
        if !within(&far, &q1, m) {
            return Attempt::NeedBits;
        }
        return Attempt::Done(p1, q1, ApproxKind::Convergent);
    }
}

/// Dirichlet approximant of the value produced by `eval(bits)`, doubling
/// the working precision until the choice is certified.
pub fn dirichlet_approx_with<F>(eval: F, m: u64, start_bits: usize) -> Result<RationalApprox>
where
    F: Fn(usize) -> Result<Approx>,
{
    if m == 0 {
        return Err(Error::Contract("M must be at least 1".into()));
    }
    let mut bits = start_bits;
    loop {
        let alpha = eval(bits)?;
        if let Attempt::Done(p, q, kind) = attempt(&alpha, m) {
            let (lo, hi) = alpha.enclosure();
            let x = BigRational::new(p.clone(), q.clone());
            let (_, far) = distance_range(&lo, &hi, &x);
            debug_assert!(q.is_positive() && &q * &q <= BigInt::from(m));
            debug_assert!(within(&far, &q, m));
            debug_assert!(num_integer::Integer::gcd(&p, &q).is_one());
            return Ok(RationalApprox {
                err: rational_abs_to_f64_upper(&far),
                p,
                q,
                m,
                alpha: alpha.to_f64(),
                kind,
                bits,
            });
        }
        if bits >= MAX_BITS {
            return Err(Error::Precision(format!(
                "Dirichlet approximant at M = {m} not certified at {MAX_BITS} bits"
            )));
        }
        bits = (bits * 2).min(MAX_BITS);
    }
}

pub fn dirichlet_approx(alpha: &RealExpr, m: u64, ctx: PrecisionContext) -> Result<RationalApprox> {
    dirichlet_approx_with(|bits| alpha.eval(bits), m, ctx.bits())
}
