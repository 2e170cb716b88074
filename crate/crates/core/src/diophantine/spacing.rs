//! Progression spacings `a` and the ratios `e^{2πk/a}` they generate.

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Serialize;

use super::as_decimal;
use super::continued_fraction::{dirichlet_approx_with, RationalApprox};
use crate::error::{Error, Result};
use crate::numerics::{Approx, PrecisionContext, RealExpr};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpacingForm {
    Generic,
    /// `e^{2πk₀/a} = r/s`
    RationalPower { r: u64, s: u64, k0: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProgressionSpec {
    a_expr: RealExpr,
    a: f64,
    b: f64,
    form: SpacingForm,
}

impl ProgressionSpec {
    pub fn generic(a: RealExpr, b: f64) -> Result<Self> {
        let av = a.to_f64()?;
        if !(av > 0.0) || !av.is_finite() {
            return Err(Error::Domain(format!("spacing a must be positive, got {av}")));
        }
        if !b.is_finite() {
            return Err(Error::Domain("shift b must be finite".into()));
        }
        Ok(ProgressionSpec {
            a_expr: a,
            a: av,
            b,
            form: SpacingForm::Generic,
        })
    }

    /// `a = 2πk₀/log(r/s)`, held symbolically.
    pub fn rational_power(r: u64, s: u64, k0: u64, b: f64) -> Result<Self> {
        if s == 0 || r <= s {
            return Err(Error::Contract(format!("need r > s ≥ 1, got r = {r}, s = {s}")));
        }
        if r.gcd(&s) != 1 {
            return Err(Error::Contract(format!("r = {r} and s = {s} are not coprime")));
        }
        if k0 == 0 {
            return Err(Error::Contract("k0 must be positive".into()));
        }
        let a_expr = RealExpr::parse(&format!("2*pi*{k0}/log({r}/{s})"))?;
        let mut spec = ProgressionSpec::generic(a_expr, b)?;
        spec.form = SpacingForm::RationalPower { r, s, k0 };
        Ok(spec)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn a_expr(&self) -> &RealExpr {
        &self.a_expr
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn form(&self) -> SpacingForm {
        self.form
    }

    /// `(r, s, k₀)` with `r/s` stripped of every power it shares with `k₀`:
    /// if `r/s = (x/y)^l` with `l` maximal and `g = gcd(l, k₀)`, the result is
    /// `(x^{l/g}, y^{l/g}, k₀/g)`, which generates the same ratios.
    pub fn canonical(&self) -> Option<(u64, u64, u64)> {
        let SpacingForm::RationalPower { r, s, k0 } = self.form else {
            return None;
        };
        let (x, er) = perfect_power(r);
        let l = if s == 1 {
            er
        } else {
            let (_, es) = perfect_power(s);
            er.gcd(&es)
        };
        let g = (l as u64).gcd(&k0);
        if g == 1 {
            return Some((r, s, k0));
        }
        let lr = (l as u64 / g) as u32;
        let xr = x.pow(er / l * lr);
        let ys = if s == 1 { 1 } else { s.nth_root(l).pow(lr) };
        Some((xr, ys, k0 / g))
    }

    /// `e^{2πk/a}` exactly, when it is rational by construction.
    pub fn exact_ratio(&self, k: u64) -> Option<BigRational> {
        let (r, s, k0) = self.canonical()?;
        if !k.is_multiple_of(k0) {
            return None;
        }
        let e = (k / k0) as usize;
        Some(BigRational::new(
            num_traits::pow(BigInt::from(r), e),
            num_traits::pow(BigInt::from(s), e),
        ))
    }

    /// `2πk/a` at `bits` of working precision.
    pub fn log_ratio(&self, k: u64, bits: usize) -> Result<Approx> {
        let kk = Approx::from_u64(k, bits);
        match self.form {
            SpacingForm::RationalPower { r, s, k0 } => {
                let q = Approx::from_u64(r, bits).div(&Approx::from_u64(s, bits))?;
                q.ln()?.mul(&kk).div(&Approx::from_u64(k0, bits))
            }
            SpacingForm::Generic => {
                let two_pi = Approx::pi(bits).mul(&Approx::from_u64(2, bits));
                two_pi.mul(&kk).div(&self.a_expr.eval(bits)?)
            }
        }
    }

    /// `e^{2πk/a}` at `bits` of working precision.
    pub fn ratio(&self, k: u64, bits: usize) -> Result<Approx> {
        self.log_ratio(k, bits)?.exp()
    }
}

/// Largest `e` with `n = x^e`, and that `x`. `n ≤ 1` returns `(n, 1)`.
pub fn perfect_power(n: u64) -> (u64, u32) {
    if n <= 1 {
        return (n, 1);
    }
    for e in (2..64u32).rev() {
        let x = n.nth_root(e);
        if x >= 2 && x.checked_pow(e) == Some(n) {
            return (x, e);
        }
    }
    (n, 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SpacingStatus {
    /// `k₀ | k`: the ratio is a power of `r/s`.
    Rational,
    /// `k₀ ∤ k` for a declared rational power.
    Irrational,
    /// Generic spacing: nothing is decided, only approximants are shown.
    Undetermined,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpacingEntry {
    pub k: u64,
    /// `2πk/a`
    pub log_ratio: f64,
    pub status: SpacingStatus,
    #[serde(with = "as_decimal::opt_pair")]
    pub exact: Option<(BigInt, BigInt)>,
    /// `M(k) = ⌊T e^{−2πk/a}⌋` when a cutoff was given and `1 ≤ M(k) < 2⁶⁴`.
    #[serde(rename = "M")]
    pub m: Option<u64>,
    pub approximant: Option<RationalApprox>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpacingReport {
    pub a: f64,
    pub a_expr: String,
    pub b: f64,
    pub form: SpacingForm,
    pub canonical: Option<SpacingForm>,
    #[serde(rename = "T")]
    pub t: Option<f64>,
    pub entries: Vec<SpacingEntry>,
}

/// Rational/irrational status of `e^{2πk/a}` for `1 ≤ k ≤ k_max`, with
/// Dirichlet approximants at scale `T e^{−2πk/a}` when `t` is given.
pub fn classify_spacing(
    spec: &ProgressionSpec,
    k_max: u64,
    t: Option<f64>,
    ctx: PrecisionContext,
) -> Result<SpacingReport> {
    if k_max == 0 {
        return Err(Error::Contract("k_max must be at least 1".into()));
    }
    let mut entries = Vec::with_capacity(k_max as usize);
    for k in 1..=k_max {
        let log_ratio = spec.log_ratio(k, ctx.bits())?.to_f64();
        let exact = spec.exact_ratio(k);
        let status = match (spec.form, &exact) {
            (SpacingForm::Generic, _) => SpacingStatus::Undetermined,
            (_, Some(_)) => SpacingStatus::Rational,
            (_, None) => SpacingStatus::Irrational,
        };
        let m = t
            .map(|t| (t.ln() - log_ratio).exp().floor())
            .filter(|m| *m >= 1.0)
            .and_then(|m| m.to_u64());
        let approximant = match (m, &exact) {
            (Some(m), None) => Some(dirichlet_approx_with(|bits| spec.ratio(k, bits), m, ctx.bits())?),
            _ => None,
        };
        entries.push(SpacingEntry {
            k,
            log_ratio,
            status,
            exact: exact.map(|q| (q.numer().clone(), q.denom().clone())),
            m,
            approximant,
        });
    }
    Ok(SpacingReport {
        a: spec.a(),
        a_expr: spec.a_expr().to_string(),
        b: spec.b(),
        form: spec.form(),
        canonical: spec
            .canonical()
            .map(|(r, s, k0)| SpacingForm::RationalPower { r, s, k0 }),
        t,
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(256).unwrap()
    }

    #[test]
    fn perfect_powers() {
        assert_eq!(perfect_power(64), (2, 6));
        assert_eq!(perfect_power(3), (3, 1));
        assert_eq!(perfect_power(1 << 62), (2, 62));
        assert_eq!(perfect_power(3u64.pow(40)), (3, 40));
        assert_eq!(perfect_power(36), (6, 2));
        assert_eq!(perfect_power(u64::MAX), (u64::MAX, 1));
    }

    #[test]
    fn rational_power_examples() {
        let spec = ProgressionSpec::rational_power(3, 1, 1, 0.0).unwrap();
        assert!((spec.a() - 5.719_201_734_760_253).abs() < 1e-12);
        assert_eq!(spec.exact_ratio(2), Some(BigRational::from_integer(9.into())));

        let spec = ProgressionSpec::rational_power(3, 2, 2, 0.0).unwrap();
        let rep = classify_spacing(&spec, 4, None, ctx()).unwrap();
        assert_eq!(rep.entries[0].status, SpacingStatus::Irrational);
        assert_eq!(rep.entries[1].status, SpacingStatus::Rational);
        assert_eq!(rep.entries[1].exact, Some((3.into(), 2.into())));
        assert_eq!(rep.entries[3].exact, Some((9.into(), 4.into())));

        assert!(ProgressionSpec::rational_power(2, 2, 1, 0.0).is_err());
        assert!(ProgressionSpec::rational_power(6, 4, 1, 0.0).is_err());
        assert!(ProgressionSpec::rational_power(1, 2, 1, 0.0).is_err());
    }

    #[test]
    fn canonical_strips_shared_powers() {
        // (9/4)^{k/2} = (3/2)^k
        let spec = ProgressionSpec::rational_power(9, 4, 2, 0.0).unwrap();
        assert_eq!(spec.canonical(), Some((3, 2, 1)));
        let rep = classify_spacing(&spec, 3, None, ctx()).unwrap();
        assert!(rep.entries.iter().all(|e| e.status == SpacingStatus::Rational));
        // 64 = 2^6, k0 = 4: gcd 2 leaves 8^{k/2}
        let spec = ProgressionSpec::rational_power(64, 1, 4, 0.0).unwrap();
        assert_eq!(spec.canonical(), Some((8, 1, 2)));
        let exact = spec.ratio(2, 256).unwrap().to_f64();
        assert!((exact - 8.0).abs() < 1e-12);
    }

    #[test]
    fn generic_never_rational() {
        let spec = ProgressionSpec::generic(RealExpr::parse("1").unwrap(), 0.0).unwrap();
        let rep = classify_spacing(&spec, 20, Some(1e15), ctx()).unwrap();
        assert!(rep.entries.iter().all(|e| e.status == SpacingStatus::Undetermined));
        let first = rep.entries[0].approximant.as_ref().unwrap();
        let q = first.q.to_f64().unwrap();
        assert!(first.err <= 1.0 / (q * (first.m as f64).sqrt()));
        // e^{2π·5} ≈ 4.5·10¹³ < 10¹⁵ < e^{2π·6}
        assert!(rep.entries[4].m.is_some());
        assert!(rep.entries[5].m.is_none());
        assert!(classify_spacing(&spec, 1, Some(10.0), ctx()).unwrap().entries[0].m.is_none());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn multiples_of_k0_are_rational(r in 2u64..40, s in 1u64..40, k0 in 1u64..5) {
            prop_assume!(r > s && r.gcd(&s) == 1);
            let spec = ProgressionSpec::rational_power(r, s, k0, 0.0).unwrap();
            prop_assume!(spec.canonical() == Some((r, s, k0)));
            let rep = classify_spacing(&spec, 12, None, ctx()).unwrap();
            for e in &rep.entries {
                prop_assert_eq!(e.status == SpacingStatus::Rational, e.k % k0 == 0);
                if let Some((p, q)) = &e.exact {
                    let v = spec.ratio(e.k, 256).unwrap().to_f64();
                    let x = p.to_f64().unwrap() / q.to_f64().unwrap();
                    prop_assert!((v / x - 1.0).abs() < 1e-12);
                }
            }
        }

        #[test]
        fn approximants_track_ratio(k in 1u64..6, t in 1e4f64..1e9) {
            let spec = ProgressionSpec::generic(RealExpr::parse("sqrt(2)*2*pi/log(2)").unwrap(), 0.0).unwrap();
            let rep = classify_spacing(&spec, k, Some(t), ctx()).unwrap();
            for e in &rep.entries {
                if let Some(ap) = &e.approximant {
                    let q = ap.q.to_f64().unwrap();
                    if q >= 2.0 {
                        let ratio = ap.p.to_f64().unwrap() / (q * ap.alpha);
                        prop_assert!((0.5..=2.0).contains(&ratio));
                    }
                }
            }
        }
    }
}
