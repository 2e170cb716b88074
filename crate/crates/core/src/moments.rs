//! Discrete second moments `Σ |ζ(½ + i(an+b))|²` over `0 < an+b ≤ T`, the
//! main terms predicted for them, and the key double sum
//!
//! ```text
//! Σ_{1≤k<(a/2π)log(T/π)} e^{(π+2πib)k/a} Σ_{(T/2π)e^{−2πk/a} < m < (T/π)e^{−2πk/a}} d(m) e(−e^{2πk/a}m)
//! ```
//!
//! whose size separates the irrational and rational-power regimes.

use num_bigint::BigInt;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::diophantine::{ProgressionSpec, SpacingForm};
use crate::divisor::DivisorTable;
use crate::error::{Error, Result};
use crate::expsum::{divisor_expsum_window_dd, divisor_expsum_window_rational};
use crate::numerics::{cis, ComplexSum, Constants, Dd, ExactSum, PrecisionContext};
use crate::zeta::{continuous_mean_square, zeta_half_line, QuadraturePolicy};

/// Ordinates per parallel work unit in [`discrete_moment`].
pub const DEFAULT_CHUNK: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KeySumForm {
    /// Weight `e^{(π+2πib)k/a}`, window `(T/2π)e^{−2πk/a} < m < (T/π)e^{−2πk/a}`.
    Refined,
    /// Weight `e^{πk/a}`, range `m < T e^{−2πk/a}`.
    Intro,
}

#[derive(Debug, Clone)]
pub struct MomentRequest {
    pub spec: ProgressionSpec,
    pub t_max: f64,
    pub precision: PrecisionContext,
    pub chunk: u64,
    pub key_sum_form: KeySumForm,
    /// Also integrate `|ζ|²` over `[0, T]` for comparison.
    pub continuous: bool,
}

impl MomentRequest {
    pub fn new(spec: ProgressionSpec, t_max: f64) -> Result<Self> {
        if !(t_max > 0.0) || !t_max.is_finite() {
            return Err(Error::Domain(format!("T must be positive, got {t_max}")));
        }
        if moment_range(&spec, t_max).is_none() {
            return Err(Error::Contract(format!(
                "no ordinate a·n + b in (0, {t_max}] for a = {}, b = {}",
                spec.a(),
                spec.b()
            )));
        }
        Ok(MomentRequest {
            spec,
            t_max,
            precision: PrecisionContext::default(),
            chunk: DEFAULT_CHUNK,
            key_sum_form: KeySumForm::Refined,
            continuous: true,
        })
    }
}

fn a_dd(spec: &ProgressionSpec) -> Dd {
    spec.a_expr()
        .eval(128)
        .map(|x| x.to_dd())
        .unwrap_or_else(|_| Dd::from_f64(spec.a()))
}

fn ordinate(a: Dd, b: f64, n: u64) -> f64 {
    (a.mul_f64(n as f64) + Dd::from_f64(b)).to_f64()
}

/// Inclusive range of `n ≥ 0` with `a·n + b ∈ (0, T]`.
pub fn moment_range(spec: &ProgressionSpec, t_max: f64) -> Option<(u64, u64)> {
    let a = a_dd(spec);
    let (af, b) = (spec.a(), spec.b());
    let lo = if b > 0.0 { 0.0 } else { (-b / af).floor().max(0.0) };
    let hi = ((t_max - b) / af).floor();
    if !(hi >= 0.0) || hi > 1e15 {
        return None;
    }
    let mut n_min = lo as u64;
    while ordinate(a, b, n_min) <= 0.0 {
        n_min += 1;
    }
    while n_min > 0 && ordinate(a, b, n_min - 1) > 0.0 {
        n_min -= 1;
    }
    let mut n_max = hi as u64;
    while ordinate(a, b, n_max + 1) <= t_max {
        n_max += 1;
    }
    while ordinate(a, b, n_max) > t_max {
        if n_max == 0 {
            return None;
        }
        n_max -= 1;
    }
    (n_min <= n_max).then_some((n_min, n_max))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiscreteMoment {
    pub value: f64,
    pub terms: u64,
    pub n_min: u64,
    pub n_max: u64,
}

pub fn discrete_moment(req: &MomentRequest) -> Result<DiscreteMoment> {
    let (n_min, n_max) = moment_range(&req.spec, req.t_max)
        .ok_or_else(|| Error::Contract("empty progression".into()))?;
    let a = a_dd(&req.spec);
    let b = req.spec.b();
    let chunk = req.chunk.max(1);
    let count = n_max - n_min + 1;
    let parts: Vec<Result<ExactSum>> = (0..count.div_ceil(chunk))
        .into_par_iter()
        .map(|c| {
            let mut acc = ExactSum::new();
            let lo = n_min + c * chunk;
            let hi = (lo + chunk - 1).min(n_max);
            for n in lo..=hi {
                acc.add(zeta_half_line(ordinate(a, b, n))?.zeta_abs_sq);
            }
            Ok(acc)
        })
        .collect();
    let mut total = ExactSum::new();
    for p in parts {
        total.merge(&p?);
    }
    Ok(DiscreteMoment {
        value: total.value(),
        terms: count,
        n_min,
        n_max,
    })
}

/// `(T/a)(log T + 2γ − 1 − log 2π)`, or `(T/a) log T` when `leading_only`.
/// Needs `T > 1`, `a > 0`.
pub fn main_term_thm1(a: f64, t_max: f64, leading_only: bool) -> f64 {
    let lt = t_max.ln();
    // dividing by a last keeps main_term(a, T) = main_term(1, T)/a exact
    if leading_only {
        return t_max * lt / a;
    }
    let c = Constants::f64();
    t_max * (lt + 2.0 * c.gamma_euler - 1.0 - c.log_2pi) / a
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeltaFactor {
    pub r: u64,
    pub s: u64,
    pub b: f64,
    pub factor_1_plus_delta: f64,
    pub delta: f64,
}

pub fn delta_factor(r: u64, s: u64, b: f64) -> Result<DeltaFactor> {
    if r == s {
        return Err(Error::Contract("delta factor needs r ≠ s".into()));
    }
    if s == 0 || r < s {
        return Err(Error::Contract(format!("delta factor needs r > s ≥ 1, got {r}/{s}")));
    }
    if num_integer::gcd(r, s) != 1 {
        return Err(Error::Contract(format!("{r} and {s} are not coprime")));
    }
    let rs = r as f64 * s as f64;
    let root = rs.sqrt();
    let cos = (b * (r as f64 / s as f64).ln()).cos();
    let den = rs + 1.0 - 2.0 * root * cos;
    let factor_1_plus_delta = (rs - 1.0) / den;
    Ok(DeltaFactor {
        r,
        s,
        b,
        factor_1_plus_delta,
        delta: (2.0 * root * cos - 2.0) / den,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Thm2Prediction {
    pub leading: f64,
    pub full: f64,
    pub delta: DeltaFactor,
    /// `(r, s, k₀)` after removing shared perfect powers.
    pub canonical: (u64, u64, u64),
    /// Whether `r > 2s`.
    pub hypothesis_holds: bool,
}

/// `(T/a) log T (1+δ)`, and for `k₀ = 1` additionally
/// `(T/a)(log T + 2γ − 1 − log 2π)(1+δ) − δ (√(rs) log(rs)/(√(rs) − 1)) T/a`.
pub fn main_term_thm2(spec: &ProgressionSpec, t_max: f64) -> Result<Thm2Prediction> {
    let Some((r, s, k0)) = spec.canonical() else {
        return Err(Error::Contract("the δ-corrected main term needs a rational-power spacing".into()));
    };
    let delta = delta_factor(r, s, spec.b())?;
    let a = spec.a();
    let f = delta.factor_1_plus_delta;
    let leading = main_term_thm1(a, t_max, true) * f;
    let full = if k0 == 1 {
        let rs = r as f64 * s as f64;
        let root = rs.sqrt();
        main_term_thm1(a, t_max, false) * f - delta.delta * root * rs.ln() / (root - 1.0) * t_max / a
    } else {
        leading
    };
    Ok(Thm2Prediction {
        leading,
        full,
        delta,
        canonical: (r, s, k0),
        hypothesis_holds: r > 2 * s,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KeySumTerm {
    pub k: u64,
    #[serde(with = "crate::zeta::afe::complex_pair")]
    pub weight: Complex64,
    /// Inner sum over `m1 < m ≤ m2`.
    #[serde(with = "crate::zeta::afe::complex_pair")]
    pub inner: Complex64,
    pub m1: u64,
    pub m2: u64,
    pub exact_phase: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KeySum {
    #[serde(with = "crate::zeta::afe::complex_pair")]
    pub value: Complex64,
    pub form: KeySumForm,
    pub terms: Vec<KeySumTerm>,
}

/// Largest `k` with `k < (a/2π) log(T/π)`.
fn key_k_max(spec: &ProgressionSpec, t_max: f64) -> u64 {
    let x = match spec.form() {
        SpacingForm::RationalPower { r, s, k0 } => {
            k0 as f64 * (t_max / std::f64::consts::PI).ln() / (r as f64 / s as f64).ln()
        }
        SpacingForm::Generic => spec.a() / std::f64::consts::TAU * (t_max / std::f64::consts::PI).ln(),
    };
    if !(x > 1.0) {
        return 0;
    }
    let c = x.ceil();
    (c - 1.0) as u64
}

/// `(m1, m2)` such that the inner range is `m1 < m ≤ m2`.
fn key_window(t_max: f64, log_ratio: f64, form: KeySumForm) -> (u64, u64) {
    let shrink = (-log_ratio).exp();
    let below_open = |x: f64| (x.ceil() - 1.0).max(0.0) as u64;
    match form {
        KeySumForm::Refined => {
            let lo = t_max / std::f64::consts::TAU * shrink;
            let hi = t_max / std::f64::consts::PI * shrink;
            let m1 = lo.floor() as u64;
            (m1, below_open(hi).max(m1))
        }
        KeySumForm::Intro => (0, below_open(t_max * shrink)),
    }
}

/// Table size needed by [`key_sum`].
pub fn key_sum_table_limit(spec: &ProgressionSpec, t_max: f64, form: KeySumForm) -> u64 {
    if key_k_max(spec, t_max) == 0 {
        return 1;
    }
    let l = std::f64::consts::TAU / spec.a();
    key_window(t_max, l, form).1.max(1)
}

pub fn key_sum(
    spec: &ProgressionSpec,
    t_max: f64,
    table: &DivisorTable,
    form: KeySumForm,
    ctx: PrecisionContext,
) -> Result<KeySum> {
    if !(t_max > 0.0) || !t_max.is_finite() {
        return Err(Error::Domain(format!("T must be positive, got {t_max}")));
    }
    let k_max = key_k_max(spec, t_max);
    let b = spec.b();
    let terms: Vec<Result<KeySumTerm>> = (1..=k_max)
        .into_par_iter()
        .map(|k| {
            let log_ratio = spec.log_ratio(k, ctx.bits())?;
            let l = log_ratio.to_f64();
            let (m1, m2) = key_window(t_max, l, form);
            let (inner, exact_phase) = match spec.exact_ratio(k) {
                Some(q) => {
                    let p: BigInt = -q.numer().clone();
                    (divisor_expsum_window_rational(table, m1, m2, &p, q.denom())?.value, true)
                }
                None => {
                    let alpha = log_ratio.exp()?.to_dd();
                    (divisor_expsum_window_dd(table, m1, m2, -alpha)?.value, false)
                }
            };
            let weight = match form {
                KeySumForm::Refined => cis(b * l) * (l / 2.0).exp(),
                KeySumForm::Intro => Complex64::new((l / 2.0).exp(), 0.0),
            };
            Ok(KeySumTerm {
                k,
                weight,
                inner,
                m1,
                m2,
                exact_phase,
            })
        })
        .collect();
    let terms = terms.into_iter().collect::<Result<Vec<_>>>()?;
    let value: ComplexSum = terms.iter().map(|t| t.weight * t.inner).collect();
    Ok(KeySum {
        value: value.value(),
        form,
        terms,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostic {
    pub name: &'static str,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentReport {
    #[serde(rename = "T")]
    pub t_max: f64,
    pub a: f64,
    pub a_expr: String,
    pub b: f64,
    pub form: SpacingForm,
    pub terms: u64,
    pub empirical: f64,
    pub predicted_leading: f64,
    pub predicted_full: f64,
    pub ratio_leading: Option<f64>,
    pub ratio_full: Option<f64>,
    #[serde(with = "crate::zeta::afe::complex_pair")]
    pub key_sum_value: Complex64,
    #[serde(rename = "key_sum_over_TlogT")]
    pub key_sum_over_t_log_t: f64,
    pub diagnostics: Vec<Diagnostic>,
}

impl MomentReport {
    pub const CSV_HEADER: &'static str = "T,a,b,form,empirical,predicted_leading,predicted_full,\
ratio_leading,ratio_full,key_sum_re,key_sum_im,key_sum_over_TlogT";

    pub fn form_name(&self) -> &'static str {
        match self.form {
            SpacingForm::Generic => "generic",
            SpacingForm::RationalPower { .. } => "rational_power",
        }
    }

    pub fn csv_row(&self) -> String {
        let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.t_max,
            self.a,
            self.b,
            self.form_name(),
            self.empirical,
            self.predicted_leading,
            self.predicted_full,
            opt(self.ratio_leading),
            opt(self.ratio_full),
            self.key_sum_value.re,
            self.key_sum_value.im,
            self.key_sum_over_t_log_t
        )
    }

    pub fn diagnostic(&self, name: &str) -> Option<f64> {
        self.diagnostics.iter().find(|d| d.name == name).map(|d| d.value)
    }
}

fn ratio(x: f64, y: f64) -> Option<f64> {
    (y != 0.0 && y.is_finite()).then(|| x / y)
}

pub fn moment_report(req: &MomentRequest, table: &DivisorTable) -> Result<MomentReport> {
    let spec = &req.spec;
    let t = req.t_max;
    if !(t > 1.0) {
        return Err(Error::Domain(format!("predictions need T > 1, got {t}")));
    }
    let moment = discrete_moment(req)?;
    let empirical = moment.value;
    let a = spec.a();
    let thm1_leading = main_term_thm1(a, t, true);
    let thm1_full = main_term_thm1(a, t, false);
    let mut diagnostics = vec![
        Diagnostic { name: "thm1_leading", value: thm1_leading },
        Diagnostic { name: "thm1_full", value: thm1_full },
        Diagnostic { name: "enhancement", value: empirical / thm1_full },
    ];
    let (predicted_leading, predicted_full) = match spec.form() {
        SpacingForm::Generic => (thm1_leading, thm1_full),
        SpacingForm::RationalPower { .. } => {
            let p = main_term_thm2(spec, t)?;
            diagnostics.push(Diagnostic { name: "one_plus_delta", value: p.delta.factor_1_plus_delta });
            diagnostics.push(Diagnostic { name: "delta", value: p.delta.delta });
            diagnostics.push(Diagnostic {
                name: "hypothesis_r_gt_2s",
                value: if p.hypothesis_holds { 1.0 } else { 0.0 },
            });
            (p.leading, p.full)
        }
    };
    let ks = key_sum(spec, t, table, req.key_sum_form, req.precision)?;
    let key_sum_over_t_log_t = ks.value.norm() / (t * t.ln());
    diagnostics.push(Diagnostic { name: "key_sum_abs", value: ks.value.norm() });
    diagnostics.push(Diagnostic { name: "key_sum_k_terms", value: ks.terms.len() as f64 });
    if req.continuous && t >= crate::zeta::mean_square::MEAN_SQUARE_MIN_T {
        let ms = continuous_mean_square(t, QuadraturePolicy::default())?;
        diagnostics.push(Diagnostic { name: "continuous_integral", value: ms.integral });
        diagnostics.push(Diagnostic { name: "continuous_E_T", value: ms.e_t });
        diagnostics.push(Diagnostic {
            name: "empirical_over_continuous",
            value: empirical / (ms.integral / a),
        });
    }
    Ok(MomentReport {
        t_max: t,
        a,
        a_expr: spec.a_expr().to_string(),
        b: spec.b(),
        form: spec.form(),
        terms: moment.terms,
        empirical,
        predicted_leading,
        predicted_full,
        ratio_leading: ratio(empirical, predicted_leading),
        ratio_full: ratio(empirical, predicted_full),
        key_sum_value: ks.value,
        key_sum_over_t_log_t,
        diagnostics,
    })
}
