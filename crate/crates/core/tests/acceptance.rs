//! One test per acceptance criterion; each prints a single PASS/FAIL line.

mod common;

use std::f64::consts::PI;
use std::process::Command;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{brute_key_sum, Window};
use zetaprog::diophantine::{dirichlet_approx, ProgressionSpec};
use zetaprog::divisor::{sieve, DELTA_GROWTH_C};
use zetaprog::expsum::{divisor_expsum_direct, divisor_expsum_hyperbola, divisor_expsum_rational, RATIONAL_RESIDUAL_C};
use zetaprog::moments::{
    delta_factor, key_sum, key_sum_table_limit, main_term_thm1, moment_report, KeySumForm, MomentReport,
    MomentRequest,
};
use zetaprog::numerics::{PrecisionContext, RealExpr};
use zetaprog::zeta::{continuous_mean_square, motohashi_check, QuadraturePolicy, MOTOHASHI_C};

fn verdict(n: u32, pass: bool, detail: String) {
    let line = format!("criterion {n}: {} | {detail}", if pass { "PASS" } else { "FAIL" });
    println!("{line}");
    assert!(pass, "{line}");
}

fn report(spec: ProgressionSpec, t: f64) -> MomentReport {
    let mut req = MomentRequest::new(spec.clone(), t).unwrap();
    req.continuous = false;
    let table = sieve(key_sum_table_limit(&spec, t, KeySumForm::Refined)).unwrap();
    moment_report(&req, &table).unwrap()
}

fn generic(a: &str, b: f64) -> ProgressionSpec {
    ProgressionSpec::generic(RealExpr::parse(a).unwrap(), b).unwrap()
}

#[test]
fn criterion_01_integer_spacing() {
    let mut pass = true;
    let mut parts = Vec::new();
    for (a, b) in [("1", 0.0), ("2", 0.3)] {
        let hi = report(generic(a, b), 5e4).ratio_full.unwrap();
        let lo = report(generic(a, b), 1e3).ratio_full.unwrap();
        let in_band = (0.95..=1.05).contains(&hi);
        let trend = (hi - 1.0).abs() < (lo - 1.0).abs();
        pass &= in_band && trend;
        parts.push(format!(
            "a={a} b={b}: ratio(5e4)={hi:.5} in [0.95,1.05]={in_band}, |dev| 5e4={:.5} vs 1e3={:.5} shrinks={trend}",
            (hi - 1.0).abs(),
            (lo - 1.0).abs()
        ));
    }
    verdict(1, pass, parts.join("; "));
}

#[test]
fn criterion_02_rational_power_spacing() {
    let mut pass = true;
    let mut parts = Vec::new();
    for (b, one_plus_delta) in [(0.0, 3.732_050_8), (PI / (2.0 * 3f64.ln()), 0.5)] {
        let rep = report(ProgressionSpec::rational_power(3, 1, 1, b).unwrap(), 5e4);
        let ratio = rep.ratio_full.unwrap();
        let enhancement = rep.empirical / main_term_thm1(rep.a, rep.t_max, false);
        let formula = delta_factor(3, 1, b).unwrap().factor_1_plus_delta;
        assert!((formula - one_plus_delta).abs() < 1e-6);
        let ok_ratio = (0.9..=1.1).contains(&ratio);
        let ok_enh = (enhancement / one_plus_delta - 1.0).abs() <= 0.15;
        pass &= ok_ratio && ok_enh;
        parts.push(format!(
            "b={b:.6}: ratio={ratio:.5} in [0.9,1.1]={ok_ratio}, enhancement={enhancement:.4} vs 1+δ={one_plus_delta} \
             (off {:+.1}%) within 15%={ok_enh}",
            100.0 * (enhancement / one_plus_delta - 1.0)
        ));
    }
    verdict(2, pass, parts.join("; "));
}

#[test]
fn criterion_03_continuous_mean_square() {
    let ms = continuous_mean_square(100.0, QuadraturePolicy::default()).unwrap();
    let halved = continuous_mean_square(
        100.0,
        QuadraturePolicy::with_step(QuadraturePolicy::default_step(100.0) / 2.0),
    )
    .unwrap();
    let rel = (ms.integral / halved.integral - 1.0).abs();
    let pass = ms.e_t.abs() <= 30.0 && rel <= 1e-3;
    verdict(
        3,
        pass,
        format!("|E(100)|={:.4} ≤ 30, step halving rel diff {rel:.2e} ≤ 1e-3", ms.e_t.abs()),
    );
}

#[test]
fn criterion_04_expsum_oracles_agree() {
    let table = sieve(10_000).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    let mut bad = 0;
    let mut check = |m: u64, alpha: f64| {
        let d = divisor_expsum_direct(&table, m, alpha).unwrap();
        let h = divisor_expsum_hyperbola(m, alpha).unwrap();
        let gap = (d.value - h.value).norm();
        let budget = d.accuracy + h.accuracy;
        worst = worst.max(gap / budget);
        if gap > budget {
            bad += 1;
        }
    };
    for _ in 0..200 {
        let m = rng.gen_range(1..=10_000u64);
        let alpha = rng.gen_range(0.0..10.0);
        check(m, alpha);
    }
    for m in 1..=100 {
        for j in 0..100 {
            check(m, j as f64 / 100.0);
        }
    }
    verdict(
        4,
        bad == 0,
        format!("200 random + 10000 grid cases, {bad} outside the combined accuracy, worst gap/budget {worst:.3}"),
    );
}

#[test]
fn criterion_05_rational_closed_form() {
    let table = sieve(10_000).unwrap();
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for x in [1e2, 1e3, 1e4] {
        for s in [2u64, 3, 5, 7] {
            for r in 1..s as i64 {
                if (r as u64).gcd(&s) != 1 {
                    continue;
                }
                let v = divisor_expsum_rational(&table, x, r, s).unwrap();
                worst = worst.max(v.residual / v.bound_shape());
                cases += 1;
            }
        }
    }
    verdict(
        5,
        worst <= RATIONAL_RESIDUAL_C,
        format!("{cases} cases, max residual/((√x+s)log 2s) = {worst:.4} ≤ C = {RATIONAL_RESIDUAL_C}"),
    );
}

#[test]
fn criterion_06_motohashi_residual() {
    let table = sieve(20_000).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let t = rng.gen_range(1e3..1e5);
        worst = worst.max(motohashi_check(t, &table).unwrap().ratio);
    }
    verdict(
        6,
        worst <= MOTOHASHI_C,
        format!("100 random t, max |defect|·t^(1/4) = {worst:.4} ≤ C = {MOTOHASHI_C}"),
    );
}

#[test]
fn criterion_07_dirichlet_contract() {
    let ctx = PrecisionContext::default();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut failures = Vec::new();
    for i in 0..500 {
        let x: f64 = rng.gen_range(1.0..1e6);
        let m: u64 = rng.gen_range(1..=100_000_000);
        let a = dirichlet_approx(&RealExpr::from_f64(x), m, ctx).unwrap();
        let alpha = BigRational::from_float(x).unwrap();
        let mb = BigInt::from(m);
        let q_ok = &a.q * &a.q <= mb && a.q.is_positive();
        let defect = BigRational::from_integer(a.q.clone()) * &alpha - BigRational::from_integer(a.p.clone());
        let bound_ok = &defect * &defect * BigRational::from_integer(mb) <= BigRational::from_integer(1.into());
        let coprime = a.p.gcd(&a.q) == BigInt::from(1);
        let size_ok = a.q < BigInt::from(2) || {
            let r = a.p.to_f64().unwrap() / (a.q.to_f64().unwrap() * x);
            (0.5..=2.0).contains(&r)
        };
        if !(q_ok && bound_ok && coprime && size_ok) {
            failures.push(format!("#{i} α={x} M={m} → {}/{}", a.p, a.q));
        }
    }
    verdict(
        7,
        failures.is_empty(),
        format!("500 random (α, M), {} violations {:?}", failures.len(), failures.iter().take(3).collect::<Vec<_>>()),
    );
}

#[test]
fn criterion_08_key_sum() {
    let ctx = PrecisionContext::default();
    let cases = [
        (generic("4", 0.0), 1e3),
        (generic("1", 0.0), 1e4),
        (generic("2", 0.3), 1e4),
        (generic("sqrt(2)*2*pi/log(2)", 0.0), 1e4),
        (ProgressionSpec::rational_power(3, 1, 1, 0.0).unwrap(), 1e4),
        (ProgressionSpec::rational_power(3, 1, 1, PI / (2.0 * 3f64.ln())).unwrap(), 1e4),
    ];
    let mut worst: f64 = 0.0;
    for (spec, t) in &cases {
        let table = sieve(key_sum_table_limit(spec, *t, KeySumForm::Refined)).unwrap();
        let ours = key_sum(spec, *t, &table, KeySumForm::Refined, ctx).unwrap().value;
        let brute = brute_key_sum(spec.a(), spec.b(), *t, Window::Refined);
        let rel = if brute.norm() == 0.0 {
            ours.norm()
        } else {
            (ours - brute).norm() / brute.norm()
        };
        worst = worst.max(rel);
    }
    let ratio = report(generic("1", 0.0), 5e4).key_sum_over_t_log_t;
    let pass = worst <= 1e-6 && ratio <= 0.2;
    verdict(
        8,
        pass,
        format!(
            "{} brute-force cases, max rel diff {worst:.2e} ≤ 1e-6; |key_sum|/(T log T) at a=1, T=5e4 = {ratio:.5} ≤ 0.2",
            cases.len()
        ),
    );
}

#[test]
fn criterion_09_delta_growth() {
    let table = sieve(10_000_000).unwrap();
    let mut worst: f64 = 0.0;
    let mut at = 0.0;
    for i in 0..=2000 {
        let x = 10f64.powf(2.0 + 5.0 * i as f64 / 2000.0);
        let d = table.delta(x).unwrap().delta;
        let r = d.abs() / (x.cbrt() * x.ln());
        if r > worst {
            worst = r;
            at = x;
        }
    }
    verdict(
        9,
        worst <= DELTA_GROWTH_C,
        format!("2001 log-spaced x in [1e2, 1e7], max |Δ|/(x^(1/3) log x) = {worst:.4} at x={at:.1} ≤ C = {DELTA_GROWTH_C}"),
    );
}

fn cli(threads: u32, args: &[&str]) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_zetaprog"))
        .args(args)
        .args(["--threads", &threads.to_string(), "--no-timestamp", "--no-continuous"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    out.stdout
}

#[test]
fn criterion_10_thread_count_determinism() {
    let runs: [&[&str]; 4] = [
        &["moment", "--a", "1", "--b", "0", "--T", "5e4"],
        &["moment", "--a", "2", "--b", "0.3", "--T", "5e4"],
        &["moment", "--rs", "3:1:1", "--b", "0", "--T", "5e4"],
        &["moment", "--rs", "3:1:1", "--b", "pi/(2*log(3))", "--T", "5e4"],
    ];
    let mut compared = 0;
    let mut mismatches = Vec::new();
    for run in runs {
        for fmt in ["--csv", "--json"] {
            let args: Vec<&str> = run.iter().copied().chain([fmt]).collect();
            let base = cli(1, &args);
            for threads in [2, 3, 8] {
                compared += 1;
                if cli(threads, &args) != base {
                    mismatches.push(format!("{} {fmt} threads={threads}", run.join(" ")));
                }
            }
        }
    }
    verdict(
        10,
        mismatches.is_empty(),
        format!("{compared} comparisons against --threads 1, mismatches: {mismatches:?}"),
    );
}
