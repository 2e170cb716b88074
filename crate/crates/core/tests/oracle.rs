mod common;

use std::f64::consts::PI;

use common::{brute_key_sum, d_trial, zeta_oracle, Window};
use zetaprog::diophantine::ProgressionSpec;
use zetaprog::divisor::sieve;
use zetaprog::moments::{key_sum, key_sum_table_limit, KeySumForm};
use zetaprog::numerics::{PrecisionContext, RealExpr};
use zetaprog::zeta::{zeta_critical, zeta_half_line};

#[test]
fn oracle_sanity() {
    // ζ(½ + i) from an external 30-digit evaluation
    let z = zeta_oracle(1.0);
    assert!((z.norm_sqr() - 0.542_145_734_648_255).abs() < 1e-15, "{z}");
    assert!(zeta_oracle(14.134_725_141_734_694).norm() < 1e-12);
    for (n, d) in [(1, 1), (12, 6), (720, 30), (997, 2), (1024, 11)] {
        assert_eq!(d_trial(n), d);
    }
}

#[test]
fn zeta_matches_high_precision_oracle() {
    for t in [1.0, 5.5, 17.0, 29.9, 30.1, 100.0, 1000.5, 4321.0, 20_000.75] {
        let want = zeta_oracle(t);
        let got = zeta_critical(t).unwrap();
        let abs_sq = zeta_half_line(t).unwrap().zeta_abs_sq;
        assert!((got - want).norm() < 1e-9 * (1.0 + want.norm()), "t = {t}: {got} vs {want}");
        assert!(
            (abs_sq - want.norm_sqr()).abs() < 1e-9 * (1.0 + want.norm_sqr()),
            "t = {t}: {abs_sq} vs {}",
            want.norm_sqr()
        );
    }
}

fn compare(spec: &ProgressionSpec, t: f64, form: KeySumForm) {
    let ctx = PrecisionContext::default();
    let table = sieve(key_sum_table_limit(spec, t, form)).unwrap();
    let ours = key_sum(spec, t, &table, form, ctx).unwrap().value;
    let window = match form {
        KeySumForm::Refined => Window::Refined,
        KeySumForm::Intro => Window::Intro,
    };
    let brute = brute_key_sum(spec.a(), spec.b(), t, window);
    assert!(brute.norm() > 0.0);
    assert!(
        (ours - brute).norm() <= 1e-6 * brute.norm(),
        "a = {}, T = {t}: {ours} vs {brute}",
        spec.a()
    );
}

#[test]
fn key_sum_integer_spacing() {
    let spec = ProgressionSpec::generic(RealExpr::parse("4").unwrap(), 0.0).unwrap();
    compare(&spec, 1e3, KeySumForm::Refined);
    compare(&spec, 1e3, KeySumForm::Intro);
    let spec = ProgressionSpec::generic(RealExpr::parse("2").unwrap(), 0.3).unwrap();
    compare(&spec, 1e4, KeySumForm::Refined);
}

#[test]
fn key_sum_rational_power() {
    for b in [0.0, PI / (2.0 * 3f64.ln()), 1.7] {
        let spec = ProgressionSpec::rational_power(3, 1, 1, b).unwrap();
        compare(&spec, 1e4, KeySumForm::Refined);
    }
    let spec = ProgressionSpec::rational_power(5, 2, 2, 0.25).unwrap();
    compare(&spec, 1e4, KeySumForm::Refined);
    compare(&spec, 1e4, KeySumForm::Intro);
}

#[test]
fn key_sum_generic_spacing() {
    let spec = ProgressionSpec::generic(RealExpr::parse("sqrt(2)*2*pi/log(2)").unwrap(), 0.0).unwrap();
    compare(&spec, 1e4, KeySumForm::Refined);
}
