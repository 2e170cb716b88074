//! Complex log-gamma, the Riemann–Siegel theta function and the χ factor of
//! the functional equation `ζ(s) = χ(s) ζ(1−s)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::bernoulli::even_bernoulli_f64;
use crate::numerics::dd::{reduce_angle, Dd};

const LN_2PI_HALF: f64 = 0.918_938_533_204_672_8;
const STIRLING_TERMS: usize = 14;
/// Stirling is used directly once `|z|` exceeds this.
const STIRLING_MIN: f64 = 16.0;

fn stirling_tail(z: Complex64) -> Complex64 {
    let b = even_bernoulli_f64();
    let zi = z.inv();
    let zi2 = zi * zi;
    let mut pow = zi;
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 1..=STIRLING_TERMS {
        let c = b[k] / ((2 * k) * (2 * k - 1)) as f64;
        acc += pow * c;
        pow *= zi2;
    }
    acc
}

/// `ln Γ(z)` on some branch (suitable for exponentiation; the imaginary part
/// is only meaningful mod 2π).
pub fn ln_gamma(z: Complex64) -> Result<Complex64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Domain(format!("ln Γ needs finite argument, got {z}")));
    }
    if z.im == 0.0 && z.re <= 0.0 && z.re == z.re.floor() {
        return Err(Error::Domain(format!("Γ has a pole at {}", z.re)));
    }
    if z.re < 0.5 {
        // Γ(z)Γ(1−z) = π / sin(πz)
        let w = Complex64::new(1.0 - z.re, -z.im);
        let lg = ln_gamma(w)?;
        let ls = ln_sin_pi(z);
        return Ok(Complex64::new(std::f64::consts::PI.ln(), 0.0) - ls - lg);
    }
    let mut shift = Complex64::new(0.0, 0.0);
    let mut w = z;
    while w.norm() < STIRLING_MIN {
        shift += w.ln();
        w += 1.0;
    }
    let main = (w - 0.5) * w.ln() - w + LN_2PI_HALF + stirling_tail(w);
    Ok(main - shift)
}

/// `ln sin(πz)` without overflow for large `|Im z|`.
pub fn ln_sin_pi(z: Complex64) -> Complex64 {
    let pz = z * std::f64::consts::PI;
    let i = Complex64::i();
    if pz.im > 20.0 {
        // sin w = e^{−iw}(e^{2iw} − 1)/(2i)
        let e = (i * 2.0 * pz).exp();
        -i * pz + ((e - 1.0) / (i * 2.0)).ln()
    } else if pz.im < -20.0 {
        // sin w = e^{iw}(1 − e^{−2iw})/(2i)
        let e = (-i * 2.0 * pz).exp();
        i * pz + ((1.0 - e) / (i * 2.0)).ln()
    } else {
        pz.sin().ln()
    }
}

/// Riemann–Siegel theta function reduced to `[−π, π)`.
///
/// For `|t| ≥ 10` the large part `(t/2)·ln(t/2π) − t/2` is formed in
/// double-double so the reduction keeps full double accuracy up to very
/// large `t`.
pub fn theta(t: f64) -> f64 {
    if t < 0.0 {
        return -theta(-t);
    }
    if t < 10.0 {
        let z = Complex64::new(0.25, t / 2.0);
        let lg = ln_gamma(z).expect("Re z > 0");
        let v = lg.im - t / 2.0 * std::f64::consts::PI.ln();
        return reduce_angle(Dd::from_f64(v));
    }
    let y = t / 2.0;
    let z = Complex64::new(0.25, y);
    // Im[(z−½)ln z − z] = y ln|z| − arg(z)/4 − y
    let big = Dd::from_f64(y) * (Dd::from_f64(y).div(Dd::pi()).ln() - Dd::ONE);
    let small = y / 2.0 * (1.0 / (16.0 * y * y)).ln_1p() - std::f64::consts::PI / 8.0
        + (0.25 / y).atan() / 4.0
        + stirling_tail(z).im;
    reduce_angle(big + Dd::from_f64(small))
}

/// `χ(s) = 2^s π^{s−1} sin(πs/2) Γ(1−s)`.
///
/// On the critical line this is `exp(−2iθ(t))`, which is used directly.
pub fn chi(s: Complex64) -> Result<Complex64> {
    if !(s.re.is_finite() && s.im.is_finite()) {
        return Err(Error::Domain(format!("χ needs finite argument, got {s}")));
    }
    if s.re == 0.5 {
        let th = theta(s.im);
        let (sn, cs) = (2.0 * th).sin_cos();
        return Ok(Complex64::new(cs, -sn));
    }
    if s.im == 0.0 && s.re >= 1.0 && s.re == s.re.floor() {
        let n = s.re as i64;
        if n % 2 == 1 {
            return Err(Error::Domain(format!("χ has a pole at s = {n}")));
        }
        // sin(πs/2)Γ(1−s) → (−1)^m π / (2 (2m−1)!) at s = 2m
        let m = n / 2;
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        let lf = ln_gamma(Complex64::new(n as f64, 0.0))?.re;
        let ln_abs = s.re * 2f64.ln() + (s.re - 1.0) * std::f64::consts::PI.ln()
            + (std::f64::consts::PI / 2.0).ln()
            - lf;
        return Ok(Complex64::new(sign * ln_abs.exp(), 0.0));
    }
    let ln2 = 2f64.ln();
    let lnpi = std::f64::consts::PI.ln();
    let one_minus = Complex64::new(1.0 - s.re, -s.im);
    let l = s * ln2 + (s - 1.0) * lnpi + ln_sin_pi(s / 2.0) + ln_gamma(one_minus)?;
    Ok(l.exp())
}

/// Leading asymptotic form `χ(½−it) ≈ exp(i(t log(t/2πe) − π/4))`, valid up
/// to a factor `1 + O(1/t)`.
pub fn chi_asymptotic_conj(t: f64) -> Complex64 {
    let phase = t * (t / (2.0 * std::f64::consts::PI * std::f64::consts::E)).ln()
        - std::f64::consts::FRAC_PI_4;
    let ph = reduce_angle(Dd::from_f64(phase));
    Complex64::new(ph.cos(), ph.sin())
}
