use std::sync::OnceLock;

use astro_float::BigFloat;
use num_rational::BigRational;

use super::bernoulli::even_bernoulli_exact;
use super::bigfloat::{self, RM};
use crate::error::{Error, Result};

/// Environment variable that overrides the default working precision.
pub const PRECISION_ENV: &str = "ZETAPROG_PRECISION_BITS";

pub const DEFAULT_BITS: usize = 128;
pub const MIN_BITS: usize = 64;
pub const MAX_BITS: usize = 1 << 16;

/// Working precision for the arbitrary-precision paths (rounding is always
/// to nearest, ties to even).
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct PrecisionContext {
    significand_bits: usize,
}

impl Default for PrecisionContext {
    fn default() -> Self {
        PrecisionContext {
            significand_bits: DEFAULT_BITS,
        }
    }
}

impl PrecisionContext {
    pub fn new(significand_bits: usize) -> Result<Self> {
        if !(MIN_BITS..=MAX_BITS).contains(&significand_bits) {
            return Err(Error::Domain(format!(
                "precision must be in [{MIN_BITS}, {MAX_BITS}] bits, got {significand_bits}"
            )));
        }
        Ok(PrecisionContext { significand_bits })
    }

    /// Default precision, honouring `ZETAPROG_PRECISION_BITS` when set.
    pub fn from_env() -> Result<Self> {
        match std::env::var(PRECISION_ENV) {
            Ok(v) => {
                let bits: usize = v
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("{PRECISION_ENV}={v:?} is not an integer")))?;
                Self::new(bits)
            }
            Err(_) => Ok(Self::default()),
        }
    }

    pub fn bits(&self) -> usize {
        self.significand_bits
    }

    /// Unit roundoff bound `2^(1-bits)`.
    pub fn epsilon(&self) -> f64 {
        2f64.powi(1 - self.significand_bits as i32)
    }

    pub fn with_extra(&self, extra: usize) -> Self {
        PrecisionContext {
            significand_bits: (self.significand_bits + extra).min(MAX_BITS),
        }
    }
}

/// Fundamental constants evaluated at a given precision.
#[derive(Debug, Clone)]
pub struct Constants {
    pub precision: PrecisionContext,
    pub gamma_euler: BigFloat,
    pub log_2pi: BigFloat,
    pub pi: BigFloat,
}

impl Constants {
    pub fn new(ctx: PrecisionContext) -> Self {
        let p = ctx.bits();
        let w = p + 32;
        let pi = bigfloat::pi(w);
        let two_pi = pi.mul(&bigfloat::from_u64(2, w), w, RM);
        let log_2pi = bigfloat::with_consts(|cc| two_pi.ln(w, RM, cc));
        let gamma_euler = euler_gamma(w);
        let round = |x: BigFloat| {
            let mut x = x;
            x.set_precision(p, RM).expect("valid precision");
            x
        };
        Constants {
            precision: ctx,
            gamma_euler: round(gamma_euler),
            log_2pi: round(log_2pi),
            pi: round(pi),
        }
    }

    /// Constants at the default precision, as `f64` (cached).
    pub fn f64() -> &'static F64Constants {
        static C: OnceLock<F64Constants> = OnceLock::new();
        C.get_or_init(|| {
            let c = Constants::new(PrecisionContext::default());
            F64Constants {
                gamma_euler: bigfloat::to_f64(&c.gamma_euler),
                log_2pi: bigfloat::to_f64(&c.log_2pi),
                pi: bigfloat::to_f64(&c.pi),
            }
        })
    }
}

#[derive(Debug, Clone, Copy)]
pub struct F64Constants {
    pub gamma_euler: f64,
    pub log_2pi: f64,
    pub pi: f64,
}

/// Euler's constant from the Euler–Maclaurin expansion of the harmonic numbers:
/// `γ = H_N − ln N − 1/(2N) + Σ_k B_{2k} / (2k N^{2k})`.
fn euler_gamma(p: usize) -> BigFloat {
    let w = p + 32;
    // The smallest term of the asymptotic series is about e^{-2πN}.
    let n = (p / 4 + 8) as u64;
    let kmax = (std::f64::consts::PI * n as f64) as usize;
    let target = -(w as i32) - 8;

    let nf = bigfloat::from_u64(n, w);
    let mut h = bigfloat::from_u64(0, w);
    for k in 1..=n {
        h = h.add(&bigfloat::from_u64(k, w).reciprocal(w, RM), w, RM);
    }
    let ln_n = bigfloat::with_consts(|cc| nf.ln(w, RM, cc));
    let half_inv = nf.mul(&bigfloat::from_u64(2, w), w, RM).reciprocal(w, RM);
    let mut g = h.sub(&ln_n, w, RM).sub(&half_inv, w, RM);

    let bern = even_bernoulli_exact(kmax);
    let n2 = nf.mul(&nf, w, RM);
    let mut npow = n2.clone(); // N^{2k}
    for (k, b) in bern.iter().enumerate().skip(1) {
        let denom = BigRational::from_integer((2 * k).into());
        let coef = bigfloat::from_rational(&(b / denom), w);
        let term = coef.div(&npow, w, RM);
        g = g.add(&term, w, RM);
        if term.exponent().map(|e| e < target).unwrap_or(true) {
            break;
        }
        npow = npow.mul(&n2, w, RM);
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_low_precision() {
        assert!(PrecisionContext::new(32).is_err());
        assert_eq!(PrecisionContext::default().bits(), 128);
    }

    #[test]
    fn euler_gamma_digits() {
        // γ = 0.57721566490153286060651209008240243104215933593992...
        let c = Constants::new(PrecisionContext::new(256).unwrap());
        let reference = bigfloat::parse_decimal(
            "0.5772156649015328606065120900824024310421593359399235988057672348848677267776646709369470632917467495",
            320,
        )
        .unwrap();
        let diff = c.gamma_euler.sub(&reference, 320, RM);
        let e = diff.exponent().unwrap_or(i32::MIN);
        assert!(diff.is_zero() || e < -250, "exponent {e}");
    }

    #[test]
    fn f64_constants() {
        let c = Constants::f64();
        assert_eq!(c.gamma_euler, 0.5772156649015329);
        assert_eq!(c.pi, std::f64::consts::PI);
        assert!((c.log_2pi - (2.0 * std::f64::consts::PI).ln()).abs() < 1e-15);
    }
}
