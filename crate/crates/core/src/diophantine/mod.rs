//! Rational approximation of the ratios `e^{2πk/a}`: certified continued
//! fractions, Dirichlet approximants, spacing classification and
//! Waldschmidt's lower bound for `|e^{πk/a} − p/q|`.

pub mod continued_fraction;
pub mod spacing;
pub mod waldschmidt;

pub use continued_fraction::{
    continued_fraction, continued_fraction_of, dirichlet_approx, dirichlet_approx_with, ApproxKind,
    ContinuedFraction, RationalApprox,
};
pub use spacing::{
    classify_spacing, perfect_power, ProgressionSpec, SpacingEntry, SpacingForm, SpacingReport,
    SpacingStatus,
};
pub use waldschmidt::{implied_log_p_floor, waldschmidt_floor, ImpliedFloor, WaldschmidtBound};

/// Big integers serialize as decimal strings.
pub(crate) mod as_decimal {
    use num_bigint::BigInt;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_string())
    }

    pub mod seq {
        use super::*;

        pub fn serialize<S: Serializer>(xs: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
            s.collect_seq(xs.iter().map(|x| x.to_string()))
        }
    }

    pub mod pairs {
        use super::*;

        pub fn serialize<S: Serializer>(xs: &[(BigInt, BigInt)], s: S) -> Result<S::Ok, S::Error> {
            s.collect_seq(xs.iter().map(|(p, q)| [p.to_string(), q.to_string()]))
        }
    }

    pub mod opt_pair {
        use super::*;

        pub fn serialize<S: Serializer>(x: &Option<(BigInt, BigInt)>, s: S) -> Result<S::Ok, S::Error> {
            match x {
                Some((p, q)) => s.collect_seq([p.to_string(), q.to_string()]),
                None => s.serialize_none(),
            }
        }
    }
}
