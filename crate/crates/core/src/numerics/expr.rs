//! Real-valued expressions (`2*pi/log(3)`, `exp(2*pi*1/1)`, `5e4`) evaluated
//! at a chosen working precision with a propagated absolute error bound.
//!
//! Spacings such as `a = 2πk₀/log(r/s)` have no finite decimal form, so every
//! real CLI input goes through this evaluator.

use std::fmt;

use astro_float::BigFloat;
use num_rational::BigRational;

use super::bigfloat::{self, RM};
use crate::error::{Error, Result};

/// A value together with a certified bound on its absolute error.
#[derive(Debug, Clone)]
pub struct Approx {
    pub value: BigFloat,
    /// Upper bound on `|value − true value|`.
    pub err: f64,
    pub bits: usize,
}

impl Approx {
    pub fn exact(value: BigFloat, bits: usize) -> Self {
        Approx {
            value,
            err: 0.0,
            bits,
        }
    }

    pub fn from_f64(x: f64, bits: usize) -> Self {
        Approx::exact(bigfloat::from_f64(x, bits), bits)
    }

    pub fn from_u64(x: u64, bits: usize) -> Self {
        Approx::exact(bigfloat::from_u64(x, bits.max(64)), bits)
    }

    pub fn pi(bits: usize) -> Self {
        let mut a = Approx::exact(bigfloat::pi(bits), bits);
        a.err = a.rounding(&a.value);
        a
    }

    pub fn to_f64(&self) -> f64 {
        bigfloat::to_f64(&self.value)
    }

    pub fn to_dd(&self) -> super::Dd {
        bigfloat::to_dd(&self.value)
    }

    pub fn abs_f64(&self) -> f64 {
        bigfloat::abs_upper_f64(&self.value)
    }

    /// Rational enclosure `[value − err, value + err]`.
    pub fn enclosure(&self) -> (BigRational, BigRational) {
        let v = bigfloat::to_rational(&self.value).expect("finite approximation");
        let e = bigfloat::f64_to_rational(self.err).expect("finite error bound");
        (&v - &e, &v + &e)
    }

    /// Rounding contribution of one operation at this precision.
    fn rounding(&self, v: &BigFloat) -> f64 {
        bigfloat::abs_upper_f64(v) * 2f64.powi(2 - self.bits as i32)
    }

    fn pad(e: f64) -> f64 {
        e * (1.0 + 1e-12) + f64::MIN_POSITIVE
    }

    pub fn add(&self, o: &Approx) -> Approx {
        let v = self.value.add(&o.value, self.bits, RM);
        let err = Self::pad(self.err + o.err + self.rounding(&v));
        Approx { value: v, err, bits: self.bits }
    }

    pub fn sub(&self, o: &Approx) -> Approx {
        let v = self.value.sub(&o.value, self.bits, RM);
        let err = Self::pad(self.err + o.err + self.rounding(&v));
        Approx { value: v, err, bits: self.bits }
    }

    pub fn neg(&self) -> Approx {
        Approx {
            value: self.value.neg(),
            err: self.err,
            bits: self.bits,
        }
    }

    pub fn mul(&self, o: &Approx) -> Approx {
        let v = self.value.mul(&o.value, self.bits, RM);
        let err = self.abs_f64() * o.err + o.abs_f64() * self.err + self.err * o.err;
        let err = Self::pad(err + self.rounding(&v));
        Approx { value: v, err, bits: self.bits }
    }

    pub fn div(&self, o: &Approx) -> Result<Approx> {
        let ob = bigfloat::to_f64(&o.value).abs() * (1.0 - 4.0 * f64::EPSILON);
        if !(ob > o.err) {
            return Err(Error::Domain("division by a quantity not bounded away from zero".into()));
        }
        let v = self.value.div(&o.value, self.bits, RM);
        let vabs = bigfloat::abs_upper_f64(&v);
        let err = (self.err + vabs * o.err) / (ob - o.err);
        let err = Self::pad(err + self.rounding(&v));
        Ok(Approx { value: v, err, bits: self.bits })
    }

    pub fn exp(&self) -> Result<Approx> {
        let v = bigfloat::with_consts(|cc| self.value.exp(self.bits, RM, cc));
        if v.is_inf() || v.is_nan() {
            return Err(Error::Domain("exp overflow".into()));
        }
        let vabs = bigfloat::abs_upper_f64(&v);
        let err = vabs * self.err.exp_m1() * (1.0 + 1e-12);
        let err = Self::pad(err + self.rounding(&v));
        Ok(Approx { value: v, err, bits: self.bits })
    }

    pub fn ln(&self) -> Result<Approx> {
        let a = bigfloat::to_f64(&self.value) * (1.0 - 4.0 * f64::EPSILON);
        if !(a > self.err) {
            return Err(Error::Domain("log of a quantity not bounded away from zero".into()));
        }
        let v = bigfloat::with_consts(|cc| self.value.ln(self.bits, RM, cc));
        let err = -(-(self.err / a)).ln_1p() * (1.0 + 1e-12);
        let err = Self::pad(err + self.rounding(&v) + 2f64.powi(1 - self.bits as i32));
        Ok(Approx { value: v, err, bits: self.bits })
    }

    pub fn sqrt(&self) -> Result<Approx> {
        let a = bigfloat::to_f64(&self.value) * (1.0 - 4.0 * f64::EPSILON);
        if a < 0.0 || (self.err > 0.0 && !(a > self.err)) {
            return Err(Error::Domain("sqrt of a quantity not bounded away from zero".into()));
        }
        let v = self.value.sqrt(self.bits, RM);
        let err = if self.err == 0.0 {
            0.0
        } else {
            self.err / (a - self.err).sqrt()
        };
        let err = Self::pad(err + self.rounding(&v));
        Ok(Approx { value: v, err, bits: self.bits })
    }

    pub fn sin(&self) -> Approx {
        let v = bigfloat::with_consts(|cc| self.value.sin(self.bits, RM, cc));
        let err = Self::pad(self.err + self.rounding(&v) + 2f64.powi(1 - self.bits as i32));
        Approx { value: v, err, bits: self.bits }
    }

    pub fn cos(&self) -> Approx {
        let v = bigfloat::with_consts(|cc| self.value.cos(self.bits, RM, cc));
        let err = Self::pad(self.err + self.rounding(&v) + 2f64.powi(1 - self.bits as i32));
        Approx { value: v, err, bits: self.bits }
    }

    pub fn pow(&self, o: &Approx) -> Result<Approx> {
        if o.err == 0.0 && bigfloat::to_f64(&o.value).fract() == 0.0 {
            let n = bigfloat::to_f64(&o.value);
            if n.abs() <= 4096.0 {
                let mut acc = Approx::from_f64(1.0, self.bits);
                for _ in 0..(n.abs() as u64) {
                    acc = acc.mul(self);
                }
                return if n < 0.0 {
                    Approx::from_f64(1.0, self.bits).div(&acc)
                } else {
                    Ok(acc)
                };
            }
        }
        self.ln()?.mul(o).exp()
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Num(String),
    Pi,
    E,
    Neg(Box<Node>),
    Bin(char, Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Func {
    Exp,
    Ln,
    Sqrt,
    Sin,
    Cos,
}

/// A parsed real expression that can be evaluated at any precision.
#[derive(Debug, Clone, PartialEq)]
pub struct RealExpr {
    source: String,
    root: Node,
}

impl fmt::Display for RealExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

impl std::str::FromStr for RealExpr {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        RealExpr::parse(s)
    }
}

impl RealExpr {
    pub fn parse(src: &str) -> Result<Self> {
        let mut p = Parser {
            chars: src.chars().filter(|c| !c.is_whitespace()).collect(),
            pos: 0,
        };
        let root = p.expr()?;
        if p.pos != p.chars.len() {
            return Err(Error::Parse(format!(
                "unexpected input at position {} in {src:?}",
                p.pos
            )));
        }
        Ok(RealExpr {
            source: src.trim().to_string(),
            root,
        })
    }

    pub fn from_f64(x: f64) -> Self {
        RealExpr {
            source: format!("{x:?}"),
            root: Node::Num(format!("{x:e}")),
        }
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn eval(&self, bits: usize) -> Result<Approx> {
        eval(&self.root, bits)
    }

    pub fn to_f64(&self) -> Result<f64> {
        Ok(self.eval(128)?.to_f64())
    }
}

fn eval(n: &Node, w: usize) -> Result<Approx> {
    Ok(match n {
        Node::Num(s) => {
            let v = bigfloat::parse_decimal(s, w)
                .ok_or_else(|| Error::Parse(format!("bad number {s:?}")))?;
            let mut a = Approx::exact(v, w);
            // Decimal literals that are not dyadic carry one rounding.
            let back = bigfloat::to_rational(&a.value);
            if back.map(|r| !is_decimal_exact(s, &r)).unwrap_or(true) {
                a.err = a.rounding(&a.value);
            }
            a
        }
        Node::Pi => Approx::pi(w),
        Node::E => {
            let v = bigfloat::with_consts(|cc| cc.e(w, RM));
            let mut a = Approx::exact(v, w);
            a.err = a.rounding(&a.value);
            a
        }
        Node::Neg(x) => eval(x, w)?.neg(),
        Node::Bin(op, l, r) => {
            let (l, r) = (eval(l, w)?, eval(r, w)?);
            match op {
                '+' => l.add(&r),
                '-' => l.sub(&r),
                '*' => l.mul(&r),
                '/' => l.div(&r)?,
                '^' => l.pow(&r)?,
                _ => unreachable!(),
            }
        }
        Node::Call(f, x) => {
            let x = eval(x, w)?;
            match f {
                Func::Exp => x.exp()?,
                Func::Ln => x.ln()?,
                Func::Sqrt => x.sqrt()?,
                Func::Sin => x.sin(),
                Func::Cos => x.cos(),
            }
        }
    })
}

/// Whether parsing `s` produced its exact decimal value.
fn is_decimal_exact(s: &str, r: &BigRational) -> bool {
    match decimal_to_rational(s) {
        Some(d) => &d == r,
        None => false,
    }
}

fn decimal_to_rational(s: &str) -> Option<BigRational> {
    use num_bigint::BigInt;
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i64>().ok()?),
        None => (s, 0),
    };
    let (int, frac) = match mant.find('.') {
        Some(i) => (&mant[..i], &mant[i + 1..]),
        None => (mant, ""),
    };
    let digits: BigInt = format!("{int}{frac}").trim_start_matches('+').parse().ok()?;
    let e10 = exp - frac.len() as i64;
    if e10.unsigned_abs() > 100_000 {
        return None;
    }
    let ten = BigInt::from(10);
    Some(if e10 >= 0 {
        BigRational::from_integer(digits * num_traits::pow(ten, e10 as usize))
    } else {
        BigRational::new(digits, num_traits::pow(ten, (-e10) as usize))
    })
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Node> {
        let mut lhs = self.term()?;
        while let Some(c @ ('+' | '-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Node::Bin(c, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Node> {
        let mut lhs = self.unary()?;
        while let Some(c @ ('*' | '/')) = self.peek() {
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Node::Bin(c, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Node> {
        if self.eat('-') {
            return Ok(Node::Neg(Box::new(self.unary()?)));
        }
        if self.eat('+') {
            return self.unary();
        }
        let base = self.atom()?;
        if self.eat('^') {
            let exp = self.unary()?;
            return Ok(Node::Bin('^', Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Node> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(Error::Parse("missing ')'".into()));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => {
                let start = self.pos;
                while matches!(self.peek(), Some(c) if c.is_ascii_digit() || c == '.') {
                    self.pos += 1;
                }
                if matches!(self.peek(), Some('e' | 'E')) {
                    let save = self.pos;
                    self.pos += 1;
                    if matches!(self.peek(), Some('+' | '-')) {
                        self.pos += 1;
                    }
                    if matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                            self.pos += 1;
                        }
                    } else {
                        // `2e` followed by something else: `e` is the constant.
                        self.pos = save;
                    }
                }
                let s: String = self.chars[start..self.pos].iter().collect();
                if s.chars().filter(|&c| c == '.').count() > 1 || s == "." {
                    return Err(Error::Parse(format!("bad number {s:?}")));
                }
                Ok(Node::Num(s))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '_') {
                    self.pos += 1;
                }
                let name: String = self.chars[start..self.pos].iter().collect();
                let func = match name.as_str() {
                    "pi" => return Ok(Node::Pi),
                    "e" => return Ok(Node::E),
                    "exp" => Func::Exp,
                    "log" | "ln" => Func::Ln,
                    "sqrt" => Func::Sqrt,
                    "sin" => Func::Sin,
                    "cos" => Func::Cos,
                    _ => return Err(Error::Parse(format!("unknown identifier {name:?}"))),
                };
                if !self.eat('(') {
                    return Err(Error::Parse(format!("expected '(' after {name}")));
                }
                let arg = self.expr()?;
                if !self.eat(')') {
                    return Err(Error::Parse("missing ')'".into()));
                }
                Ok(Node::Call(func, Box::new(arg)))
            }
            _ => Err(Error::Parse(format!(
                "unexpected {:?} at position {}",
                self.peek(),
                self.pos
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn val(s: &str) -> Approx {
        RealExpr::parse(s).unwrap().eval(128).unwrap()
    }

    #[test]
    fn basic_forms() {
        assert_eq!(val("3").to_f64(), 3.0);
        assert_eq!(val("3").err, 0.0);
        assert_eq!(val("5e4").to_f64(), 5e4);
        assert_eq!(val("5e4").err, 0.0);
        assert_eq!(val("pi").to_f64(), std::f64::consts::PI);
        assert_eq!(val("e").to_f64(), std::f64::consts::E);
        assert!((val("2*pi/log(3)").to_f64() - 5.719_201_734_760_253).abs() < 1e-12);
        assert!((val("exp(2*pi*1/1)").to_f64() - 535.491_655_524_764_7).abs() < 1e-10);
        assert_eq!(val("-2^3").to_f64(), -8.0);
        assert_eq!(val("2^-1").to_f64(), 0.5);
        assert_eq!(val("0.25").err, 0.0);
        assert!(val("0.3").err > 0.0);
    }

    #[test]
    fn error_bound_encloses_higher_precision() {
        for s in ["exp(2*pi*3/1)", "2*pi/log(3/2)", "sqrt(2)*(2*pi/log(2))", "cos(1e3)"] {
            let lo = RealExpr::parse(s).unwrap().eval(96).unwrap();
            let hi = RealExpr::parse(s).unwrap().eval(512).unwrap();
            let d = lo.value.sub(&hi.value, 600, RM);
            let d = bigfloat::to_f64(&d).abs();
            assert!(d <= lo.err + hi.err, "{s}: |diff|={d:e} err={:e}", lo.err);
            assert!(lo.err < 1e-10 * (1.0 + lo.abs_f64()));
        }
    }

    #[test]
    fn rejects_garbage() {
        assert!(RealExpr::parse("2*").is_err());
        assert!(RealExpr::parse("foo(2)").is_err());
        assert!(RealExpr::parse("(1+2").is_err());
        assert!(RealExpr::parse("1/0").unwrap().eval(128).is_err());
        assert!(RealExpr::parse("log(0)").unwrap().eval(128).is_err());
    }
}
