//! C interface to `zetaprog`.
//!
//! Every function returns a [`ZpStatus`]; results are written through out
//! pointers. After a failure, `zp_last_error` copies the message for the
//! calling thread. Tables are opaque handles released with
//! `zp_divisor_table_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use zetaprog::diophantine::{dirichlet_approx, ApproxKind, ProgressionSpec};
use zetaprog::divisor::{sieve, DivisorTable};
use zetaprog::error::Error;
use zetaprog::expsum::{divisor_expsum_direct, divisor_expsum_hyperbola, divisor_expsum_rational};
use zetaprog::moments::{discrete_moment, main_term_thm1, MomentRequest};
use zetaprog::numerics::{PrecisionContext, RealExpr};
use zetaprog::zeta::zeta_half_line;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Domain = 3,
    OutOfRange = 4,
    Resource = 5,
    Precision = 6,
    Contract = 7,
    Parse = 8,
    Io = 9,
    Panic = 10,
}

impl From<&Error> for ZpStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Domain(_) => ZpStatus::Domain,
            Error::OutOfRange { .. } => ZpStatus::OutOfRange,
            Error::Resource(_) => ZpStatus::Resource,
            Error::Precision(_) => ZpStatus::Precision,
            Error::Contract(_) => ZpStatus::Contract,
            Error::Parse(_) => ZpStatus::Parse,
            Error::Io(_) => ZpStatus::Io,
        }
    }
}

/// Sieved divisor-count table.
pub struct ZpDivisorTable {
    inner: DivisorTable,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ZpComplex {
    pub re: f64,
    pub im: f64,
}

/// Dirichlet approximant `p/q` with `|qα − p| ≤ 1/√M`.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ZpRationalApprox {
    pub p: i64,
    pub q: i64,
    pub err: f64,
    /// Nonzero when the fraction is an intermediate rather than a convergent.
    pub intermediate: i32,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

enum Failure {
    Status(ZpStatus, String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn null(what: &str) -> Failure {
    Failure::Status(ZpStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> ZpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => ZpStatus::Ok,
        Ok(Err(Failure::Core(e))) => {
            let s = ZpStatus::from(&e);
            set_error(e.to_string());
            s
        }
        Ok(Err(Failure::Status(s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("internal panic".into());
            ZpStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::Status(ZpStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn table<'a>(t: *const ZpDivisorTable) -> Result<&'a DivisorTable, Failure> {
    t.as_ref().map(|t| &t.inner).ok_or_else(|| null("table"))
}

fn narrow<T>(v: T) -> Result<i64, Error>
where
    i64: TryFrom<T>,
{
    i64::try_from(v).map_err(|_| Error::OutOfRange {
        what: "approximant",
        value: f64::INFINITY,
        limit: i64::MAX as u64,
    })
}

unsafe fn put<T>(out: *mut T, v: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(v);
    Ok(())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn zp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copy the calling thread's last error message into `buf` (truncated to
/// `len` bytes, NUL included). Returns the length needed including the NUL.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn zp_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let bytes = e.borrow();
        let bytes = bytes.as_bytes_with_nul();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len);
            std::ptr::copy_nonoverlapping(bytes.as_ptr().cast(), buf, n);
            *buf.add(n - 1) = 0;
        }
        bytes.len()
    })
}

/// Sieve `d(n)` for `n ≤ limit`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn zp_divisor_table_new(limit: u64, out: *mut *mut ZpDivisorTable) -> ZpStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("output pointer"));
        }
        let t = Box::new(ZpDivisorTable { inner: sieve(limit)? });
        put(out, Box::into_raw(t))
    })
}

/// # Safety
/// `path` must be a NUL-terminated string; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn zp_divisor_table_load(path: *const c_char, out: *mut *mut ZpDivisorTable) -> ZpStatus {
    guard(|| {
        let path = text(path, "path")?;
        if out.is_null() {
            return Err(null("output pointer"));
        }
        let t = Box::new(ZpDivisorTable {
            inner: DivisorTable::load(Path::new(path))?,
        });
        put(out, Box::into_raw(t))
    })
}

/// # Safety
/// `table` must come from this library; `path` must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn zp_divisor_table_save(table_: *const ZpDivisorTable, path: *const c_char) -> ZpStatus {
    guard(|| {
        let t = table(table_)?;
        let path = text(path, "path")?;
        t.save(Path::new(path))?;
        Ok(())
    })
}

/// Release a table. Null is ignored.
///
/// # Safety
/// `table` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn zp_divisor_table_free(table: *mut ZpDivisorTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn zp_divisor_table_limit(table_: *const ZpDivisorTable, out: *mut u64) -> ZpStatus {
    guard(|| put(out, table(table_)?.limit()))
}

/// `d(n)` for `1 ≤ n ≤ limit`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn zp_divisor_count(table_: *const ZpDivisorTable, n: u64, out: *mut u32) -> ZpStatus {
    guard(|| {
        let t = table(table_)?;
        if n == 0 || n > t.limit() {
            return Err(Error::OutOfRange {
                what: "n",
                value: n as f64,
                limit: t.limit(),
            }
            .into());
        }
        put(out, t.d(n))
    })
}

/// `D(x) = Σ_{n≤x} d(n)`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn zp_divisor_sum(table_: *const ZpDivisorTable, x: f64, out: *mut u64) -> ZpStatus {
    guard(|| put(out, table(table_)?.divisor_sum(x)?))
}

/// `|ζ(½+it)|²`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn zp_zeta_abs_sq(t: f64, out: *mut f64) -> ZpStatus {
    guard(|| put(out, zeta_half_line(t)?.zeta_abs_sq))
}

/// `Σ_{m≤M} d(m) e(αm)` summed term by term from the table.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn zp_expsum_direct(
    table_: *const ZpDivisorTable,
    m: u64,
    alpha: f64,
    out: *mut ZpComplex,
) -> ZpStatus {
    guard(|| {
        let v = divisor_expsum_direct(table(table_)?, m, alpha)?.value;
        put(out, ZpComplex { re: v.re, im: v.im })
    })
}

/// Same sum by the hyperbola method; needs no table.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn zp_expsum_hyperbola(m: u64, alpha: f64, out: *mut ZpComplex) -> ZpStatus {
    guard(|| {
        let v = divisor_expsum_hyperbola(m, alpha)?.value;
        put(out, ZpComplex { re: v.re, im: v.im })
    })
}

/// `Σ_{m≤x} d(m) e(mr/s)` in closed form over residues mod `s`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn zp_expsum_rational(
    table_: *const ZpDivisorTable,
    x: f64,
    r: i64,
    s: u64,
    out: *mut ZpComplex,
) -> ZpStatus {
    guard(|| {
        let v = divisor_expsum_rational(table(table_)?, x, r, s)?.value;
        put(out, ZpComplex { re: v.re, im: v.im })
    })
}

/// Dirichlet approximant of the real expression `alpha` (for example
/// `"exp(2*pi)"`) with `q ≤ √M`. `bits = 0` uses the default precision.
///
/// # Safety
/// `alpha` must be NUL-terminated; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn zp_dirichlet_approx(
    alpha: *const c_char,
    m: u64,
    bits: usize,
    out: *mut ZpRationalApprox,
) -> ZpStatus {
    guard(|| {
        let alpha = RealExpr::parse(text(alpha, "alpha")?)?;
        let ctx = if bits == 0 {
            PrecisionContext::default()
        } else {
            PrecisionContext::new(bits)?
        };
        let a = dirichlet_approx(&alpha, m, ctx)?;
        put(
            out,
            ZpRationalApprox {
                p: narrow(&a.p)?,
                q: narrow(&a.q)?,
                err: a.err,
                intermediate: (a.kind == ApproxKind::Intermediate) as i32,
            },
        )
    })
}

/// `Σ |ζ(½ + i(an+b))|²` over `0 < an+b ≤ T`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn zp_discrete_moment(a: f64, b: f64, t_max: f64, out: *mut f64) -> ZpStatus {
    guard(|| {
        let spec = ProgressionSpec::generic(RealExpr::from_f64(a), b)?;
        put(out, discrete_moment(&MomentRequest::new(spec, t_max)?)?.value)
    })
}

/// The same moment for `a = 2πk0 / log(r/s)`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn zp_discrete_moment_rational(
    r: u64,
    s: u64,
    k0: u64,
    b: f64,
    t_max: f64,
    out: *mut f64,
) -> ZpStatus {
    guard(|| {
        let spec = ProgressionSpec::rational_power(r, s, k0, b)?;
        put(out, discrete_moment(&MomentRequest::new(spec, t_max)?)?.value)
    })
}

/// Generic main term `(T/a)(log(T/2π) + 2γ − 1)`, or `(T/a) log T` when
/// `leading_only` is nonzero.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn zp_main_term_generic(a: f64, t_max: f64, leading_only: i32, out: *mut f64) -> ZpStatus {
    guard(|| {
        if !(a > 0.0 && t_max > 0.0) {
            return Err(Error::Domain("a and T must be positive".into()).into());
        }
        put(out, main_term_thm1(a, t_max, leading_only != 0))
    })
}
