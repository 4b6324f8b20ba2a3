//! Segmented prime generation and exact prime / prime-power sums.
//!
//! Primes are produced by a segmented sieve of Eratosthenes over blocks of
//! [`SEGMENT_LEN`] integers. Blocks are aligned to multiples of
//! `SEGMENT_LEN`, so the partition of `[2, n]` into blocks does not depend on
//! the query and every reduction over blocks happens in block order.
//!
//! Sieved blocks can optionally be cached on disk. A cache file is
//!
//! ```text
//! b"MBLSIEVE1" | lo: u64 LE | hi: u64 LE | bitset
//! ```
//!
//! where bit `i` of the bitset (least significant bit first within each byte)
//! is set iff `lo + i` is prime, for `i` in `0..=hi - lo`.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::summation::CompensatedSum;
use crate::{Error, Result};

/// Largest integer any query may reach unless configured otherwise.
pub const DEFAULT_LIMIT: u64 = 1_000_000_000;

/// Number of integers covered by one sieve block.
pub const SEGMENT_LEN: u64 = 1 << 20;

pub const CACHE_MAGIC: &[u8; 9] = b"MBLSIEVE1";

/// The primes in a closed interval `[lo, hi]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SieveSegment {
    pub lo: u64,
    pub hi: u64,
    pub primes: Vec<u64>,
}

impl SieveSegment {
    /// Serializes the segment in the on-disk cache format.
    pub fn write_cache<W: Write>(&self, mut w: W) -> Result<()> {
        let len = (self.hi - self.lo + 1) as usize;
        let mut bits = vec![0u8; len.div_ceil(8)];
        for &p in &self.primes {
            let i = (p - self.lo) as usize;
            bits[i / 8] |= 1 << (i % 8);
        }
        w.write_all(CACHE_MAGIC)?;
        w.write_all(&self.lo.to_le_bytes())?;
        w.write_all(&self.hi.to_le_bytes())?;
        w.write_all(&bits)?;
        Ok(())
    }

    pub fn read_cache<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 9];
        r.read_exact(&mut magic)
            .map_err(|_| Error::Cache("truncated header".into()))?;
        if &magic != CACHE_MAGIC {
            return Err(Error::Cache("bad magic".into()));
        }
        let mut word = [0u8; 8];
        r.read_exact(&mut word)
            .map_err(|_| Error::Cache("truncated header".into()))?;
        let lo = u64::from_le_bytes(word);
        r.read_exact(&mut word)
            .map_err(|_| Error::Cache("truncated header".into()))?;
        let hi = u64::from_le_bytes(word);
        if hi < lo {
            return Err(Error::Cache(format!("inverted range {lo}..{hi}")));
        }
        let len = (hi - lo + 1) as usize;
        let mut bits = vec![0u8; len.div_ceil(8)];
        r.read_exact(&mut bits)
            .map_err(|_| Error::Cache("truncated bitset".into()))?;
        let primes = (0..len)
            .filter(|&i| bits[i / 8] >> (i % 8) & 1 == 1)
            .map(|i| lo + i as u64)
            .collect();
        Ok(Self { lo, hi, primes })
    }
}

/// Prime and prime-power sums up to `x`.
///
/// | field | definition |
/// |---|---|
/// | `sum_logp_over_p` | `sum_{p <= x} log p / p` |
/// | `sum_recip_p` | `sum_{p <= x} 1 / p` |
/// | `psi` | `sum_{p^k <= x} log p` |
/// | `theta` | `sum_{p <= x} log p` |
/// | `lambda_over_n` | `sum_{n <= x} Lambda(n) / n` |
/// | `neg_log_product` | `-sum_{p <= x} log(1 - 1/p)` |
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PrimeSumLedger {
    pub x: f64,
    pub sum_logp_over_p: f64,
    pub sum_recip_p: f64,
    pub psi: f64,
    pub theta: f64,
    pub lambda_over_n: f64,
    pub neg_log_product: f64,
}

/// Running accumulator for the ledger sums; primes must be pushed in
/// ascending order.
#[derive(Debug, Clone, Default)]
pub struct PrimeSumAccumulator {
    /// Prime powers are included only up to this bound.
    bound: u64,
    pub(crate) logp_over_p: CompensatedSum,
    pub(crate) recip_p: CompensatedSum,
    psi: CompensatedSum,
    theta: CompensatedSum,
    lambda_over_n: CompensatedSum,
    neg_log_product: CompensatedSum,
}

impl PrimeSumAccumulator {
    pub fn new(bound: u64) -> Self {
        Self {
            bound,
            ..Default::default()
        }
    }

    #[inline]
    pub fn push_prime(&mut self, p: u64) {
        let pf = p as f64;
        let logp = pf.ln();
        let recip = 1.0 / pf;
        self.logp_over_p.add(logp * recip);
        self.recip_p.add(recip);
        self.theta.add(logp);
        self.psi.add(logp);
        self.lambda_over_n.add(logp * recip);
        self.neg_log_product.add(-(-recip).ln_1p());
        let mut pk = p;
        while let Some(next) = pk.checked_mul(p).filter(|&v| v <= self.bound) {
            pk = next;
            self.psi.add(logp);
            self.lambda_over_n.add(logp / pk as f64);
        }
    }

    pub fn merge(&mut self, other: &PrimeSumAccumulator) {
        self.logp_over_p.merge(&other.logp_over_p);
        self.recip_p.merge(&other.recip_p);
        self.psi.merge(&other.psi);
        self.theta.merge(&other.theta);
        self.lambda_over_n.merge(&other.lambda_over_n);
        self.neg_log_product.merge(&other.neg_log_product);
    }

    pub fn sum_logp_over_p(&self) -> f64 {
        self.logp_over_p.value()
    }

    pub fn sum_recip_p(&self) -> f64 {
        self.recip_p.value()
    }

    pub fn ledger(&self, x: f64) -> PrimeSumLedger {
        PrimeSumLedger {
            x,
            sum_logp_over_p: self.logp_over_p.value(),
            sum_recip_p: self.recip_p.value(),
            psi: self.psi.value(),
            theta: self.theta.value(),
            lambda_over_n: self.lambda_over_n.value(),
            neg_log_product: self.neg_log_product.value(),
        }
    }
}

/// Sieve front end with a global limit and an optional on-disk block cache.
#[derive(Debug, Clone)]
pub struct PrimeEngine {
    limit: u64,
    cache_dir: Option<PathBuf>,
}

impl Default for PrimeEngine {
    fn default() -> Self {
        Self::new(DEFAULT_LIMIT)
    }
}

impl PrimeEngine {
    pub fn new(limit: u64) -> Self {
        Self {
            limit,
            cache_dir: None,
        }
    }

    pub fn with_cache_dir(mut self, dir: impl Into<PathBuf>) -> Self {
        self.cache_dir = Some(dir.into());
        self
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn check_limit(&self, value: u64) -> Result<()> {
        if value > self.limit {
            return Err(Error::LimitExceeded {
                value,
                limit: self.limit,
            });
        }
        Ok(())
    }

    /// All primes in `[lo, hi]`.
    pub fn sieve_segment(&self, lo: u64, hi: u64) -> Result<SieveSegment> {
        if lo < 2 || hi <= lo {
            return Err(Error::InvalidRange { lo, hi });
        }
        self.check_limit(hi)?;
        let mut primes = Vec::new();
        self.for_each_prime(lo, hi, |p| primes.push(p))?;
        Ok(SieveSegment { lo, hi, primes })
    }

    /// All primes `<= n`.
    pub fn primes_up_to(&self, n: u64) -> Result<Vec<u64>> {
        self.check_limit(n)?;
        let mut primes = Vec::new();
        self.for_each_prime(2, n, |p| primes.push(p))?;
        Ok(primes)
    }

    /// Calls `f` on every prime in `[lo, hi]` in ascending order.
    pub fn for_each_prime<F: FnMut(u64)>(&self, lo: u64, hi: u64, mut f: F) -> Result<()> {
        self.check_limit(hi)?;
        let lo = lo.max(2);
        if hi < lo {
            return Ok(());
        }
        let base = small_primes(isqrt(block_end(hi / SEGMENT_LEN)));
        let mut buf = Vec::new();
        for block in lo / SEGMENT_LEN..=hi / SEGMENT_LEN {
            let primes = self.block_primes(block, &base, &mut buf)?;
            for &p in primes.iter().filter(|&&p| p >= lo && p <= hi) {
                f(p);
            }
        }
        Ok(())
    }

    /// Exact prime sums over all primes and prime powers `<= floor(x)`.
    pub fn prime_sums(&self, x: f64) -> Result<PrimeSumLedger> {
        if !(x >= 1.0) || !x.is_finite() {
            return Err(Error::Domain(format!("prime_sums needs x >= 1, got {x}")));
        }
        let n = x.floor() as u64;
        self.check_limit(n)?;
        if n < 2 {
            return Ok(PrimeSumAccumulator::new(n).ledger(x));
        }
        let base = small_primes(isqrt(block_end(n / SEGMENT_LEN)));
        let blocks: Vec<u64> = (0..=n / SEGMENT_LEN).collect();
        let partials = blocks
            .par_iter()
            .map(|&block| -> Result<PrimeSumAccumulator> {
                let mut buf = Vec::new();
                let mut acc = PrimeSumAccumulator::new(n);
                for p in self.block_primes(block, &base, &mut buf)? {
                    if p > n {
                        break;
                    }
                    acc.push_prime(p);
                }
                Ok(acc)
            })
            .collect::<Result<Vec<_>>>()?;
        let mut total = PrimeSumAccumulator::new(n);
        for part in &partials {
            total.merge(part);
        }
        Ok(total.ledger(x))
    }

    fn block_primes(&self, block: u64, base: &[u64], buf: &mut Vec<bool>) -> Result<Vec<u64>> {
        let lo = (block * SEGMENT_LEN).max(2);
        let hi = block_end(block);
        let Some(dir) = &self.cache_dir else {
            return Ok(sieve_block(lo, hi, base, buf));
        };
        let path = dir.join(format!("mblsieve_{lo}_{hi}.bin"));
        if let Ok(bytes) = fs::read(&path) {
            if let Ok(seg) = SieveSegment::read_cache(bytes.as_slice()) {
                if seg.lo == lo && seg.hi == hi {
                    return Ok(seg.primes);
                }
            }
        }
        let primes = sieve_block(lo, hi, base, buf);
        let seg = SieveSegment { lo, hi, primes };
        write_cache_file(dir, &path, &seg)?;
        Ok(seg.primes)
    }
}

fn write_cache_file(dir: &Path, path: &Path, seg: &SieveSegment) -> Result<()> {
    fs::create_dir_all(dir)?;
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    let mut bytes = Vec::new();
    seg.write_cache(&mut bytes)?;
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn block_end(block: u64) -> u64 {
    (block + 1) * SEGMENT_LEN - 1
}

pub(crate) fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Plain sieve of Eratosthenes for the base primes.
fn small_primes(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut i = 2;
    while i * i <= n {
        if !composite[i] {
            for j in (i * i..=n).step_by(i) {
                composite[j] = true;
            }
        }
        i += 1;
    }
    (2..=n).filter(|&k| !composite[k]).map(|k| k as u64).collect()
}

/// Primes in `[lo, hi]`, given every prime up to `sqrt(hi)` in `base`.
fn sieve_block(lo: u64, hi: u64, base: &[u64], buf: &mut Vec<bool>) -> Vec<u64> {
    let len = (hi - lo + 1) as usize;
    buf.clear();
    buf.resize(len, true);
    for &p in base {
        if p * p > hi {
            break;
        }
        let start = (p * p).max(lo.div_ceil(p) * p);
        let mut m = (start - lo) as usize;
        while m < len {
            buf[m] = false;
            m += p as usize;
        }
    }
    buf.iter()
        .enumerate()
        .filter(|&(_, &is_prime)| is_prime)
        .map(|(i, _)| lo + i as u64)
        .collect()
}

/// [`PrimeEngine::sieve_segment`] with the default limit.
pub fn sieve_segment(lo: u64, hi: u64) -> Result<SieveSegment> {
    PrimeEngine::default().sieve_segment(lo, hi)
}

/// [`PrimeEngine::prime_sums`] with the default limit.
pub fn prime_sums(x: f64) -> Result<PrimeSumLedger> {
    PrimeEngine::default().prime_sums(x)
}
