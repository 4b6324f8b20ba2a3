//! Tables of positive ordinates `gamma` of nontrivial zeta zeros.
//!
//! Zeros are assumed to lie on the critical line, `rho = 1/2 + i gamma`;
//! nothing here checks real parts.
//!
//! File format: ASCII, one decimal ordinate per line, strictly ascending.
//! Blank lines and lines starting with `#` are ignored.

use std::f64::consts::{E, PI, TAU};
use std::fs;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::constants::euler_constant;
use crate::summation::CompensatedSum;
use crate::{Error, Result};

pub const FIRST_ZERO: f64 = 14.134_725_141_734_693;

/// Statement attached to every report that relies on the table.
pub const RH_ASSUMPTION: &str = "all ordinates are taken to be zeros on the critical line (RH)";

#[derive(Debug, Clone, PartialEq)]
pub struct ZeroTable {
    ordinates: Vec<f64>,
    max_height: f64,
    source_digest: String,
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

impl ZeroTable {
    /// Builds a table from ordinates already in memory. An empty list is
    /// allowed and gives the degenerate table of height 0.
    pub fn from_ordinates(ordinates: Vec<f64>) -> Result<Self> {
        let path = Path::new("<memory>");
        let mut previous = 0.0;
        for (i, &g) in ordinates.iter().enumerate() {
            check_ordinate(path, i + 1, g, previous)?;
            previous = g;
        }
        let bytes: Vec<u8> = ordinates.iter().flat_map(|g| g.to_le_bytes()).collect();
        Ok(Self {
            max_height: ordinates.last().copied().unwrap_or(0.0),
            source_digest: sha256_hex(&bytes),
            ordinates,
        })
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut ordinates = Vec::new();
        let mut previous = 0.0;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let g: f64 = line.parse().map_err(|_| Error::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                message: format!("not a decimal number: {line:?}"),
            })?;
            check_ordinate(path, i + 1, g, previous)?;
            ordinates.push(g);
            previous = g;
        }
        if ordinates.is_empty() {
            return Err(Error::EmptyTable(path.to_path_buf()));
        }
        Ok(Self {
            max_height: previous,
            source_digest: sha256_hex(text.as_bytes()),
            ordinates,
        })
    }

    /// Reads a zero file. The digest is the SHA-256 of the file contents.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)?;
        Self::parse(&text, path)
    }

    /// The first `count` zeros. The digest records the parent digest and
    /// the count.
    pub fn prefix(&self, count: usize) -> Self {
        let count = count.min(self.ordinates.len());
        if count == self.ordinates.len() {
            return self.clone();
        }
        let ordinates = self.ordinates[..count].to_vec();
        Self {
            max_height: ordinates.last().copied().unwrap_or(0.0),
            source_digest: sha256_hex(format!("{}:{count}", self.source_digest).as_bytes()),
            ordinates,
        }
    }

    pub fn ordinates(&self) -> &[f64] {
        &self.ordinates
    }

    pub fn count(&self) -> usize {
        self.ordinates.len()
    }

    pub fn max_height(&self) -> f64 {
        self.max_height
    }

    pub fn digest(&self) -> &str {
        &self.source_digest
    }

    pub fn is_empty(&self) -> bool {
        self.ordinates.is_empty()
    }

    /// Number of ordinates `<= height`.
    pub fn count_up_to(&self, height: f64) -> usize {
        self.ordinates.partition_point(|&g| g <= height)
    }

    /// Ordinates `<= height`.
    pub fn up_to(&self, height: f64) -> &[f64] {
        &self.ordinates[..self.count_up_to(height)]
    }
}

fn check_ordinate(path: &Path, line: usize, g: f64, previous: f64) -> Result<()> {
    if !g.is_finite() || g <= 0.0 {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line,
            message: format!("ordinate must be positive and finite, got {g}"),
        });
    }
    if g <= previous {
        return Err(Error::Ordering {
            path: path.to_path_buf(),
            line,
            value: g,
            previous,
        });
    }
    Ok(())
}

/// Smooth zero count `(T/2pi) log(T/(2 pi e)) + 7/8`.
pub fn smooth_count(height: f64) -> f64 {
    height / TAU * (height / (TAU * E)).ln() + 0.875
}

/// Riemann-Siegel theta function (asymptotic series).
pub fn riemann_siegel_theta(t: f64) -> f64 {
    t / 2.0 * (t / TAU).ln() - t / 2.0 - PI / 8.0 + 1.0 / (48.0 * t) + 7.0 / (5760.0 * t.powi(3))
}

/// Antiderivative of [`riemann_siegel_theta`].
fn theta_antiderivative(t: f64) -> f64 {
    t * t / 4.0 * (t / TAU).ln() - 3.0 * t * t / 8.0 - PI * t / 8.0 + t.ln() / 48.0
        - 7.0 / (11520.0 * t * t)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CountingPoint {
    pub height: f64,
    pub actual: usize,
    pub estimate: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountingCheck {
    pub passed: bool,
    pub points: Vec<CountingPoint>,
}

/// `int_from^to S(t) dt` with `S(t) = N(t) - theta(t)/pi - 1`, compared with
/// a Turing-type bound. A table with a zero missing (or spurious) shifts `S`
/// by an integer on the rest of the range, which the mean of `S` detects
/// long before the pointwise counting check does.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanWindow {
    pub from: f64,
    pub to: f64,
    pub integral: f64,
    pub bound: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeanCheck {
    pub passed: bool,
    pub windows: Vec<MeanWindow>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub count: usize,
    pub max_height: f64,
    pub counting_check: CountingCheck,
    pub mean_check: MeanCheck,
    /// Smallest gap between consecutive ordinates; `None` for one zero.
    pub min_gap: Option<f64>,
    pub passed: bool,
    pub digest: String,
    pub assumption: &'static str,
}

const MIN_GAP: f64 = 1e-6;
const INTERIOR_HEIGHTS: usize = 10;

/// Bound on `|int_a^b S(t) dt|` (Turing's form `2.30 + 0.128 log(b / 2pi)`
/// with a little slack for the small heights it is not proved for).
fn mean_bound(b: f64) -> f64 {
    2.5 + 0.128 * (b / TAU).ln().max(0.0)
}

impl ZeroTable {
    fn integral_of_s(&self, a: f64, b: f64) -> f64 {
        let below = self.count_up_to(a);
        let mut acc = CompensatedSum::new();
        acc.add(below as f64 * (b - a));
        for &g in &self.ordinates[below..self.count_up_to(b)] {
            acc.add(b - g);
        }
        acc.add(-(theta_antiderivative(b) - theta_antiderivative(a)) / PI);
        acc.add(-(b - a));
        acc.value()
    }
}

/// Runs the counting, mean and gap checks and reports, without failing.
/// Errors only if the table is empty or does not start at the first zero.
pub fn inspect(table: &ZeroTable) -> Result<ValidationReport> {
    let Some(&first) = table.ordinates.first() else {
        return Err(Error::Validation("empty table".into()));
    };
    if (first - FIRST_ZERO).abs() > 1e-3 {
        return Err(Error::Validation(format!(
            "table starts at {first}, not at the first zero {FIRST_ZERO}"
        )));
    }
    let top = table.max_height;
    let heights: Vec<f64> = (1..=INTERIOR_HEIGHTS)
        .map(|i| first + (top - first) * i as f64 / (INTERIOR_HEIGHTS + 1) as f64)
        .chain(std::iter::once(top))
        .collect();

    let points: Vec<CountingPoint> = heights
        .iter()
        .map(|&h| {
            let actual = table.count_up_to(h);
            let estimate = smooth_count(h);
            let tolerance = 2.0 + h.ln();
            CountingPoint {
                height: h,
                actual,
                estimate,
                tolerance,
                passed: (actual as f64 - estimate).abs() <= tolerance,
            }
        })
        .collect();

    let mut edges = vec![first];
    edges.extend(&heights);
    let mut windows = Vec::new();
    for (i, &a) in edges.iter().enumerate() {
        let ends = if i + 1 < edges.len() {
            vec![edges[i + 1], top]
        } else {
            vec![]
        };
        for b in ends {
            if b > a && !windows.iter().any(|w: &MeanWindow| w.from == a && w.to == b) {
                let integral = table.integral_of_s(a, b);
                let bound = mean_bound(b);
                windows.push(MeanWindow {
                    from: a,
                    to: b,
                    integral,
                    bound,
                    passed: integral.abs() <= bound,
                });
            }
        }
    }

    let min_gap = table
        .ordinates
        .windows(2)
        .map(|w| w[1] - w[0])
        .min_by(f64::total_cmp);
    let counting_passed = points.iter().all(|p| p.passed);
    let mean_passed = windows.iter().all(|w| w.passed);
    let gap_passed = min_gap.is_none_or(|g| g > MIN_GAP);
    Ok(ValidationReport {
        count: table.count(),
        max_height: top,
        counting_check: CountingCheck {
            passed: counting_passed,
            points,
        },
        mean_check: MeanCheck {
            passed: mean_passed,
            windows,
        },
        min_gap,
        passed: counting_passed && mean_passed && gap_passed,
        digest: table.source_digest.clone(),
        assumption: RH_ASSUMPTION,
    })
}

/// Like [`inspect`], but a failed check is an error.
pub fn validate(table: &ZeroTable) -> Result<ValidationReport> {
    let report = inspect(table)?;
    if report.passed {
        return Ok(report);
    }
    let mut reasons = Vec::new();
    if let Some(p) = report.counting_check.points.iter().find(|p| !p.passed) {
        reasons.push(format!(
            "count {} at height {} deviates from {:.3} by more than {:.3}",
            p.actual, p.height, p.estimate, p.tolerance
        ));
    }
    if let Some(w) = report.mean_check.windows.iter().find(|w| !w.passed) {
        reasons.push(format!(
            "integral of S over [{}, {}] is {:.3}, beyond {:.3}",
            w.from, w.to, w.integral, w.bound
        ));
    }
    if let Some(g) = report.min_gap.filter(|&g| g <= MIN_GAP) {
        reasons.push(format!("ordinates {g:e} apart"));
    }
    Err(Error::Validation(reasons.join("; ")))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZeroSumIdentity {
    /// `sum_{gamma <= T} 1 / (1/4 + gamma^2)`
    pub partial: f64,
    /// `int_T^inf gamma^-2 (1/2pi) log(gamma / 2pi) d gamma`
    pub tail_estimate: f64,
    /// `(C0 + 2 - log 4 pi) / 2`
    pub target: f64,
}

impl ZeroSumIdentity {
    pub fn discrepancy(&self) -> f64 {
        self.partial + self.tail_estimate - self.target
    }
}

/// `sum 1/(1/4 + gamma^2)` over the table against its closed-form value.
pub fn zero_sum_identity(table: &ZeroTable) -> ZeroSumIdentity {
    let partial = inverse_square_sum(table.ordinates());
    let t = table.max_height;
    let tail_estimate = if t > 0.0 {
        ((t / TAU).ln() + 1.0) / (TAU * t)
    } else {
        0.0
    };
    ZeroSumIdentity {
        partial,
        tail_estimate,
        target: (euler_constant() + 2.0 - (4.0 * PI).ln()) / 2.0,
    }
}

/// `sum 1/(1/4 + gamma^2)`, ascending.
pub fn inverse_square_sum(ordinates: &[f64]) -> f64 {
    ordinates
        .iter()
        .map(|g| 1.0 / (0.25 + g * g))
        .sum::<CompensatedSum>()
        .value()
}
