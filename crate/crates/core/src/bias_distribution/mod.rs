//! Limiting distribution of `sqrt(x) M1(x)` under RH and LI.
//!
//! The model is `Z = 1 - 2 Re sum_gamma X(gamma) / sqrt(1/4 + gamma^2)` with
//! independent `X(gamma)` uniform on the unit circle. Its characteristic
//! function is `E e^{itZ} = e^{it} R(t)` with the real, even
//!
//! ```text
//! R(t) = prod_{gamma <= T} J0(2t / sqrt(1/4 + gamma^2)) * exp(-t^2 sigma_tail^2 / 2)
//! ```
//!
//! where the zeros above the table height `T` are folded into one Gaussian
//! through `J0(u) ~ exp(-u^2 / 4)`.

mod bessel;
mod montecarlo;

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::summation::CompensatedSum;
use crate::zeta_zeros::{inverse_square_sum, ZeroTable};
use crate::{Error, Result};

pub use bessel::{bessel_j0, j0};
pub use montecarlo::{sample_z, CharacteristicProbe, MonteCarloResult, CF_PROBES};

/// `|R(t)|` must stay below this beyond the quadrature cut-off.
pub const DECAY_THRESHOLD: f64 = 1e-14;
pub const DEFAULT_STEP: f64 = 0.05;
/// Largest cut-off tried when choosing `t_max` automatically.
pub const MAX_T: f64 = 2000.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    /// `1 - 2 Re sum`
    M1,
    /// `1 + 2 Re sum`; same law, since each `X(gamma)` is symmetric.
    M2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailModel {
    /// Gaussian for the zeros above the table, from the smooth zero density.
    Auto,
    None,
}

#[derive(Debug, Clone)]
pub struct DistributionModel {
    table: ZeroTable,
    /// `2 / sqrt(1/4 + gamma^2)` per zero.
    weights: Vec<f64>,
    pub tail_height: f64,
    pub tail_variance: f64,
    pub mean_shift: f64,
    pub orientation: Orientation,
}

/// `2 int_T^inf (1/4 + g^2)^-1 (1/2pi) log(g/2pi) dg`, from
/// `(1/4 + g^2)^-1 = g^-2 - g^-4/4 + O(g^-6)`.
pub fn tail_variance(height: f64) -> f64 {
    let l = (height / TAU).ln();
    2.0 / TAU * ((l + 1.0) / height - 0.25 * (l + 1.0 / 3.0) / (3.0 * height.powi(3)))
}

impl DistributionModel {
    pub fn new(table: ZeroTable, tail: TailModel, orientation: Orientation) -> Result<Self> {
        let tail_height = table.max_height();
        let tail_variance = match tail {
            TailModel::None => 0.0,
            TailModel::Auto if table.is_empty() => {
                return Err(Error::Domain(
                    "an automatic tail needs at least one zero".into(),
                ))
            }
            TailModel::Auto => tail_variance(tail_height),
        };
        let weights = table
            .ordinates()
            .iter()
            .map(|g| 2.0 / (0.25 + g * g).sqrt())
            .collect();
        Ok(Self {
            table,
            weights,
            tail_height,
            tail_variance,
            mean_shift: 1.0,
            orientation,
        })
    }

    pub fn table(&self) -> &ZeroTable {
        &self.table
    }

    pub(crate) fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `R(t)`; real, even, `|R| <= 1`.
    pub fn real_transform(&self, t: f64) -> f64 {
        let mut r = (-0.5 * t * t * self.tail_variance).exp();
        for &w in &self.weights {
            r *= j0(w * t);
            if r == 0.0 {
                break;
            }
        }
        r
    }

    /// `int e^{-itz} d mu(z) = e^{-it} R(t)`.
    pub fn mu_hat(&self, t: f64) -> Complex64 {
        Complex64::from_polar(1.0, -t * self.mean_shift) * self.real_transform(t)
    }

    /// `2 sum 1/(1/4 + gamma^2) + sigma_tail^2`
    pub fn theoretical_variance(&self) -> f64 {
        2.0 * inverse_square_sum(self.table.ordinates()) + self.tail_variance
    }

    fn is_point_mass(&self) -> bool {
        self.weights.is_empty() && self.tail_variance == 0.0
    }

    /// Samples `R` on `t_k = k h`, `k = 0..=n`, with `t_max = n h`.
    pub fn transform_grid(&self, quadrature: Quadrature) -> Result<TransformGrid> {
        let h = quadrature.step;
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::Domain(format!("quadrature step must be positive, got {h}")));
        }
        let t_max = match quadrature.t_max {
            Some(t) if t > h && t.is_finite() => t,
            Some(t) => return Err(Error::Domain(format!("bad quadrature cut-off {t}"))),
            None => self.auto_t_max(h)?,
        };
        let n = (t_max / h).ceil() as usize;
        let values: Vec<f64> = (0..=n)
            .into_par_iter()
            .map(|k| self.real_transform(k as f64 * h))
            .collect();
        // The envelope check looks one unit of t past the cut-off so an
        // accidental zero of R at t_max cannot pass it.
        let magnitude = (0..=(1.0 / h).ceil() as usize)
            .map(|k| self.real_transform(n as f64 * h + k as f64 * h).abs())
            .fold(0.0, f64::max);
        if magnitude >= DECAY_THRESHOLD {
            return Err(Error::NotConverged {
                t_max: n as f64 * h,
                magnitude,
            });
        }
        Ok(TransformGrid {
            step: h,
            values,
            mean_shift: self.mean_shift,
        })
    }

    fn auto_t_max(&self, h: f64) -> Result<f64> {
        // Doubling search on a window of unit length.
        let mut t = 8.0;
        while t <= MAX_T {
            let window = (0..=(1.0 / h).ceil() as usize)
                .map(|k| self.real_transform(t + k as f64 * h).abs())
                .fold(0.0, f64::max);
            if window < DECAY_THRESHOLD {
                return Ok(t);
            }
            t *= 1.25;
        }
        Err(Error::NotConverged {
            t_max: MAX_T,
            magnitude: self.real_transform(MAX_T).abs(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    /// Cut-off; `None` picks the first `t` where `|R|` has decayed.
    pub t_max: Option<f64>,
    pub step: f64,
}

impl Default for Quadrature {
    fn default() -> Self {
        Self {
            t_max: None,
            step: DEFAULT_STEP,
        }
    }
}

/// `R` sampled on a uniform grid from 0.
#[derive(Debug, Clone)]
pub struct TransformGrid {
    step: f64,
    values: Vec<f64>,
    mean_shift: f64,
}

impl TransformGrid {
    pub fn t_max(&self) -> f64 {
        (self.values.len() - 1) as f64 * self.step
    }

    /// Trapezoid sum `h (g(0)/2 + sum_{k>=1} g(k h))` of an even integrand,
    /// using every `stride`-th node.
    fn trapezoid(&self, stride: usize, g: impl Fn(f64, f64) -> f64) -> f64 {
        let h = self.step * stride as f64;
        let mut acc = CompensatedSum::new();
        acc.add(0.5 * g(0.0, self.values[0]));
        for (k, &r) in self.values.iter().enumerate().skip(stride).step_by(stride) {
            acc.add(g(k as f64 * self.step, r));
        }
        h * acc.value()
    }

    /// `(1/pi) int_0^inf sin(t (m - z)) R(t) / t dt` on every `stride`-th node.
    fn gil_pelaez(&self, z: f64, stride: usize) -> f64 {
        let a = self.mean_shift - z;
        self.trapezoid(stride, |t, r| if t == 0.0 { a * r } else { (a * t).sin() * r / t })
            / PI
    }

    /// `P[Z <= z]` with a convergence estimate from the doubled step.
    pub fn cdf(&self, z: f64) -> Estimate {
        let fine = 0.5 - self.gil_pelaez(z, 1);
        let coarse = 0.5 - self.gil_pelaez(z, 2);
        Estimate {
            value: fine.clamp(0.0, 1.0),
            convergence: (fine - coarse).abs(),
        }
    }

    /// `f(z) = (1/pi) int_0^inf cos(t (m - z)) R(t) dt`.
    pub fn density(&self, z: f64) -> f64 {
        let a = self.mean_shift - z;
        self.trapezoid(1, |t, r| (a * t).cos() * r) / PI
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    /// Change when the quadrature step is doubled.
    pub convergence: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbabilityReport {
    /// `P[Z > 0]`
    pub prob_positive: f64,
    /// `P[Z <= 0]`, computed separately.
    pub complement: f64,
    pub convergence: f64,
    pub t_max: f64,
    pub step: f64,
    pub zeros_used: usize,
    pub tail_variance: f64,
}

/// `P[Z > 0]` by Gil-Pelaez inversion.
pub fn prob_positive(model: &DistributionModel, quadrature: Quadrature) -> Result<ProbabilityReport> {
    if model.is_point_mass() {
        return Ok(ProbabilityReport {
            prob_positive: if model.mean_shift > 0.0 { 1.0 } else { 0.0 },
            complement: if model.mean_shift > 0.0 { 0.0 } else { 1.0 },
            convergence: 0.0,
            t_max: 0.0,
            step: quadrature.step,
            zeros_used: 0,
            tail_variance: 0.0,
        });
    }
    let grid = model.transform_grid(quadrature)?;
    let integral = grid.gil_pelaez(0.0, 1);
    let coarse = grid.gil_pelaez(0.0, 2);
    Ok(ProbabilityReport {
        prob_positive: (0.5 + integral).clamp(0.0, 1.0),
        complement: (0.5 - integral).clamp(0.0, 1.0),
        convergence: (integral - coarse).abs(),
        t_max: grid.t_max(),
        step: grid.step,
        zeros_used: model.table.count(),
        tail_variance: model.tail_variance,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DensityPoint {
    pub z: f64,
    pub density: f64,
}

/// Density of `Z` on `points` equally spaced values in `[z_min, z_max]`.
pub fn density_grid(
    model: &DistributionModel,
    z_min: f64,
    z_max: f64,
    points: usize,
    quadrature: Quadrature,
) -> Result<Vec<DensityPoint>> {
    if !(z_min < z_max) || points < 2 || !z_min.is_finite() || !z_max.is_finite() {
        return Err(Error::InvalidGrid(format!(
            "density grid needs z_min < z_max and at least 2 points, got {z_min}:{z_max}:{points}"
        )));
    }
    if model.is_point_mass() {
        return Err(Error::Domain("a point mass has no density".into()));
    }
    let grid = model.transform_grid(quadrature)?;
    let dz = (z_max - z_min) / (points - 1) as f64;
    Ok((0..points)
        .into_par_iter()
        .map(|i| {
            let z = z_min + i as f64 * dz;
            DensityPoint {
                z,
                density: grid.density(z),
            }
        })
        .collect())
}

/// Trapezoid moments `(mass, mean, variance)` of a density grid.
pub fn grid_moments(points: &[DensityPoint]) -> (f64, f64, f64) {
    let integrate = |f: &dyn Fn(&DensityPoint) -> f64| {
        let mut acc = CompensatedSum::new();
        for w in points.windows(2) {
            acc.add(0.5 * (w[1].z - w[0].z) * (f(&w[0]) + f(&w[1])));
        }
        acc.value()
    };
    let mass = integrate(&|p| p.density);
    let mean = integrate(&|p| p.z * p.density) / mass;
    let variance = integrate(&|p| (p.z - mean).powi(2) * p.density) / mass;
    (mass, mean, variance)
}
