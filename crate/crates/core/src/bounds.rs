//! Distortion gap and ratio bounds between the fixed-encoder extreme point
//! `D^(b)` and the rate-matched tradeoff point `D₃`, plus the matching bounds
//! on the upper-left corner.
//!
//! The bounds are plain arithmetic on `σ_X`, `σ_X̂₃`, `D₁`, `D₃`; nothing is
//! re-derived here, so discrete-module outputs can be fed in as well.
//! [`gaussian_bounds_harness`] builds instances from the Gaussian curves.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::gaussian_model::GaussianPairSource;
use crate::gaussian_tradeoff::c_threshold;
use crate::universal::{encoder_for_rate, region_sweep};

const CHECK_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapInstance {
    /// `σ_X²`.
    pub var_x: f64,
    /// `σ_X̂₃`, a standard deviation.
    pub sigma_xhat3: f64,
    pub d1: f64,
    pub d3: f64,
    pub d_b: Option<f64>,
}

impl GapInstance {
    pub fn new(var_x: f64, sigma_xhat3: f64, d1: f64, d3: f64, d_b: Option<f64>) -> Result<Self> {
        if !(var_x > 0.0) {
            return domain(format!("σ_X² must be positive, got {var_x}"));
        }
        if !(0.0..=var_x).contains(&d1) {
            return domain(format!("D₁ must lie in [0, σ_X²] = [0, {var_x}], got {d1}"));
        }
        if !(sigma_xhat3 >= 0.0) {
            return domain(format!("σ_X̂₃ must be non-negative, got {sigma_xhat3}"));
        }
        if !(d3 >= 0.0) || d_b.is_some_and(|d| !(d >= 0.0)) {
            return domain("distortions must be non-negative");
        }
        Ok(Self { var_x, sigma_xhat3, d1, d3, d_b })
    }

    /// `σ_X² + σ_X̂₃² − 2σ_X̂₃ √(σ_X² − D₁)`.
    fn lower_d3(&self) -> Result<f64> {
        if self.d1 > self.var_x {
            return domain(format!("D₁ = {} exceeds σ_X² = {}", self.d1, self.var_x));
        }
        let s3 = self.sigma_xhat3;
        Ok(self.var_x + s3 * s3 - 2.0 * s3 * (self.var_x - self.d1).sqrt())
    }
}

/// Lower bound on `D₃ − D^(b)`.
pub fn gap_lower_bound(inst: &GapInstance) -> Result<f64> {
    Ok(inst.lower_d3()? - 2.0 * inst.d1)
}

/// Lower bound on `D₃ / D^(b)`; `+∞` at `D₁ = 0`.
pub fn ratio_lower_bound(inst: &GapInstance) -> Result<f64> {
    let num = inst.lower_d3()?;
    if inst.d1 == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(num / (2.0 * inst.d1))
}

/// `D^(b) ≤ D₃ ≤ 2D₁`.
pub fn sandwich_check(d_b: f64, d3: f64, d1: f64) -> bool {
    d_b <= d3 + CHECK_TOL && d3 <= 2.0 * d1 + CHECK_TOL
}

/// Upper bounds on `D̃^(a) − D₁` and `D̃^(a) / D₁`.
pub fn upper_left_bounds(inst: &GapInstance) -> Result<(f64, f64)> {
    let s3 = inst.sigma_xhat3;
    if !(s3 > 0.0) {
        return domain("upper-left bounds need σ_X̂₃ > 0");
    }
    let k = inst.var_x + s3 * s3 - inst.d3;
    let tilde_a = inst.var_x - k * k / (4.0 * s3 * s3);
    let half_d3 = inst.d3 / 2.0;
    let ratio = if half_d3 == 0.0 { f64::INFINITY } else { tilde_a / half_d3 };
    Ok((tilde_a - half_d3, ratio))
}

/// One harness instance with every bound and check evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HarnessRecord {
    pub rate: f64,
    /// Loss of the rate-`R` MMSE point, standing in for `C₃`.
    pub c3: f64,
    pub inst: GapInstance,
    /// Zero-rate instance: `σ_X̂₃ = 0` and the upper-left bounds are undefined.
    pub degenerate: bool,
    pub gap_lower: f64,
    pub ratio_lower: f64,
    pub gap_ub: Option<f64>,
    pub ratio_ub: Option<f64>,
    pub sandwich: bool,
    /// `D₃ − D^(b) ≥ gap_lower`.
    pub gap_holds: bool,
    /// `D₃ / D^(b) ≥ ratio_lower`, vacuously true at `D^(b) = 0`.
    pub ratio_holds: bool,
}

const SWEEP_POINTS: usize = 400;

/// Gaussian instance at rate `rate`: `D₁ = D₃ = σ_X² e^{−2R}`,
/// `σ_X̂₃ = σ_X √(1 − e^{−2R})` and `D^(b)` from the minimum-loss point of
/// the universal sweep at that rate.
pub fn bounds_instance_at_rate(src: &GaussianPairSource, rate: f64) -> Result<HarnessRecord> {
    if !(rate >= 0.0) {
        return domain(format!("rate must be non-negative, got {rate}"));
    }
    let var_x = src.var_x();
    let d1 = var_x * (-2.0 * rate).exp();
    let rep = encoder_for_rate(src, rate)?;
    let sigma3 = rep.cov_xz;
    let c3 = c_threshold(src, rate);

    let g_star = rep.mmse_gain();
    let mut grid: Vec<f64> = (1..=SWEEP_POINTS).map(|i| 3.0 * src.sigma_x() * i as f64 / SWEEP_POINTS as f64).collect();
    grid.push(g_star);
    let sweep = region_sweep(src, &rep, &grid)?;
    // minimum loss; losses within rounding of it tie and go to the lower distortion
    let c_low = sweep.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let d_b = sweep.iter().filter(|p| p.1 <= c_low + CHECK_TOL).map(|p| p.0).fold(f64::INFINITY, f64::min);

    let inst = GapInstance::new(var_x, sigma3, d1, d1, Some(d_b))?;
    let gap_lower = gap_lower_bound(&inst)?;
    let ratio_lower = ratio_lower_bound(&inst)?;
    let degenerate = sigma3 == 0.0;
    let (gap_ub, ratio_ub) = match upper_left_bounds(&inst) {
        Ok((g, r)) => (Some(g), Some(r)),
        Err(_) => (None, None),
    };
    Ok(HarnessRecord {
        rate,
        c3,
        inst,
        degenerate,
        gap_lower,
        ratio_lower,
        gap_ub,
        ratio_ub,
        sandwich: sandwich_check(d_b, inst.d3, inst.d1),
        gap_holds: inst.d3 - d_b >= gap_lower - CHECK_TOL,
        ratio_holds: d_b == 0.0 || inst.d3 / d_b >= ratio_lower - CHECK_TOL,
    })
}

/// `n` instances at rates drawn uniformly from `(0, max_rate]`, seeded.
pub fn gaussian_bounds_harness(
    src: &GaussianPairSource,
    max_rate: f64,
    seed: u64,
    n: usize,
) -> Result<Vec<HarnessRecord>> {
    if !(max_rate > 0.0) || !max_rate.is_finite() {
        return domain(format!("harness needs a positive finite rate, got {max_rate}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            // (0, 1] so the zero-rate corner is never drawn
            let u: f64 = 1.0 - rng.random::<f64>();
            bounds_instance_at_rate(src, max_rate * u)
        })
        .collect()
}
