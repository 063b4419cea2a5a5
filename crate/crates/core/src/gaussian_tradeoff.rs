//! Closed-form `R(D, C)` and `D(C, R)` for a scalar Gaussian source.
//!
//! Inside the jointly Gaussian family with matched means everything reduces
//! to the squared correlation `t = ρ_XX̂²` of the reconstruction with `X`:
//!
//! * rate `I(X; X̂) = −½ ln(1 − t)`, so a rate budget `R` caps `t ≤ 1 − e^{−2R}`;
//! * the classification budget `C` demands `t ≥ (1 − e^{2(C − h(S))}) / ρ²`;
//! * the best MSE at correlation `t` is `σ_X² (1 − t)`, so a distortion budget
//!   `D` demands `t ≥ 1 − D/σ_X²`.
//!
//! [`rdc_rate`] and [`dcr_distortion_oracle`] are built on that reduction.
//! [`dcr_distortion_printed`] and [`boundary_curve`] transcribe the printed
//! three-case `D(C, R)` formula and its boundary curve verbatim; on the
//! middle band the two disagree, which [`crate::cli`] reports rather than hides.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::gaussian_model::{
    cond_entropy_s_given_xhat, mse_of_reconstruction, mutual_info_x_xhat, GaussianPairSource, GaussianReconstruction,
    TradeoffPoint,
};

/// Tolerance on squared correlations when deciding feasibility and which
/// constraints are active.
const T_SLACK: f64 = 1e-12;

pub const DEFAULT_GRID: usize = 400;
const MIN_GRID: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    Feasible,
    Infeasible,
    Unbounded,
}

/// Which constraint pins the optimum.
///
/// For `R(D, C)` queries the first slot is the distortion budget. For
/// `D(C, R)` queries the objective is the distortion, so the first slot
/// stands for the rate-limited branch (`D = σ_X² e^{−2R}`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Binding {
    Distortion,
    Classification,
    Both,
    None,
}

impl Binding {
    pub fn as_str(&self) -> &'static str {
        match self {
            Binding::Distortion => "distortion",
            Binding::Classification => "classification",
            Binding::Both => "both",
            Binding::None => "none",
        }
    }

    fn from_flags(first: bool, classification: bool) -> Self {
        match (first, classification) {
            (true, true) => Binding::Both,
            (true, false) => Binding::Distortion,
            (false, true) => Binding::Classification,
            (false, false) => Binding::None,
        }
    }
}

/// Outcome of a tradeoff query. `value` is present iff `status` is `Feasible`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityVerdict {
    pub status: Status,
    pub value: Option<f64>,
    pub binding: Binding,
}

impl FeasibilityVerdict {
    pub fn feasible(value: f64, binding: Binding) -> Self {
        Self { status: Status::Feasible, value: Some(value), binding }
    }

    pub fn infeasible() -> Self {
        Self { status: Status::Infeasible, value: None, binding: Binding::None }
    }

    pub fn unbounded(binding: Binding) -> Self {
        Self { status: Status::Unbounded, value: None, binding }
    }

    pub fn is_feasible(&self) -> bool {
        self.status == Status::Feasible
    }

    /// The value with `Unbounded` mapped to `+∞` and `Infeasible` to `None`.
    pub fn value_or_inf(&self) -> Option<f64> {
        match self.status {
            Status::Feasible => self.value,
            Status::Unbounded => Some(f64::INFINITY),
            Status::Infeasible => None,
        }
    }
}

/// A non-empty set `Θ` of `(D, C)` budgets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintSet {
    pairs: Vec<(f64, f64)>,
}

impl ConstraintSet {
    pub fn new(pairs: Vec<(f64, f64)>) -> Result<Self> {
        if pairs.is_empty() {
            return domain("constraint set must contain at least one (D, C) pair");
        }
        if let Some(&(d, _)) = pairs.iter().find(|(d, _)| !(*d >= 0.0)) {
            return domain(format!("distortion budgets must be non-negative, got {d}"));
        }
        Ok(Self { pairs })
    }

    pub fn pairs(&self) -> &[(f64, f64)] {
        &self.pairs
    }
}

/// Smallest reachable classification loss, `h(S) + ½ ln(1 − ρ²)`.
/// `−∞` for a perfectly correlated pair.
pub fn c_min(src: &GaussianPairSource) -> f64 {
    src.h_s() + 0.5 * (-src.rho_squared()).ln_1p()
}

/// Smallest classification loss reachable at rate `rate`:
/// `h(S) + ½ ln(1 − ρ² (1 − e^{−2R}))`.
pub fn c_threshold(src: &GaussianPairSource, rate: f64) -> f64 {
    debug_assert!(rate >= 0.0);
    src.h_s() + 0.5 * (-src.rho_squared() * max_squared_correlation(rate)).ln_1p()
}

/// `1 − e^{−2R}`: the largest squared correlation with `X` a rate `R` allows.
pub fn max_squared_correlation(rate: f64) -> f64 {
    -(-2.0 * rate).exp_m1()
}

/// `(1 − e^{2(C − h(S))}) / ρ²`: the squared correlation with `X` needed to
/// push `h(S | X̂)` down to `C`. Non-positive when `C ≥ h(S)`; above one when
/// `C < c_min`. With `ρ = 0` it is `0` for `C ≥ h(S)` and `+∞` otherwise.
pub fn min_squared_correlation(src: &GaussianPairSource, closs: f64) -> f64 {
    let rho2 = src.rho_squared();
    let need = -(2.0 * (closs - src.h_s())).exp_m1();
    if rho2 == 0.0 {
        return if need <= 0.0 { 0.0 } else { f64::INFINITY };
    }
    need / rho2
}

/// The rate-distortion-classification function `R(D, C)`.
pub fn rdc_rate(src: &GaussianPairSource, distortion: f64, closs: f64) -> Result<FeasibilityVerdict> {
    if !(distortion >= 0.0) {
        return domain(format!("distortion budget must be non-negative, got {distortion}"));
    }
    let t_class = min_squared_correlation(src, closs);
    if t_class > 1.0 + T_SLACK {
        return Ok(FeasibilityVerdict::infeasible());
    }
    let t_dist = 1.0 - distortion / src.var_x();
    let t = t_class.max(t_dist);
    if t <= 0.0 {
        return Ok(FeasibilityVerdict::feasible(0.0, Binding::None));
    }
    let binding = if (t_class - t_dist).abs() <= T_SLACK {
        Binding::Both
    } else if t_dist > t_class {
        Binding::Distortion
    } else {
        Binding::Classification
    };
    if t >= 1.0 {
        return Ok(FeasibilityVerdict::unbounded(binding));
    }
    let rate = match binding {
        Binding::Distortion | Binding::Both => 0.5 * (src.var_x() / distortion).ln(),
        _ => -0.5 * (-t_class).ln_1p(),
    };
    Ok(FeasibilityVerdict::feasible(rate, binding))
}

/// The printed boundary-curve distortion
/// `σ_X² − (σ_S² σ_X⁴ / θ₁²)(1 − e^{−2h(S) + 2C})`.
pub fn printed_boundary_distortion(src: &GaussianPairSource, closs: f64) -> f64 {
    let theta1 = src.cov_xs();
    src.var_x()
        - (src.var_s() * src.var_x() * src.var_x() / (theta1 * theta1)) * (1.0 - (-2.0 * src.h_s() + 2.0 * closs).exp())
}

/// The printed three-case `D(C, R)`, transcribed without correction.
///
/// Case 1 (`C > c_threshold(R)`) is tested first, then case 2
/// (`c_min ≤ C ≤ c_threshold(R)`). Case 3 (`C > h(S)` and `R > h(X)`) lies
/// inside case 1's region and so never fires; [`printed_case3_applies`]
/// exposes its condition for reporting.
pub fn dcr_distortion_printed(src: &GaussianPairSource, closs: f64, rate: f64) -> Result<FeasibilityVerdict> {
    check_rate(rate)?;
    if closs < c_min(src) {
        return Ok(FeasibilityVerdict::infeasible());
    }
    if closs > c_threshold(src, rate) {
        return Ok(FeasibilityVerdict::feasible(src.var_x() * (-2.0 * rate).exp(), Binding::Distortion));
    }
    if src.cov_xs() == 0.0 {
        // ρ = 0 collapses case 2 to the single point C = h(S), where the
        // printed formula reads 0/0; the constant decoder is the only solution.
        return Ok(FeasibilityVerdict::feasible(src.var_x(), Binding::Classification));
    }
    Ok(FeasibilityVerdict::feasible(printed_boundary_distortion(src, closs), Binding::Classification))
}

/// Condition of the printed case 3: `C > h(S)` and `R > h(X)`.
pub fn printed_case3_applies(src: &GaussianPairSource, closs: f64, rate: f64) -> bool {
    closs > src.h_s() && rate > src.h_x()
}

/// `D(C, R)` solved directly over jointly Gaussian reconstructions.
///
/// Feasible iff the correlation the label budget demands fits under the one
/// the rate allows; the optimum then spends the whole rate on the MMSE
/// reconstruction, `D = σ_X² e^{−2R}`.
pub fn dcr_distortion_oracle(src: &GaussianPairSource, closs: f64, rate: f64) -> Result<FeasibilityVerdict> {
    check_rate(rate)?;
    let t_max = max_squared_correlation(rate);
    let t_class = min_squared_correlation(src, closs).max(0.0);
    if t_class > t_max + T_SLACK {
        return Ok(FeasibilityVerdict::infeasible());
    }
    let binding = if t_class > 0.0 && t_class >= t_max - T_SLACK { Binding::Both } else { Binding::Distortion };
    Ok(FeasibilityVerdict::feasible(src.var_x() * (-2.0 * rate).exp(), binding))
}

fn check_rate(rate: f64) -> Result<()> {
    if !(rate >= 0.0) {
        return domain(format!("rate must be non-negative, got {rate}"));
    }
    Ok(())
}

/// Brute-force `R(D, C)` over a grid of reconstructions with `μ_X̂ = μ_X`,
/// `σ_X̂ ∈ (0, 3σ_X]` and `θ₂ = r σ_X σ_X̂` with `r` uniform on `[−1, 1]`
/// (plus `r = 0`). Independent of the closed form; it can only overestimate.
pub fn grid_oracle_rate(
    src: &GaussianPairSource,
    distortion: f64,
    closs: f64,
    n_sigma: usize,
    n_theta: usize,
) -> Result<FeasibilityVerdict> {
    if n_sigma < MIN_GRID || n_theta < MIN_GRID {
        return Err(Error::Config(format!(
            "grid resolution must be at least {MIN_GRID} per axis, got {n_sigma}×{n_theta}"
        )));
    }
    let sigma_x = src.sigma_x();
    let mut corrs: Vec<f64> = (0..n_theta).map(|j| -1.0 + 2.0 * j as f64 / (n_theta - 1) as f64).collect();
    if !corrs.contains(&0.0) {
        corrs.push(0.0);
    }

    // best rate subject to (both, distortion only, classification only)
    let best = (1..=n_sigma)
        .into_par_iter()
        .map(|k| {
            let s = 3.0 * sigma_x * k as f64 / n_sigma as f64;
            let mut best = [f64::INFINITY; 3];
            let mut any = [false; 3];
            for &r in &corrs {
                let rec = GaussianReconstruction { mu_xhat: src.mu_x(), var_xhat: s * s, cov_xxhat: r * sigma_x * s };
                let Ok(rate) = mutual_info_x_xhat(src, &rec) else { continue };
                let d_ok = mse_of_reconstruction(src, &rec) <= distortion;
                let c_ok = cond_entropy_s_given_xhat(src, &rec).is_ok_and(|c| c <= closs);
                for (slot, ok) in [d_ok && c_ok, d_ok, c_ok].into_iter().enumerate() {
                    if ok {
                        any[slot] = true;
                        best[slot] = best[slot].min(rate);
                    }
                }
            }
            (best, any)
        })
        .reduce(
            || ([f64::INFINITY; 3], [false; 3]),
            |(a, fa), (b, fb)| {
                ([a[0].min(b[0]), a[1].min(b[1]), a[2].min(b[2])], [fa[0] || fb[0], fa[1] || fb[1], fa[2] || fb[2]])
            },
        );

    let (rates, found) = best;
    if !found[0] {
        return Ok(FeasibilityVerdict::infeasible());
    }
    // a constraint binds when dropping it would lower the grid minimum
    let binding = Binding::from_flags(rates[0] > rates[2], rates[0] > rates[1]);
    if rates[0].is_infinite() {
        return Ok(FeasibilityVerdict::unbounded(binding));
    }
    Ok(FeasibilityVerdict::feasible(rates[0], binding))
}

/// Samples the printed lower boundary `D(C)` at rate `rate` for `C`
/// uniform on `[c_min, c_threshold(R))`. Empty at `R = 0` and for `ρ = 0`.
pub fn boundary_curve(src: &GaussianPairSource, rate: f64, n_points: usize) -> Result<Vec<TradeoffPoint>> {
    check_rate(rate)?;
    if n_points < 2 {
        return Err(Error::Config(format!("boundary curve needs at least 2 points, got {n_points}")));
    }
    if rate == 0.0 || src.cov_xs() == 0.0 {
        return Ok(Vec::new());
    }
    let lo = c_min(src);
    if !lo.is_finite() {
        return Err(Error::Degenerate("c_min is −∞ for a perfectly correlated source".into()));
    }
    let hi = c_threshold(src, rate);
    let step = (hi - lo) / n_points as f64;
    Ok((0..n_points)
        .map(|k| {
            let closs = lo + step * k as f64;
            TradeoffPoint { rate, distortion: printed_boundary_distortion(src, closs), closs }
        })
        .collect())
}
