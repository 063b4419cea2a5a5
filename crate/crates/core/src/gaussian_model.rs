//! Closed-form functionals for jointly Gaussian triples `(X, S, X̂)` under the
//! Markov chain `S ↔ X ↔ X̂`.
//!
//! The reconstruction is described by its second-order statistics only
//! (`μ_X̂`, `σ_X̂²`, `θ₂ = Cov(X, X̂)`); every information quantity depends on
//! the squared correlations
//!
//! ```text
//! ρ²      = θ₁² / (σ_S² σ_X²)     (label vs source)
//! ρ_XX̂²   = θ₂² / (σ_X² σ_X̂²)     (source vs reconstruction)
//! ```
//!
//! and the Markov chain gives `ρ_SX̂² = ρ² · ρ_XX̂²`.

use std::f64::consts::{E, PI};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Slack allowed on a squared correlation before it is treated as a
/// violation of Cauchy–Schwarz rather than rounding.
pub(crate) const CORRELATION_SLACK: f64 = 1e-12;

/// Jointly Gaussian source `X` and label `S`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianPairSource {
    mu_x: f64,
    var_x: f64,
    mu_s: f64,
    var_s: f64,
    cov_xs: f64,
    degenerate: bool,
}

impl GaussianPairSource {
    /// Builds a source with `θ₁² < σ_X² σ_S²`.
    pub fn new(mu_x: f64, var_x: f64, mu_s: f64, var_s: f64, cov_xs: f64) -> Result<Self> {
        Self::build(mu_x, var_x, mu_s, var_s, cov_xs, false)
    }

    /// Like [`GaussianPairSource::new`] but also accepts a perfectly correlated
    /// pair (`θ₁² = σ_X² σ_S²`), in which case `c_min` is `−∞`.
    pub fn degenerate(mu_x: f64, var_x: f64, mu_s: f64, var_s: f64, cov_xs: f64) -> Result<Self> {
        Self::build(mu_x, var_x, mu_s, var_s, cov_xs, true)
    }

    /// Zero-mean source parameterised by standard deviations and correlation.
    pub fn from_correlation(rho: f64, sigma_x: f64, sigma_s: f64) -> Result<Self> {
        if !(sigma_x > 0.0 && sigma_s > 0.0) {
            return domain(format!("standard deviations must be positive, got σ_X={sigma_x}, σ_S={sigma_s}"));
        }
        let cov = rho * sigma_x * sigma_s;
        if rho.abs() == 1.0 {
            Self::degenerate(0.0, sigma_x * sigma_x, 0.0, sigma_s * sigma_s, cov)
        } else {
            Self::new(0.0, sigma_x * sigma_x, 0.0, sigma_s * sigma_s, cov)
        }
    }

    fn build(mu_x: f64, var_x: f64, mu_s: f64, var_s: f64, cov_xs: f64, allow_equal: bool) -> Result<Self> {
        if !(var_x > 0.0 && var_s > 0.0) || !var_x.is_finite() || !var_s.is_finite() {
            return domain(format!("variances must be positive and finite, got σ_X²={var_x}, σ_S²={var_s}"));
        }
        if !(mu_x.is_finite() && mu_s.is_finite() && cov_xs.is_finite()) {
            return domain("means and covariance must be finite");
        }
        let r2 = cov_xs * cov_xs / (var_x * var_s);
        if r2 > 1.0 + CORRELATION_SLACK {
            return Err(Error::CorrelationBound(r2));
        }
        let degenerate = r2 >= 1.0;
        if degenerate && !allow_equal {
            return Err(Error::Degenerate("θ₁² = σ_X²σ_S²; construct with GaussianPairSource::degenerate".into()));
        }
        Ok(Self { mu_x, var_x, mu_s, var_s, cov_xs, degenerate })
    }

    pub fn mu_x(&self) -> f64 {
        self.mu_x
    }
    pub fn var_x(&self) -> f64 {
        self.var_x
    }
    pub fn sigma_x(&self) -> f64 {
        self.var_x.sqrt()
    }
    pub fn mu_s(&self) -> f64 {
        self.mu_s
    }
    pub fn var_s(&self) -> f64 {
        self.var_s
    }
    pub fn sigma_s(&self) -> f64 {
        self.var_s.sqrt()
    }
    /// `θ₁ = Cov(X, S)`.
    pub fn cov_xs(&self) -> f64 {
        self.cov_xs
    }
    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    /// Correlation coefficient `ρ = θ₁ / (σ_S σ_X)`.
    pub fn rho(&self) -> f64 {
        self.cov_xs / (self.sigma_s() * self.sigma_x())
    }

    /// `ρ²`, computed without the square roots.
    pub fn rho_squared(&self) -> f64 {
        (self.cov_xs * self.cov_xs / (self.var_x * self.var_s)).min(1.0)
    }

    /// `h(S)` in nats.
    pub fn h_s(&self) -> f64 {
        half_log_2pie(self.var_s)
    }

    /// `h(X)` in nats.
    pub fn h_x(&self) -> f64 {
        half_log_2pie(self.var_x)
    }
}

/// Jointly Gaussian reconstruction `X̂`, described relative to a source.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianReconstruction {
    pub mu_xhat: f64,
    pub var_xhat: f64,
    /// `θ₂ = Cov(X, X̂)`; may be negative.
    pub cov_xxhat: f64,
}

impl GaussianReconstruction {
    pub fn new(mu_xhat: f64, var_xhat: f64, cov_xxhat: f64) -> Result<Self> {
        if !(var_xhat >= 0.0) || !var_xhat.is_finite() {
            return domain(format!("reconstruction variance must be non-negative, got {var_xhat}"));
        }
        Ok(Self { mu_xhat, var_xhat, cov_xxhat })
    }

    /// The identity reconstruction `X̂ = X`.
    pub fn identity(src: &GaussianPairSource) -> Self {
        Self { mu_xhat: src.mu_x, var_xhat: src.var_x, cov_xxhat: src.var_x }
    }

    /// Constant decoder `X̂ = μ`.
    pub fn constant(mu: f64) -> Self {
        Self { mu_xhat: mu, var_xhat: 0.0, cov_xxhat: 0.0 }
    }

    /// Squared correlation `θ₂² / (σ_X² σ_X̂²)` with `X`, or an error when it
    /// exceeds one beyond rounding. A constant reconstruction has correlation 0.
    pub fn squared_correlation(&self, src: &GaussianPairSource) -> Result<f64> {
        if self.var_xhat == 0.0 {
            if self.cov_xxhat != 0.0 {
                return Err(Error::CorrelationBound(f64::INFINITY));
            }
            return Ok(0.0);
        }
        let t = self.cov_xxhat * self.cov_xxhat / (src.var_x * self.var_xhat);
        if t > 1.0 + CORRELATION_SLACK {
            return Err(Error::CorrelationBound(t));
        }
        Ok(t.min(1.0))
    }
}

/// A `(rate, distortion, classification loss)` triple.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TradeoffPoint {
    /// Nats; may be `+∞`.
    pub rate: f64,
    pub distortion: f64,
    /// `H(S | X̂)` in nats; differential entropies may be negative.
    pub closs: f64,
}

fn half_log_2pie(var: f64) -> f64 {
    0.5 * (2.0 * PI * E * var).ln()
}

/// `h = ½ ln(2πe σ²)` for a Gaussian of variance `var`.
pub fn differential_entropy(var: f64) -> Result<f64> {
    if !(var > 0.0) {
        return domain(format!("differential entropy needs a positive variance, got {var}"));
    }
    Ok(half_log_2pie(var))
}

/// `I(X; X̂) = −½ ln(1 − ρ_XX̂²)`; `+∞` for a perfectly correlated pair.
pub fn mutual_info_x_xhat(src: &GaussianPairSource, rec: &GaussianReconstruction) -> Result<f64> {
    let t = rec.squared_correlation(src)?;
    Ok(rate_from_squared_correlation(t))
}

/// `−½ ln(1 − t)` with `t = 1` mapped to `+∞`.
pub(crate) fn rate_from_squared_correlation(t: f64) -> f64 {
    if t >= 1.0 {
        f64::INFINITY
    } else {
        -0.5 * (-t).ln_1p()
    }
}

/// `h(S | X̂) = h(S) + ½ ln(1 − ρ² ρ_XX̂²)`.
pub fn cond_entropy_s_given_xhat(src: &GaussianPairSource, rec: &GaussianReconstruction) -> Result<f64> {
    let t = rec.squared_correlation(src)?;
    let arg = 1.0 - src.rho_squared() * t;
    if arg <= 0.0 {
        return Err(Error::Degenerate("S is a deterministic function of X̂; h(S|X̂) = −∞".into()));
    }
    Ok(src.h_s() + 0.5 * arg.ln())
}

/// `E(X − X̂)² = (μ_X − μ_X̂)² + σ_X² + σ_X̂² − 2θ₂`.
pub fn mse_of_reconstruction(src: &GaussianPairSource, rec: &GaussianReconstruction) -> f64 {
    let dm = src.mu_x - rec.mu_xhat;
    dm * dm + src.var_x + rec.var_xhat - 2.0 * rec.cov_xxhat
}

/// Squared Wasserstein-2 distance between `N(μ₁, var1)` and `N(μ₂, var2)`.
pub fn gaussian_w2_squared(mu1: f64, var1: f64, mu2: f64, var2: f64) -> Result<f64> {
    if !(var1 >= 0.0 && var2 >= 0.0) {
        return domain(format!("variances must be non-negative, got {var1} and {var2}"));
    }
    let dm = mu1 - mu2;
    let ds = var1.sqrt() - var2.sqrt();
    Ok(dm * dm + ds * ds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn unit(rho: f64) -> GaussianPairSource {
        GaussianPairSource::from_correlation(rho, 1.0, 1.0).unwrap()
    }

    #[test]
    fn entropy_values() {
        assert_abs_diff_eq!(differential_entropy(1.0).unwrap(), 1.418_938_533_204_672_7, epsilon = 1e-12);
        assert_abs_diff_eq!(differential_entropy(1.0 / (2.0 * PI)).unwrap(), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(differential_entropy(4.0).unwrap(), 2.112_085_713_764_618, epsilon = 1e-12);
        assert!(differential_entropy(0.0).is_err());
        assert!(differential_entropy(-1.0).is_err());
    }

    #[test]
    fn mutual_information_values() {
        let src = unit(0.7);
        let indep = GaussianReconstruction::new(0.0, 0.3, 0.0).unwrap();
        assert_eq!(mutual_info_x_xhat(&src, &indep).unwrap(), 0.0);

        let mmse = GaussianReconstruction::new(0.0, 0.49, 0.49).unwrap();
        assert_abs_diff_eq!(mutual_info_x_xhat(&src, &mmse).unwrap(), 0.336_672_276_631_882_8, epsilon = 1e-12);

        let tight = GaussianReconstruction::new(0.0, 1.0, 0.99).unwrap();
        assert_abs_diff_eq!(mutual_info_x_xhat(&src, &tight).unwrap(), 1.958_517_773_625_845, epsilon = 1e-12);

        let identity = GaussianReconstruction::identity(&src);
        assert_eq!(mutual_info_x_xhat(&src, &identity).unwrap(), f64::INFINITY);

        let broken = GaussianReconstruction::new(0.0, 1.0, 1.5).unwrap();
        assert!(matches!(mutual_info_x_xhat(&src, &broken), Err(Error::CorrelationBound(_))));
    }

    #[test]
    fn conditional_entropy_values() {
        let src = unit(0.7);
        let indep = GaussianReconstruction::new(0.0, 0.49, 0.0).unwrap();
        assert_abs_diff_eq!(cond_entropy_s_given_xhat(&src, &indep).unwrap(), src.h_s(), epsilon = 1e-15);

        let mmse = GaussianReconstruction::new(0.0, 0.49, 0.49).unwrap();
        let c = cond_entropy_s_given_xhat(&src, &mmse).unwrap();
        assert_abs_diff_eq!(c, 1.281_654_316_551_473_8, epsilon = 1e-12);

        let flipped = unit(-0.7);
        assert_eq!(cond_entropy_s_given_xhat(&flipped, &mmse).unwrap(), c);

        let perfect = GaussianPairSource::degenerate(0.0, 1.0, 0.0, 1.0, 1.0).unwrap();
        let id = GaussianReconstruction::identity(&perfect);
        assert!(matches!(cond_entropy_s_given_xhat(&perfect, &id), Err(Error::Degenerate(_))));
    }

    #[test]
    fn mse_values() {
        let src = unit(0.7);
        assert_eq!(mse_of_reconstruction(&src, &GaussianReconstruction::identity(&src)), 0.0);
        let mmse = GaussianReconstruction::new(0.0, 0.49, 0.49).unwrap();
        assert_abs_diff_eq!(mse_of_reconstruction(&src, &mmse), 0.51, epsilon = 1e-15);
        assert_eq!(mse_of_reconstruction(&src, &GaussianReconstruction::constant(1.0)), 2.0);
    }

    #[test]
    fn constant_decoder_is_legal() {
        let src = GaussianPairSource::new(2.0, 3.0, -1.0, 2.0, 1.2).unwrap();
        let rec = GaussianReconstruction::constant(0.5);
        assert_eq!(mutual_info_x_xhat(&src, &rec).unwrap(), 0.0);
        assert_eq!(cond_entropy_s_given_xhat(&src, &rec).unwrap(), src.h_s());
        assert_abs_diff_eq!(mse_of_reconstruction(&src, &rec), 1.5 * 1.5 + 3.0, epsilon = 1e-15);
    }

    #[test]
    fn w2_values() {
        assert_eq!(gaussian_w2_squared(0.3, 2.0, 0.3, 2.0).unwrap(), 0.0);
        assert_eq!(gaussian_w2_squared(0.0, 1.0, 1.0, 1.0).unwrap(), 1.0);
        assert_eq!(gaussian_w2_squared(0.0, 1.0, 0.0, 4.0).unwrap(), 1.0);
        assert!(gaussian_w2_squared(0.0, -1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn source_validation() {
        assert!(GaussianPairSource::new(0.0, 0.0, 0.0, 1.0, 0.0).is_err());
        assert!(GaussianPairSource::new(0.0, 1.0, 0.0, 1.0, 1.01).is_err());
        assert!(GaussianPairSource::new(0.0, 1.0, 0.0, 1.0, 1.0).is_err());
        assert!(GaussianPairSource::degenerate(0.0, 1.0, 0.0, 1.0, 1.0).unwrap().is_degenerate());
    }

    fn source_and_reconstruction() -> impl Strategy<Value = (GaussianPairSource, GaussianReconstruction)> {
        (0.1f64..4.0, 0.1f64..4.0, -0.99f64..0.99, -2.0f64..2.0, 0.01f64..3.0, -1.0f64..1.0, -1.0f64..1.0).prop_map(
            |(sx, ss, rho, mu, sxh, r, dmu)| {
                let src = GaussianPairSource::new(mu, sx * sx, 0.0, ss * ss, rho * sx * ss).unwrap();
                let rec = GaussianReconstruction::new(mu + dmu, sxh * sxh, r * sx * sxh).unwrap();
                (src, rec)
            },
        )
    }

    proptest! {
        #[test]
        fn information_depends_only_on_squared_correlation((src, rec) in source_and_reconstruction()) {
            let neg = GaussianReconstruction { cov_xxhat: -rec.cov_xxhat, ..rec };
            prop_assert_eq!(mutual_info_x_xhat(&src, &rec).unwrap(), mutual_info_x_xhat(&src, &neg).unwrap());
            // scaling X̂ by a constant leaves the correlation unchanged
            let scaled = GaussianReconstruction { var_xhat: 4.0 * rec.var_xhat, cov_xxhat: 2.0 * rec.cov_xxhat, ..rec };
            let (a, b) = (mutual_info_x_xhat(&src, &rec).unwrap(), mutual_info_x_xhat(&src, &scaled).unwrap());
            prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
        }

        #[test]
        fn conditional_entropy_floor((src, rec) in source_and_reconstruction()) {
            let floor = src.h_s() + 0.5 * (1.0 - src.rho_squared()).ln();
            let c = cond_entropy_s_given_xhat(&src, &rec).unwrap();
            prop_assert!(c >= floor - 1e-12);
            // equality at perfect correlation
            let perfect = GaussianReconstruction { cov_xxhat: src.var_x().sqrt() * rec.var_xhat.sqrt(), ..rec };
            let c_perfect = cond_entropy_s_given_xhat(&src, &perfect).unwrap();
            prop_assert!((c_perfect - floor).abs() <= 1e-9);
        }

        #[test]
        fn mse_completing_the_square((src, rec) in source_and_reconstruction()) {
            let t = rec.squared_correlation(&src).unwrap();
            let floor = src.var_x() * (1.0 - t);
            prop_assert!(mse_of_reconstruction(&src, &rec) >= floor - 1e-12);
            // equality at σ_X̂ = σ_X |ρ_XX̂| with matched means and aligned sign
            let s = src.var_x().sqrt() * t.sqrt();
            let best = GaussianReconstruction { mu_xhat: src.mu_x(), var_xhat: s * s, cov_xxhat: src.var_x().sqrt() * s * t.sqrt() };
            prop_assert!((mse_of_reconstruction(&src, &best) - floor).abs() <= 1e-12);
        }
    }
}
