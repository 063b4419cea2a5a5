//! One encoder, many decoders.
//!
//! A Gaussian representation `Z` of `X` is fixed at a rate budget and every
//! `(D, C)` target is served by a linear decoder
//! `X̂ = sign(ρ_XZ) γ (Z − μ_Z) + μ_X`. The classification loss achieved by
//! such a decoder does not depend on `γ` (any nonzero scaling of `Z` carries
//! the same information about `S`), so the MMSE gain dominates the whole
//! rate-`R` region and no extra rate is needed for universality.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::gaussian_model::{
    cond_entropy_s_given_xhat, mse_of_reconstruction, GaussianPairSource, GaussianReconstruction,
};
use crate::gaussian_tradeoff::{c_threshold, rdc_rate, ConstraintSet, Status};

/// Relative slack in the dominance test used by [`rate_penalty`].
const DOMINANCE_SLACK: f64 = 1e-12;
const BISECTION_TOL: f64 = 1e-12;

/// Encoder output `Z ~ N(0, 1)` jointly Gaussian with `X`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianRepresentation {
    pub var_z: f64,
    pub cov_xz: f64,
    /// Cached `I(X; Z)` in nats.
    pub rate: f64,
}

impl GaussianRepresentation {
    /// `sign(ρ_XZ)`, with `+1` at zero correlation.
    pub fn sign(&self) -> f64 {
        if self.cov_xz >= 0.0 {
            1.0
        } else {
            -1.0
        }
    }

    /// `Cov(X, Z) / σ_Z²`: the gain of the MMSE decoder.
    pub fn mmse_gain(&self) -> f64 {
        self.cov_xz.abs() / self.var_z
    }

    /// `I(X; Z)` recomputed from the covariance.
    pub fn mutual_info_x_z(&self, src: &GaussianPairSource) -> f64 {
        let t = self.cov_xz * self.cov_xz / (src.var_x() * self.var_z);
        crate::gaussian_model::rate_from_squared_correlation(t)
    }
}

/// `X̂ = sign · γ · (Z − μ_Z) + μ_X`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearDecoder {
    pub gamma: f64,
    pub sign: f64,
}

impl LinearDecoder {
    pub fn new(gamma: f64, sign: f64) -> Result<Self> {
        if !gamma.is_finite() {
            return domain(format!("decoder gain must be finite, got {gamma}"));
        }
        if sign != 1.0 && sign != -1.0 {
            return domain(format!("decoder sign must be ±1, got {sign}"));
        }
        Ok(Self { gamma, sign })
    }

    /// Decoder aligned with the sign of `ρ_XZ`.
    pub fn for_representation(rep: &GaussianRepresentation, gamma: f64) -> Result<Self> {
        Self::new(gamma, rep.sign())
    }

    pub fn mmse(rep: &GaussianRepresentation) -> Self {
        Self { gamma: rep.mmse_gain(), sign: rep.sign() }
    }
}

/// Representation with `I(X; Z) = rate`: `Cov(X, Z) = σ_X √(1 − e^{−2R})`.
pub fn encoder_for_rate(src: &GaussianPairSource, rate: f64) -> Result<GaussianRepresentation> {
    if !(rate >= 0.0) {
        return domain(format!("rate must be non-negative, got {rate}"));
    }
    let cov_xz = src.sigma_x() * (-(-2.0 * rate).exp_m1()).sqrt();
    Ok(GaussianRepresentation { var_z: 1.0, cov_xz, rate })
}

/// Exact second-order statistics of the linear decode.
pub fn linear_decoder_stats(
    src: &GaussianPairSource,
    rep: &GaussianRepresentation,
    dec: &LinearDecoder,
) -> GaussianReconstruction {
    GaussianReconstruction {
        mu_xhat: src.mu_x(),
        var_xhat: dec.gamma * dec.gamma * rep.var_z,
        cov_xxhat: dec.sign * dec.gamma * rep.cov_xz,
    }
}

/// Gain that makes the decoder's variance equal the boundary-curve value at
/// loss `C`: `γ = σ_S σ_X² √(1 − e^{2(C − h(S))}) / (θ₁ σ_Z)`.
///
/// The achieved `h(S | X̂)` of the resulting decoder is `c_threshold(R)`,
/// not `C` in general; measure it with [`achieved_point`].
pub fn gamma_for_classification(src: &GaussianPairSource, rep: &GaussianRepresentation, closs: f64) -> Result<f64> {
    let lo = crate::gaussian_tradeoff::c_min(src);
    let hi = src.h_s();
    if !(closs >= lo && closs <= hi) {
        return domain(format!("classification loss {closs} outside [c_min, h(S)] = [{lo}, {hi}]"));
    }
    let need = -(2.0 * (closs - hi)).exp_m1();
    if need == 0.0 {
        return Ok(0.0);
    }
    if src.cov_xs() == 0.0 {
        return domain("γ is undefined for an uncorrelated label");
    }
    Ok(src.sigma_s() * src.var_x() * need.sqrt() / (src.cov_xs() * rep.var_z.sqrt()))
}

/// `(D, C)` achieved by a linear decoder on a representation.
pub fn achieved_point(
    src: &GaussianPairSource,
    rep: &GaussianRepresentation,
    dec: &LinearDecoder,
) -> Result<(f64, f64)> {
    let rec = linear_decoder_stats(src, rep, dec);
    Ok((mse_of_reconstruction(src, &rec), cond_entropy_s_given_xhat(src, &rec)?))
}

/// Achieved points for every gain in `gamma_grid` and for `γ = 0`, sorted by
/// distortion (ties by loss, then gain).
pub fn region_sweep(
    src: &GaussianPairSource,
    rep: &GaussianRepresentation,
    gamma_grid: &[f64],
) -> Result<Vec<(f64, f64)>> {
    if gamma_grid.is_empty() {
        return domain("gamma grid must be non-empty");
    }
    let mut gammas: Vec<f64> = gamma_grid.to_vec();
    gammas.push(0.0);
    gammas.sort_by(f64::total_cmp);
    gammas.dedup();
    let mut pts = Vec::with_capacity(gammas.len());
    for g in gammas {
        pts.push(achieved_point(src, rep, &LinearDecoder::for_representation(rep, g)?)?);
    }
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    Ok(pts)
}

/// Rate penalty `A(Θ)`: the smallest rate whose MMSE decoder dominates every
/// pair of `Θ`, minus the largest per-pair optimal rate.
pub fn rate_penalty(src: &GaussianPairSource, theta: &ConstraintSet) -> Result<f64> {
    let mut r_sup: f64 = 0.0;
    for &(d, c) in theta.pairs() {
        let v = rdc_rate(src, d, c)?;
        match v.status {
            Status::Feasible => r_sup = r_sup.max(v.value.unwrap_or(0.0)),
            Status::Infeasible => return Err(Error::Infeasible(format!("(D, C) = ({d}, {c}) is not achievable"))),
            Status::Unbounded => return Err(Error::Domain(format!("(D, C) = ({d}, {c}) needs unbounded rate"))),
        }
    }

    let var_x = src.var_x();
    let covers = |rate: f64| {
        let d_mmse = var_x * (-2.0 * rate).exp();
        let c_mmse = c_threshold(src, rate);
        theta.pairs().iter().all(|&(d, c)| {
            d_mmse <= d + DOMINANCE_SLACK * (1.0 + d.abs()) && c_mmse <= c + DOMINANCE_SLACK * (1.0 + c.abs())
        })
    };

    let r_univ = if covers(0.0) {
        0.0
    } else {
        let (mut lo, mut hi) = (0.0, r_sup + 10.0);
        if !covers(hi) {
            return Err(Error::Infeasible("no MMSE decoder in the bisection bracket covers Θ".into()));
        }
        while hi - lo > BISECTION_TOL {
            let mid = 0.5 * (lo + hi);
            if covers(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    };
    Ok(r_univ - r_sup)
}
