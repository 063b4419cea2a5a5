//! Seeded sampling from the Gaussian models and plug-in estimates of the
//! closed forms.
//!
//! Draws are generated in fixed-size chunks; chunk `k` uses the ChaCha
//! stream `k` of the seed, so the output depends only on `(seed, n)` and not
//! on how many threads produced it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::gaussian_model::{differential_entropy, GaussianPairSource, GaussianReconstruction, CORRELATION_SLACK};
use crate::universal::{GaussianRepresentation, LinearDecoder};

const CHUNK: usize = 1 << 14;
const MIN_PLUGIN_SAMPLES: usize = 100;

/// What to draw alongside `(X, S)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Draw {
    /// `X̂` with the given second-order statistics; `Z` is `X̂` itself.
    Reconstruction(GaussianReconstruction),
    /// `Z` from the representation, then `X̂` by the linear decoder.
    Representation(GaussianRepresentation, LinearDecoder),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleBatch {
    pub n: usize,
    pub seed: u64,
    pub x: Vec<f64>,
    pub s: Vec<f64>,
    pub z: Vec<f64>,
    pub xhat: Vec<f64>,
}

/// Regression of a child variable on `X`: `child = mean + slope (X − μ_X) + noise · g`.
#[derive(Clone, Copy)]
struct Link {
    mean: f64,
    slope: f64,
    noise: f64,
}

impl Link {
    fn new(mean: f64, var: f64, cov_with_x: f64, var_x: f64, what: &str) -> Result<Self> {
        let slope = cov_with_x / var_x;
        let resid = var - cov_with_x * slope;
        if resid < -CORRELATION_SLACK * var.max(1.0) {
            return domain(format!("{what}: covariance with X is inconsistent with its variance"));
        }
        Ok(Self { mean, slope, noise: resid.max(0.0).sqrt() })
    }
}

/// Draws `n` samples of `(X, S, Z, X̂)` respecting `S ↔ X ↔ (Z, X̂)`.
pub fn sample_joint(src: &GaussianPairSource, draw: &Draw, n: usize, seed: u64) -> Result<SampleBatch> {
    if n == 0 {
        return domain("sample size must be at least 1");
    }
    let (mu_x, var_x, sigma_x) = (src.mu_x(), src.var_x(), src.sigma_x());
    let label = Link::new(src.mu_s(), src.var_s(), src.cov_xs(), var_x, "label")?;
    let (child, decode) = match *draw {
        Draw::Reconstruction(rec) => {
            (Link::new(rec.mu_xhat, rec.var_xhat, rec.cov_xxhat, var_x, "reconstruction")?, None)
        }
        Draw::Representation(rep, dec) => {
            (Link::new(0.0, rep.var_z, rep.cov_xz, var_x, "representation")?, Some(dec.sign * dec.gamma))
        }
    };

    let chunks: Vec<Vec<[f64; 4]>> = (0..n.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let len = CHUNK.min(n - c * CHUNK);
            (0..len)
                .map(|_| {
                    let g1: f64 = StandardNormal.sample(&mut rng);
                    let g2: f64 = StandardNormal.sample(&mut rng);
                    let g3: f64 = StandardNormal.sample(&mut rng);
                    let dx = sigma_x * g1;
                    let s = label.mean + label.slope * dx + label.noise * g2;
                    let z = child.mean + child.slope * dx + child.noise * g3;
                    let xhat = match decode {
                        Some(k) => k * z + mu_x,
                        None => z,
                    };
                    [mu_x + dx, s, z, xhat]
                })
                .collect()
        })
        .collect();

    let mut batch = SampleBatch {
        n,
        seed,
        x: Vec::with_capacity(n),
        s: Vec::with_capacity(n),
        z: Vec::with_capacity(n),
        xhat: Vec::with_capacity(n),
    };
    for row in chunks.into_iter().flatten() {
        batch.x.push(row[0]);
        batch.s.push(row[1]);
        batch.z.push(row[2]);
        batch.xhat.push(row[3]);
    }
    Ok(batch)
}

/// Plug-in estimates with delta-method standard errors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PluginEstimates {
    pub mse_hat: f64,
    pub mse_se: f64,
    pub i_xxhat_hat: f64,
    pub i_se: f64,
    pub h_s_given_xhat_hat: f64,
    pub h_se: f64,
    /// The fitted covariance of `(X, X̂)` or `(S, X̂)` is singular.
    pub degenerate: bool,
}

impl PluginEstimates {
    /// Whether `mse`, `I(X; X̂)` and `h(S | X̂)` all lie within `k` standard
    /// errors of the estimates.
    pub fn covers(&self, mse: f64, info: f64, h: f64, k: f64) -> [bool; 3] {
        [
            (self.mse_hat - mse).abs() <= k * self.mse_se,
            (self.i_xxhat_hat - info).abs() <= k * self.i_se,
            (self.h_s_given_xhat_hat - h).abs() <= k * self.h_se,
        ]
    }
}

fn mean(v: &[f64]) -> f64 {
    v.par_iter().sum::<f64>() / v.len() as f64
}

fn cov(a: &[f64], ma: f64, b: &[f64], mb: f64) -> f64 {
    a.par_iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum::<f64>() / a.len() as f64
}

/// Fits the sample covariance of `(X, S, X̂)` and evaluates the Gaussian
/// closed forms on it.
///
/// `I(X; X̂)` comes from the fitted `(X, X̂)` correlation; `h(S | X̂)` from
/// the fitted `(S, X̂)` regression directly, without assuming the Markov chain.
pub fn plugin_estimates(batch: &SampleBatch) -> Result<PluginEstimates> {
    let n = batch.x.len();
    if n < MIN_PLUGIN_SAMPLES {
        return domain(format!("plug-in estimates need at least {MIN_PLUGIN_SAMPLES} samples, got {n}"));
    }
    let nf = n as f64;
    let sq_err: Vec<f64> = batch.x.par_iter().zip(&batch.xhat).map(|(x, y)| (x - y) * (x - y)).collect();
    let mse_hat = mean(&sq_err);
    let mse_se = (cov(&sq_err, mse_hat, &sq_err, mse_hat) / nf).sqrt();

    let (mx, ms, mh) = (mean(&batch.x), mean(&batch.s), mean(&batch.xhat));
    let vx = cov(&batch.x, mx, &batch.x, mx);
    let vs = cov(&batch.s, ms, &batch.s, ms);
    let vh = cov(&batch.xhat, mh, &batch.xhat, mh);
    let cxh = cov(&batch.x, mx, &batch.xhat, mh);
    let csh = cov(&batch.s, ms, &batch.xhat, mh);

    let h_s = differential_entropy(vs)?;
    let (i_hat, r2, h_hat, degenerate) = if vh <= 0.0 {
        (0.0, 0.0, h_s, true)
    } else {
        let fitted_x = GaussianPairSource::degenerate(mx, vx, ms, vs, 0.0)?;
        let fitted_rec = GaussianReconstruction::new(mh, vh, cxh)?;
        let r2 = (cxh * cxh / (vx * vh)).min(1.0);
        let i_hat = crate::gaussian_model::mutual_info_x_xhat(&fitted_x, &fitted_rec)?;
        let resid = vs - csh * csh / vh;
        if resid <= 0.0 {
            (i_hat, r2, f64::NEG_INFINITY, true)
        } else {
            (i_hat, r2, h_s + 0.5 * (resid / vs).ln(), r2 >= 1.0)
        }
    };

    Ok(PluginEstimates {
        mse_hat,
        mse_se,
        i_xxhat_hat: i_hat,
        i_se: (r2 / nf + 0.5 / (nf * nf)).sqrt(),
        h_s_given_xhat_hat: h_hat,
        h_se: (0.5 / nf).sqrt(),
        degenerate,
    })
}
