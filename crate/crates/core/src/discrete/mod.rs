//! Finite-alphabet sources, channels and the fixed-encoder region.
//!
//! Everything here is computed by exact enumeration of the joint law
//! `p(x, s) p(z | x) p(x̂ | z)`; nothing is sampled.

mod entropy;
mod region;
mod simplex;
mod transport;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

pub use entropy::cond_entropy_discrete;
pub use region::{
    c_min_solver, default_xhat_support, extreme_point_a, extreme_point_b, mmse_reduction, outer_bound_check,
    region_approx, CMinSolution, DecoderGrid, MmseReduction, OuterBoundReport, MAX_ALPHABET, MAX_DECODERS, MAX_LEVELS,
};
pub use transport::{w2_squared_lp, w2_squared_quantile, MAX_LP_SUPPORT};

/// Stochasticity tolerance for user-supplied pmfs and channels.
pub const STOCHASTIC_TOL: f64 = 1e-12;

/// Joint pmf `p(x, s)` over a real-valued `X` alphabet and `s_size` labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteSource {
    x_values: Vec<f64>,
    s_size: usize,
    /// Row-major: `pmf[i][j] = p(x_values[i], s = j)`.
    pmf: Vec<Vec<f64>>,
}

impl DiscreteSource {
    pub fn new(x_values: Vec<f64>, s_size: usize, pmf: Vec<Vec<f64>>) -> Result<Self> {
        if x_values.is_empty() {
            return domain("X alphabet must be non-empty");
        }
        if x_values.iter().any(|x| !x.is_finite()) || x_values.windows(2).any(|w| w[0] >= w[1]) {
            return domain("X alphabet must be finite and strictly increasing");
        }
        if s_size < 2 {
            return domain(format!("label alphabet needs at least 2 symbols, got {s_size}"));
        }
        if pmf.len() != x_values.len() {
            return Err(Error::Dimension { expected: x_values.len(), got: pmf.len() });
        }
        let mut total = 0.0;
        for row in &pmf {
            if row.len() != s_size {
                return Err(Error::Dimension { expected: s_size, got: row.len() });
            }
            for &p in row {
                if !(p >= 0.0) || !p.is_finite() {
                    return domain(format!("pmf entries must be non-negative, got {p}"));
                }
                total += p;
            }
        }
        if (total - 1.0).abs() > STOCHASTIC_TOL {
            return domain(format!("pmf sums to {total}, not 1"));
        }
        Ok(Self { x_values, s_size, pmf })
    }

    /// `S = X` on an alphabet with the given marginal.
    pub fn label_is_source(x_values: Vec<f64>, p_x: &[f64]) -> Result<Self> {
        let n = x_values.len();
        let pmf = (0..n).map(|i| (0..n).map(|j| if i == j { p_x[i] } else { 0.0 }).collect()).collect();
        Self::new(x_values, n, pmf)
    }

    pub fn x_values(&self) -> &[f64] {
        &self.x_values
    }
    pub fn s_size(&self) -> usize {
        self.s_size
    }
    pub fn pmf(&self) -> &[Vec<f64>] {
        &self.pmf
    }
    pub fn x_size(&self) -> usize {
        self.x_values.len()
    }

    pub fn p_x(&self) -> Vec<f64> {
        self.pmf.iter().map(|row| row.iter().sum()).collect()
    }

    pub fn mean_x(&self) -> f64 {
        self.p_x().iter().zip(&self.x_values).map(|(p, x)| p * x).sum()
    }

    pub fn var_x(&self) -> f64 {
        let m = self.mean_x();
        self.p_x().iter().zip(&self.x_values).map(|(p, x)| p * (x - m) * (x - m)).sum()
    }

    /// Law of `X` as a distribution on the real line.
    pub fn x_distribution(&self) -> DiscreteDistribution {
        DiscreteDistribution::from_weighted(self.x_values.iter().copied().zip(self.p_x()))
    }
}

/// Row-stochastic matrix `p(out | in)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Channel {
    rows: Vec<Vec<f64>>,
}

impl Channel {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let Some(first) = rows.first() else {
            return domain("channel must have at least one input row");
        };
        let width = first.len();
        if width == 0 {
            return domain("channel must have at least one output symbol");
        }
        for row in &rows {
            if row.len() != width {
                return Err(Error::Dimension { expected: width, got: row.len() });
            }
            if row.iter().any(|p| !(*p >= 0.0) || !p.is_finite()) {
                return domain("channel entries must be non-negative");
            }
            let total: f64 = row.iter().sum();
            if (total - 1.0).abs() > STOCHASTIC_TOL {
                return domain(format!("channel row sums to {total}, not 1"));
            }
        }
        Ok(Self { rows })
    }

    pub fn identity(n: usize) -> Self {
        Self { rows: (0..n).map(|i| (0..n).map(|j| f64::from(u8::from(i == j))).collect()).collect() }
    }

    /// Every input goes to output 0 of a one-symbol alphabet.
    pub fn constant(n_inputs: usize) -> Self {
        Self { rows: vec![vec![1.0]; n_inputs] }
    }

    /// Binary symmetric channel with crossover `p`.
    pub fn binary_symmetric(p: f64) -> Result<Self> {
        Self::new(vec![vec![1.0 - p, p], vec![p, 1.0 - p]])
    }

    /// Deterministic map `input i → output map[i]`.
    pub fn deterministic(map: &[usize], n_outputs: usize) -> Result<Self> {
        let rows = map
            .iter()
            .map(|&k| {
                if k >= n_outputs {
                    return domain(format!("output index {k} out of range {n_outputs}"));
                }
                let mut row = vec![0.0; n_outputs];
                row[k] = 1.0;
                Ok(row)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(rows)
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }
    pub fn n_inputs(&self) -> usize {
        self.rows.len()
    }
    pub fn n_outputs(&self) -> usize {
        self.rows[0].len()
    }
}

/// Channel from encoder symbols `z` to real reconstruction values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decoder {
    pub support: Vec<f64>,
    pub channel: Channel,
}

impl Decoder {
    pub fn new(support: Vec<f64>, channel: Channel) -> Result<Self> {
        if support.len() != channel.n_outputs() {
            return Err(Error::Dimension { expected: support.len(), got: channel.n_outputs() });
        }
        if support.iter().any(|x| !x.is_finite()) {
            return domain("decoder support must be finite");
        }
        Ok(Self { support, channel })
    }

    /// Deterministic decoder `z ↦ values[z]`.
    pub fn from_values(values: &[f64]) -> Result<Self> {
        let map: Vec<usize> = (0..values.len()).collect();
        Self::new(values.to_vec(), Channel::deterministic(&map, values.len())?)
    }
}

/// Finitely supported law on the real line, support strictly increasing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteDistribution {
    support: Vec<f64>,
    probs: Vec<f64>,
}

impl DiscreteDistribution {
    pub fn new(support: Vec<f64>, probs: Vec<f64>) -> Result<Self> {
        if support.is_empty() || support.len() != probs.len() {
            return Err(Error::Dimension { expected: support.len(), got: probs.len() });
        }
        if support.windows(2).any(|w| w[0] >= w[1]) {
            return domain("support must be strictly increasing");
        }
        if probs.iter().any(|p| !(*p >= 0.0)) {
            return domain("probabilities must be non-negative");
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return domain(format!("probabilities sum to {total}, not 1"));
        }
        Ok(Self { support, probs })
    }

    pub fn point_mass(x: f64) -> Self {
        Self { support: vec![x], probs: vec![1.0] }
    }

    /// Collects `(value, mass)` pairs, merging equal values and dropping
    /// zero masses. The input must carry positive total mass.
    pub fn from_weighted(pairs: impl IntoIterator<Item = (f64, f64)>) -> Self {
        let mut items: Vec<(f64, f64)> = pairs.into_iter().filter(|&(_, p)| p > 0.0).collect();
        items.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut support: Vec<f64> = Vec::with_capacity(items.len());
        let mut probs: Vec<f64> = Vec::with_capacity(items.len());
        for (x, p) in items {
            match support.last() {
                Some(&last) if same_value(last, x) => *probs.last_mut().unwrap() += p,
                _ => {
                    support.push(x);
                    probs.push(p);
                }
            }
        }
        Self { support, probs }
    }

    pub fn support(&self) -> &[f64] {
        &self.support
    }
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn mean(&self) -> f64 {
        self.support.iter().zip(&self.probs).map(|(x, p)| x * p).sum()
    }
}

/// Reconstruction values closer than this (relative) are the same symbol.
pub(crate) fn same_value(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * (1.0 + a.abs().max(b.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn source_validation() {
        assert!(DiscreteSource::new(vec![0.0, 1.0], 2, vec![vec![0.25; 2]; 2]).is_ok());
        assert!(DiscreteSource::new(vec![1.0, 0.0], 2, vec![vec![0.25; 2]; 2]).is_err());
        assert!(DiscreteSource::new(vec![0.0, 1.0], 1, vec![vec![0.5], vec![0.5]]).is_err());
        assert!(DiscreteSource::new(vec![0.0, 1.0], 2, vec![vec![0.25; 2], vec![0.25; 3]]).is_err());
        assert!(DiscreteSource::new(vec![0.0, 1.0], 2, vec![vec![0.3; 2]; 2]).is_err());
    }

    #[test]
    fn channel_validation() {
        assert!(Channel::new(vec![vec![0.5, 0.5], vec![1.0, 0.0]]).is_ok());
        assert!(Channel::new(vec![vec![0.5, 0.6]]).is_err());
        assert!(Channel::new(vec![vec![1.5, -0.5]]).is_err());
        assert!(Channel::new(vec![]).is_err());
        assert!(Channel::deterministic(&[0, 3], 2).is_err());
    }

    #[test]
    fn weighted_merge() {
        let d = DiscreteDistribution::from_weighted([(1.0, 0.25), (-1.0, 0.5), (1.0, 0.25), (3.0, 0.0)]);
        assert_eq!(d.support(), &[-1.0, 1.0]);
        assert_eq!(d.probs(), &[0.5, 0.5]);
        assert!(DiscreteDistribution::new(vec![1.0, 0.0], vec![0.5, 0.5]).is_err());
    }
}
