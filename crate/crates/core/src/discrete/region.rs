//! MMSE reduction, the Wasserstein outer bound, extreme points and the
//! grid-enumerated region of a fixed encoder.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    cond_entropy_discrete, same_value, w2_squared_quantile, Channel, Decoder, DiscreteDistribution, DiscreteSource,
};
use crate::error::{domain, Error, Result};

/// Largest alphabet (X, S or Z) accepted by [`region_approx`].
pub const MAX_ALPHABET: usize = 6;
/// Largest simplex-grid resolution accepted by [`region_approx`].
pub const MAX_LEVELS: usize = 12;
/// Cap on the number of decoders a grid may enumerate.
pub const MAX_DECODERS: u64 = 4_000_000;

const OUTER_BOUND_TOL: f64 = 1e-12;

/// Conditional-mean reconstruction `X̃ = E[X | Z]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MmseReduction {
    /// `E[X | Z = z]`, `None` for symbols `z` of zero probability.
    pub estimates: Vec<Option<f64>>,
    pub p_xtilde: DiscreteDistribution,
    /// `E(X − X̃)²`.
    pub residual: f64,
}

impl MmseReduction {
    /// Estimates with unreachable symbols filled by `fill`.
    fn estimates_or(&self, fill: f64) -> Vec<f64> {
        self.estimates.iter().map(|e| e.unwrap_or(fill)).collect()
    }
}

/// The source pushed through an encoder.
struct Encoded {
    x_values: Vec<f64>,
    /// `p(x, s)` row-major, copied from the source.
    p_xs: Vec<Vec<f64>>,
    enc: Channel,
    /// `p(x, z)`.
    p_xz: Vec<Vec<f64>>,
    /// `p(s, z)`.
    p_sz: Vec<Vec<f64>>,
    p_z: Vec<f64>,
    mmse: MmseReduction,
}

impl Encoded {
    fn new(src: &DiscreteSource, enc: &Channel) -> Result<Self> {
        if enc.n_inputs() != src.x_size() {
            return Err(Error::Dimension { expected: src.x_size(), got: enc.n_inputs() });
        }
        let nz = enc.n_outputs();
        let mut p_xz = vec![vec![0.0; nz]; src.x_size()];
        let mut p_sz = vec![vec![0.0; nz]; src.s_size()];
        for (i, row) in src.pmf().iter().enumerate() {
            for (s, &p) in row.iter().enumerate() {
                for (z, &w) in enc.rows()[i].iter().enumerate() {
                    p_xz[i][z] += p * w;
                    p_sz[s][z] += p * w;
                }
            }
        }
        let p_z: Vec<f64> = (0..nz).map(|z| p_xz.iter().map(|r| r[z]).sum()).collect();
        let x = src.x_values();
        let estimates: Vec<Option<f64>> = (0..nz)
            .map(|z| (p_z[z] > 0.0).then(|| p_xz.iter().zip(x).map(|(r, xi)| r[z] * xi).sum::<f64>() / p_z[z]))
            .collect();
        let mut residual = 0.0;
        for (i, row) in p_xz.iter().enumerate() {
            for (z, &p) in row.iter().enumerate() {
                if let Some(xt) = estimates[z] {
                    residual += p * (x[i] - xt) * (x[i] - xt);
                }
            }
        }
        let p_xtilde =
            DiscreteDistribution::from_weighted(estimates.iter().zip(&p_z).filter_map(|(e, &p)| e.map(|v| (v, p))));
        Ok(Self {
            x_values: x.to_vec(),
            p_xs: src.pmf().to_vec(),
            enc: enc.clone(),
            p_xz,
            p_sz,
            p_z,
            mmse: MmseReduction { estimates, p_xtilde, residual },
        })
    }

    fn reachable(&self) -> Vec<usize> {
        (0..self.p_z.len()).filter(|&z| self.p_z[z] > 0.0).collect()
    }
}

/// Indices of `support` grouped by equal value.
fn value_groups(support: &[f64]) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..support.len()).collect();
    order.sort_by(|&a, &b| support[a].total_cmp(&support[b]));
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for k in order {
        match groups.last_mut() {
            Some(g) if same_value(support[g[0]], support[k]) => g.push(k),
            _ => groups.push(vec![k]),
        }
    }
    groups
}

/// Joint `p(s, x̂)` over distinct reconstruction values.
fn label_joint(enc: &Encoded, support: &[f64], weights: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let groups = value_groups(support);
    enc.p_sz
        .iter()
        .map(|row| {
            groups
                .iter()
                .map(|g| row.iter().zip(weights).map(|(p, w)| p * g.iter().map(|&k| w[k]).sum::<f64>()).sum())
                .collect()
        })
        .collect()
}

fn xhat_distribution(enc: &Encoded, support: &[f64], weights: &[Vec<f64>]) -> DiscreteDistribution {
    DiscreteDistribution::from_weighted(
        support
            .iter()
            .enumerate()
            .map(|(k, &v)| (v, enc.p_z.iter().zip(weights).map(|(pz, w)| pz * w[k]).sum::<f64>())),
    )
}

/// Conditional-mean reduction of `src` under `encoder`.
pub fn mmse_reduction(src: &DiscreteSource, encoder: &Channel) -> Result<MmseReduction> {
    Ok(Encoded::new(src, encoder)?.mmse)
}

/// Evaluation of one `(encoder, decoder)` pair against the outer bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OuterBoundReport {
    /// `E(X − X̂)²` from the full joint.
    pub distortion: f64,
    /// `H(S | X̂)`.
    pub closs: f64,
    /// `E(X − X̃)²`.
    pub residual: f64,
    /// `E(X̃ − X̂)²` under the coupling the decoder induces.
    pub mmse_gap: f64,
    /// `W₂²(p_X̃, p_X̂)`.
    pub w2_squared: f64,
    /// `residual + w2_squared`.
    pub rhs: f64,
    pub holds: bool,
}

/// Checks `E(X − X̂)² ≥ E(X − X̃)² + W₂²(p_X̃, p_X̂)` for one decoder.
pub fn outer_bound_check(src: &DiscreteSource, encoder: &Channel, decoder: &Decoder) -> Result<OuterBoundReport> {
    let enc = Encoded::new(src, encoder)?;
    if decoder.channel.n_inputs() != encoder.n_outputs() {
        return Err(Error::Dimension { expected: encoder.n_outputs(), got: decoder.channel.n_inputs() });
    }
    let dec = decoder.channel.rows();
    let xs = &enc.x_values;
    let mut distortion = 0.0;
    for (i, row) in enc.p_xs.iter().enumerate() {
        for &p in row {
            for (z, &pz) in enc.enc.rows()[i].iter().enumerate() {
                for (k, &pk) in dec[z].iter().enumerate() {
                    let e = xs[i] - decoder.support[k];
                    distortion += p * pz * pk * e * e;
                }
            }
        }
    }
    let xt = enc.mmse.estimates_or(0.0);
    let mut mmse_gap = 0.0;
    for (z, &pz) in enc.p_z.iter().enumerate() {
        for (k, &pk) in dec[z].iter().enumerate() {
            let e = xt[z] - decoder.support[k];
            mmse_gap += pz * pk * e * e;
        }
    }
    let closs = cond_entropy_discrete(&label_joint(&enc, &decoder.support, dec));
    let p_xhat = xhat_distribution(&enc, &decoder.support, dec);
    let w2_squared = w2_squared_quantile(&enc.mmse.p_xtilde, &p_xhat);
    let rhs = enc.mmse.residual + w2_squared;
    Ok(OuterBoundReport {
        distortion,
        closs,
        residual: enc.mmse.residual,
        mmse_gap,
        w2_squared,
        rhs,
        holds: distortion >= rhs - OUTER_BOUND_TOL,
    })
}

/// Upper-left extreme point `(E(X − X̃)², H(S | X̃))`.
pub fn extreme_point_a(src: &DiscreteSource, encoder: &Channel) -> Result<(f64, f64)> {
    let enc = Encoded::new(src, encoder)?;
    let n = enc.p_z.len();
    let weights: Vec<Vec<f64>> = (0..n).map(|z| (0..n).map(|k| f64::from(u8::from(z == k))).collect()).collect();
    let support = enc.mmse.estimates_or(enc.mmse.p_xtilde.mean());
    Ok((enc.mmse.residual, cond_entropy_discrete(&label_joint(&enc, &support, &weights))))
}

/// The `p_X̃` support merged with the `X` alphabet.
pub fn default_xhat_support(src: &DiscreteSource, encoder: &Channel) -> Result<Vec<f64>> {
    let m = mmse_reduction(src, encoder)?;
    let mut v: Vec<f64> = m.p_xtilde.support().iter().chain(src.x_values()).copied().collect();
    v.sort_by(f64::total_cmp);
    v.dedup_by(|a, b| same_value(*a, *b));
    Ok(v)
}

/// Minimum classification loss under a distortion budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CMinSolution {
    pub decoder: Decoder,
    pub c_min: f64,
    pub distortion: f64,
    pub p_xhat: DiscreteDistribution,
}

/// Every decoder whose rows are compositions of `levels` over a fixed
/// reconstruction support (entries multiples of `1/levels`).
///
/// Rows for unreachable encoder symbols do not affect any quantity and are
/// pinned to the first support point. Decoders are indexed lexicographically
/// by their reachable rows.
pub struct DecoderGrid {
    enc: Encoded,
    support: Vec<f64>,
    levels: usize,
    compositions: Vec<Vec<u32>>,
    reachable: Vec<usize>,
    /// Per reachable row and composition: distortion contribution.
    row_cost: Vec<Vec<f64>>,
    /// Per reachable row and composition: contribution to `p(s, group)`,
    /// flattened `s * n_groups + g`.
    row_joint: Vec<Vec<Vec<f64>>>,
    n_groups: usize,
}

impl DecoderGrid {
    pub fn new(src: &DiscreteSource, encoder: &Channel, support: Vec<f64>, levels: usize) -> Result<Self> {
        if levels == 0 {
            return Err(Error::Config("decoder grid needs at least one level".into()));
        }
        if support.is_empty() || support.iter().any(|v| !v.is_finite()) {
            return domain("reconstruction support must be non-empty and finite");
        }
        let enc = Encoded::new(src, encoder)?;
        let reachable = enc.reachable();
        let compositions = compositions(levels, support.len());
        let count = (compositions.len() as u64).checked_pow(reachable.len() as u32);
        if count.is_none_or(|c| c > MAX_DECODERS) {
            return Err(Error::SizeGuard(format!(
                "{} compositions over {} reachable rows exceeds {MAX_DECODERS} decoders",
                compositions.len(),
                reachable.len()
            )));
        }
        let groups = value_groups(&support);
        let mut group_of = vec![0; support.len()];
        for (g, members) in groups.iter().enumerate() {
            for &k in members {
                group_of[k] = g;
            }
        }
        let n_groups = groups.len();
        let s_size = enc.p_sz.len();
        let l = levels as f64;
        let mut row_cost = Vec::with_capacity(reachable.len());
        let mut row_joint = Vec::with_capacity(reachable.len());
        for &z in &reachable {
            let cost_k: Vec<f64> = support
                .iter()
                .map(|v| enc.p_xz.iter().zip(&enc.x_values).map(|(r, x)| r[z] * (x - v) * (x - v)).sum())
                .collect();
            row_cost.push(
                compositions
                    .iter()
                    .map(|c| c.iter().zip(&cost_k).map(|(&n, ck)| f64::from(n) / l * ck).sum())
                    .collect(),
            );
            row_joint.push(
                compositions
                    .iter()
                    .map(|c| {
                        let mut j = vec![0.0; s_size * n_groups];
                        for (k, &n) in c.iter().enumerate() {
                            if n == 0 {
                                continue;
                            }
                            for s in 0..s_size {
                                j[s * n_groups + group_of[k]] += f64::from(n) / l * enc.p_sz[s][z];
                            }
                        }
                        j
                    })
                    .collect(),
            );
        }
        Ok(Self { enc, support, levels, compositions, reachable, row_cost, row_joint, n_groups })
    }

    /// Grid over [`default_xhat_support`].
    pub fn with_default_support(src: &DiscreteSource, encoder: &Channel, levels: usize) -> Result<Self> {
        let support = default_xhat_support(src, encoder)?;
        Self::new(src, encoder, support, levels)
    }

    pub fn count(&self) -> u64 {
        (self.compositions.len() as u64).pow(self.reachable.len() as u32)
    }

    pub fn support(&self) -> &[f64] {
        &self.support
    }

    pub fn mmse(&self) -> &MmseReduction {
        &self.enc.mmse
    }

    fn digits(&self, mut index: u64) -> Vec<usize> {
        let base = self.compositions.len() as u64;
        let mut d = vec![0; self.reachable.len()];
        for slot in d.iter_mut().rev() {
            *slot = (index % base) as usize;
            index /= base;
        }
        d
    }

    /// `(D, C)` of decoder `index`.
    pub fn evaluate(&self, index: u64) -> (f64, f64) {
        let digits = self.digits(index);
        let s_size = self.enc.p_sz.len();
        let mut d = 0.0;
        let mut flat = vec![0.0; s_size * self.n_groups];
        for (r, &c) in digits.iter().enumerate() {
            d += self.row_cost[r][c];
            for (a, b) in flat.iter_mut().zip(&self.row_joint[r][c]) {
                *a += b;
            }
        }
        let joint: Vec<Vec<f64>> = flat.chunks(self.n_groups).map(<[f64]>::to_vec).collect();
        (d, cond_entropy_discrete(&joint))
    }

    /// Row-stochastic weights of decoder `index` over all encoder symbols.
    pub fn weights(&self, index: u64) -> Vec<Vec<f64>> {
        let digits = self.digits(index);
        let k = self.support.len();
        let mut w = vec![
            {
                let mut pinned = vec![0.0; k];
                pinned[0] = 1.0;
                pinned
            };
            self.enc.p_z.len()
        ];
        for (r, &z) in self.reachable.iter().enumerate() {
            w[z] = self.compositions[digits[r]].iter().map(|&n| f64::from(n) / self.levels as f64).collect();
        }
        w
    }

    pub fn decoder(&self, index: u64) -> Decoder {
        Decoder { support: self.support.clone(), channel: Channel { rows: self.weights(index) } }
    }

    /// `p_X̂` of decoder `index`.
    pub fn xhat_distribution(&self, index: u64) -> DiscreteDistribution {
        xhat_distribution(&self.enc, &self.support, &self.weights(index))
    }

    /// `(D, C)` for every decoder, in index order.
    pub fn evaluate_all(&self) -> Vec<(f64, f64)> {
        (0..self.count()).into_par_iter().map(|i| self.evaluate(i)).collect()
    }

    /// Decoder minimising `H(S | X̂)` subject to `E(X − X̂)² ≤ budget`;
    /// ties go to the lower distortion, then the lower index.
    pub fn c_min(&self, budget: f64) -> Result<CMinSolution> {
        let best = (0..self.count())
            .into_par_iter()
            .filter_map(|i| {
                let (d, c) = self.evaluate(i);
                (d <= budget).then_some((c, d, i))
            })
            .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)).then(a.2.cmp(&b.2)));
        let Some((c, d, i)) = best else {
            return Err(Error::Infeasible(format!("no grid decoder meets distortion budget {budget}")));
        };
        Ok(CMinSolution { decoder: self.decoder(i), c_min: c, distortion: d, p_xhat: self.xhat_distribution(i) })
    }

    /// Pareto-minimal `(D, C)` points, sorted by distortion.
    pub fn frontier(&self) -> Vec<(f64, f64)> {
        let mut pts = self.evaluate_all();
        pts.par_sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        let mut out: Vec<(f64, f64)> = Vec::new();
        for p in pts {
            if out.last().is_none_or(|last| p.1 < last.1) {
                out.push(p);
            }
        }
        out
    }

    /// Outer-bound check across the grid: `(checked, violations, worst)` where
    /// `worst` is the largest `rhs − D` seen.
    pub fn outer_bound_sweep(&self) -> (u64, u64, f64) {
        let residual = self.enc.mmse.residual;
        let (violations, worst) = (0..self.count())
            .into_par_iter()
            .map(|i| {
                let (d, _) = self.evaluate(i);
                let w2 = w2_squared_quantile(&self.enc.mmse.p_xtilde, &self.xhat_distribution(i));
                let excess = residual + w2 - d;
                (u64::from(excess > OUTER_BOUND_TOL), excess)
            })
            .reduce(|| (0, f64::NEG_INFINITY), |a, b| (a.0 + b.0, a.1.max(b.1)));
        (self.count(), violations, worst)
    }
}

/// All vectors of `parts` non-negative integers summing to `total`, in
/// lexicographic order.
fn compositions(total: usize, parts: usize) -> Vec<Vec<u32>> {
    fn rec(left: usize, parts: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if parts == 1 {
            cur.push(left as u32);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for n in 0..=left {
            cur.push(n as u32);
            rec(left - n, parts - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(total, parts, &mut Vec::with_capacity(parts), &mut out);
    out
}

/// Grid search for the minimum-loss decoder under a distortion budget, over
/// the default reconstruction support.
pub fn c_min_solver(src: &DiscreteSource, encoder: &Channel, budget: f64, levels: usize) -> Result<CMinSolution> {
    if levels < 3 {
        return Err(Error::Config(format!("c_min solver needs at least 3 grid levels, got {levels}")));
    }
    DecoderGrid::with_default_support(src, encoder, levels)?.c_min(budget)
}

/// Lower-right extreme point `(E(X − X̃)² + W₂²(p_X̃, p_X̂^{C_min}), C_min)`.
pub fn extreme_point_b(src: &DiscreteSource, encoder: &Channel, budget: f64, levels: usize) -> Result<(f64, f64)> {
    let m = mmse_reduction(src, encoder)?;
    let sol = c_min_solver(src, encoder, budget, levels)?;
    Ok((m.residual + w2_squared_quantile(&m.p_xtilde, &sol.p_xhat), sol.c_min))
}

/// Pareto frontier of the grid-enumerated region of `encoder`.
pub fn region_approx(src: &DiscreteSource, encoder: &Channel, levels: usize) -> Result<Vec<(f64, f64)>> {
    let sizes = [src.x_size(), src.s_size(), encoder.n_outputs()];
    if sizes.iter().any(|&n| n > MAX_ALPHABET) || levels > MAX_LEVELS {
        return Err(Error::SizeGuard(format!(
            "alphabets {sizes:?} / levels {levels} exceed the {MAX_ALPHABET}-symbol / {MAX_LEVELS}-level guard"
        )));
    }
    Ok(DecoderGrid::with_default_support(src, encoder, levels)?.frontier())
}
