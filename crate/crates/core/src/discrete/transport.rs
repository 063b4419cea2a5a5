//! Squared Wasserstein-2 distance between finitely supported laws on ℝ.
//!
//! [`w2_squared_quantile`] uses the monotone coupling, which is optimal for
//! convex costs in one dimension. [`w2_squared_lp`] solves the transportation
//! LP directly and serves as its oracle.

use super::simplex;
use super::DiscreteDistribution;
use crate::error::{Error, Result};

/// Largest support the LP oracle accepts on either side.
pub const MAX_LP_SUPPORT: usize = 64;

/// Transport cost of the monotone (quantile) coupling.
pub fn w2_squared_quantile(p: &DiscreteDistribution, q: &DiscreteDistribution) -> f64 {
    let cdf = |d: &DiscreteDistribution| {
        let total: f64 = d.probs().iter().sum();
        let mut acc = 0.0;
        let mut c: Vec<f64> = d
            .probs()
            .iter()
            .map(|w| {
                acc += w;
                acc / total
            })
            .collect();
        *c.last_mut().unwrap() = 1.0;
        c
    };
    let (fp, fq) = (cdf(p), cdf(q));
    let (xs, ys) = (p.support(), q.support());

    let (mut i, mut j) = (0, 0);
    let mut u_prev = 0.0;
    let mut cost = 0.0;
    while i < xs.len() && j < ys.len() {
        let u = fp[i].min(fq[j]);
        let dx = xs[i] - ys[j];
        cost += (u - u_prev) * dx * dx;
        u_prev = u;
        if fp[i] <= u {
            i += 1;
        }
        if fq[j] <= u {
            j += 1;
        }
    }
    cost
}

/// Exact optimum of `Σ π_ij (x_i − y_j)²` over couplings of `p` and `q`.
pub fn w2_squared_lp(p: &DiscreteDistribution, q: &DiscreteDistribution) -> Result<f64> {
    let (n, m) = (p.support().len(), q.support().len());
    if n > MAX_LP_SUPPORT || m > MAX_LP_SUPPORT {
        return Err(Error::SizeGuard(format!(
            "LP oracle supports at most {MAX_LP_SUPPORT} atoms per side, got {n} and {m}"
        )));
    }
    let cost: Vec<f64> = p.support().iter().flat_map(|x| q.support().iter().map(move |y| (x - y) * (x - y))).collect();
    let mut a = Vec::with_capacity(n + m - 1);
    let mut b = Vec::with_capacity(n + m - 1);
    for i in 0..n {
        let mut row = vec![0.0; n * m];
        row[i * m..(i + 1) * m].iter_mut().for_each(|v| *v = 1.0);
        a.push(row);
        b.push(p.probs()[i]);
    }
    // the last column marginal is implied by the others
    for j in 0..m - 1 {
        let mut row = vec![0.0; n * m];
        for i in 0..n {
            row[i * m + j] = 1.0;
        }
        a.push(row);
        b.push(q.probs()[j]);
    }
    simplex::minimize(&cost, &a, &b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn dist(support: &[f64], probs: &[f64]) -> DiscreteDistribution {
        DiscreteDistribution::new(support.to_vec(), probs.to_vec()).unwrap()
    }

    #[test]
    fn examples() {
        let p = dist(&[0.0, 1.0, 4.0], &[0.2, 0.5, 0.3]);
        assert_eq!(w2_squared_quantile(&p, &p), 0.0);
        assert_abs_diff_eq!(w2_squared_lp(&p, &p).unwrap(), 0.0, epsilon = 1e-12);

        let d0 = DiscreteDistribution::point_mass(0.0);
        let d1 = DiscreteDistribution::point_mass(1.0);
        assert_eq!(w2_squared_quantile(&d0, &d1), 1.0);
        assert_abs_diff_eq!(w2_squared_lp(&d0, &d1).unwrap(), 1.0, epsilon = 1e-12);

        let u01 = dist(&[0.0, 1.0], &[0.5, 0.5]);
        let u02 = dist(&[0.0, 2.0], &[0.5, 0.5]);
        assert_abs_diff_eq!(w2_squared_quantile(&u01, &u02), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(w2_squared_lp(&u01, &u02).unwrap(), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn size_guard() {
        let n = MAX_LP_SUPPORT + 1;
        let big = dist(&(0..n).map(|i| i as f64).collect::<Vec<_>>(), &vec![1.0 / n as f64; n]);
        assert!(matches!(w2_squared_lp(&big, &big), Err(Error::SizeGuard(_))));
    }

    fn random_dist(max: usize) -> impl Strategy<Value = DiscreteDistribution> {
        prop::collection::vec((-5.0f64..5.0, 0.01f64..1.0), 1..=max).prop_map(|items| {
            let total: f64 = items.iter().map(|(_, w)| w).sum();
            DiscreteDistribution::from_weighted(items.into_iter().map(|(x, w)| (x, w / total)))
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn quantile_matches_lp(p in random_dist(5), q in random_dist(5)) {
            let a = w2_squared_quantile(&p, &q);
            let b = w2_squared_lp(&p, &q).unwrap();
            prop_assert!((a - b).abs() <= 1e-9, "quantile {} lp {}", a, b);
        }

        #[test]
        fn symmetric_and_shift(p in random_dist(6), q in random_dist(6), s in -3.0f64..3.0) {
            let a = w2_squared_quantile(&p, &q);
            prop_assert!((a - w2_squared_quantile(&q, &p)).abs() <= 1e-12);
            // shifting one side by s adds s² + 2 s (E q − E p)
            let shifted = DiscreteDistribution::from_weighted(q.support().iter().map(|y| y + s).zip(q.probs().iter().copied()));
            let expect = a + s * s + 2.0 * s * (q.mean() - p.mean());
            prop_assert!((w2_squared_quantile(&p, &shifted) - expect).abs() <= 1e-9);
        }
    }
}
