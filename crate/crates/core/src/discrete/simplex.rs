//! Dense two-phase simplex for small equality-form LPs:
//! minimise `c·x` subject to `A x = b`, `x ≥ 0`.
//!
//! Bland's rule throughout, so degenerate transportation problems cannot
//! cycle. Sized for a few thousand columns.

use crate::error::{Error, Result};

const PIVOT_EPS: f64 = 1e-12;
const FEAS_EPS: f64 = 1e-9;

struct Tableau {
    /// `rows × (cols + 1)`, the last column is the right-hand side.
    t: Vec<Vec<f64>>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.t[r][c];
        for v in self.t[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.t[r].clone();
        for (i, row) in self.t.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f != 0.0 {
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Reduced costs of `cost` (length `cols`) under the current basis.
    fn reduced(&self, cost: &[f64]) -> Vec<f64> {
        let mut d = cost.to_vec();
        for (row, &b) in self.t.iter().zip(&self.basis) {
            let cb = cost[b];
            if cb != 0.0 {
                for (dj, a) in d.iter_mut().zip(row) {
                    *dj -= cb * a;
                }
            }
        }
        d
    }

    /// Runs simplex iterations on `cost`, only entering columns allowed by
    /// `enterable`.
    fn optimise(&mut self, cost: &[f64], enterable: impl Fn(usize) -> bool) -> Result<()> {
        let rhs = self.cols;
        for _ in 0..100_000 {
            let d = self.reduced(cost);
            let Some(enter) = (0..self.cols).find(|&j| enterable(j) && d[j] < -PIVOT_EPS) else {
                return Ok(());
            };
            let mut leave: Option<(usize, f64)> = None;
            for (i, row) in self.t.iter().enumerate() {
                let a = row[enter];
                if a > PIVOT_EPS {
                    let ratio = row[rhs] / a;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((li, lr)) => {
                            if ratio < lr - PIVOT_EPS || (ratio <= lr + PIVOT_EPS && self.basis[i] < self.basis[li]) {
                                Some((i, ratio))
                            } else {
                                Some((li, lr))
                            }
                        }
                    };
                }
            }
            let Some((r, _)) = leave else {
                return Err(Error::Domain("linear program is unbounded".into()));
            };
            self.pivot(r, enter);
        }
        Err(Error::Domain("simplex iteration limit reached".into()))
    }
}

/// Optimal value of `min c·x, A x = b, x ≥ 0`.
pub(crate) fn minimize(cost: &[f64], a: &[Vec<f64>], b: &[f64]) -> Result<f64> {
    let m = a.len();
    let n = cost.len();
    if b.len() != m {
        return Err(Error::Dimension { expected: m, got: b.len() });
    }
    // columns: n structural, m artificial, then rhs
    let cols = n + m;
    let mut t = Vec::with_capacity(m);
    for (i, (row, &bi)) in a.iter().zip(b).enumerate() {
        if row.len() != n {
            return Err(Error::Dimension { expected: n, got: row.len() });
        }
        let sign = if bi < 0.0 { -1.0 } else { 1.0 };
        let mut r: Vec<f64> = row.iter().map(|v| sign * v).collect();
        r.extend((0..m).map(|k| f64::from(u8::from(k == i))));
        r.push(sign * bi);
        t.push(r);
    }
    let mut tab = Tableau { t, basis: (n..n + m).collect(), cols };

    let phase1: Vec<f64> = (0..cols).map(|j| if j >= n { 1.0 } else { 0.0 }).collect();
    tab.optimise(&phase1, |_| true)?;
    let infeas: f64 = tab.t.iter().zip(&tab.basis).filter(|(_, &bv)| bv >= n).map(|(r, _)| r[cols]).sum();
    if infeas > FEAS_EPS {
        return Err(Error::Infeasible(format!("linear program infeasible (phase-one residual {infeas})")));
    }

    // drive zero-level artificials out of the basis; drop redundant rows
    let mut i = 0;
    while i < tab.t.len() {
        if tab.basis[i] >= n {
            match (0..n).find(|&j| tab.t[i][j].abs() > PIVOT_EPS) {
                Some(j) => tab.pivot(i, j),
                None => {
                    tab.t.remove(i);
                    tab.basis.remove(i);
                    continue;
                }
            }
        }
        i += 1;
    }

    let mut phase2 = cost.to_vec();
    phase2.extend(std::iter::repeat_n(0.0, m));
    tab.optimise(&phase2, |j| j < n)?;
    Ok(tab.t.iter().zip(&tab.basis).map(|(r, &bv)| phase2[bv] * r[cols]).sum())
}
