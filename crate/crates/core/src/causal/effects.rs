//! Standardized lagged regression on discovered parents.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::parents::{check_series, CausalParentSet};
use crate::error::{Error, Result};
use crate::rng::stream_rng;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "method")]
pub enum StdErrMethod {
    #[default]
    Ols,
    Bootstrap {
        replicates: usize,
        seed: u64,
    },
}

/// `(source, lag, effect, stderr)` of one fitted parent.
type Fitted = (usize, usize, f64, f64);

/// Maximal absolute standardized effect per ordered pair.
///
/// Indexed `[source][target]`; the diagonal holds auto-effects and pairs
/// without a discovered link are exactly 0.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CausalEffectMatrix {
    pub value: Vec<Vec<f64>>,
    pub stderr: Vec<Vec<f64>>,
    /// Lag at which the maximum was attained.
    pub lag: Vec<Vec<Option<usize>>>,
}

impl CausalEffectMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            value: vec![vec![0.0; n]; n],
            stderr: vec![vec![0.0; n]; n],
            lag: vec![vec![None; n]; n],
        }
    }

    /// Builds a matrix from `[target][source]` rows, the layout of printed tables.
    pub fn from_target_rows(values: &[Vec<f64>], stderrs: &[Vec<f64>]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n);
        for (t, row) in values.iter().enumerate() {
            for (s, &v) in row.iter().enumerate() {
                m.value[s][t] = v;
                m.stderr[s][t] = stderrs.get(t).and_then(|r| r.get(s)).copied().unwrap_or(0.0);
            }
        }
        m
    }

    pub fn len(&self) -> usize {
        self.value.len()
    }

    pub fn is_empty(&self) -> bool {
        self.value.is_empty()
    }

    pub fn get(&self, source: usize, target: usize) -> f64 {
        self.value[source][target]
    }
}

fn standardize(s: &[f64]) -> Vec<f64> {
    let n = s.len() as f64;
    let m = s.iter().sum::<f64>() / n;
    let sd = (s.iter().map(|v| (v - m).powi(2)).sum::<f64>() / n).sqrt();
    if sd == 0.0 {
        vec![0.0; s.len()]
    } else {
        s.iter().map(|v| (v - m) / sd).collect()
    }
}

/// OLS with intercept. Returns slope coefficients and their standard errors.
fn ols(design: &DMatrix<f64>, y: &DVector<f64>) -> Result<(Vec<f64>, Vec<f64>)> {
    let (rows, p) = design.shape();
    let xtx = design.transpose() * design;
    let chol = xtx
        .clone()
        .cholesky()
        .ok_or_else(|| Error::numerical("collinear regressors in effect estimation"))?;
    let beta = chol.solve(&(design.transpose() * y));
    let resid = y - design * &beta;
    let dof = rows.saturating_sub(p).max(1) as f64;
    let sigma2 = resid.dot(&resid) / dof;
    let inv = chol.inverse();
    let coef = (1..p).map(|k| beta[k]).collect();
    let se = (1..p).map(|k| (sigma2 * inv[(k, k)]).max(0.0).sqrt()).collect();
    Ok((coef, se))
}

/// Regresses each standardized target on its standardized lagged parents
/// and keeps, per source, the largest absolute coefficient over lags.
pub fn estimate_effects(
    series: &[Vec<f64>],
    parents: &[CausalParentSet],
    tau_max: usize,
    stderr: StdErrMethod,
) -> Result<CausalEffectMatrix> {
    check_series(series, tau_max + 3)?;
    let k = series.len();
    let n = series[0].len();
    let rows = n - tau_max;
    let per_target: Vec<(usize, Vec<Fitted>)> = parents
        .par_iter()
        .map(|set| {
            if set.parents.is_empty() {
                return Ok((set.target, vec![]));
            }
            if let Some(p) = set
                .parents
                .iter()
                .find(|p| p.lag == 0 || p.lag > tau_max || p.source >= k)
            {
                return Err(Error::argument(format!(
                    "parent ({}, {}) outside the lag range",
                    p.source, p.lag
                )));
            }
            let p = set.parents.len();
            // Each lagged term is standardized over the regression rows.
            let columns: Vec<Vec<f64>> = set
                .parents
                .iter()
                .map(|par| standardize(&series[par.source][tau_max - par.lag..n - par.lag]))
                .collect();
            let design = DMatrix::from_fn(rows, p + 1, |r, c| if c == 0 { 1.0 } else { columns[c - 1][r] });
            let target = standardize(&series[set.target][tau_max..]);
            let y = DVector::from_vec(target);
            let (coef, mut se) = ols(&design, &y)?;
            if let StdErrMethod::Bootstrap { replicates, seed } = stderr {
                se = bootstrap_se(&design, &y, replicates.max(2), seed ^ set.target as u64)?;
            }
            Ok((
                set.target,
                set.parents
                    .iter()
                    .zip(coef.iter().zip(&se))
                    .map(|(par, (&b, &s))| (par.source, par.lag, b, s))
                    .collect(),
            ))
        })
        .collect::<Result<_>>()?;
    let mut m = CausalEffectMatrix::zeros(k);
    for (target, terms) in per_target {
        for (source, lag, b, s) in terms {
            if b.abs() > m.value[source][target] || m.lag[source][target].is_none() {
                m.value[source][target] = b.abs();
                m.stderr[source][target] = s;
                m.lag[source][target] = Some(lag);
            }
        }
    }
    Ok(m)
}

/// Row-resampling bootstrap of the slope coefficients.
fn bootstrap_se(design: &DMatrix<f64>, y: &DVector<f64>, replicates: usize, seed: u64) -> Result<Vec<f64>> {
    let (rows, p) = design.shape();
    let mut draws: Vec<Vec<f64>> = Vec::with_capacity(replicates);
    for b in 0..replicates {
        let mut rng = stream_rng(seed, b as u64);
        let idx: Vec<usize> = (0..rows).map(|_| rng.random_range(0..rows)).collect();
        let d = DMatrix::from_fn(rows, p, |r, c| design[(idx[r], c)]);
        let yy = DVector::from_fn(rows, |r, _| y[idx[r]]);
        draws.push(ols(&d, &yy)?.0);
    }
    Ok((0..p - 1)
        .map(|k| {
            let m = draws.iter().map(|d| d[k]).sum::<f64>() / replicates as f64;
            (draws.iter().map(|d| (d[k] - m).powi(2)).sum::<f64>() / (replicates - 1) as f64).sqrt()
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::causal::Parent;
    use crate::rng::stream_rng;
    use rand_distr::{Distribution, StandardNormal};

    fn parent(source: usize, lag: usize) -> Parent {
        Parent {
            source,
            lag,
            min_abs_stat: 1.0,
            p_value: 0.0,
        }
    }

    fn noise(seed: u64, n: usize) -> Vec<f64> {
        let mut rng = stream_rng(seed, 0);
        (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
    }

    #[test]
    fn noiseless_single_parent() {
        let x = noise(1, 500);
        let mut y = vec![0.0; 500];
        for t in 1..500 {
            y[t] = 0.7 * x[t - 1];
        }
        let sets = vec![
            CausalParentSet {
                target: 0,
                parents: vec![],
            },
            CausalParentSet {
                target: 1,
                parents: vec![parent(0, 1)],
            },
        ];
        let m = estimate_effects(&[x.clone(), y.clone()], &sets, 1, StdErrMethod::Ols).unwrap();
        // y is an exact multiple of lagged x, so the standardized slope is 1.
        assert!((m.get(0, 1) - 1.0).abs() < 1e-9);
        assert!(m.stderr[0][1] < 1e-9);
        assert_eq!(m.value[0][0], 0.0);
        assert_eq!(m.value[1][0], 0.0);

        let scaled: Vec<f64> = x.iter().map(|v| 10.0 * v + 3.0).collect();
        let m2 = estimate_effects(&[scaled, y], &sets, 1, StdErrMethod::Ols).unwrap();
        assert!((m2.get(0, 1) - m.get(0, 1)).abs() < 1e-9);
    }

    #[test]
    fn bootstrap_close_to_ols() {
        let n = 3000;
        let x = noise(2, n);
        let e = noise(3, n);
        let mut y = vec![0.0; n];
        for t in 1..n {
            y[t] = 0.4 * x[t - 1] + e[t];
        }
        let sets = vec![CausalParentSet {
            target: 1,
            parents: vec![parent(0, 1)],
        }];
        let ols = estimate_effects(&[x.clone(), y.clone()], &sets, 1, StdErrMethod::Ols).unwrap();
        let boot = estimate_effects(
            &[x, y],
            &sets,
            1,
            StdErrMethod::Bootstrap {
                replicates: 200,
                seed: 9,
            },
        )
        .unwrap();
        let (a, b) = (ols.stderr[0][1], boot.stderr[0][1]);
        assert!((a - b).abs() / a < 0.25, "{a} vs {b}");
        assert_eq!(ols.get(0, 1), boot.get(0, 1));
    }

    #[test]
    fn table_layout_round_trip() {
        let v = vec![vec![0.5, 0.1], vec![0.2, 0.6]];
        let m = CausalEffectMatrix::from_target_rows(&v, &[]);
        assert_eq!(m.get(1, 0), 0.1);
        assert_eq!(m.get(0, 1), 0.2);
    }
}
