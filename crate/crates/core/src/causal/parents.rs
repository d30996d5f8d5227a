//! Lagged parent discovery by iterative partial-correlation filtering.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscoveryConfig {
    pub tau_max: usize,
    pub alpha: f64,
    pub max_conds: usize,
}

impl Default for DiscoveryConfig {
    fn default() -> Self {
        Self {
            tau_max: 18,
            alpha: 0.05,
            max_conds: 3,
        }
    }
}

/// A lagged driver of a target series that survived filtering.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Parent {
    pub source: usize,
    pub lag: usize,
    /// Smallest absolute partial correlation seen across the tests.
    pub min_abs_stat: f64,
    /// P-value of the last test performed.
    pub p_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CausalParentSet {
    pub target: usize,
    /// Strongest first.
    pub parents: Vec<Parent>,
}

impl CausalParentSet {
    pub fn contains(&self, source: usize, lag: usize) -> bool {
        self.parents.iter().any(|p| p.source == source && p.lag == lag)
    }
}

/// Partial correlation of `x` and `y` given `z`, with its two-sided
/// Student-t p-value on `len − |z| − 2` degrees of freedom.
pub fn partial_correlation(x: &[f64], y: &[f64], z: &[&[f64]]) -> Result<(f64, f64)> {
    let n = x.len();
    let k = z.len();
    if y.len() != n || z.iter().any(|c| c.len() != n) {
        return Err(Error::argument("partial correlation inputs differ in length"));
    }
    if n < k + 3 {
        return Err(Error::argument("too few samples for the conditioning set"));
    }
    let center = |v: &[f64]| {
        let m = v.iter().sum::<f64>() / n as f64;
        v.iter().map(|a| a - m).collect::<Vec<f64>>()
    };
    let mut rx = center(x);
    let mut ry = center(y);
    if k > 0 {
        let zc: Vec<Vec<f64>> = z.iter().map(|c| center(c)).collect();
        let gram = DMatrix::from_fn(k, k, |a, b| dot(&zc[a], &zc[b]));
        let chol = gram
            .clone()
            .cholesky()
            .ok_or_else(|| Error::numerical("singular conditioning set in partial correlation"))?;
        for r in [&mut rx, &mut ry] {
            let rhs = DVector::from_fn(k, |a, _| dot(&zc[a], r));
            let beta = chol.solve(&rhs);
            for (a, col) in zc.iter().enumerate() {
                let b = beta[a];
                for (v, c) in r.iter_mut().zip(col) {
                    *v -= b * c;
                }
            }
        }
    }
    let sxx = dot(&rx, &rx);
    let syy = dot(&ry, &ry);
    let scale = dot(&center(x), &center(x)).max(dot(&center(y), &center(y))).max(1.0);
    if sxx <= 1e-24 * scale || syy <= 1e-24 * scale {
        return Ok((0.0, 1.0));
    }
    let r = (dot(&rx, &ry) / (sxx * syy).sqrt()).clamp(-1.0, 1.0);
    let df = (n - k - 2) as f64;
    if r.abs() >= 1.0 {
        return Ok((r, 0.0));
    }
    let t = r * (df / (1.0 - r * r)).sqrt();
    let dist = StudentsT::new(0.0, 1.0, df).map_err(|e| Error::numerical(e.to_string()))?;
    let p = 2.0 * (1.0 - dist.cdf(t.abs()));
    Ok((r, p.clamp(0.0, 1.0)))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Validates a series set and reports which series are constant.
pub(crate) fn check_series(series: &[Vec<f64>], min_len: usize) -> Result<Vec<bool>> {
    if series.is_empty() {
        return Err(Error::argument("no series given"));
    }
    let n = series[0].len();
    if series.iter().any(|s| s.len() != n) {
        return Err(Error::argument("series differ in length"));
    }
    if n < min_len {
        return Err(Error::argument(format!(
            "series of length {n} are too short (need {min_len})"
        )));
    }
    if series.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::numerical("series contain non-finite values"));
    }
    Ok(series
        .iter()
        .map(|s| {
            let m = s.iter().sum::<f64>() / n as f64;
            s.iter().map(|v| (v - m).powi(2)).sum::<f64>() / n as f64 <= 1e-18
        })
        .collect())
}

/// Finds the lagged parents of every series.
///
/// All `(source, lag)` pairs with `1 ≤ lag ≤ tau_max` start as candidates.
/// Those unconditionally correlated with the target at level `alpha`
/// survive; then for condition sizes `1..=max_conds` every survivor is
/// re-tested given the strongest other survivors, and those with
/// `p ≥ alpha` are dropped at the end of each round. Survivors are ordered
/// by their smallest absolute statistic, ties by `(source, lag)`.
/// Constant series are neither targets nor sources.
pub fn discover_parents(series: &[Vec<f64>], cfg: &DiscoveryConfig) -> Result<Vec<CausalParentSet>> {
    if cfg.tau_max == 0 {
        return Err(Error::argument("tau_max must be at least 1"));
    }
    if !(cfg.alpha > 0.0 && cfg.alpha < 1.0) {
        return Err(Error::argument(format!("alpha {} outside (0, 1)", cfg.alpha)));
    }
    let constant = check_series(series, cfg.tau_max + cfg.max_conds + 4)?;
    for (i, c) in constant.iter().enumerate() {
        if *c {
            log::warn!("series {i} is constant; excluded from causal discovery");
        }
    }
    let n = series[0].len();
    let t0 = cfg.tau_max;
    let lagged = |src: usize, lag: usize| &series[src][t0 - lag..n - lag];
    let sources: Vec<usize> = (0..series.len()).filter(|&i| !constant[i]).collect();

    (0..series.len())
        .into_par_iter()
        .map(|target| {
            if constant[target] {
                return Ok(CausalParentSet {
                    target,
                    parents: vec![],
                });
            }
            let y = &series[target][t0..];
            let mut survivors: Vec<Parent> = Vec::new();
            for &src in &sources {
                for lag in 1..=cfg.tau_max {
                    let (r, p) = partial_correlation(lagged(src, lag), y, &[])?;
                    if p < cfg.alpha {
                        survivors.push(Parent {
                            source: src,
                            lag,
                            min_abs_stat: r.abs(),
                            p_value: p,
                        });
                    }
                }
            }
            sort_parents(&mut survivors);
            for size in 1..=cfg.max_conds {
                if survivors.len() <= size {
                    break;
                }
                let mut keep = Vec::with_capacity(survivors.len());
                for (idx, cand) in survivors.iter().enumerate() {
                    let conds: Vec<&[f64]> = survivors
                        .iter()
                        .enumerate()
                        .filter(|&(o, _)| o != idx)
                        .take(size)
                        .map(|(_, c)| lagged(c.source, c.lag))
                        .collect();
                    let (r, p) = partial_correlation(lagged(cand.source, cand.lag), y, &conds)?;
                    if p < cfg.alpha {
                        keep.push(Parent {
                            min_abs_stat: cand.min_abs_stat.min(r.abs()),
                            p_value: p,
                            ..*cand
                        });
                    }
                }
                survivors = keep;
                sort_parents(&mut survivors);
            }
            Ok(CausalParentSet {
                target,
                parents: survivors,
            })
        })
        .collect()
}

fn sort_parents(v: &mut [Parent]) {
    v.sort_by(|a, b| {
        b.min_abs_stat
            .total_cmp(&a.min_abs_stat)
            .then((a.source, a.lag).cmp(&(b.source, b.lag)))
    });
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;
    use rand_distr::{Distribution, StandardNormal};

    fn noise(seed: u64, stream: u64, n: usize) -> Vec<f64> {
        let mut rng = stream_rng(seed, stream);
        (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
    }

    #[test]
    fn partial_correlation_removes_common_driver() {
        let z = noise(1, 0, 2000);
        let e1 = noise(1, 1, 2000);
        let e2 = noise(1, 2, 2000);
        let x: Vec<f64> = z.iter().zip(&e1).map(|(a, b)| a + 0.5 * b).collect();
        let y: Vec<f64> = z.iter().zip(&e2).map(|(a, b)| a + 0.5 * b).collect();
        let (r0, p0) = partial_correlation(&x, &y, &[]).unwrap();
        assert!(r0 > 0.7 && p0 < 1e-10);
        let (r1, _) = partial_correlation(&x, &y, &[&z]).unwrap();
        assert!(r1.abs() < 0.1);
    }

    #[test]
    fn recovers_two_variable_var() {
        let n = 4000;
        let ex = noise(3, 0, n);
        let ey = noise(3, 1, n);
        let mut x = vec![0.0; n];
        let mut y = vec![0.0; n];
        for t in 2..n {
            x[t] = 0.6 * x[t - 1] + ex[t];
            y[t] = 0.5 * x[t - 2] + ey[t];
        }
        let cfg = DiscoveryConfig {
            tau_max: 3,
            alpha: 0.01,
            max_conds: 3,
        };
        let sets = discover_parents(&[x, y], &cfg).unwrap();
        assert!(sets[0].contains(0, 1));
        assert!(sets[1].contains(0, 2));
        assert!(!sets[0].parents.iter().any(|p| p.source == 1));
    }

    #[test]
    fn constant_series_is_skipped() {
        let x = noise(5, 0, 300);
        let c = vec![2.0; 300];
        let sets = discover_parents(&[x, c], &DiscoveryConfig::default()).unwrap();
        assert!(sets[1].parents.is_empty());
        assert!(!sets[0].parents.iter().any(|p| p.source == 1));
        let bad = vec![f64::NAN; 300];
        assert!(discover_parents(&[bad], &DiscoveryConfig::default()).is_err());
    }
}
