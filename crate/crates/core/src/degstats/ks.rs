//! Two-sample Kolmogorov–Smirnov test.
//!
//! The statistic is evaluated at the pooled sorted unique points with
//! right-continuous empirical CDFs, so ties are handled without
//! perturbation. P-values come from exact lattice-path counting when
//! `n·m ≤ 10 000` and from the Kolmogorov limit law otherwise. The exact
//! count is the permutation distribution given the observed ties, which
//! reduces to the classic continuous-case count when there are none.

use serde::Serialize;

use crate::error::{Error, Result};

/// Largest `n·m` for which the exact null distribution is used.
pub const EXACT_LIMIT: u64 = 10_000;

/// KS statistic in exact integer form: `D = numerator / (n·m)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KsStatistic {
    pub n: u64,
    pub m: u64,
    pub numerator: u64,
}

impl KsStatistic {
    pub fn d(&self) -> f64 {
        self.numerator as f64 / (self.n * self.m) as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KsMethod {
    Exact,
    Asymptotic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
    pub reject: bool,
    pub method: KsMethod,
}

fn sorted_finite(v: &[f64], name: &str) -> Result<Vec<f64>> {
    if v.is_empty() {
        return Err(Error::argument(format!("KS sample `{name}` is empty")));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::argument(format!("KS sample `{name}` has non-finite values")));
    }
    let mut s = v.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(s)
}

/// Supremum distance between the two empirical CDFs.
pub fn ks_statistic(x: &[f64], y: &[f64]) -> Result<KsStatistic> {
    Ok(ks_statistic_with_ties(x, y)?.0)
}

/// The statistic plus, for each pooled prefix length `k = 1..=n+m`, whether
/// the `k`-th smallest pooled value differs from the next one (index 0 unused).
fn ks_statistic_with_ties(x: &[f64], y: &[f64]) -> Result<(KsStatistic, Vec<bool>)> {
    let xs = sorted_finite(x, "x")?;
    let ys = sorted_finite(y, "y")?;
    let (n, m) = (xs.len(), ys.len());
    let mut pooled: Vec<f64> = xs.iter().chain(&ys).copied().collect();
    pooled.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut block_end = vec![false; n + m + 1];
    for k in 1..=n + m {
        block_end[k] = k == n + m || pooled[k - 1] != pooled[k];
    }
    let (mut i, mut j) = (0usize, 0usize);
    let mut best = 0u64;
    while i < n || j < m {
        let t = match (xs.get(i), ys.get(j)) {
            (Some(&a), Some(&b)) => a.min(b),
            (Some(&a), None) => a,
            (None, Some(&b)) => b,
            (None, None) => unreachable!(),
        };
        while i < n && xs[i] <= t {
            i += 1;
        }
        while j < m && ys[j] <= t {
            j += 1;
        }
        let diff = (i as i64 * m as i64 - j as i64 * n as i64).unsigned_abs();
        best = best.max(diff);
    }
    let stat = KsStatistic {
        n: n as u64,
        m: m as u64,
        numerator: best,
    };
    Ok((stat, block_end))
}

/// `P(D ≥ d)` under the null for samples without ties, by counting monotone
/// lattice paths that stay strictly inside the band `|i·m − j·n| < numerator`.
pub fn exact_p_value(stat: &KsStatistic) -> f64 {
    exact_p_value_blocks(stat, None)
}

/// Permutation p-value conditional on the observed ties: the band is only
/// enforced where the pooled sample moves to a new distinct value.
fn exact_p_value_blocks(stat: &KsStatistic, block_end: Option<&[bool]>) -> f64 {
    if stat.numerator == 0 {
        return 1.0;
    }
    let (n, m) = (stat.n as usize, stat.m as usize);
    let inside = |i: usize, j: usize| {
        let checked = block_end.is_none_or(|b| b[i + j]);
        !checked || (i as i64 * m as i64 - j as i64 * n as i64).unsigned_abs() < stat.numerator
    };
    // Row-rolling DP over i; `inner` counts band-respecting paths, `all` counts every path.
    let mut inner = vec![0.0f64; m + 1];
    let mut all = vec![0.0f64; m + 1];
    for i in 0..=n {
        for j in 0..=m {
            if i == 0 && j == 0 {
                inner[0] = 1.0;
                all[0] = 1.0;
                continue;
            }
            let up_inner = if i > 0 { inner[j] } else { 0.0 };
            let left_inner = if j > 0 { inner[j - 1] } else { 0.0 };
            let up_all = if i > 0 { all[j] } else { 0.0 };
            let left_all = if j > 0 { all[j - 1] } else { 0.0 };
            inner[j] = if inside(i, j) { up_inner + left_inner } else { 0.0 };
            all[j] = up_all + left_all;
        }
    }
    let p = 1.0 - inner[m] / all[m];
    p.clamp(0.0, 1.0)
}

/// Survival function of the Kolmogorov distribution, `P(K > λ)`.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 1.18 {
        // Jacobi-theta form converges fast for small λ.
        let c = (2.0 * std::f64::consts::PI).sqrt() / lambda;
        let e = -std::f64::consts::PI.powi(2) / (8.0 * lambda * lambda);
        let mut cdf = 0.0;
        for k in 1..=20 {
            let odd = (2 * k - 1) as f64;
            cdf += (odd * odd * e).exp();
        }
        (1.0 - c * cdf).clamp(0.0, 1.0)
    } else {
        let mut sf = 0.0;
        for k in 1..=100 {
            let kf = k as f64;
            let term = (-2.0 * kf * kf * lambda * lambda).exp();
            sf += if k % 2 == 1 { term } else { -term };
            if term < 1e-17 {
                break;
            }
        }
        (2.0 * sf).clamp(0.0, 1.0)
    }
}

/// Asymptotic p-value `Q_KS(√(nm/(n+m))·D)`.
pub fn asymptotic_p_value(stat: &KsStatistic) -> f64 {
    let en = (stat.n * stat.m) as f64 / (stat.n + stat.m) as f64;
    kolmogorov_sf(en.sqrt() * stat.d())
}

/// Two-sided two-sample KS test at level `alpha`.
pub fn ks_two_sample(x: &[f64], y: &[f64], alpha: f64) -> Result<KsResult> {
    ks_two_sample_with(x, y, alpha, None)
}

/// As [`ks_two_sample`], optionally forcing the p-value method.
pub fn ks_two_sample_with(x: &[f64], y: &[f64], alpha: f64, method: Option<KsMethod>) -> Result<KsResult> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::argument(format!("significance level {alpha} outside (0, 1)")));
    }
    let (stat, block_end) = ks_statistic_with_ties(x, y)?;
    let method = method.unwrap_or(if stat.n * stat.m <= EXACT_LIMIT {
        KsMethod::Exact
    } else {
        KsMethod::Asymptotic
    });
    let p_value = match method {
        KsMethod::Exact => exact_p_value_blocks(&stat, Some(&block_end)),
        KsMethod::Asymptotic => asymptotic_p_value(&stat),
    };
    Ok(KsResult {
        statistic: stat.d(),
        p_value,
        reject: p_value < alpha,
        method,
    })
}
