//! Selection of the links that carry most of the total causal effect.

use serde::{Deserialize, Serialize};

use super::effects::CausalEffectMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoverageRule {
    /// Pick the effect level whose share of the total squared effect is
    /// closest to the coverage target; every link at or above it is kept.
    #[default]
    SquaredShareNearest,
    /// Smallest descending prefix of effects whose plain sum reaches the
    /// coverage target.
    MinimalPrefix,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdConfig {
    pub coverage: f64,
    pub rule: CoverageRule,
    /// Count auto-effects in the effect pool (links stay off-diagonal).
    pub include_auto: bool,
}

impl Default for ThresholdConfig {
    fn default() -> Self {
        Self {
            coverage: 0.75,
            rule: CoverageRule::SquaredShareNearest,
            include_auto: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdResult {
    pub threshold: f64,
    /// Selected `(source, target)` pairs, strongest first.
    pub links: Vec<(usize, usize)>,
    /// Fraction of the pool accounted for under the chosen rule.
    pub covered: f64,
}

/// Chooses the strongest off-diagonal links covering `coverage` of the
/// total effect and reports the implied threshold.
pub fn threshold_links(m: &CausalEffectMatrix, cfg: &ThresholdConfig) -> Result<ThresholdResult> {
    if !(cfg.coverage > 0.0 && cfg.coverage <= 1.0) {
        return Err(Error::argument(format!("coverage {} outside (0, 1]", cfg.coverage)));
    }
    let n = m.len();
    let mut off: Vec<(f64, usize, usize)> = Vec::new();
    let mut pool: Vec<f64> = Vec::new();
    for s in 0..n {
        for t in 0..n {
            let v = m.value[s][t];
            if !v.is_finite() || v < 0.0 {
                return Err(Error::numerical(format!("invalid effect {v} at ({s}, {t})")));
            }
            if v == 0.0 {
                continue;
            }
            if s != t {
                off.push((v, s, t));
                pool.push(v);
            } else if cfg.include_auto {
                pool.push(v);
            }
        }
    }
    off.sort_by(|a, b| b.0.total_cmp(&a.0).then((a.1, a.2).cmp(&(b.1, b.2))));
    if off.is_empty() {
        return Ok(ThresholdResult {
            threshold: 0.0,
            links: vec![],
            covered: 0.0,
        });
    }
    let (threshold, covered) = match cfg.rule {
        CoverageRule::SquaredShareNearest => {
            let total: f64 = pool.iter().map(|v| v * v).sum();
            let mut levels: Vec<f64> = off.iter().map(|x| x.0).collect();
            levels.dedup();
            let share = |level: f64| pool.iter().filter(|&&v| v >= level).map(|v| v * v).sum::<f64>() / total;
            let mut best = (levels[0], share(levels[0]));
            for &l in &levels[1..] {
                let s = share(l);
                let (db, ds) = ((best.1 - cfg.coverage).abs(), (s - cfg.coverage).abs());
                if ds < db - 1e-12 || ((ds - db).abs() <= 1e-12 && s > best.1) {
                    best = (l, s);
                }
            }
            best
        }
        CoverageRule::MinimalPrefix => {
            let total: f64 = pool.iter().sum();
            let mut acc = 0.0;
            let mut level = off.last().unwrap().0;
            for &(v, _, _) in &off {
                acc += v;
                // Auto-effects can count toward the pool but are never links.
                let autos: f64 = if cfg.include_auto {
                    (0..n).map(|i| m.value[i][i]).filter(|&a| a >= v).sum()
                } else {
                    0.0
                };
                if acc + autos >= cfg.coverage * total - 1e-12 {
                    level = v;
                    break;
                }
            }
            let covered = pool.iter().filter(|&&v| v >= level).sum::<f64>() / total;
            (level, covered)
        }
    };
    let links = off.iter().filter(|x| x.0 >= threshold).map(|x| (x.1, x.2)).collect();
    Ok(ThresholdResult {
        threshold,
        links,
        covered,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_link() {
        let mut m = CausalEffectMatrix::zeros(3);
        m.value[0][0] = 0.9;
        m.value[1][2] = 0.3;
        for rule in [CoverageRule::SquaredShareNearest, CoverageRule::MinimalPrefix] {
            let r = threshold_links(
                &m,
                &ThresholdConfig {
                    rule,
                    ..Default::default()
                },
            )
            .unwrap();
            assert_eq!(r.threshold, 0.3);
            assert_eq!(r.links, vec![(1, 2)]);
        }
    }

    #[test]
    fn empty_matrix() {
        let r = threshold_links(&CausalEffectMatrix::zeros(2), &ThresholdConfig::default()).unwrap();
        assert!(r.links.is_empty());
    }

    #[test]
    fn prefix_rule_is_minimal() {
        let mut m = CausalEffectMatrix::zeros(3);
        m.value[0][1] = 0.5;
        m.value[1][2] = 0.3;
        m.value[2][0] = 0.2;
        let cfg = ThresholdConfig {
            rule: CoverageRule::MinimalPrefix,
            ..Default::default()
        };
        let r = threshold_links(&m, &cfg).unwrap();
        // 0.5 / 1.0 < 0.75 ≤ 0.8 / 1.0
        assert_eq!(r.threshold, 0.3);
        assert_eq!(r.links, vec![(0, 1), (1, 2)]);
    }
}
