//! Seasonal-trend decomposition by Loess with a periodic seasonal component.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StlConfig {
    /// Observations per seasonal cycle.
    pub period: usize,
    /// Trend smoother span; derived from the period when absent.
    pub trend_window: Option<usize>,
    /// Low-pass smoother span; defaults to the next odd number ≥ period.
    pub low_pass_window: Option<usize>,
    pub inner_iterations: usize,
    pub outer_iterations: usize,
}

impl Default for StlConfig {
    fn default() -> Self {
        Self {
            period: 96,
            trend_window: None,
            low_pass_window: None,
            inner_iterations: 2,
            outer_iterations: 1,
        }
    }
}

impl StlConfig {
    /// Seasonal span used for the periodic case, as in the reference STL code.
    pub fn seasonal_window(&self) -> usize {
        10 * self.period + 1
    }

    pub fn resolved_trend_window(&self) -> usize {
        self.trend_window.unwrap_or_else(|| {
            let ns = self.seasonal_window() as f64;
            next_odd((1.5 * self.period as f64 / (1.0 - 1.5 / ns)).ceil() as usize)
        })
    }

    pub fn resolved_low_pass_window(&self) -> usize {
        self.low_pass_window.unwrap_or_else(|| next_odd(self.period))
    }
}

fn next_odd(x: usize) -> usize {
    if x.is_multiple_of(2) {
        x + 1
    } else {
        x
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StlDecomposition {
    pub trend: Vec<f64>,
    pub seasonal: Vec<f64>,
    pub remainder: Vec<f64>,
    pub period: usize,
}

fn tricube(u: f64) -> f64 {
    if u >= 1.0 {
        0.0
    } else {
        let t = 1.0 - u * u * u;
        t * t * t
    }
}

/// Local-linear loess of `y` (at positions `0..n`) evaluated at every position.
fn loess(y: &[f64], span: usize, robustness: Option<&[f64]>) -> Vec<f64> {
    let n = y.len();
    let q = span.max(2);
    let range = (n.max(2) - 1) as f64;
    let mut out = vec![0.0; n];
    let mut w = vec![0.0; q.min(n)];
    for (i, o) in out.iter_mut().enumerate() {
        let (lo, hi, h) = if q >= n {
            let far = i.max(n - 1 - i) as f64;
            (0, n, far + (q - n) as f64 / 2.0)
        } else {
            let lo = i.saturating_sub(q / 2).min(n - q);
            let hi = lo + q;
            (lo, hi, (i - lo).max(hi - 1 - i) as f64)
        };
        let h = h.max(1e-12);
        let (h9, h1) = (0.999 * h, 0.001 * h);
        let mut a = 0.0;
        for (k, j) in (lo..hi).enumerate() {
            let r = (j as f64 - i as f64).abs();
            let mut wj = if r <= h9 {
                if r <= h1 {
                    1.0
                } else {
                    tricube(r / h)
                }
            } else {
                0.0
            };
            if let Some(rw) = robustness {
                wj *= rw[j];
            }
            w[k] = wj;
            a += wj;
        }
        if a <= 0.0 {
            *o = y[i];
            continue;
        }
        let mut xbar = 0.0;
        for (k, j) in (lo..hi).enumerate() {
            w[k] /= a;
            xbar += w[k] * j as f64;
        }
        let mut c = 0.0;
        for (k, j) in (lo..hi).enumerate() {
            c += w[k] * (j as f64 - xbar).powi(2);
        }
        if c.sqrt() > 0.001 * range {
            let b = (i as f64 - xbar) / c;
            for (k, j) in (lo..hi).enumerate() {
                w[k] *= b * (j as f64 - xbar) + 1.0;
            }
        }
        *o = (lo..hi).enumerate().map(|(k, j)| w[k] * y[j]).sum();
    }
    out
}

fn moving_average(x: &[f64], len: usize) -> Vec<f64> {
    let n = x.len() + 1 - len;
    let mut out = Vec::with_capacity(n);
    let mut s: f64 = x[..len].iter().sum();
    out.push(s / len as f64);
    for i in 1..n {
        s += x[i + len - 1] - x[i - 1];
        out.push(s / len as f64);
    }
    out
}

/// Robust-weighted cycle-subseries means, extended one period on each side.
fn periodic_subseries(detrended: &[f64], period: usize, rw: &[f64]) -> Vec<f64> {
    let n = detrended.len();
    let mut level = vec![0.0; period];
    for (p, l) in level.iter_mut().enumerate() {
        let (mut sw, mut sy, mut plain, mut count) = (0.0, 0.0, 0.0, 0.0);
        for j in (p..n).step_by(period) {
            sw += rw[j];
            sy += rw[j] * detrended[j];
            plain += detrended[j];
            count += 1.0;
        }
        *l = if sw > 0.0 { sy / sw } else { plain / count };
    }
    (0..n + 2 * period).map(|k| level[k % period]).collect()
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

/// Decomposes `y` into trend, seasonal and remainder with
/// `remainder = y − trend − seasonal`.
pub fn stl(y: &[f64], cfg: &StlConfig) -> Result<StlDecomposition> {
    let np = cfg.period;
    if np < 2 {
        return Err(Error::argument("STL period must be at least 2"));
    }
    if y.len() < 2 * np {
        return Err(Error::argument(format!(
            "STL needs at least two periods ({} points), got {}",
            2 * np,
            y.len()
        )));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::numerical("STL input has non-finite values"));
    }
    let n = y.len();
    let nt = cfg.resolved_trend_window();
    let nl = cfg.resolved_low_pass_window();
    let mut trend = vec![0.0; n];
    let mut seasonal = vec![0.0; n];
    let mut rw = vec![1.0; n];
    for outer in 0..=cfg.outer_iterations {
        for _ in 0..cfg.inner_iterations.max(1) {
            let detrended: Vec<f64> = y.iter().zip(&trend).map(|(a, t)| a - t).collect();
            let c = periodic_subseries(&detrended, np, &rw);
            let low = loess(
                &moving_average(&moving_average(&moving_average(&c, np), np), 3),
                nl,
                None,
            );
            for i in 0..n {
                seasonal[i] = c[np + i] - low[i];
            }
            let deseason: Vec<f64> = y.iter().zip(&seasonal).map(|(a, s)| a - s).collect();
            trend = loess(&deseason, nt, Some(&rw));
        }
        if outer == cfg.outer_iterations {
            break;
        }
        let resid: Vec<f64> = (0..n).map(|i| (y[i] - trend[i] - seasonal[i]).abs()).collect();
        let h = 6.0 * median(&mut resid.clone());
        for i in 0..n {
            rw[i] = if h > 0.0 {
                let u = resid[i] / h;
                if u < 1.0 {
                    (1.0 - u * u).powi(2)
                } else {
                    0.0
                }
            } else {
                1.0
            };
        }
    }
    // A periodic component repeats exactly, so average each cycle position.
    let mut level = vec![0.0; np];
    let mut count = vec![0.0; np];
    for (i, s) in seasonal.iter().enumerate() {
        level[i % np] += s;
        count[i % np] += 1.0;
    }
    for i in 0..n {
        seasonal[i] = level[i % np] / count[i % np];
    }
    let remainder = (0..n).map(|i| y[i] - trend[i] - seasonal[i]).collect();
    Ok(StlDecomposition {
        trend,
        seasonal,
        remainder,
        period: np,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;
    use rand_distr::{Distribution, StandardNormal};

    fn variance(v: &[f64]) -> f64 {
        let m = v.iter().sum::<f64>() / v.len() as f64;
        v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / v.len() as f64
    }

    #[test]
    fn default_windows() {
        let c = StlConfig::default();
        assert_eq!(c.seasonal_window(), 961);
        assert_eq!(c.resolved_trend_window(), 145);
        assert_eq!(c.resolved_low_pass_window(), 97);
    }

    #[test]
    fn constant_series() {
        let y = vec![4.25; 96 * 5];
        let d = stl(&y, &StlConfig::default()).unwrap();
        for i in 0..y.len() {
            assert!((d.trend[i] - 4.25).abs() < 1e-6);
            assert!(d.seasonal[i].abs() < 1e-6);
            assert!(d.remainder[i].abs() < 1e-6);
        }
    }

    #[test]
    fn sinusoid_goes_to_seasonal() {
        let n = 96 * 10;
        let truth: Vec<f64> = (0..n)
            .map(|i| 3.0 * (2.0 * std::f64::consts::PI * i as f64 / 96.0).sin())
            .collect();
        let y: Vec<f64> = truth.iter().map(|s| s + 10.0).collect();
        let d = stl(&y, &StlConfig::default()).unwrap();
        let err: Vec<f64> = d.seasonal.iter().zip(&truth).map(|(a, b)| a - b).collect();
        assert!(1.0 - variance(&err) / variance(&truth) >= 0.95);
        for (i, v) in y.iter().enumerate() {
            assert!((d.trend[i] + d.seasonal[i] + d.remainder[i] - v).abs() < 1e-9);
        }
    }

    #[test]
    fn white_noise_stays_in_remainder() {
        let mut rng = stream_rng(11, 0);
        let y: Vec<f64> = (0..96 * 20).map(|_| StandardNormal.sample(&mut rng)).collect();
        let d = stl(&y, &StlConfig::default()).unwrap();
        assert!(variance(&d.remainder) >= 0.9 * variance(&y));
    }

    #[test]
    fn too_short() {
        assert!(stl(&[1.0; 100], &StlConfig::default()).is_err());
        let mut y = vec![1.0; 200];
        y[3] = f64::NAN;
        assert!(stl(&y, &StlConfig::default()).is_err());
    }
}
