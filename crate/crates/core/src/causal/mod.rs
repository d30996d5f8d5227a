//! Lagged causal networks between group activity series.
//!
//! Activity is binned at 15 minutes, deseasonalized with STL, filtered for
//! lagged parents by partial-correlation tests, and each target is
//! regressed on its standardized parents to obtain effect sizes.

mod effects;
mod export;
mod parents;
mod series;
mod stl;
mod threshold;

pub use effects::{estimate_effects, CausalEffectMatrix, StdErrMethod};
pub use export::{write_causal_dot, write_effect_matrix, write_links};
pub use parents::{discover_parents, partial_correlation, CausalParentSet, DiscoveryConfig, Parent};
pub use series::{bin_activity, bin_count, scenario_series, ActivitySeries, Scenario, SeriesGroup, BIN_SECONDS};
pub use stl::{stl, StlConfig, StlDecomposition};
pub use threshold::{threshold_links, CoverageRule, ThresholdConfig, ThresholdResult};

use crate::error::Result;

/// Centered STL remainder of every series.
pub fn residuals(series: &[ActivitySeries], cfg: &StlConfig) -> Result<Vec<Vec<f64>>> {
    series
        .iter()
        .map(|s| {
            let mut r = stl(&s.bins, cfg)?.remainder;
            let m = r.iter().sum::<f64>() / r.len() as f64;
            r.iter_mut().for_each(|v| *v -= m);
            Ok(r)
        })
        .collect()
}
