//! Group-degree comparison across category networks.
//!
//! Each status group's mean in/out degree is sampled per category network to
//! match the IRA population size, and the resulting 8-value vectors are
//! compared pairwise with two-sample KS tests.

mod export;
mod heatmap;
mod ks;
mod sampling;

pub use export::{write_heatmap_plot_data, write_p_matrix, write_sampled_degrees};
pub use heatmap::{pairwise_ks_heatmap, KsHeatmap};
pub use ks::{
    asymptotic_p_value, exact_p_value, kolmogorov_sf, ks_statistic, ks_two_sample, ks_two_sample_with, KsMethod,
    KsResult, KsStatistic, EXACT_LIMIT,
};
pub use sampling::{sample_group_degrees, DegreeDirection, DegreeSampleVector, SampleSize, SamplingPlan};
