//! Multi-resolution community detection on undirected projections of
//! interaction networks.
//!
//! Louvain is run repeatedly over a grid of resolutions; the agreement
//! between runs (adjusted Rand index) serves as the stability score used to
//! pick one partition.

mod detect;
mod graph;
mod louvain;
mod profile;

pub use detect::{adjusted_rand_index, detect, log_grid, select_partition, DetectConfig, Partition};
pub use graph::{connected_components, largest_component, to_undirected, UndirectedGraph};
pub use louvain::{canonical_labels, louvain, modularity};
pub use profile::{profile_communities, write_edge_shares, write_partition, write_profiles, CommunityProfile};
