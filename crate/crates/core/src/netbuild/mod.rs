//! Retweet category networks and interaction ego networks.

mod build;
mod export;
mod graph;
mod summary;

pub use build::{
    aggregate_ego, build_category_network, build_category_networks, build_expanded_ego, build_interaction_ego,
    build_interaction_egos, suspended_nodes, SeedSet,
};
pub use export::{write_category_summary, write_dot, write_edge_list, write_ego_summary, write_top_active};
pub use graph::{DirectedGraph, GraphKind, Interaction};
pub use summary::{summarize, top_active_breakdown, ActivityDirection, DegreeSummary, GroupDegrees, StatusShares};
