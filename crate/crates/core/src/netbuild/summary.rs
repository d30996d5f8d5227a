use serde::Serialize;

use super::build::SeedSet;
use super::graph::DirectedGraph;
use crate::ingest::AccountStatus;

/// Degree totals for one group of nodes. Means are derived on demand.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct GroupDegrees {
    pub nodes: u64,
    pub in_sum: u64,
    pub out_sum: u64,
}

impl GroupDegrees {
    pub fn mean_in(&self) -> f64 {
        if self.nodes == 0 {
            0.0
        } else {
            self.in_sum as f64 / self.nodes as f64
        }
    }

    pub fn mean_out(&self) -> f64 {
        if self.nodes == 0 {
            0.0
        } else {
            self.out_sum as f64 / self.nodes as f64
        }
    }
}

/// Exact size and degree counts of a graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DegreeSummary {
    pub nodes: u64,
    pub edges: u64,
    pub total_weight: u64,
    /// Indexed by [`AccountStatus::position`].
    pub by_status: [GroupDegrees; 5],
    pub unlabeled: GroupDegrees,
}

impl DegreeSummary {
    /// `E / N`, which equals ⟨k⟩/2 = ⟨k_in⟩ = ⟨k_out⟩.
    pub fn mean_half_degree(&self) -> f64 {
        if self.nodes == 0 {
            0.0
        } else {
            self.edges as f64 / self.nodes as f64
        }
    }

    pub fn group(&self, status: AccountStatus) -> &GroupDegrees {
        &self.by_status[status.position()]
    }

    pub fn n_ira(&self) -> u64 {
        self.group(AccountStatus::Ira).nodes
    }
}

/// Counts nodes, edges and per-status degree totals (unweighted degrees).
pub fn summarize(g: &DirectedGraph) -> DegreeSummary {
    let mut by_status = [GroupDegrees::default(); 5];
    let mut unlabeled = GroupDegrees::default();
    for n in 0..g.num_nodes() as u32 {
        let slot = match g.status(n) {
            Some(s) => &mut by_status[s.position()],
            None => &mut unlabeled,
        };
        slot.nodes += 1;
        slot.in_sum += g.in_degree(n) as u64;
        slot.out_sum += g.out_degree(n) as u64;
    }
    DegreeSummary {
        nodes: g.num_nodes() as u64,
        edges: g.num_edges() as u64,
        total_weight: g.total_weight(),
        by_status,
        unlabeled,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ActivityDirection {
    /// Non-seed accounts referenced by seeds (ranked by out-degree).
    Out,
    /// Non-seed accounts acting on seed content (ranked by in-degree).
    In,
}

impl ActivityDirection {
    pub fn as_str(self) -> &'static str {
        match self {
            ActivityDirection::Out => "out",
            ActivityDirection::In => "in",
        }
    }
}

/// Status composition of the most active non-seed accounts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatusShares {
    pub ranked: usize,
    /// Percentages indexed by [`AccountStatus::position`].
    pub percent: [f64; 5],
    pub unlabeled_percent: f64,
}

/// Ranks non-seed nodes by degree in `direction` and reports status shares
/// among the top `n` (fewer if the population is smaller).
///
/// Ties are broken by weighted strength, then by corpus user index.
pub fn top_active_breakdown(
    graph: &DirectedGraph,
    seeds: &SeedSet,
    direction: ActivityDirection,
    n: usize,
) -> StatusShares {
    let mut in_strength = vec![0u64; graph.num_nodes()];
    let mut out_strength = vec![0u64; graph.num_nodes()];
    for (s, t, w) in graph.edges() {
        out_strength[s as usize] += w as u64;
        in_strength[t as usize] += w as u64;
    }
    let mut candidates: Vec<(u32, u64, u32)> = (0..graph.num_nodes() as u32)
        .filter(|&v| !seeds.contains(graph.user(v)))
        .filter_map(|v| {
            let (deg, strength) = match direction {
                ActivityDirection::Out => (graph.out_degree(v), out_strength[v as usize]),
                ActivityDirection::In => (graph.in_degree(v), in_strength[v as usize]),
            };
            (deg > 0).then_some((deg, strength, v))
        })
        .collect();
    candidates.sort_by(|a, b| {
        b.0.cmp(&a.0)
            .then(b.1.cmp(&a.1))
            .then(graph.user(a.2).cmp(&graph.user(b.2)))
    });
    candidates.truncate(n);
    let mut counts = [0usize; 5];
    let mut unlabeled = 0usize;
    for &(_, _, v) in &candidates {
        match graph.status(v) {
            Some(s) => counts[s.position()] += 1,
            None => unlabeled += 1,
        }
    }
    let total = candidates.len();
    let pct = |c: usize| {
        if total == 0 {
            0.0
        } else {
            100.0 * c as f64 / total as f64
        }
    };
    StatusShares {
        ranked: total,
        percent: counts.map(pct),
        unlabeled_percent: pct(unlabeled),
    }
}
