use std::path::Path;

use serde::Serialize;

use super::detect::Partition;
use super::graph::UndirectedGraph;
use crate::error::{Error, Result};
use crate::ingest::{AccountStatus, Corpus, StatusLookup, UserIdx};
use crate::netbuild::DirectedGraph;
use crate::stance::{StanceProfile, SupportClass};

/// Composition of one community.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CommunityProfile {
    pub community: u32,
    pub nodes: u64,
    pub n_ira: u64,
    /// Share of classified members per [`SupportClass::position`].
    pub class_percent: [f64; 5],
    /// Share of members per [`AccountStatus::position`]; with
    /// `unlabeled_percent` this sums to 100.
    pub status_percent: [f64; 5],
    pub unlabeled_percent: f64,
    /// Weighted share of directed edges inside the community between
    /// labeled endpoints, indexed `[source status][target status]`.
    pub edge_percent: [[f64; 5]; 5],
}

fn percent<const N: usize>(counts: [u64; N], total: u64) -> [f64; N] {
    counts.map(|c| {
        if total == 0 {
            0.0
        } else {
            100.0 * c as f64 / total as f64
        }
    })
}

/// Profiles every community holding at least `min_share` of the
/// partition's nodes, largest first (ties by community id).
///
/// `stances` is indexed by corpus user; members without a class are left
/// out of the class shares.
pub fn profile_communities(
    partition: &Partition,
    graph: &UndirectedGraph,
    directed: &DirectedGraph,
    statuses: &StatusLookup,
    stances: &[StanceProfile],
    min_share: f64,
) -> Result<Vec<CommunityProfile>> {
    if partition.assignment.len() != graph.num_nodes() {
        return Err(Error::argument("partition does not match graph"));
    }
    let k = partition.num_communities;
    let mut sizes = vec![0u64; k];
    for &c in &partition.assignment {
        sizes[c as usize] += 1;
    }
    let total = graph.num_nodes() as f64;
    let mut chosen: Vec<u32> = (0..k as u32)
        .filter(|&c| sizes[c as usize] as f64 >= min_share * total)
        .collect();
    chosen.sort_by(|a, b| sizes[*b as usize].cmp(&sizes[*a as usize]).then(a.cmp(b)));

    let community_of =
        |u: UserIdx| -> Option<u32> { graph.labels().binary_search(&u).ok().map(|i| partition.assignment[i]) };
    let mut out = Vec::with_capacity(chosen.len());
    for c in chosen {
        let mut class_counts = [0u64; 5];
        let mut status_counts = [0u64; 5];
        let mut unlabeled = 0u64;
        for (v, &cv) in partition.assignment.iter().enumerate() {
            if cv != c {
                continue;
            }
            let u = graph.label(v as u32);
            match statuses.get(u) {
                Some(s) => status_counts[s.position()] += 1,
                None => unlabeled += 1,
            }
            if let Some(class) = stances.get(u.index()).and_then(|p| p.class) {
                class_counts[class.position()] += 1;
            }
        }
        let mut edge_weight = [[0u64; 5]; 5];
        for (s, t, w) in directed.user_edges() {
            if community_of(s) != Some(c) || community_of(t) != Some(c) {
                continue;
            }
            if let (Some(a), Some(b)) = (statuses.get(s), statuses.get(t)) {
                edge_weight[a.position()][b.position()] += w as u64;
            }
        }
        let edge_total: u64 = edge_weight.iter().flatten().sum();
        let nodes = sizes[c as usize];
        out.push(CommunityProfile {
            community: c,
            nodes,
            n_ira: status_counts[AccountStatus::Ira.position()],
            class_percent: percent(class_counts, class_counts.iter().sum()),
            status_percent: percent(status_counts, nodes),
            unlabeled_percent: if nodes == 0 {
                0.0
            } else {
                100.0 * unlabeled as f64 / nodes as f64
            },
            edge_percent: edge_weight.map(|row| percent(row, edge_total)),
        });
    }
    Ok(out)
}

fn writer(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    csv::Writer::from_path(path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::validation(format!("{}: {other:?}", path.display())),
    })
}

/// `node,community` rows in graph node order.
pub fn write_partition(partition: &Partition, graph: &UndirectedGraph, corpus: &Corpus, path: &Path) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["node", "community"])?;
    for (v, c) in partition.assignment.iter().enumerate() {
        w.write_record([corpus.user_name(graph.label(v as u32)), &c.to_string()])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// One row per profiled community: sizes, class shares, status shares.
pub fn write_profiles(profiles: &[CommunityProfile], path: &Path) -> Result<()> {
    let mut w = writer(path)?;
    let mut header = vec!["community".to_string(), "nodes".into(), "n_ira".into()];
    header.extend(SupportClass::ALL.iter().map(|c| c.as_str().to_string()));
    header.extend(AccountStatus::ALL.iter().map(|s| s.as_str().to_string()));
    header.push("unlabeled".into());
    w.write_record(&header)?;
    for p in profiles {
        let mut rec = vec![p.community.to_string(), p.nodes.to_string(), p.n_ira.to_string()];
        rec.extend(p.class_percent.iter().map(|x| format!("{x:.2}")));
        rec.extend(p.status_percent.iter().map(|x| format!("{x:.2}")));
        rec.push(format!("{:.2}", p.unlabeled_percent));
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Long table of directed status-pair edge shares per community.
pub fn write_edge_shares(profiles: &[CommunityProfile], path: &Path) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["community", "source_status", "target_status", "percent"])?;
    for p in profiles {
        for a in AccountStatus::ALL {
            for b in AccountStatus::ALL {
                w.write_record([
                    p.community.to_string(),
                    a.as_str().to_string(),
                    b.as_str().to_string(),
                    format!("{:.2}", p.edge_percent[a.position()][b.position()]),
                ])?;
            }
        }
    }
    w.flush().map_err(|e| Error::io(path, e))
}
