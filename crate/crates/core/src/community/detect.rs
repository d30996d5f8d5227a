use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::graph::UndirectedGraph;
use super::louvain::{louvain, modularity};
use crate::error::{Error, Result};
use crate::rng::{derive_seed, stream_rng};

/// Community assignment found at one resolution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Partition {
    /// Community of each node, dense from 0.
    pub assignment: Vec<u32>,
    pub resolution: f64,
    /// Modularity at `resolution`.
    pub quality: f64,
    /// Standard (resolution 1) modularity, comparable across resolutions.
    pub modularity: f64,
    /// Mean adjusted Rand index over pairs of runs.
    pub stability: f64,
    pub num_communities: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectConfig {
    pub resolutions: Vec<f64>,
    pub runs: usize,
    pub seed: u64,
}

impl Default for DetectConfig {
    fn default() -> Self {
        Self {
            resolutions: log_grid(0.2, 3.0, 15),
            runs: 20,
            seed: 0,
        }
    }
}

/// `n` log-spaced points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..n)
                .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
                .collect()
        }
    }
}

fn choose2(x: u64) -> f64 {
    (x as f64) * (x as f64 - 1.0) / 2.0
}

/// Adjusted Rand index between two labelings of the same nodes.
///
/// When both labelings are trivial in the same way (the chance-expected
/// index equals its maximum) the index is 1 for identical partitions and
/// 0 otherwise.
pub fn adjusted_rand_index(a: &[u32], b: &[u32]) -> f64 {
    assert_eq!(a.len(), b.len(), "labelings differ in length");
    let n = a.len() as u64;
    if n < 2 {
        return 1.0;
    }
    let mut table: HashMap<(u32, u32), u64> = HashMap::new();
    let mut rows: HashMap<u32, u64> = HashMap::new();
    let mut cols: HashMap<u32, u64> = HashMap::new();
    for (&x, &y) in a.iter().zip(b) {
        *table.entry((x, y)).or_default() += 1;
        *rows.entry(x).or_default() += 1;
        *cols.entry(y).or_default() += 1;
    }
    let index: f64 = table.values().map(|&c| choose2(c)).sum();
    let sa: f64 = rows.values().map(|&c| choose2(c)).sum();
    let sb: f64 = cols.values().map(|&c| choose2(c)).sum();
    let expected = sa * sb / choose2(n);
    let max = (sa + sb) / 2.0;
    if (max - expected).abs() < 1e-12 {
        return if index == max { 1.0 } else { 0.0 };
    }
    (index - expected) / (max - expected)
}

/// Runs Louvain `runs` times per resolution and reports, for each
/// resolution, the best-quality run with the cross-run stability.
///
/// Run `r` at resolution index `i` uses stream `i·runs + r` of the seed,
/// so results do not depend on scheduling.
pub fn detect(g: &UndirectedGraph, cfg: &DetectConfig) -> Result<Vec<Partition>> {
    if g.is_empty() || g.total_weight() == 0.0 {
        return Err(Error::validation("community detection on an empty graph"));
    }
    if cfg.runs == 0 || cfg.resolutions.is_empty() {
        return Err(Error::argument(
            "community detection needs at least one run and one resolution",
        ));
    }
    if let Some(r) = cfg.resolutions.iter().find(|r| !(r.is_finite() && **r > 0.0)) {
        return Err(Error::argument(format!("resolution {r} must be positive")));
    }
    let seed = derive_seed(cfg.seed, "community");
    let jobs: Vec<(usize, usize)> = (0..cfg.resolutions.len())
        .flat_map(|i| (0..cfg.runs).map(move |r| (i, r)))
        .collect();
    let results: Vec<(Vec<u32>, f64)> = jobs
        .par_iter()
        .map(|&(i, r)| {
            let gamma = cfg.resolutions[i];
            let mut rng = stream_rng(seed, (i * cfg.runs + r) as u64);
            let a = louvain(g, gamma, &mut rng);
            let q = modularity(g, &a, gamma);
            (a, q)
        })
        .collect();
    let mut out = Vec::with_capacity(cfg.resolutions.len());
    for (i, &gamma) in cfg.resolutions.iter().enumerate() {
        let runs = &results[i * cfg.runs..(i + 1) * cfg.runs];
        let pairs: Vec<(usize, usize)> = (0..runs.len())
            .flat_map(|x| (x + 1..runs.len()).map(move |y| (x, y)))
            .collect();
        let stability = if pairs.is_empty() {
            1.0
        } else {
            pairs
                .par_iter()
                .map(|&(x, y)| adjusted_rand_index(&runs[x].0, &runs[y].0))
                .collect::<Vec<f64>>()
                .iter()
                .sum::<f64>()
                / pairs.len() as f64
        };
        let mut best = 0;
        for (r, run) in runs.iter().enumerate() {
            if run.1 > runs[best].1 + 1e-12 {
                best = r;
            }
        }
        let assignment = runs[best].0.clone();
        let num_communities = assignment.iter().copied().max().map_or(0, |c| c as usize + 1);
        out.push(Partition {
            modularity: modularity(g, &assignment, 1.0),
            quality: runs[best].1,
            assignment,
            resolution: gamma,
            stability,
            num_communities,
        });
    }
    Ok(out)
}

/// Most stable partition; ties go to higher standard modularity, then to
/// lower resolution. Single-community partitions are stable by
/// construction, so they are only chosen when nothing else is available.
pub fn select_partition(partitions: &[Partition]) -> Result<&Partition> {
    let nontrivial: Vec<&Partition> = partitions.iter().filter(|p| p.num_communities > 1).collect();
    let pool: Vec<&Partition> = if nontrivial.is_empty() {
        partitions.iter().collect()
    } else {
        nontrivial
    };
    pool.into_iter()
        .max_by(|a, b| {
            a.stability
                .total_cmp(&b.stability)
                .then(a.modularity.total_cmp(&b.modularity))
                .then(b.resolution.total_cmp(&a.resolution))
        })
        .ok_or_else(|| Error::argument("no partitions to select from"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::UserIdx;

    #[test]
    fn ari_values() {
        assert_eq!(adjusted_rand_index(&[0, 0, 1, 1], &[5, 5, 2, 2]), 1.0);
        assert_eq!(adjusted_rand_index(&[0, 0, 0, 0], &[0, 0, 0, 0]), 1.0);
        assert_eq!(adjusted_rand_index(&[0, 1, 2, 3], &[0, 0, 0, 0]), 0.0);
        // Reference value from scikit-learn's adjusted_rand_score.
        let v = adjusted_rand_index(&[0, 0, 0, 1, 1, 1], &[0, 0, 1, 1, 2, 2]);
        assert!((v - 0.242_424_242_424_242_4).abs() < 1e-12, "{v}");
    }

    #[test]
    fn grid_endpoints() {
        let g = log_grid(0.2, 3.0, 15);
        assert_eq!(g.len(), 15);
        assert!((g[0] - 0.2).abs() < 1e-12 && (g[14] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn empty_graph_errors() {
        let g = UndirectedGraph::from_edges(vec![UserIdx(0)], &[]);
        assert!(detect(&g, &DetectConfig::default()).is_err());
    }

    #[test]
    fn selection_order() {
        let p = |s: f64, q: f64, r: f64, k: usize| Partition {
            assignment: vec![],
            resolution: r,
            quality: 0.0,
            modularity: q,
            stability: s,
            num_communities: k,
        };
        let ps = vec![
            p(1.0, 0.0, 0.2, 1),
            p(0.9, 0.4, 1.0, 3),
            p(0.9, 0.4, 0.5, 4),
            p(0.8, 0.6, 2.0, 5),
        ];
        assert_eq!(select_partition(&ps).unwrap().resolution, 0.5);
        assert!(select_partition(&[]).is_err());
    }
}
