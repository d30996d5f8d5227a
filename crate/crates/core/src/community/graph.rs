use std::collections::VecDeque;

use crate::ingest::UserIdx;
use crate::netbuild::DirectedGraph;

/// Undirected weighted graph in CSR form. Each edge appears in both
/// endpoint rows; self-loop weight is kept separately per node.
#[derive(Debug, Clone, PartialEq)]
pub struct UndirectedGraph {
    labels: Vec<UserIdx>,
    offsets: Vec<usize>,
    neighbors: Vec<u32>,
    weights: Vec<f64>,
    self_weight: Vec<f64>,
    total_weight: f64,
}

impl UndirectedGraph {
    /// Builds from `(a, b, w)` edges over nodes `0..labels.len()`; parallel
    /// edges are summed and `a == b` becomes self-loop weight.
    pub fn from_edges(labels: Vec<UserIdx>, edges: &[(u32, u32, f64)]) -> Self {
        let n = labels.len();
        let mut self_weight = vec![0.0; n];
        let mut pairs: Vec<(u32, u32, f64)> = Vec::with_capacity(edges.len() * 2);
        for &(a, b, w) in edges {
            assert!((a as usize) < n && (b as usize) < n, "edge endpoint out of range");
            if a == b {
                self_weight[a as usize] += w;
            } else {
                pairs.push((a, b, w));
                pairs.push((b, a, w));
            }
        }
        pairs.sort_unstable_by_key(|&(a, b, _)| (a, b));
        let mut offsets = vec![0usize; n + 1];
        let mut neighbors = Vec::with_capacity(pairs.len());
        let mut weights: Vec<f64> = Vec::with_capacity(pairs.len());
        let mut last: Option<(u32, u32)> = None;
        for (a, b, w) in pairs {
            if last == Some((a, b)) {
                *weights.last_mut().unwrap() += w;
                continue;
            }
            last = Some((a, b));
            offsets[a as usize + 1] += 1;
            neighbors.push(b);
            weights.push(w);
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let total_weight = weights.iter().sum::<f64>() / 2.0 + self_weight.iter().sum::<f64>();
        Self {
            labels,
            offsets,
            neighbors,
            weights,
            self_weight,
            total_weight,
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.labels.len()
    }

    /// Distinct non-loop edges.
    pub fn num_edges(&self) -> usize {
        self.neighbors.len() / 2
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Sum of edge weights, each edge once, loops included.
    pub fn total_weight(&self) -> f64 {
        self.total_weight
    }

    pub fn label(&self, node: u32) -> UserIdx {
        self.labels[node as usize]
    }

    pub fn labels(&self) -> &[UserIdx] {
        &self.labels
    }

    pub fn self_weight(&self, node: u32) -> f64 {
        self.self_weight[node as usize]
    }

    pub fn neighbors(&self, node: u32) -> impl Iterator<Item = (u32, f64)> + '_ {
        let r = self.offsets[node as usize]..self.offsets[node as usize + 1];
        self.neighbors[r.clone()]
            .iter()
            .copied()
            .zip(self.weights[r].iter().copied())
    }

    /// Weighted degree; a loop contributes twice its weight.
    pub fn degree(&self, node: u32) -> f64 {
        self.neighbors(node).map(|(_, w)| w).sum::<f64>() + 2.0 * self.self_weight(node)
    }

    /// Weight between two nodes (0 when absent).
    pub fn weight(&self, a: u32, b: u32) -> f64 {
        if a == b {
            return self.self_weight(a);
        }
        let r = self.offsets[a as usize]..self.offsets[a as usize + 1];
        match self.neighbors[r.clone()].binary_search(&b) {
            Ok(i) => self.weights[r.start + i],
            Err(_) => 0.0,
        }
    }

    /// Subgraph induced by `keep` (node ids ascending), relabeled densely.
    pub fn induced(&self, keep: &[u32]) -> Self {
        let mut local = vec![u32::MAX; self.num_nodes()];
        for (i, &v) in keep.iter().enumerate() {
            local[v as usize] = i as u32;
        }
        let mut edges = Vec::new();
        for &v in keep {
            let lv = local[v as usize];
            if self.self_weight(v) > 0.0 {
                edges.push((lv, lv, self.self_weight(v)));
            }
            for (u, w) in self.neighbors(v) {
                let lu = local[u as usize];
                if lu != u32::MAX && v < u {
                    edges.push((lv, lu, w));
                }
            }
        }
        Self::from_edges(keep.iter().map(|&v| self.label(v)).collect(), &edges)
    }
}

/// Symmetrizes a directed graph: `w(u,v) = w(u→v) + w(v→u)`.
pub fn to_undirected(g: &DirectedGraph) -> UndirectedGraph {
    let edges: Vec<(u32, u32, f64)> = g.edges().map(|(s, t, w)| (s, t, w as f64)).collect();
    UndirectedGraph::from_edges(g.users().to_vec(), &edges)
}

/// Connected component labels by breadth-first search, numbered in order of
/// their smallest node.
pub fn connected_components(g: &UndirectedGraph) -> Vec<u32> {
    let mut comp = vec![u32::MAX; g.num_nodes()];
    let mut next = 0u32;
    let mut queue = VecDeque::new();
    for start in 0..g.num_nodes() as u32 {
        if comp[start as usize] != u32::MAX {
            continue;
        }
        comp[start as usize] = next;
        queue.push_back(start);
        while let Some(v) = queue.pop_front() {
            for (u, _) in g.neighbors(v) {
                if comp[u as usize] == u32::MAX {
                    comp[u as usize] = next;
                    queue.push_back(u);
                }
            }
        }
        next += 1;
    }
    comp
}

/// Largest connected component; ties go to the component with the smallest node.
pub fn largest_component(g: &UndirectedGraph) -> UndirectedGraph {
    if g.is_empty() {
        return g.clone();
    }
    let comp = connected_components(g);
    let k = *comp.iter().max().unwrap() as usize + 1;
    let mut sizes = vec![0usize; k];
    for &c in &comp {
        sizes[c as usize] += 1;
    }
    let best = (0..k).max_by(|&a, &b| sizes[a].cmp(&sizes[b]).then(b.cmp(&a))).unwrap() as u32;
    if sizes[best as usize] == g.num_nodes() {
        return g.clone();
    }
    let keep: Vec<u32> = (0..g.num_nodes() as u32)
        .filter(|&v| comp[v as usize] == best)
        .collect();
    g.induced(&keep)
}
