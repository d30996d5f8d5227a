//! Louvain modularity optimization with a resolution parameter.

use rand::seq::SliceRandom;
use rand::Rng;

use super::graph::UndirectedGraph;

const MIN_GAIN: f64 = 1e-12;

/// Generalized modularity `Σ_c [in_c/2m − γ (tot_c/2m)²]`.
pub fn modularity(g: &UndirectedGraph, assignment: &[u32], resolution: f64) -> f64 {
    let m = g.total_weight();
    if m == 0.0 {
        return 0.0;
    }
    let k = assignment.iter().copied().max().map_or(0, |c| c as usize + 1);
    let mut inside = vec![0.0; k];
    let mut tot = vec![0.0; k];
    for v in 0..g.num_nodes() as u32 {
        let c = assignment[v as usize] as usize;
        tot[c] += g.degree(v);
        inside[c] += 2.0 * g.self_weight(v);
        for (u, w) in g.neighbors(v) {
            if assignment[u as usize] as usize == c {
                inside[c] += w;
            }
        }
    }
    inside
        .iter()
        .zip(&tot)
        .map(|(i, t)| i / (2.0 * m) - resolution * (t / (2.0 * m)).powi(2))
        .sum()
}

/// Renumbers labels densely in order of first appearance.
pub fn canonical_labels(assignment: &[u32]) -> Vec<u32> {
    let mut map = std::collections::HashMap::new();
    assignment
        .iter()
        .map(|&c| {
            let next = map.len() as u32;
            *map.entry(c).or_insert(next)
        })
        .collect()
}

/// One local-moving phase. Returns the community of each node and whether
/// anything moved.
fn local_moves<R: Rng>(g: &UndirectedGraph, resolution: f64, rng: &mut R) -> (Vec<u32>, bool) {
    let n = g.num_nodes();
    let m2 = 2.0 * g.total_weight();
    let degree: Vec<f64> = (0..n as u32).map(|v| g.degree(v)).collect();
    let mut comm: Vec<u32> = (0..n as u32).collect();
    let mut tot = degree.clone();
    let mut order: Vec<u32> = (0..n as u32).collect();
    order.shuffle(rng);

    // Scratch space for neighbor-community weights.
    let mut link = vec![0.0f64; n];
    let mut seen = vec![false; n];
    let mut touched: Vec<u32> = Vec::new();
    let mut any_move = false;
    loop {
        let mut moved = false;
        for &v in &order {
            let own = comm[v as usize];
            let kv = degree[v as usize];
            for (u, w) in g.neighbors(v) {
                let c = comm[u as usize];
                if !seen[c as usize] {
                    seen[c as usize] = true;
                    touched.push(c);
                }
                link[c as usize] += w;
            }
            tot[own as usize] -= kv;
            let gain = |c: u32, l: f64| l - resolution * tot[c as usize] * kv / m2;
            let mut best = own;
            let mut best_gain = gain(own, link[own as usize]);
            for &c in &touched {
                let g_c = gain(c, link[c as usize]);
                if g_c > best_gain + MIN_GAIN || (g_c > best_gain - MIN_GAIN && c < best && best != own) {
                    best = c;
                    best_gain = g_c;
                }
            }
            tot[best as usize] += kv;
            if best != own {
                comm[v as usize] = best;
                moved = true;
                any_move = true;
            }
            for &c in &touched {
                link[c as usize] = 0.0;
                seen[c as usize] = false;
            }
            touched.clear();
        }
        if !moved {
            break;
        }
    }
    (canonical_labels(&comm), any_move)
}

/// Collapses each community into one node.
fn aggregate(g: &UndirectedGraph, comm: &[u32]) -> UndirectedGraph {
    let k = comm.iter().copied().max().map_or(0, |c| c as usize + 1);
    let mut edges: Vec<(u32, u32, f64)> = Vec::new();
    for v in 0..g.num_nodes() as u32 {
        let cv = comm[v as usize];
        if g.self_weight(v) > 0.0 {
            edges.push((cv, cv, g.self_weight(v)));
        }
        for (u, w) in g.neighbors(v) {
            if v < u {
                edges.push((cv, comm[u as usize], w));
            }
        }
    }
    let labels = (0..k as u32).map(crate::ingest::UserIdx).collect();
    UndirectedGraph::from_edges(labels, &edges)
}

/// Runs Louvain to convergence. Node visiting order comes from `rng`.
/// Returned labels are dense and numbered by first appearance.
pub fn louvain<R: Rng>(g: &UndirectedGraph, resolution: f64, rng: &mut R) -> Vec<u32> {
    let n = g.num_nodes();
    let mut assignment: Vec<u32> = (0..n as u32).collect();
    if g.total_weight() == 0.0 {
        return assignment;
    }
    let mut level = g.clone();
    loop {
        let (comm, moved) = local_moves(&level, resolution, rng);
        if !moved {
            break;
        }
        for a in assignment.iter_mut() {
            *a = comm[*a as usize];
        }
        level = aggregate(&level, &comm);
        if level.num_nodes() == 1 {
            break;
        }
    }
    canonical_labels(&assignment)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::UserIdx;
    use crate::rng::stream_rng;

    fn clique_pair() -> UndirectedGraph {
        let mut e = Vec::new();
        for base in [0u32, 5] {
            for a in 0..5 {
                for b in a + 1..5 {
                    e.push((base + a, base + b, 1.0));
                }
            }
        }
        e.push((4, 5, 1.0));
        UndirectedGraph::from_edges((0..10).map(UserIdx).collect(), &e)
    }

    #[test]
    fn two_cliques() {
        let g = clique_pair();
        for s in 0..10 {
            let a = louvain(&g, 1.0, &mut stream_rng(s, 0));
            assert_eq!(a, vec![0, 0, 0, 0, 0, 1, 1, 1, 1, 1]);
        }
    }

    #[test]
    fn complete_graph_is_one_community() {
        let mut e = Vec::new();
        for a in 0..6 {
            for b in a + 1..6 {
                e.push((a, b, 1.0));
            }
        }
        let g = UndirectedGraph::from_edges((0..6).map(UserIdx).collect(), &e);
        let a = louvain(&g, 1.0, &mut stream_rng(3, 0));
        assert!(a.iter().all(|&c| c == 0));
    }

    #[test]
    fn modularity_reference() {
        // Two cliques of 5 joined by one edge: m = 21, in = 20 each side.
        let g = clique_pair();
        let q = modularity(&g, &[0, 0, 0, 0, 0, 1, 1, 1, 1, 1], 1.0);
        let expected = 2.0 * (20.0 / 42.0 - (21.0f64 / 42.0).powi(2));
        assert!((q - expected).abs() < 1e-12);
        let singles: Vec<u32> = (0..10).collect();
        assert!(q > modularity(&g, &singles, 1.0));
    }

    #[test]
    fn aggregation_preserves_modularity() {
        let g = clique_pair();
        let comm = vec![0, 0, 1, 1, 1, 2, 2, 2, 3, 3];
        let agg = aggregate(&g, &comm);
        assert!((agg.total_weight() - g.total_weight()).abs() < 1e-12);
        for gamma in [0.5, 1.0, 2.0] {
            let q = modularity(&g, &comm, gamma);
            let qa = modularity(&agg, &[0, 1, 2, 3], gamma);
            assert!((q - qa).abs() < 1e-12);
        }
    }
}
