use std::fmt;

use serde::{Deserialize, Serialize};

use crate::ingest::{AccountStatus, Corpus, NewsCategory, StatusLookup, UserIdx};

/// Interaction type of an ego network layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Interaction {
    Retweet,
    Mention,
    Reply,
    Quote,
}

impl Interaction {
    pub const ALL: [Interaction; 4] = [
        Interaction::Retweet,
        Interaction::Mention,
        Interaction::Reply,
        Interaction::Quote,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Interaction::Retweet => "retweet",
            Interaction::Mention => "mention",
            Interaction::Reply => "reply",
            Interaction::Quote => "quote",
        }
    }
}

impl fmt::Display for Interaction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GraphKind {
    Category(NewsCategory),
    InteractionEgo(Interaction),
    Aggregated,
    Expanded,
}

impl fmt::Display for GraphKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphKind::Category(c) => write!(f, "category:{c}"),
            GraphKind::InteractionEgo(i) => write!(f, "ego:{i}"),
            GraphKind::Aggregated => f.write_str("aggregated"),
            GraphKind::Expanded => f.write_str("expanded"),
        }
    }
}

/// Directed weighted graph over a subset of corpus users.
///
/// Nodes are dense local indices `0..N` sorted by corpus user index; edges are
/// stored as compressed out-adjacency rows. Edges point from the referenced
/// account (information origin) to the acting account.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectedGraph {
    kind: GraphKind,
    users: Vec<UserIdx>,
    status: Vec<Option<AccountStatus>>,
    offsets: Vec<usize>,
    targets: Vec<u32>,
    weights: Vec<u32>,
    in_degree: Vec<u32>,
}

impl DirectedGraph {
    /// Builds a graph from `(source, target, weight)` triples in corpus user space.
    ///
    /// Self-loops are dropped. Repeated pairs are summed when `weighted`,
    /// otherwise collapsed into a single unit-weight edge.
    pub fn from_edges(
        kind: GraphKind,
        mut edges: Vec<(UserIdx, UserIdx, u32)>,
        statuses: &StatusLookup,
        weighted: bool,
    ) -> Self {
        edges.retain(|(s, t, w)| s != t && *w > 0);
        edges.sort_unstable_by_key(|&(s, t, _)| (s, t));
        let mut merged: Vec<(UserIdx, UserIdx, u32)> = Vec::with_capacity(edges.len());
        for (s, t, w) in edges {
            match merged.last_mut() {
                Some(last) if last.0 == s && last.1 == t => {
                    if weighted {
                        last.2 = last.2.saturating_add(w);
                    }
                }
                _ => merged.push((s, t, if weighted { w } else { 1 })),
            }
        }
        Self::from_sorted_unique(kind, merged, |u| statuses.get(u))
    }

    fn from_sorted_unique(
        kind: GraphKind,
        edges: Vec<(UserIdx, UserIdx, u32)>,
        status_of: impl Fn(UserIdx) -> Option<AccountStatus>,
    ) -> Self {
        let mut users: Vec<UserIdx> = edges.iter().flat_map(|&(s, t, _)| [s, t]).collect();
        users.sort_unstable();
        users.dedup();
        let local = |u: UserIdx| users.binary_search(&u).expect("endpoint registered") as u32;
        let n = users.len();
        let mut offsets = vec![0usize; n + 1];
        let mut targets = Vec::with_capacity(edges.len());
        let mut weights = Vec::with_capacity(edges.len());
        let mut in_degree = vec![0u32; n];
        for &(s, t, w) in &edges {
            let (ls, lt) = (local(s), local(t));
            offsets[ls as usize + 1] += 1;
            targets.push(lt);
            weights.push(w);
            in_degree[lt as usize] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let status = users.iter().map(|&u| status_of(u)).collect();
        Self {
            kind,
            users,
            status,
            offsets,
            targets,
            weights,
            in_degree,
        }
    }

    pub fn kind(&self) -> GraphKind {
        self.kind
    }

    pub fn num_nodes(&self) -> usize {
        self.users.len()
    }

    pub fn num_edges(&self) -> usize {
        self.targets.len()
    }

    pub fn total_weight(&self) -> u64 {
        self.weights.iter().map(|&w| w as u64).sum()
    }

    pub fn user(&self, node: u32) -> UserIdx {
        self.users[node as usize]
    }

    pub fn users(&self) -> &[UserIdx] {
        &self.users
    }

    pub fn status(&self, node: u32) -> Option<AccountStatus> {
        self.status[node as usize]
    }

    pub fn node_of(&self, user: UserIdx) -> Option<u32> {
        self.users.binary_search(&user).ok().map(|i| i as u32)
    }

    pub fn out_degree(&self, node: u32) -> u32 {
        let n = node as usize;
        (self.offsets[n + 1] - self.offsets[n]) as u32
    }

    pub fn in_degree(&self, node: u32) -> u32 {
        self.in_degree[node as usize]
    }

    /// `(target, weight)` pairs leaving `node`.
    pub fn out_edges(&self, node: u32) -> impl Iterator<Item = (u32, u32)> + '_ {
        let n = node as usize;
        let range = self.offsets[n]..self.offsets[n + 1];
        self.targets[range.clone()]
            .iter()
            .copied()
            .zip(self.weights[range].iter().copied())
    }

    /// All `(source, target, weight)` edges in local node ids.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32, u32)> + '_ {
        (0..self.num_nodes() as u32).flat_map(move |s| self.out_edges(s).map(move |(t, w)| (s, t, w)))
    }

    /// Edges in corpus user space.
    pub fn user_edges(&self) -> impl Iterator<Item = (UserIdx, UserIdx, u32)> + '_ {
        self.edges().map(move |(s, t, w)| (self.user(s), self.user(t), w))
    }

    /// Weight of edge `source → target`, if present.
    pub fn weight(&self, source: UserIdx, target: UserIdx) -> Option<u32> {
        let s = self.node_of(source)?;
        let t = self.node_of(target)?;
        let n = s as usize;
        let row = &self.targets[self.offsets[n]..self.offsets[n + 1]];
        row.binary_search(&t).ok().map(|i| self.weights[self.offsets[n] + i])
    }

    /// Edges keyed by user names, sorted; independent of corpus interning order.
    pub fn canonical_edges(&self, corpus: &Corpus) -> Vec<(String, String, u32)> {
        let mut out: Vec<_> = self
            .user_edges()
            .map(|(s, t, w)| (corpus.user_name(s).to_string(), corpus.user_name(t).to_string(), w))
            .collect();
        out.sort();
        out
    }

    /// Sums weights over several graphs sharing one corpus user space.
    pub(crate) fn union_sum(kind: GraphKind, graphs: &[&DirectedGraph]) -> Self {
        let mut edges: Vec<(UserIdx, UserIdx, u32)> = graphs
            .iter()
            .flat_map(|g| g.user_edges())
            .filter(|(s, t, _)| s != t)
            .collect();
        edges.sort_unstable_by_key(|&(s, t, _)| (s, t));
        let mut merged: Vec<(UserIdx, UserIdx, u32)> = Vec::with_capacity(edges.len());
        for (s, t, w) in edges {
            match merged.last_mut() {
                Some(last) if last.0 == s && last.1 == t => last.2 = last.2.saturating_add(w),
                _ => merged.push((s, t, w)),
            }
        }
        let status_of = |u: UserIdx| graphs.iter().find_map(|g| g.node_of(u).map(|n| g.status(n))).flatten();
        Self::from_sorted_unique(kind, merged, status_of)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lookup(n: usize) -> StatusLookup {
        StatusLookup(vec![None; n])
    }

    #[test]
    fn dedup_and_self_loops() {
        let u = UserIdx;
        let g = DirectedGraph::from_edges(
            GraphKind::Aggregated,
            vec![(u(1), u(2), 1), (u(1), u(2), 1), (u(3), u(3), 1), (u(2), u(1), 1)],
            &lookup(4),
            false,
        );
        assert_eq!(g.num_nodes(), 2);
        assert_eq!(g.num_edges(), 2);
        assert_eq!(g.weight(u(1), u(2)), Some(1));
        assert_eq!(g.weight(u(3), u(3)), None);
    }

    #[test]
    fn weighted_sums() {
        let u = UserIdx;
        let g = DirectedGraph::from_edges(
            GraphKind::Aggregated,
            vec![(u(5), u(2), 1), (u(5), u(2), 2), (u(2), u(9), 4)],
            &lookup(10),
            true,
        );
        assert_eq!(g.weight(u(5), u(2)), Some(3));
        assert_eq!(g.total_weight(), 7);
        let n2 = g.node_of(u(2)).unwrap();
        assert_eq!(g.in_degree(n2), 1);
        assert_eq!(g.out_degree(n2), 1);
    }
}
