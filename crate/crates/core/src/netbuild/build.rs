use rayon::prelude::*;

use super::graph::{DirectedGraph, GraphKind, Interaction};
use crate::error::{Error, Result};
use crate::ingest::{AccountStatus, CategoryLookup, Corpus, NewsCategory, StatusLookup, TweetKind, UserIdx};

/// Membership mask over corpus user indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeedSet {
    mask: Vec<bool>,
    count: usize,
}

impl SeedSet {
    pub fn from_users(num_users: usize, users: impl IntoIterator<Item = UserIdx>) -> Self {
        let mut mask = vec![false; num_users];
        for u in users {
            if let Some(slot) = mask.get_mut(u.index()) {
                *slot = true;
            }
        }
        let count = mask.iter().filter(|b| **b).count();
        Self { mask, count }
    }

    /// All users carrying `status`.
    pub fn with_status(statuses: &StatusLookup, status: AccountStatus) -> Self {
        let mask = statuses.mask(status);
        let count = mask.iter().filter(|b| **b).count();
        Self { mask, count }
    }

    #[inline]
    pub fn contains(&self, u: UserIdx) -> bool {
        self.mask.get(u.index()).copied().unwrap_or(false)
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn union(&self, other: &SeedSet) -> SeedSet {
        let n = self.mask.len().max(other.mask.len());
        let mask: Vec<bool> = (0..n)
            .map(|i| self.mask.get(i).copied().unwrap_or(false) || other.mask.get(i).copied().unwrap_or(false))
            .collect();
        let count = mask.iter().filter(|b| **b).count();
        SeedSet { mask, count }
    }

    pub fn iter(&self) -> impl Iterator<Item = UserIdx> + '_ {
        self.mask
            .iter()
            .enumerate()
            .filter(|(_, b)| **b)
            .map(|(i, _)| UserIdx(i as u32))
    }
}

/// Retweet network for one news category: edge `v → u` when `u` retweeted a
/// tweet of `v` carrying a URL of that category. Unweighted, no self-loops.
pub fn build_category_network(
    corpus: &Corpus,
    statuses: &StatusLookup,
    categories: &CategoryLookup,
    category: NewsCategory,
) -> DirectedGraph {
    let edges = corpus
        .records()
        .iter()
        .filter(|r| r.kind == TweetKind::Retweet)
        .filter(|r| categories.tag(r) == Some(category))
        .filter_map(|r| r.target.map(|v| (v, r.author, 1)))
        .collect();
    DirectedGraph::from_edges(GraphKind::Category(category), edges, statuses, false)
}

/// All eight category networks in [`NewsCategory::ALL`] order.
pub fn build_category_networks(
    corpus: &Corpus,
    statuses: &StatusLookup,
    categories: &CategoryLookup,
) -> Vec<DirectedGraph> {
    let mut buckets: Vec<Vec<(UserIdx, UserIdx, u32)>> = vec![Vec::new(); NewsCategory::ALL.len()];
    for r in corpus.records() {
        if r.kind != TweetKind::Retweet {
            continue;
        }
        if let (Some(v), Some(cat)) = (r.target, categories.tag(r)) {
            buckets[cat.position()].push((v, r.author, 1));
        }
    }
    buckets
        .into_par_iter()
        .enumerate()
        .map(|(i, edges)| DirectedGraph::from_edges(GraphKind::Category(NewsCategory::ALL[i]), edges, statuses, false))
        .collect()
}

/// Visits every `(referenced, actor)` pair of one interaction type.
fn for_each_interaction(corpus: &Corpus, interaction: Interaction, mut f: impl FnMut(UserIdx, UserIdx)) {
    for r in corpus.records() {
        match interaction {
            Interaction::Mention => {
                for m in r.distinct_mentions() {
                    f(m, r.author);
                }
            }
            Interaction::Retweet | Interaction::Reply | Interaction::Quote => {
                let kind = match interaction {
                    Interaction::Retweet => TweetKind::Retweet,
                    Interaction::Reply => TweetKind::Reply,
                    _ => TweetKind::Quote,
                };
                if r.kind == kind {
                    if let Some(t) = r.target {
                        f(t, r.author);
                    }
                }
            }
        }
    }
}

/// Weighted single-interaction ego network around `seeds`.
///
/// Keeps every interaction with at least one seed endpoint; weights count
/// interactions.
pub fn build_interaction_ego(
    corpus: &Corpus,
    statuses: &StatusLookup,
    seeds: &SeedSet,
    interaction: Interaction,
) -> Result<DirectedGraph> {
    if seeds.is_empty() {
        return Err(Error::argument("ego network seed set is empty"));
    }
    let mut edges = Vec::new();
    for_each_interaction(corpus, interaction, |v, u| {
        if seeds.contains(v) || seeds.contains(u) {
            edges.push((v, u, 1));
        }
    });
    Ok(DirectedGraph::from_edges(
        GraphKind::InteractionEgo(interaction),
        edges,
        statuses,
        true,
    ))
}

/// The four interaction ego networks in [`Interaction::ALL`] order.
pub fn build_interaction_egos(corpus: &Corpus, statuses: &StatusLookup, seeds: &SeedSet) -> Result<Vec<DirectedGraph>> {
    Interaction::ALL
        .par_iter()
        .map(|&i| build_interaction_ego(corpus, statuses, seeds, i))
        .collect()
}

/// Union of interaction layers with weights summed per ordered pair.
pub fn aggregate_ego(layers: &[&DirectedGraph]) -> DirectedGraph {
    DirectedGraph::union_sum(GraphKind::Aggregated, layers)
}

/// Suspended accounts present in a graph.
pub fn suspended_nodes(graph: &DirectedGraph) -> Vec<UserIdx> {
    (0..graph.num_nodes() as u32)
        .filter(|&n| graph.status(n) == Some(AccountStatus::Suspended))
        .map(|n| graph.user(n))
        .collect()
}

/// Aggregated ego network seeded by the IRA set plus the suspended accounts
/// found in the IRA ego network.
pub fn build_expanded_ego(
    corpus: &Corpus,
    statuses: &StatusLookup,
    ira: &SeedSet,
    suspended_in_ego: &[UserIdx],
) -> Result<(DirectedGraph, Vec<DirectedGraph>)> {
    let extra = SeedSet::from_users(corpus.num_users(), suspended_in_ego.iter().copied());
    let seeds = ira.union(&extra);
    let layers = build_interaction_egos(corpus, statuses, &seeds)?;
    let refs: Vec<&DirectedGraph> = layers.iter().collect();
    let graph = DirectedGraph::union_sum(GraphKind::Expanded, &refs);
    Ok((graph, layers))
}
