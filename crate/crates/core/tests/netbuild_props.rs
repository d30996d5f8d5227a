use std::collections::BTreeMap;

use infops_core::ingest::{AccountStatus, Corpus, ObservationWindow, StatusTable, TweetRow};
use infops_core::netbuild::{aggregate_ego, build_interaction_egos, DirectedGraph, SeedSet};
use proptest::prelude::*;

const KINDS: [&str; 4] = ["retweet", "mention", "reply", "quote"];

#[derive(Debug, Clone)]
struct RowPlan {
    author: u8,
    kind: usize,
    target: u8,
    extra_mentions: Vec<u8>,
}

fn to_row(i: usize, s: &RowPlan) -> TweetRow {
    let kind = KINDS[s.kind];
    let mut mentions: Vec<String> = s.extra_mentions.iter().map(|m| format!("u{m}")).collect();
    let target_user_id = if kind == "mention" {
        mentions.push(format!("u{}", s.target));
        None
    } else {
        Some(format!("u{}", s.target))
    };
    TweetRow {
        tweet_id: format!("t{i}"),
        author_id: format!("u{}", s.author),
        timestamp: format!("2016-10-01T00:{:02}:{:02}Z", (i / 60) % 60, i % 60),
        kind: if kind == "mention" {
            "original".into()
        } else {
            kind.into()
        },
        target_user_id,
        mentioned_user_ids: mentions,
        ..Default::default()
    }
}

fn row_plan() -> impl Strategy<Value = RowPlan> {
    (0u8..25, 0usize..4, 0u8..25, prop::collection::vec(0u8..25, 0..3)).prop_map(
        |(author, kind, target, extra_mentions)| RowPlan {
            author,
            kind,
            target,
            extra_mentions,
        },
    )
}

/// Layers and aggregate by user name, so corpora that intern users in a
/// different order can be compared.
fn named_layers(plans: &[RowPlan], order: &[usize]) -> Vec<BTreeMap<(String, String), u32>> {
    let rows: Vec<TweetRow> = order.iter().map(|&i| to_row(i, &plans[i])).collect();
    let corpus = Corpus::from_rows(rows, ObservationWindow::unbounded()).unwrap();
    let table = StatusTable::from_pairs((0..5).map(|s| (format!("u{s}"), AccountStatus::Ira))).unwrap();
    let statuses = table.resolve(corpus.users());
    let seeds = SeedSet::with_status(&statuses, AccountStatus::Ira);
    if seeds.is_empty() {
        return Vec::new();
    }
    let layers = build_interaction_egos(&corpus, &statuses, &seeds).unwrap();
    let refs: Vec<&DirectedGraph> = layers.iter().collect();
    let agg = aggregate_ego(&refs);
    layers
        .iter()
        .chain(std::iter::once(&agg))
        .map(|g| {
            g.canonical_edges(&corpus)
                .into_iter()
                .map(|(s, t, w)| ((s, t), w))
                .collect()
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn row_order_does_not_matter(
        plans in prop::collection::vec(row_plan(), 1..120),
        seed in any::<u64>(),
    ) {
        let forward: Vec<usize> = (0..plans.len()).collect();
        let mut shuffled = forward.clone();
        let mut x = seed | 1;
        for i in (1..shuffled.len()).rev() {
            x ^= x << 13;
            x ^= x >> 7;
            x ^= x << 17;
            shuffled.swap(i, (x % (i as u64 + 1)) as usize);
        }
        prop_assert_eq!(named_layers(&plans, &forward), named_layers(&plans, &shuffled));
    }

    #[test]
    fn aggregate_sums_layers(plans in prop::collection::vec(row_plan(), 1..120)) {
        let order: Vec<usize> = (0..plans.len()).collect();
        let maps = named_layers(&plans, &order);
        if maps.is_empty() {
            return Ok(());
        }
        let mut summed: BTreeMap<(String, String), u32> = BTreeMap::new();
        for layer in &maps[..4] {
            for (k, w) in layer {
                *summed.entry(k.clone()).or_default() += w;
            }
        }
        prop_assert_eq!(&summed, &maps[4]);
    }

    #[test]
    fn mean_in_equals_mean_out(plans in prop::collection::vec(row_plan(), 1..120)) {
        let rows: Vec<TweetRow> = plans.iter().enumerate().map(|(i, s)| to_row(i, s)).collect();
        let corpus = Corpus::from_rows(rows, ObservationWindow::unbounded()).unwrap();
        let table = StatusTable::from_pairs((0..5).map(|s| (format!("u{s}"), AccountStatus::Ira))).unwrap();
        let statuses = table.resolve(corpus.users());
        let seeds = SeedSet::with_status(&statuses, AccountStatus::Ira);
        prop_assume!(!seeds.is_empty());
        for g in build_interaction_egos(&corpus, &statuses, &seeds).unwrap() {
            let n = g.num_nodes() as u32;
            let ins: u64 = (0..n).map(|v| g.in_degree(v) as u64).sum();
            let outs: u64 = (0..n).map(|v| g.out_degree(v) as u64).sum();
            prop_assert_eq!(ins, g.num_edges() as u64);
            prop_assert_eq!(outs, g.num_edges() as u64);
            for (s, t, _) in g.edges() {
                prop_assert_ne!(s, t);
                let seed_end = seeds.contains(g.user(s)) || seeds.contains(g.user(t));
                prop_assert!(seed_end);
            }
        }
    }
}
