//! Per-status activity tables: where each account group's news links point,
//! how much of it goes through non-official clients, and how much is
//! original content.

use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ingest::{AccountStatus, CategoryLookup, Corpus, NewsCategory, OfficialLookup, StatusLookup, TweetKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ShareMetric {
    /// Tweets per category, normalized so each group's row sums to 100.
    Category,
    /// Non-official-client tweets per category over the group's categorized activity.
    NonOfficial,
    /// Original tweets per category over the group's categorized activity.
    Original,
}

impl ShareMetric {
    pub fn as_str(self) -> &'static str {
        match self {
            ShareMetric::Category => "category",
            ShareMetric::NonOfficial => "non_official",
            ShareMetric::Original => "original",
        }
    }
}

/// Percentages indexed `[AccountStatus::position][NewsCategory::position]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupCategoryTable {
    pub metric: ShareMetric,
    pub percent: [[f64; 8]; 5],
    /// Categorized tweets authored by each group (the denominator).
    pub totals: [u64; 5],
}

impl GroupCategoryTable {
    pub fn row(&self, status: AccountStatus) -> &[f64; 8] {
        &self.percent[status.position()]
    }

    /// Sum of a group's row: 100 for category shares, otherwise the group's
    /// overall non-official or original share.
    pub fn row_total(&self, status: AccountStatus) -> f64 {
        self.row(status).iter().sum()
    }
}

fn tally(
    corpus: &Corpus,
    statuses: &StatusLookup,
    categories: &CategoryLookup,
    metric: ShareMetric,
    keep: impl Fn(&crate::ingest::TweetRecord) -> bool,
) -> GroupCategoryTable {
    let mut counts = [[0u64; 8]; 5];
    let mut totals = [0u64; 5];
    for r in corpus.records() {
        let (Some(status), Some(cat)) = (statuses.get(r.author), categories.tag(r)) else {
            continue;
        };
        totals[status.position()] += 1;
        if keep(r) {
            counts[status.position()][cat.position()] += 1;
        }
    }
    let mut percent = [[0.0; 8]; 5];
    for s in 0..5 {
        if totals[s] > 0 {
            for c in 0..8 {
                percent[s][c] = 100.0 * counts[s][c] as f64 / totals[s] as f64;
            }
        }
    }
    GroupCategoryTable {
        metric,
        percent,
        totals,
    }
}

/// Share of each group's categorized tweets that falls in each category.
pub fn report_category_shares(
    corpus: &Corpus,
    statuses: &StatusLookup,
    categories: &CategoryLookup,
) -> GroupCategoryTable {
    tally(corpus, statuses, categories, ShareMetric::Category, |_| true)
}

/// Non-official-client tweets per category, over all of the group's
/// categorized tweets from any client.
pub fn report_nonofficial_shares(
    corpus: &Corpus,
    statuses: &StatusLookup,
    official: &OfficialLookup,
    categories: &CategoryLookup,
) -> GroupCategoryTable {
    tally(corpus, statuses, categories, ShareMetric::NonOfficial, |r| {
        !official.is_official(r.client)
    })
}

/// Original tweets per category, over all of the group's categorized tweets.
pub fn report_original_shares(
    corpus: &Corpus,
    statuses: &StatusLookup,
    categories: &CategoryLookup,
) -> GroupCategoryTable {
    tally(corpus, statuses, categories, ShareMetric::Original, |r| {
        r.kind == TweetKind::Original
    })
}

/// One row per status group with a column per category plus the row total.
pub fn write_group_table(table: &GroupCategoryTable, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::validation(format!("{}: {other:?}", path.display())),
    })?;
    let mut header = vec!["status".to_string(), "tweets".into()];
    header.extend(NewsCategory::ALL.iter().map(|c| c.as_str().to_string()));
    header.push("total".into());
    w.write_record(&header)?;
    for s in AccountStatus::ALL {
        let mut rec = vec![s.as_str().to_string(), table.totals[s.position()].to_string()];
        rec.extend(table.row(s).iter().map(|p| format!("{p:.4}")));
        rec.push(format!("{:.4}", table.row_total(s)));
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{CategoryMap, ClientRegistry, ObservationWindow, StatusTable, TweetRow};

    fn row(id: usize, author: &str, kind: &str, domain: &str, client: &str) -> TweetRow {
        TweetRow {
            tweet_id: format!("t{id}"),
            author_id: author.into(),
            timestamp: "2016-09-01T00:00:00Z".into(),
            kind: kind.into(),
            target_user_id: (kind != "original").then(|| "x".into()),
            urls: if domain.is_empty() {
                vec![]
            } else {
                vec![format!("http://{domain}/a")]
            },
            client: client.into(),
            ..Default::default()
        }
    }

    struct Fixture {
        corpus: Corpus,
        statuses: StatusLookup,
        categories: CategoryLookup,
    }

    fn fixture(rows: Vec<TweetRow>) -> Fixture {
        let corpus = Corpus::from_rows(rows, ObservationWindow::unbounded()).unwrap();
        let table = StatusTable::from_pairs([
            ("v", AccountStatus::Verified),
            ("s", AccountStatus::Suspended),
            ("i", AccountStatus::Ira),
        ])
        .unwrap();
        let map = CategoryMap::from_pairs([
            ("fake.test", NewsCategory::Fake),
            ("center.test", NewsCategory::Center),
            ("left.test", NewsCategory::Left),
        ])
        .unwrap();
        Fixture {
            statuses: table.resolve(corpus.users()),
            categories: map.resolve(corpus.symbols()),
            corpus,
        }
    }

    #[test]
    fn single_cell() {
        let f = fixture(vec![row(0, "s", "original", "fake.test", "web")]);
        let t = report_category_shares(&f.corpus, &f.statuses, &f.categories);
        assert_eq!(t.row(AccountStatus::Suspended)[NewsCategory::Fake.position()], 100.0);
        assert_eq!(t.row_total(AccountStatus::Verified), 0.0);
    }

    #[test]
    fn hand_tally() {
        // Verified: 3 center, 1 left, 1 uncategorized. Suspended: 2 fake, 1 center.
        // IRA: 1 left retweet. Unknown author u: ignored.
        let rows = vec![
            row(0, "v", "original", "center.test", "web"),
            row(1, "v", "retweet", "center.test", "bot"),
            row(2, "v", "original", "center.test", "web"),
            row(3, "v", "quote", "left.test", "bot"),
            row(4, "v", "original", "", "web"),
            row(5, "s", "retweet", "fake.test", "bot"),
            row(6, "s", "original", "fake.test", "web"),
            row(7, "s", "reply", "center.test", "web"),
            row(8, "i", "retweet", "left.test", "web"),
            row(9, "u", "original", "fake.test", "web"),
            row(10, "u", "original", "left.test", "bot"),
            row(11, "s", "original", "", "bot"),
        ];
        let f = fixture(rows);
        let shares = report_category_shares(&f.corpus, &f.statuses, &f.categories);
        let v = shares.row(AccountStatus::Verified);
        assert_eq!(v[NewsCategory::Center.position()], 75.0);
        assert_eq!(v[NewsCategory::Left.position()], 25.0);
        let s = shares.row(AccountStatus::Suspended);
        assert!((s[NewsCategory::Fake.position()] - 200.0 / 3.0).abs() < 1e-12);
        for st in [AccountStatus::Verified, AccountStatus::Suspended, AccountStatus::Ira] {
            assert!((shares.row_total(st) - 100.0).abs() < 1e-9);
        }

        let registry = ClientRegistry::new(["web"]);
        let official = OfficialLookup::new(&registry, f.corpus.symbols());
        let non = report_nonofficial_shares(&f.corpus, &f.statuses, &official, &f.categories);
        assert_eq!(non.row(AccountStatus::Verified)[NewsCategory::Center.position()], 25.0);
        assert_eq!(non.row_total(AccountStatus::Verified), 50.0);
        assert_eq!(non.row_total(AccountStatus::Ira), 0.0);

        let orig = report_original_shares(&f.corpus, &f.statuses, &f.categories);
        assert_eq!(orig.row_total(AccountStatus::Verified), 50.0);
        assert!((orig.row(AccountStatus::Suspended)[NewsCategory::Fake.position()] - 100.0 / 3.0).abs() < 1e-12);
        assert_eq!(orig.row_total(AccountStatus::Ira), 0.0);
    }

    #[test]
    fn every_client_official_gives_zeros() {
        let f = fixture(vec![
            row(0, "v", "original", "center.test", "a"),
            row(1, "s", "retweet", "fake.test", "b"),
        ]);
        let official = OfficialLookup::new(&ClientRegistry::new(["a", "b"]), f.corpus.symbols());
        let t = report_nonofficial_shares(&f.corpus, &f.statuses, &official, &f.categories);
        assert!(t.percent.iter().flatten().all(|&p| p == 0.0));
    }

    #[test]
    fn one_in_four_non_official() {
        let f = fixture(vec![
            row(0, "v", "original", "center.test", "web"),
            row(1, "v", "original", "center.test", "web"),
            row(2, "v", "original", "center.test", "web"),
            row(3, "v", "original", "center.test", "feed"),
        ]);
        let official = OfficialLookup::new(&ClientRegistry::new(["web"]), f.corpus.symbols());
        let t = report_nonofficial_shares(&f.corpus, &f.statuses, &official, &f.categories);
        assert_eq!(t.row_total(AccountStatus::Verified), 25.0);
    }

    #[test]
    fn all_retweets_have_no_originals() {
        let f = fixture(vec![
            row(0, "v", "retweet", "center.test", "web"),
            row(1, "s", "retweet", "fake.test", "web"),
        ]);
        let t = report_original_shares(&f.corpus, &f.statuses, &f.categories);
        assert!(t.percent.iter().flatten().all(|&p| p == 0.0));
    }
}
