//! Synthetic election-season corpora.
//!
//! [`generate`] simulates a small polarized population: two camps with
//! homophilous retweeting, camp-specific hashtags and outlets, a diurnal
//! activity cycle, and seed accounts whose posts draw extra reactions a few
//! bins later. [`write_scale_corpus`] streams a large corpus of unique
//! interactions for memory testing without holding it in memory.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::distr::weighted::WeightedIndex;
use rand::seq::index;
use rand::Rng;
use rand_distr::{Distribution, Pareto, Poisson};

use crate::error::{Error, Result};
use crate::ingest::{AccountStatus, NewsCategory, Timestamp, TweetRow};
use crate::pipeline::{InputConfig, PipelineConfig};
use crate::rng::{derive_seed, stream_rng, ChaCha8Rng};
use crate::stance::Camp;

/// 2016-09-01T00:00:00Z.
const START: i64 = 1_472_688_000;

const OFFICIAL: [&str; 3] = ["Twitter for iPhone", "Twitter for Android", "Twitter Web Client"];
const AUTOMATED: [&str; 4] = ["dlvr.it", "IFTTT", "twitterfeed", "Hootsuite"];

/// Hashtags per camp. The first three of each list form the seed lexicon;
/// the rest are only learnable through co-occurrence.
const TRUMP_TAGS: [&str; 6] = [
    "maga",
    "trump2016",
    "crookedhillary",
    "trumptrain",
    "draintheswamp",
    "lockherup",
];
const CLINTON_TAGS: [&str; 6] = [
    "imwithher",
    "strongertogether",
    "nevertrump",
    "hillary2016",
    "lovetrumpshate",
    "votehillary",
];
const NEUTRAL_TAGS: [&str; 3] = ["election2016", "debates", "vote"];
const SEED_TAGS: usize = 3;

/// Outlet mix per lean, in [`NewsCategory::ALL`] order.
const TRUMP_MIX: [f64; 8] = [0.22, 0.22, 0.2, 0.14, 0.12, 0.05, 0.03, 0.02];
const CLINTON_MIX: [f64; 8] = [0.03, 0.03, 0.05, 0.09, 0.28, 0.24, 0.18, 0.1];
const NEUTRAL_MIX: [f64; 8] = [0.08, 0.08, 0.1, 0.14, 0.3, 0.14, 0.1, 0.06];
const DOMAINS_PER_CATEGORY: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub users: usize,
    pub tweets: usize,
    pub days: u32,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            users: 900,
            tweets: 5000,
            days: 7,
            seed: 20161108,
        }
    }
}

/// Corpus plus the side tables the pipeline needs.
#[derive(Debug, Clone)]
pub struct SyntheticDataset {
    pub rows: Vec<TweetRow>,
    /// Users absent from this table are unlabeled.
    pub statuses: Vec<(String, AccountStatus)>,
    pub categories: Vec<(String, NewsCategory)>,
    pub official_clients: Vec<String>,
    pub lexicon: Vec<(String, Camp)>,
    pub window: (Timestamp, Timestamp),
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Lean {
    Trump,
    Clinton,
    Neutral,
}

struct User {
    status: Option<AccountStatus>,
    lean: Lean,
    /// Probability that a post carries camp hashtags.
    fervor: f64,
    automation: f64,
    /// Mean reactions a post by this user attracts.
    reach: f64,
}

fn domain(cat: NewsCategory, k: usize) -> String {
    format!("{}-{k}.example", cat.as_str().replace('_', "-"))
}

fn draw_users(cfg: &SynthConfig, rng: &mut ChaCha8Rng) -> Vec<User> {
    let statuses = [
        (Some(AccountStatus::Ira), 0.015),
        (Some(AccountStatus::Suspended), 0.1),
        (Some(AccountStatus::Verified), 0.1),
        (Some(AccountStatus::NotFound), 0.1),
        (Some(AccountStatus::NotVerified), 0.635),
        (None, 0.05),
    ];
    let pick = WeightedIndex::new(statuses.iter().map(|s| s.1)).expect("positive weights");
    (0..cfg.users)
        .map(|_| {
            let status = statuses[pick.sample(rng)].0;
            let (p_trump, p_clinton) = match status {
                Some(AccountStatus::Ira) => (0.55, 0.3),
                Some(AccountStatus::Suspended) => (0.6, 0.2),
                _ => (0.35, 0.4),
            };
            let u: f64 = rng.random();
            let lean = if u < p_trump {
                Lean::Trump
            } else if u < p_trump + p_clinton {
                Lean::Clinton
            } else {
                Lean::Neutral
            };
            let fervor = if rng.random_bool(0.15) { 0.85 } else { 0.35 };
            let automation = match status {
                Some(AccountStatus::Ira | AccountStatus::Suspended | AccountStatus::Verified) => 0.25,
                _ => 0.1,
            };
            let reach = match status {
                Some(AccountStatus::Ira) => 3.0,
                Some(AccountStatus::Suspended) => 2.0,
                Some(AccountStatus::Verified) => 1.5,
                _ => 0.8,
            };
            User {
                status,
                lean,
                fervor,
                automation,
                reach,
            }
        })
        .collect()
}

struct Post {
    bin: usize,
    author: usize,
    kind: &'static str,
    target: Option<usize>,
    mentions: Vec<usize>,
    url: Option<String>,
    hashtags: Vec<String>,
}

struct Generator<'a> {
    users: &'a [User],
    activity: WeightedIndex<f64>,
    /// Activity samplers restricted to each lean.
    by_lean: [(Vec<usize>, WeightedIndex<f64>); 3],
    mixes: [WeightedIndex<f64>; 3],
}

fn lean_slot(l: Lean) -> usize {
    match l {
        Lean::Trump => 0,
        Lean::Clinton => 1,
        Lean::Neutral => 2,
    }
}

impl Generator<'_> {
    fn same_lean(&self, lean: Lean, rng: &mut ChaCha8Rng) -> usize {
        let (ids, w) = &self.by_lean[lean_slot(lean)];
        ids[w.sample(rng)]
    }

    fn hashtags(&self, user: usize, rng: &mut ChaCha8Rng) -> Vec<String> {
        let u = &self.users[user];
        let mut tags = Vec::new();
        let (own, other): (&[&str], &[&str]) = match u.lean {
            Lean::Trump => (&TRUMP_TAGS, &CLINTON_TAGS),
            Lean::Clinton => (&CLINTON_TAGS, &TRUMP_TAGS),
            Lean::Neutral => (&NEUTRAL_TAGS, &NEUTRAL_TAGS),
        };
        if rng.random_bool(u.fervor) {
            tags.push(own[rng.random_range(0..own.len())].to_string());
            if rng.random_bool(0.5) {
                tags.push(own[rng.random_range(0..own.len())].to_string());
            }
        }
        // Occasional off-camp posts carry only the other camp's tag.
        if u.lean != Lean::Neutral && rng.random_bool(0.04) {
            tags = vec![other[rng.random_range(0..other.len())].to_string()];
        }
        if rng.random_bool(0.15) {
            tags.push(NEUTRAL_TAGS[rng.random_range(0..NEUTRAL_TAGS.len())].to_string());
        }
        tags.sort();
        tags.dedup();
        tags
    }

    fn url(&self, user: usize, rng: &mut ChaCha8Rng) -> Option<String> {
        if !rng.random_bool(0.75) {
            return None;
        }
        let cat = NewsCategory::ALL[self.mixes[lean_slot(self.users[user].lean)].sample(rng)];
        let k = rng.random_range(0..DOMAINS_PER_CATEGORY);
        Some(format!(
            "https://www.{}/story/{}",
            domain(cat, k),
            rng.random_range(0..100_000u32)
        ))
    }

    fn mentions(&self, user: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
        if !rng.random_bool(0.2) {
            return vec![];
        }
        (0..rng.random_range(1..=2))
            .map(|_| self.same_lean(self.users[user].lean, rng))
            .filter(|&m| m != user)
            .collect()
    }

    fn root(&self, bin: usize, rng: &mut ChaCha8Rng) -> Post {
        let author = self.activity.sample(rng);
        let mentions = self.mentions(author, rng);
        let kind = if !mentions.is_empty() && rng.random_bool(0.3) {
            "mention-carrier"
        } else {
            "original"
        };
        Post {
            bin,
            author,
            kind,
            target: None,
            mentions,
            url: self.url(author, rng),
            hashtags: self.hashtags(author, rng),
        }
    }

    fn reaction(&self, root: &Post, rng: &mut ChaCha8Rng) -> Post {
        let lean = self.users[root.author].lean;
        let mut author = if lean != Lean::Neutral && rng.random_bool(0.8) {
            self.same_lean(lean, rng)
        } else {
            self.activity.sample(rng)
        };
        if author == root.author {
            author = self.activity.sample(rng);
        }
        let bin = root.bin + 1 + rng.random_range(0..3usize).min(rng.random_range(0..3usize));
        let u: f64 = rng.random();
        if u < 0.7 {
            Post {
                bin,
                author,
                kind: "retweet",
                target: Some(root.author),
                mentions: vec![],
                url: root.url.clone(),
                hashtags: root.hashtags.clone(),
            }
        } else {
            let kind = if u < 0.85 { "reply" } else { "quote" };
            Post {
                bin,
                author,
                kind,
                target: Some(root.author),
                mentions: self.mentions(author, rng),
                url: if rng.random_bool(0.5) {
                    root.url.clone()
                } else {
                    self.url(author, rng)
                },
                hashtags: self.hashtags(author, rng),
            }
        }
    }
}

/// Simulates a corpus of exactly `cfg.tweets` tweets.
pub fn generate(cfg: &SynthConfig) -> Result<SyntheticDataset> {
    if cfg.users < 50 || cfg.tweets == 0 || cfg.days < 2 {
        return Err(Error::argument(
            "synthetic corpus needs at least 50 users, 1 tweet and 2 days",
        ));
    }
    let mut rng = stream_rng(derive_seed(cfg.seed, "synth"), 0);
    let users = draw_users(cfg, &mut rng);
    let pareto = Pareto::new(1.0, 1.6).expect("valid Pareto");
    let weights: Vec<f64> = users
        .iter()
        .map(|u| {
            let w: f64 = pareto.sample(&mut rng);
            let boost = if u.status == Some(AccountStatus::Ira) { 3.0 } else { 1.0 };
            w.min(50.0) * boost
        })
        .collect();
    let by_lean = [Lean::Trump, Lean::Clinton, Lean::Neutral].map(|l| {
        let ids: Vec<usize> = (0..users.len()).filter(|&i| users[i].lean == l).collect();
        let w = WeightedIndex::new(ids.iter().map(|&i| weights[i])).expect("every lean populated");
        (ids, w)
    });
    let generator = Generator {
        users: &users,
        activity: WeightedIndex::new(&weights).expect("positive weights"),
        by_lean,
        mixes: [TRUMP_MIX, CLINTON_MIX, NEUTRAL_MIX].map(|m| WeightedIndex::new(m).expect("valid mix")),
    };

    // Oversample, then keep exactly `tweets` posts.
    let bins = cfg.days as usize * 96;
    let mean_reach = users.iter().map(|u| u.reach).sum::<f64>() / users.len() as f64;
    let base = 1.3 * cfg.tweets as f64 / (bins as f64 * (1.0 + mean_reach));
    let mut posts: Vec<Post> = Vec::new();
    for bin in 0..bins {
        let phase = 2.0 * std::f64::consts::PI * (bin % 96) as f64 / 96.0;
        let rate = base * (1.0 + 0.7 * phase.sin());
        let roots = Poisson::new(rate.max(1e-9)).expect("positive rate").sample(&mut rng) as usize;
        for _ in 0..roots {
            let root = generator.root(bin, &mut rng);
            let reach = users[root.author].reach;
            let reactions = Poisson::new(reach).expect("positive reach").sample(&mut rng) as usize;
            for _ in 0..reactions {
                let r = generator.reaction(&root, &mut rng);
                if r.bin < bins {
                    posts.push(r);
                }
            }
            posts.push(root);
        }
    }
    if posts.len() < cfg.tweets {
        return Err(Error::numerical(format!(
            "simulation produced {} posts, fewer than the {} requested",
            posts.len(),
            cfg.tweets
        )));
    }
    let mut keep = index::sample(&mut rng, posts.len(), cfg.tweets).into_vec();
    keep.sort_unstable();
    let mut timed: Vec<(i64, usize)> = keep
        .into_iter()
        .map(|i| (START + posts[i].bin as i64 * 900 + rng.random_range(0..900), i))
        .collect();
    timed.sort_unstable();

    let name = |i: usize| format!("u{i:05}");
    let rows = timed
        .iter()
        .enumerate()
        .map(|(n, &(t, i))| {
            let p = &posts[i];
            let u = &users[p.author];
            let client = if rng.random_bool(u.automation) {
                AUTOMATED[rng.random_range(0..AUTOMATED.len())]
            } else {
                OFFICIAL[rng.random_range(0..OFFICIAL.len())]
            };
            TweetRow {
                tweet_id: format!("{:012}", 780_000_000_000u64 + n as u64),
                author_id: name(p.author),
                timestamp: Timestamp(t).to_rfc3339(),
                kind: p.kind.to_string(),
                target_user_id: p.target.map(name),
                mentioned_user_ids: p.mentions.iter().map(|&m| name(m)).collect(),
                urls: p.url.iter().cloned().collect(),
                hashtags: p.hashtags.clone(),
                client: client.to_string(),
            }
        })
        .collect();

    let statuses = users
        .iter()
        .enumerate()
        .filter_map(|(i, u)| u.status.map(|s| (name(i), s)))
        .collect();
    let categories = NewsCategory::ALL
        .iter()
        .flat_map(|&c| (0..DOMAINS_PER_CATEGORY).map(move |k| (domain(c, k), c)))
        .collect();
    let lexicon = TRUMP_TAGS[..SEED_TAGS]
        .iter()
        .map(|t| (t.to_string(), Camp::Trump))
        .chain(CLINTON_TAGS[..SEED_TAGS].iter().map(|t| (t.to_string(), Camp::Clinton)))
        .collect();
    Ok(SyntheticDataset {
        rows,
        statuses,
        categories,
        official_clients: OFFICIAL.iter().map(|s| s.to_string()).collect(),
        lexicon,
        window: (Timestamp(START), Timestamp(START + cfg.days as i64 * 86_400 - 1)),
    })
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(|f| BufWriter::with_capacity(1 << 20, f))
        .map_err(|e| Error::io(path, e))
}

fn input_paths(dir: &Path) -> [PathBuf; 5] {
    [
        "tweets.csv",
        "statuses.csv",
        "categories.csv",
        "clients.txt",
        "lexicon.csv",
    ]
    .map(|f| dir.join(f))
}

fn write_side_tables(
    dir: &Path,
    statuses: impl Iterator<Item = (String, AccountStatus)>,
    categories: &[(String, NewsCategory)],
    clients: &[String],
    lexicon: &[(String, Camp)],
) -> Result<()> {
    let [_, st, cat, cl, lex] = input_paths(dir);
    let mut w = csv::Writer::from_writer(create(&st)?);
    w.write_record(["user_id", "status"])?;
    for (u, s) in statuses {
        w.write_record([u.as_str(), s.as_str()])?;
    }
    w.flush().map_err(|e| Error::io(&st, e))?;

    let mut w = csv::Writer::from_writer(create(&cat)?);
    w.write_record(["domain", "category"])?;
    for (d, c) in categories {
        w.write_record([d.as_str(), c.as_str()])?;
    }
    w.flush().map_err(|e| Error::io(&cat, e))?;

    let mut out = create(&cl)?;
    for c in clients {
        writeln!(out, "{c}").map_err(|e| Error::io(&cl, e))?;
    }
    out.flush().map_err(|e| Error::io(&cl, e))?;

    let mut out = create(&lex)?;
    writeln!(out, "hashtag,camp").map_err(|e| Error::io(&lex, e))?;
    for (t, c) in lexicon {
        writeln!(out, "{t},{}", c.as_str()).map_err(|e| Error::io(&lex, e))?;
    }
    out.flush().map_err(|e| Error::io(&lex, e))
}

fn write_config(dir: &Path, cfg: &PipelineConfig) -> Result<()> {
    let path = dir.join("config.toml");
    let text = toml::to_string_pretty(cfg).map_err(|e| Error::validation(e.to_string()))?;
    std::fs::write(&path, text).map_err(|e| Error::io(&path, e))
}

fn relative_inputs() -> InputConfig {
    InputConfig {
        corpus: "tweets.csv".into(),
        statuses: "statuses.csv".into(),
        categories: "categories.csv".into(),
        clients: "clients.txt".into(),
        lexicon: Some("lexicon.csv".into()),
        window_start: None,
        window_end: None,
    }
}

/// Writes the dataset's input files and a matching `config.toml` into `dir`.
pub fn write_dataset(ds: &SyntheticDataset, seed: u64, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let [tweets, ..] = input_paths(dir);
    let mut w = csv::Writer::from_writer(create(&tweets)?);
    w.write_record([
        "tweet_id",
        "author_id",
        "timestamp",
        "kind",
        "target_user_id",
        "mentioned_user_ids",
        "urls",
        "hashtags",
        "client",
    ])?;
    for r in &ds.rows {
        w.write_record([
            r.tweet_id.as_str(),
            &r.author_id,
            &r.timestamp,
            &r.kind,
            r.target_user_id.as_deref().unwrap_or(""),
            &r.mentioned_user_ids.join(";"),
            &r.urls.join(";"),
            &r.hashtags.join(";"),
            &r.client,
        ])?;
    }
    w.flush().map_err(|e| Error::io(&tweets, e))?;
    write_side_tables(
        dir,
        ds.statuses.iter().cloned(),
        &ds.categories,
        &ds.official_clients,
        &ds.lexicon,
    )?;
    let mut cfg = PipelineConfig {
        seed,
        input: relative_inputs(),
        ..Default::default()
    };
    cfg.input.window_start = Some(ds.window.0.to_rfc3339());
    cfg.input.window_end = Some(ds.window.1.to_rfc3339());
    write_config(dir, &cfg)
}

/// Size of a streamed scale corpus.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScaleSummary {
    pub rows: u64,
    pub seeds: u64,
    pub others: u64,
}

/// Streams `edges` interactions, each between one of 1,000 seed accounts and
/// one ordinary account, with every `(seed, other)` pair used once. The
/// aggregated seed ego network therefore has exactly `edges` edges.
pub fn write_scale_corpus(dir: &Path, edges: u64, seed: u64) -> Result<ScaleSummary> {
    if edges == 0 {
        return Err(Error::argument("scale corpus needs at least one edge"));
    }
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let seeds = 1000u64.min(edges);
    let others = edges.div_ceil(seeds);
    let [tweets, ..] = input_paths(dir);
    let mut out = create(&tweets)?;
    let io = |e| Error::io(&tweets, e);
    writeln!(
        out,
        "tweet_id,author_id,timestamp,kind,target_user_id,mentioned_user_ids,urls,hashtags,client"
    )
    .map_err(io)?;
    let mut rng = stream_rng(derive_seed(seed, "scale"), 0);
    let span = 7 * 86_400;
    for p in 0..edges {
        let (s, o) = (p % seeds, p / seeds);
        let seed_acts = rng.random_bool(0.5);
        let (author, other) = if seed_acts {
            (format!("i{s}"), format!("u{o}"))
        } else {
            (format!("u{o}"), format!("i{s}"))
        };
        let t = START + rng.random_range(0..span);
        let client = if rng.random_bool(0.1) {
            AUTOMATED[0]
        } else {
            OFFICIAL[0]
        };
        match p % 4 {
            0 => {
                let url = if p % 40 == 0 {
                    let cat = NewsCategory::ALL[(p / 40 % 8) as usize];
                    domain(cat, 0)
                } else {
                    String::new()
                };
                writeln!(out, "{p},{author},{t},retweet,{other},,{url},,{client}").map_err(io)?
            }
            1 => writeln!(out, "{p},{author},{t},mention,,{other},,,{client}").map_err(io)?,
            2 => writeln!(out, "{p},{author},{t},reply,{other},,,,{client}").map_err(io)?,
            _ => writeln!(out, "{p},{author},{t},quote,{other},,,,{client}").map_err(io)?,
        }
    }
    out.flush().map_err(io)?;
    let statuses =
        (0..seeds)
            .map(|s| (format!("i{s}"), AccountStatus::Ira))
            .chain((0..others).filter(|o| o % 10 == 0).map(|o| {
                let s = [
                    AccountStatus::Suspended,
                    AccountStatus::Verified,
                    AccountStatus::NotVerified,
                ][(o / 10 % 3) as usize];
                (format!("u{o}"), s)
            }));
    let categories: Vec<(String, NewsCategory)> = NewsCategory::ALL.iter().map(|&c| (domain(c, 0), c)).collect();
    let clients = vec![OFFICIAL[0].to_string()];
    let lexicon = vec![
        ("maga".to_string(), Camp::Trump),
        ("imwithher".to_string(), Camp::Clinton),
    ];
    write_side_tables(dir, statuses, &categories, &clients, &lexicon)?;
    let mut cfg = PipelineConfig {
        seed,
        input: relative_inputs(),
        ..Default::default()
    };
    cfg.netbuild.write_edge_lists = false;
    write_config(dir, &cfg)?;
    Ok(ScaleSummary {
        rows: edges,
        seeds,
        others,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{Corpus, ObservationWindow};

    #[test]
    fn exact_size_and_reproducible() {
        let cfg = SynthConfig {
            users: 200,
            tweets: 800,
            days: 3,
            seed: 5,
        };
        let a = generate(&cfg).unwrap();
        let b = generate(&cfg).unwrap();
        assert_eq!(a.rows.len(), 800);
        assert_eq!(a.rows, b.rows);
        let window = ObservationWindow::new(a.window.0, a.window.1).unwrap();
        let corpus = Corpus::from_rows(a.rows.clone(), window).unwrap();
        assert_eq!(corpus.len(), 800);
        assert!(a.rows.windows(2).all(|w| w[0].timestamp <= w[1].timestamp));
        assert!(a.statuses.iter().any(|(_, s)| *s == AccountStatus::Ira));
    }

    #[test]
    fn scale_corpus_pairs_are_unique() {
        let dir = tempfile::tempdir().unwrap();
        let s = write_scale_corpus(dir.path(), 2500, 1).unwrap();
        assert_eq!((s.seeds, s.others), (1000, 3));
        let text = std::fs::read_to_string(dir.path().join("tweets.csv")).unwrap();
        let mut pairs = std::collections::HashSet::new();
        for line in text.lines().skip(1) {
            let f: Vec<&str> = line.split(',').collect();
            let other = if f[4].is_empty() { f[5] } else { f[4] };
            let mut key = [f[1], other];
            key.sort();
            assert!(pairs.insert((key[0].to_string(), key[1].to_string())));
        }
        assert_eq!(pairs.len(), 2500);
        assert!(dir.path().join("config.toml").exists());
    }
}
