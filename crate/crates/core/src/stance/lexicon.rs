use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{normalize_hashtag, Corpus, TweetRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Camp {
    Trump,
    Clinton,
}

impl Camp {
    pub fn as_str(self) -> &'static str {
        match self {
            Camp::Trump => "trump",
            Camp::Clinton => "clinton",
        }
    }
}

impl FromStr for Camp {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "trump" | "t" | "pro_t" | "pro-t" | "pro_trump" => Ok(Camp::Trump),
            "clinton" | "c" | "pro_c" | "pro-c" | "pro_clinton" => Ok(Camp::Clinton),
            other => Err(Error::validation(format!("unknown camp `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TweetLabel {
    ProTrump,
    ProClinton,
    Neutral,
}

impl TweetLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            TweetLabel::ProTrump => "pro_T",
            TweetLabel::ProClinton => "pro_C",
            TweetLabel::Neutral => "neutral",
        }
    }
}

impl fmt::Display for TweetLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Assigns a stance to each tweet. Implementations must be deterministic.
pub trait StanceLabeler: Sync {
    fn label(&self, record: &TweetRecord) -> TweetLabel;
}

/// Hashtag → camp assignments.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Lexicon {
    camps: HashMap<String, Camp>,
}

impl Lexicon {
    /// Builds a lexicon, rejecting hashtags claimed by both camps.
    pub fn from_pairs<I, S>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, Camp)>,
        S: AsRef<str>,
    {
        let mut camps = HashMap::new();
        let mut conflicts = Vec::new();
        for (tag, camp) in pairs {
            let tag = normalize_hashtag(tag.as_ref());
            if tag.is_empty() {
                continue;
            }
            if let Some(prev) = camps.insert(tag.clone(), camp) {
                if prev != camp {
                    conflicts.push(tag);
                }
            }
        }
        if !conflicts.is_empty() {
            conflicts.sort();
            return Err(Error::validation(format!(
                "hashtags assigned to both camps: {}",
                conflicts.join(", ")
            )));
        }
        Ok(Self { camps })
    }

    pub fn camp(&self, tag: &str) -> Option<Camp> {
        self.camps.get(tag).copied()
    }

    pub fn len(&self) -> usize {
        self.camps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.camps.is_empty()
    }

    /// Sorted `(hashtag, camp)` pairs.
    pub fn entries(&self) -> Vec<(&str, Camp)> {
        let mut v: Vec<_> = self.camps.iter().map(|(k, &c)| (k.as_str(), c)).collect();
        v.sort();
        v
    }

    /// One round of co-occurrence expansion: a hashtag seen alongside seed
    /// hashtags of one camp in at least `k` tweets, and never alongside the
    /// other camp, joins that camp.
    pub fn expand(&self, corpus: &Corpus, k: u32) -> Lexicon {
        let seeds = self.resolve(corpus);
        let mut counts: HashMap<u32, [u32; 2]> = HashMap::new();
        for r in corpus.records() {
            let mut has = [false; 2];
            for h in &r.hashtags {
                match seeds[h.index()] {
                    Some(Camp::Trump) => has[0] = true,
                    Some(Camp::Clinton) => has[1] = true,
                    None => {}
                }
            }
            if !has[0] && !has[1] {
                continue;
            }
            let mut seen: Vec<u32> = Vec::new();
            for h in &r.hashtags {
                if seeds[h.index()].is_none() && !seen.contains(&h.0) {
                    seen.push(h.0);
                    let c = counts.entry(h.0).or_default();
                    c[0] += has[0] as u32;
                    c[1] += has[1] as u32;
                }
            }
        }
        let mut camps = self.camps.clone();
        for (sym, [t, c]) in counts {
            let camp = match (t >= k && c == 0, c >= k && t == 0) {
                (true, _) => Camp::Trump,
                (_, true) => Camp::Clinton,
                _ => continue,
            };
            camps.insert(corpus.symbol(crate::ingest::Sym(sym)).to_string(), camp);
        }
        Lexicon { camps }
    }

    /// Camp per corpus symbol.
    fn resolve(&self, corpus: &Corpus) -> Vec<Option<Camp>> {
        corpus.symbols().iter().map(|(_, s)| self.camp(s)).collect()
    }
}

/// Reads `hashtag,camp` lines, skipping blank lines and an optional header.
pub fn load_lexicon(path: &Path) -> Result<Lexicon> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut pairs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (tag, camp) = line
            .split_once(',')
            .ok_or_else(|| Error::validation(format!("{}:{}: expected `hashtag,camp`", path.display(), i + 1)))?;
        if i == 0 && tag.trim().eq_ignore_ascii_case("hashtag") {
            continue;
        }
        let camp: Camp = camp
            .parse()
            .map_err(|e| Error::validation(format!("{}:{}: {e}", path.display(), i + 1)))?;
        pairs.push((tag.to_string(), camp));
    }
    Lexicon::from_pairs(pairs)
}

/// Hit-count labeler over a lexicon resolved against one corpus.
#[derive(Debug, Clone)]
pub struct LexiconLabeler {
    by_symbol: Vec<Option<Camp>>,
}

impl LexiconLabeler {
    pub fn new(lexicon: &Lexicon, corpus: &Corpus) -> Self {
        Self {
            by_symbol: lexicon.resolve(corpus),
        }
    }
}

impl StanceLabeler for LexiconLabeler {
    fn label(&self, record: &TweetRecord) -> TweetLabel {
        let (mut t, mut c) = (0u32, 0u32);
        for h in &record.hashtags {
            match self.by_symbol.get(h.index()).copied().flatten() {
                Some(Camp::Trump) => t += 1,
                Some(Camp::Clinton) => c += 1,
                None => {}
            }
        }
        match t.cmp(&c) {
            std::cmp::Ordering::Greater => TweetLabel::ProTrump,
            std::cmp::Ordering::Less => TweetLabel::ProClinton,
            std::cmp::Ordering::Equal => TweetLabel::Neutral,
        }
    }
}

/// Labels every tweet, in corpus order.
pub fn label_corpus(corpus: &Corpus, labeler: &dyn StanceLabeler) -> Vec<TweetLabel> {
    corpus.records().par_iter().map(|r| labeler.label(r)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{ObservationWindow, TweetRow};

    fn row(id: &str, author: &str, tags: &[&str]) -> TweetRow {
        TweetRow {
            tweet_id: id.into(),
            author_id: author.into(),
            timestamp: "2016-10-01T00:00:00Z".into(),
            kind: "original".into(),
            hashtags: tags.iter().map(|s| s.to_string()).collect(),
            client: "web".into(),
            ..Default::default()
        }
    }

    fn lex() -> Lexicon {
        Lexicon::from_pairs([
            ("#MAGA", Camp::Trump),
            ("trumptrain", Camp::Trump),
            ("imwithher", Camp::Clinton),
            ("strongertogether", Camp::Clinton),
        ])
        .unwrap()
    }

    #[test]
    fn hit_counting() {
        let c = Corpus::from_rows(
            [
                row("1", "a", &[]),
                row("2", "a", &["maga"]),
                row("3", "a", &["maga", "trumptrain", "imwithher", "strongertogether"]),
                row("4", "a", &["imwithher", "other"]),
            ],
            ObservationWindow::unbounded(),
        )
        .unwrap();
        let l = LexiconLabeler::new(&lex(), &c);
        let labels = label_corpus(&c, &l);
        assert_eq!(
            labels,
            vec![
                TweetLabel::Neutral,
                TweetLabel::ProTrump,
                TweetLabel::Neutral,
                TweetLabel::ProClinton
            ]
        );
    }

    #[test]
    fn conflicting_lexicon() {
        assert!(Lexicon::from_pairs([("x", Camp::Trump), ("#X", Camp::Clinton)]).is_err());
    }

    #[test]
    fn expansion_requires_k_and_exclusivity() {
        let mut rows = Vec::new();
        for i in 0..3 {
            rows.push(row(&format!("t{i}"), "a", &["maga", "lockher"]));
            rows.push(row(&format!("m{i}"), "b", &["maga", "debate"]));
        }
        rows.push(row("x", "b", &["imwithher", "debate"]));
        rows.push(row("y", "b", &["imwithher", "rare"]));
        let c = Corpus::from_rows(rows, ObservationWindow::unbounded()).unwrap();
        let e = lex().expand(&c, 3);
        assert_eq!(e.camp("lockher"), Some(Camp::Trump));
        assert_eq!(e.camp("debate"), None);
        assert_eq!(e.camp("rare"), None);
        assert_eq!(lex().expand(&c, 4).camp("lockher"), None);
    }

    #[test]
    fn lexicon_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("lex.csv");
        std::fs::write(&p, "hashtag,camp\n#MAGA,trump\nimwithher,clinton\n\n").unwrap();
        let l = load_lexicon(&p).unwrap();
        assert_eq!(l.len(), 2);
        assert_eq!(l.camp("maga"), Some(Camp::Trump));
        std::fs::write(&p, "maga,green\n").unwrap();
        assert!(load_lexicon(&p).is_err());
    }
}
