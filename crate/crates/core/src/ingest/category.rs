use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use url::Url;

use super::corpus::Corpus;
use super::intern::{Interner, Sym};
use super::record::TweetRecord;
use crate::error::{Error, Result};

/// News-outlet category of a domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NewsCategory {
    Fake,
    ExtremeBiasRight,
    Right,
    RightLeaning,
    Center,
    LeftLeaning,
    Left,
    ExtremeBiasLeft,
}

impl NewsCategory {
    /// Presentation order: fake news first, extreme bias left last.
    pub const ALL: [NewsCategory; 8] = [
        NewsCategory::Fake,
        NewsCategory::ExtremeBiasRight,
        NewsCategory::Right,
        NewsCategory::RightLeaning,
        NewsCategory::Center,
        NewsCategory::LeftLeaning,
        NewsCategory::Left,
        NewsCategory::ExtremeBiasLeft,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            NewsCategory::Fake => "fake",
            NewsCategory::ExtremeBiasRight => "extreme_bias_right",
            NewsCategory::Right => "right",
            NewsCategory::RightLeaning => "right_leaning",
            NewsCategory::Center => "center",
            NewsCategory::LeftLeaning => "left_leaning",
            NewsCategory::Left => "left",
            NewsCategory::ExtremeBiasLeft => "extreme_bias_left",
        }
    }

    pub fn position(self) -> usize {
        self as usize
    }
}

impl fmt::Display for NewsCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for NewsCategory {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .trim()
            .to_ascii_lowercase()
            .chars()
            .map(|c| if c == ' ' || c == '-' { '_' } else { c })
            .collect();
        let cat = match key.as_str() {
            "fake" | "fake_news" => NewsCategory::Fake,
            "extreme_bias_right" => NewsCategory::ExtremeBiasRight,
            "right" => NewsCategory::Right,
            "right_leaning" => NewsCategory::RightLeaning,
            "center" | "centre" => NewsCategory::Center,
            "left_leaning" => NewsCategory::LeftLeaning,
            "left" => NewsCategory::Left,
            "extreme_bias_left" => NewsCategory::ExtremeBiasLeft,
            _ => return Err(Error::validation(format!("unknown news category `{s}`"))),
        };
        Ok(cat)
    }
}

/// Reduces a URL or bare host to a lowercase hostname without `www.`.
///
/// Returns `None` for strings with no recognizable host.
pub fn normalize_domain(raw: &str) -> Option<String> {
    let raw = raw.trim();
    if raw.is_empty() {
        return None;
    }
    let parsed = if raw.contains("://") {
        Url::parse(raw).ok()?
    } else {
        Url::parse(&format!("http://{raw}")).ok()?
    };
    let host = parsed.host_str()?.trim_end_matches('.').to_ascii_lowercase();
    let host = host.strip_prefix("www.").unwrap_or(&host).to_string();
    if host.is_empty() {
        None
    } else {
        Some(host)
    }
}

/// Domain → category table.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CategoryMap {
    by_domain: HashMap<String, NewsCategory>,
}

impl CategoryMap {
    pub fn from_pairs<I, S>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, NewsCategory)>,
        S: AsRef<str>,
    {
        let mut by_domain = HashMap::new();
        let mut conflicts = Vec::new();
        for (domain, cat) in pairs {
            let d = normalize_domain(domain.as_ref())
                .ok_or_else(|| Error::validation(format!("invalid domain `{}`", domain.as_ref())))?;
            match by_domain.get(&d) {
                Some(prev) if *prev != cat => conflicts.push(format!("{d}: {prev}/{cat}")),
                Some(_) => {}
                None => {
                    by_domain.insert(d, cat);
                }
            }
        }
        if !conflicts.is_empty() {
            conflicts.sort();
            return Err(Error::validation(format!(
                "domains mapped to more than one category: {}",
                conflicts.join(", ")
            )));
        }
        Ok(Self { by_domain })
    }

    pub fn get(&self, domain: &str) -> Option<NewsCategory> {
        self.by_domain.get(domain).copied()
    }

    pub fn len(&self) -> usize {
        self.by_domain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_domain.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, NewsCategory)> {
        self.by_domain.iter().map(|(d, c)| (d.as_str(), *c))
    }

    /// Category per symbol of a corpus symbol table, for fast tagging.
    pub fn resolve(&self, symbols: &Interner) -> CategoryLookup {
        CategoryLookup(
            symbols
                .iter()
                .map(|(_, name)| self.by_domain.get(name).copied())
                .collect(),
        )
    }
}

/// Category map resolved against a corpus symbol table.
#[derive(Debug, Clone)]
pub struct CategoryLookup(Vec<Option<NewsCategory>>);

impl CategoryLookup {
    pub fn for_corpus(map: &CategoryMap, corpus: &Corpus) -> Self {
        map.resolve(corpus.symbols())
    }

    #[inline]
    pub fn get(&self, sym: Sym) -> Option<NewsCategory> {
        self.0.get(sym.index()).copied().flatten()
    }

    /// Category of the first URL whose domain is mapped.
    #[inline]
    pub fn tag(&self, record: &TweetRecord) -> Option<NewsCategory> {
        record.urls.iter().find_map(|u| self.get(*u))
    }
}

/// Category of the first URL in `record` whose domain appears in `map`.
pub fn tag_news_category(corpus: &Corpus, record: &TweetRecord, map: &CategoryMap) -> Option<NewsCategory> {
    record.urls.iter().find_map(|u| map.get(corpus.symbol(*u)))
}

/// Loads a `domain,category` CSV (header required).
pub fn load_categories(path: &Path) -> Result<CategoryMap> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::io(path, io),
            other => Error::validation(format!("{}: {other:?}", path.display())),
        })?;
    let mut pairs = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let row = row.map_err(|e| Error::validation(format!("{}: {e}", path.display())))?;
        let line = i + 2;
        let (Some(domain), Some(cat)) = (row.get(0), row.get(1)) else {
            return Err(Error::validation(format!(
                "{}:{line}: expected `domain,category`",
                path.display()
            )));
        };
        let cat: NewsCategory = cat
            .parse()
            .map_err(|e| Error::validation(format!("{}:{line}: {e}", path.display())))?;
        pairs.push((domain.to_string(), cat));
    }
    CategoryMap::from_pairs(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn domain_normalization() {
        assert_eq!(
            normalize_domain("https://WWW.Breitbart.com/politics/x?y=1").as_deref(),
            Some("breitbart.com")
        );
        assert_eq!(normalize_domain("nytimes.com").as_deref(), Some("nytimes.com"));
        assert_eq!(normalize_domain("www.cnn.com/live").as_deref(), Some("cnn.com"));
        assert_eq!(normalize_domain("   "), None);
    }

    #[test]
    fn conflicting_domain_rejected() {
        let err = CategoryMap::from_pairs([
            ("a.example", NewsCategory::Left),
            ("www.a.example", NewsCategory::Right),
        ])
        .unwrap_err();
        assert!(err.to_string().contains("a.example"));
    }

    #[test]
    fn category_order_matches_positions() {
        for (i, c) in NewsCategory::ALL.iter().enumerate() {
            assert_eq!(c.position(), i);
            assert_eq!(c.as_str().parse::<NewsCategory>().unwrap(), *c);
        }
    }
}
