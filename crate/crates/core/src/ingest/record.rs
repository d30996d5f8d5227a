use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, NaiveDateTime, TimeZone, Utc};
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use super::intern::{Sym, UserIdx};
use crate::error::{Error, Result};

/// Seconds since the Unix epoch, UTC.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Timestamp(pub i64);

impl Timestamp {
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Ok(dt) = DateTime::parse_from_rfc3339(s) {
            return Ok(Timestamp(dt.timestamp()));
        }
        for fmt in ["%Y-%m-%dT%H:%M:%S", "%Y-%m-%d %H:%M:%S"] {
            if let Ok(naive) = NaiveDateTime::parse_from_str(s, fmt) {
                return Ok(Timestamp(naive.and_utc().timestamp()));
            }
        }
        if let Ok(secs) = s.parse::<i64>() {
            return Ok(Timestamp(secs));
        }
        Err(Error::validation(format!("unparseable timestamp `{s}`")))
    }

    pub fn to_rfc3339(self) -> String {
        match Utc.timestamp_opt(self.0, 0).single() {
            Some(dt) => dt.format("%Y-%m-%dT%H:%M:%SZ").to_string(),
            None => self.0.to_string(),
        }
    }
}

impl fmt::Display for Timestamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_rfc3339())
    }
}

/// Closed observation interval `[start, end]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ObservationWindow {
    pub start: Timestamp,
    pub end: Timestamp,
}

impl ObservationWindow {
    pub fn new(start: Timestamp, end: Timestamp) -> Result<Self> {
        if end < start {
            return Err(Error::argument(format!(
                "observation window ends ({end}) before it starts ({start})"
            )));
        }
        Ok(Self { start, end })
    }

    /// A window admitting every representable timestamp.
    pub fn unbounded() -> Self {
        Self {
            start: Timestamp(i64::MIN),
            end: Timestamp(i64::MAX),
        }
    }

    pub fn contains(&self, t: Timestamp) -> bool {
        self.start <= t && t <= self.end
    }

    pub fn len_seconds(&self) -> i64 {
        self.end.0.saturating_sub(self.start.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TweetKind {
    Original,
    Retweet,
    Reply,
    Quote,
    MentionCarrier,
}

impl TweetKind {
    pub const ALL: [TweetKind; 5] = [
        TweetKind::Original,
        TweetKind::Retweet,
        TweetKind::Reply,
        TweetKind::Quote,
        TweetKind::MentionCarrier,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TweetKind::Original => "original",
            TweetKind::Retweet => "retweet",
            TweetKind::Reply => "reply",
            TweetKind::Quote => "quote",
            TweetKind::MentionCarrier => "mention-carrier",
        }
    }

    pub fn requires_target(self) -> bool {
        matches!(self, TweetKind::Retweet | TweetKind::Reply | TweetKind::Quote)
    }
}

impl FromStr for TweetKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "original" | "tweet" => Ok(TweetKind::Original),
            "retweet" | "rt" => Ok(TweetKind::Retweet),
            "reply" => Ok(TweetKind::Reply),
            "quote" => Ok(TweetKind::Quote),
            "mention-carrier" | "mention" => Ok(TweetKind::MentionCarrier),
            other => Err(Error::validation(format!("unknown tweet kind `{other}`"))),
        }
    }
}

impl fmt::Display for TweetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One tweet event with interned identifiers.
///
/// `urls` holds normalized domains; `hashtags` are lowercase without `#`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TweetRecord {
    pub tweet_id: Box<str>,
    pub author: UserIdx,
    pub timestamp: Timestamp,
    pub kind: TweetKind,
    pub target: Option<UserIdx>,
    pub mentions: SmallVec<[UserIdx; 4]>,
    pub urls: SmallVec<[Sym; 2]>,
    pub hashtags: SmallVec<[Sym; 4]>,
    pub client: Sym,
}

impl TweetRecord {
    /// Accounts this tweet references, target first, without repeats or the author.
    pub fn referenced_accounts(&self) -> SmallVec<[UserIdx; 4]> {
        let mut out: SmallVec<[UserIdx; 4]> = SmallVec::new();
        for u in self.target.iter().chain(self.mentions.iter()) {
            if *u != self.author && !out.contains(u) {
                out.push(*u);
            }
        }
        out
    }

    /// Mentioned accounts, excluding the author, the interaction target and repeats.
    pub fn distinct_mentions(&self) -> SmallVec<[UserIdx; 4]> {
        let mut out: SmallVec<[UserIdx; 4]> = SmallVec::new();
        for &u in &self.mentions {
            if u != self.author && Some(u) != self.target && !out.contains(&u) {
                out.push(u);
            }
        }
        out
    }
}

/// String-level tweet row, the on-disk shape of a [`TweetRecord`].
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TweetRow {
    pub tweet_id: String,
    pub author_id: String,
    pub timestamp: String,
    pub kind: String,
    #[serde(default)]
    pub target_user_id: Option<String>,
    #[serde(default)]
    pub mentioned_user_ids: Vec<String>,
    #[serde(default)]
    pub urls: Vec<String>,
    #[serde(default)]
    pub hashtags: Vec<String>,
    #[serde(default)]
    pub client: String,
}

/// Lowercases a hashtag and strips a leading `#`.
pub fn normalize_hashtag(tag: &str) -> String {
    tag.trim().trim_start_matches('#').to_lowercase()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn timestamp_formats() {
        let a = Timestamp::parse("2016-06-01T00:00:00Z").unwrap();
        let b = Timestamp::parse("2016-06-01 00:00:00").unwrap();
        let c = Timestamp::parse("2016-06-01T02:00:00+02:00").unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
        assert_eq!(a.0, 1_464_739_200);
        assert_eq!(a.to_rfc3339(), "2016-06-01T00:00:00Z");
        assert!(Timestamp::parse("yesterday").is_err());
    }

    #[test]
    fn kind_parsing() {
        assert_eq!("RT".parse::<TweetKind>().unwrap(), TweetKind::Retweet);
        assert_eq!(
            "mention_carrier".parse::<TweetKind>().unwrap(),
            TweetKind::MentionCarrier
        );
        assert!("like".parse::<TweetKind>().is_err());
    }

    #[test]
    fn window_is_closed() {
        let w = ObservationWindow::new(Timestamp(10), Timestamp(20)).unwrap();
        assert!(w.contains(Timestamp(10)));
        assert!(w.contains(Timestamp(20)));
        assert!(!w.contains(Timestamp(21)));
        assert!(ObservationWindow::new(Timestamp(2), Timestamp(1)).is_err());
    }

    #[test]
    fn hashtag_normalization() {
        assert_eq!(normalize_hashtag(" #MAGA "), "maga");
    }
}
