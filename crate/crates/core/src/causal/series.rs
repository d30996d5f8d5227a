use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{AccountStatus, Corpus, ObservationWindow, OfficialLookup, StatusLookup};
use crate::stance::{StanceProfile, SupportClass};

/// Bin width in seconds (15 minutes).
pub const BIN_SECONDS: i64 = 900;

/// Population whose activity forms one series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesGroup {
    Ira,
    Suspended,
    Class(SupportClass),
}

impl SeriesGroup {
    pub fn name(self) -> &'static str {
        match self {
            SeriesGroup::Ira => "ira",
            SeriesGroup::Suspended => "suspended",
            SeriesGroup::Class(c) => c.as_str(),
        }
    }

    /// Node color used in causal network drawings.
    pub fn color(self) -> &'static str {
        match self {
            SeriesGroup::Ira | SeriesGroup::Suspended => "orange",
            SeriesGroup::Class(SupportClass::StrongTrump) => "darkred",
            SeriesGroup::Class(SupportClass::WeakTrump) => "lightcoral",
            SeriesGroup::Class(SupportClass::StrongClinton) => "darkblue",
            SeriesGroup::Class(SupportClass::WeakClinton) => "lightblue",
            SeriesGroup::Class(SupportClass::Undecided) => "gray",
        }
    }
}

/// Which seed group anchors a causal scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    Ira,
    Suspended,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::Ira => "ira",
            Scenario::Suspended => "suspended",
        }
    }

    /// Series order: seed group, weak T, weak C, strong T, strong C, undecided.
    pub fn groups(self) -> [SeriesGroup; 6] {
        let seed = match self {
            Scenario::Ira => SeriesGroup::Ira,
            Scenario::Suspended => SeriesGroup::Suspended,
        };
        [
            seed,
            SeriesGroup::Class(SupportClass::WeakTrump),
            SeriesGroup::Class(SupportClass::WeakClinton),
            SeriesGroup::Class(SupportClass::StrongTrump),
            SeriesGroup::Class(SupportClass::StrongClinton),
            SeriesGroup::Class(SupportClass::Undecided),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ActivitySeries {
    pub group: SeriesGroup,
    /// Tweet counts per 15-minute bin.
    pub bins: Vec<f64>,
}

/// Number of bins covering a bounded window.
pub fn bin_count(window: &ObservationWindow) -> Result<usize> {
    if window.start.0 == i64::MIN || window.end.0 == i64::MAX || window.len_seconds() <= 0 {
        return Err(Error::argument(
            "activity binning needs a bounded, non-empty observation window",
        ));
    }
    let len = window.len_seconds();
    Ok(((len + BIN_SECONDS - 1) / BIN_SECONDS) as usize)
}

/// Counts tweets by members of `members` (indexed by corpus user) per bin.
/// With `official`, only tweets from official clients count.
pub fn bin_activity(
    corpus: &Corpus,
    members: &[bool],
    official: Option<&OfficialLookup>,
    window: &ObservationWindow,
    group: SeriesGroup,
) -> Result<ActivitySeries> {
    let n = bin_count(window)?;
    let mut bins = vec![0.0; n];
    for r in corpus.records() {
        if !members.get(r.author.index()).copied().unwrap_or(false) || !window.contains(r.timestamp) {
            continue;
        }
        if let Some(o) = official {
            if !o.is_official(r.client) {
                continue;
            }
        }
        let b = ((r.timestamp.0 - window.start.0) / BIN_SECONDS) as usize;
        bins[b.min(n - 1)] += 1.0;
    }
    Ok(ActivitySeries { group, bins })
}

/// Builds the six series of a scenario. Seed-group series count every
/// tweet; supporter-class series count official-client tweets by verified
/// and not-verified authors only.
pub fn scenario_series(
    corpus: &Corpus,
    statuses: &StatusLookup,
    profiles: &[StanceProfile],
    official: &OfficialLookup,
    window: &ObservationWindow,
    scenario: Scenario,
) -> Result<Vec<ActivitySeries>> {
    let n = corpus.num_users();
    scenario
        .groups()
        .into_iter()
        .map(|group| match group {
            SeriesGroup::Ira => bin_activity(corpus, &statuses.mask(AccountStatus::Ira), None, window, group),
            SeriesGroup::Suspended => {
                bin_activity(corpus, &statuses.mask(AccountStatus::Suspended), None, window, group)
            }
            SeriesGroup::Class(class) => {
                let mut members = vec![false; n];
                for p in profiles {
                    let eligible = matches!(
                        statuses.get(p.user),
                        Some(AccountStatus::Verified | AccountStatus::NotVerified)
                    );
                    if eligible && p.class == Some(class) {
                        members[p.user.index()] = true;
                    }
                }
                bin_activity(corpus, &members, Some(official), window, group)
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{ClientRegistry, Timestamp, TweetRow};

    fn row(id: &str, author: &str, t: &str, client: &str) -> TweetRow {
        TweetRow {
            tweet_id: id.into(),
            author_id: author.into(),
            timestamp: t.into(),
            kind: "original".into(),
            client: client.into(),
            ..Default::default()
        }
    }

    fn window() -> ObservationWindow {
        ObservationWindow::new(
            Timestamp::parse("2016-10-01T00:00:00Z").unwrap(),
            Timestamp::parse("2016-10-01T02:00:00Z").unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn empty_and_single_bin() {
        let c = Corpus::from_rows(
            [
                row("1", "a", "2016-10-01T00:16:00Z", "web"),
                row("2", "a", "2016-10-01T00:20:00Z", "web"),
                row("3", "a", "2016-10-01T00:29:59Z", "bot"),
                row("4", "b", "2016-10-01T00:29:59Z", "web"),
            ],
            window(),
        )
        .unwrap();
        let a = c.user("a").unwrap().index();
        let mut m = vec![false; c.num_users()];
        let none = bin_activity(&c, &m, None, &window(), SeriesGroup::Ira).unwrap();
        assert_eq!(none.bins, vec![0.0; 8]);
        m[a] = true;
        let s = bin_activity(&c, &m, None, &window(), SeriesGroup::Ira).unwrap();
        assert_eq!(s.bins[1], 3.0);
        assert_eq!(s.bins.iter().sum::<f64>(), 3.0);
        let off = OfficialLookup::new(&ClientRegistry::new(["web"]), c.symbols());
        let s = bin_activity(&c, &m, Some(&off), &window(), SeriesGroup::Ira).unwrap();
        assert_eq!(s.bins[1], 2.0);
    }

    #[test]
    fn unbounded_window_rejected() {
        assert!(bin_count(&ObservationWindow::unbounded()).is_err());
    }
}
