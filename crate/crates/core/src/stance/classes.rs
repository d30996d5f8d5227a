use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::lexicon::TweetLabel;
use crate::error::{Error, Result};
use crate::ingest::{AccountStatus, Corpus, StatusLookup, UserIdx};

/// Fewest users a side needs before its quartiles are trusted.
pub const MIN_SIDE_USERS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SupportClass {
    StrongTrump,
    WeakTrump,
    StrongClinton,
    WeakClinton,
    Undecided,
}

impl SupportClass {
    pub const ALL: [SupportClass; 5] = [
        SupportClass::StrongTrump,
        SupportClass::WeakTrump,
        SupportClass::StrongClinton,
        SupportClass::WeakClinton,
        SupportClass::Undecided,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SupportClass::StrongTrump => "strong_T",
            SupportClass::WeakTrump => "weak_T",
            SupportClass::StrongClinton => "strong_C",
            SupportClass::WeakClinton => "weak_C",
            SupportClass::Undecided => "undecided",
        }
    }

    pub fn position(self) -> usize {
        self as usize
    }
}

impl fmt::Display for SupportClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassScheme {
    /// Separate fences over positive scores and over |negative scores|.
    #[default]
    PerSide,
    /// One pair of fences over the full score distribution.
    WholeDistribution,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StanceProfile {
    pub user: UserIdx,
    pub n_pro_t: u32,
    pub n_pro_c: u32,
    pub s: i64,
    pub class: Option<SupportClass>,
}

/// Tukey fence: `cut = q3 + 1.5·iqr` for an upper fence, `q1 − 1.5·iqr` for a lower one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Fence {
    pub q1: f64,
    pub q3: f64,
    pub iqr: f64,
    pub cut: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassThresholds {
    pub scheme: ClassScheme,
    /// Strong Trump iff `S > trump.cut`.
    pub trump: Option<Fence>,
    /// Per side: strong Clinton iff `|S| > clinton.cut`.
    /// Whole distribution: strong Clinton iff `S < clinton.cut`.
    pub clinton: Option<Fence>,
}

/// Linear interpolation between order statistics (R's type 7).
pub fn quantile_type7(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of empty sample");
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

fn quartiles(mut v: Vec<f64>) -> (f64, f64) {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    (quantile_type7(&v, 0.25), quantile_type7(&v, 0.75))
}

fn upper_fence(v: Vec<f64>) -> Fence {
    let (q1, q3) = quartiles(v);
    let iqr = q3 - q1;
    Fence {
        q1,
        q3,
        iqr,
        cut: q3 + 1.5 * iqr,
    }
}

/// Support score per user from the labels of the tweets they authored.
/// Every interned user gets a profile; non-authors score zero.
pub fn score_users(corpus: &Corpus, labels: &[TweetLabel]) -> Result<Vec<StanceProfile>> {
    if labels.len() != corpus.len() {
        return Err(Error::argument(format!(
            "{} labels for {} tweets",
            labels.len(),
            corpus.len()
        )));
    }
    let mut counts = vec![(0u32, 0u32); corpus.num_users()];
    for (r, l) in corpus.records().iter().zip(labels) {
        let c = &mut counts[r.author.index()];
        match l {
            TweetLabel::ProTrump => c.0 += 1,
            TweetLabel::ProClinton => c.1 += 1,
            TweetLabel::Neutral => {}
        }
    }
    Ok(counts
        .into_iter()
        .enumerate()
        .map(|(i, (t, c))| StanceProfile {
            user: UserIdx(i as u32),
            n_pro_t: t,
            n_pro_c: c,
            s: t as i64 - c as i64,
            class: None,
        })
        .collect())
}

/// Assigns supporting classes in place and returns the fences used.
///
/// Scores exactly on a fence are weak. A side with fewer than
/// [`MIN_SIDE_USERS`] users has no fence and every user on it is weak.
pub fn classify_users(profiles: &mut [StanceProfile], scheme: ClassScheme) -> ClassThresholds {
    let thresholds = match scheme {
        ClassScheme::PerSide => {
            let pos: Vec<f64> = profiles.iter().filter(|p| p.s > 0).map(|p| p.s as f64).collect();
            let neg: Vec<f64> = profiles.iter().filter(|p| p.s < 0).map(|p| (-p.s) as f64).collect();
            let side = |v: Vec<f64>, name: &str| {
                if v.len() < MIN_SIDE_USERS {
                    if !v.is_empty() {
                        log::warn!(
                            "only {} {name} supporters; quartiles undefined, all marked weak",
                            v.len()
                        );
                    }
                    None
                } else {
                    Some(upper_fence(v))
                }
            };
            ClassThresholds {
                scheme,
                trump: side(pos, "Trump"),
                clinton: side(neg, "Clinton"),
            }
        }
        ClassScheme::WholeDistribution => {
            let all: Vec<f64> = profiles.iter().map(|p| p.s as f64).collect();
            if all.len() < MIN_SIDE_USERS {
                log::warn!("only {} users; quartiles undefined, all marked weak", all.len());
                ClassThresholds {
                    scheme,
                    trump: None,
                    clinton: None,
                }
            } else {
                let (q1, q3) = quartiles(all);
                let iqr = q3 - q1;
                ClassThresholds {
                    scheme,
                    trump: Some(Fence {
                        q1,
                        q3,
                        iqr,
                        cut: q3 + 1.5 * iqr,
                    }),
                    clinton: Some(Fence {
                        q1,
                        q3,
                        iqr,
                        cut: q1 - 1.5 * iqr,
                    }),
                }
            }
        }
    };
    for p in profiles.iter_mut() {
        p.class = Some(class_for(p.s, &thresholds));
    }
    thresholds
}

fn class_for(s: i64, t: &ClassThresholds) -> SupportClass {
    let x = s as f64;
    match s.signum() {
        0 => SupportClass::Undecided,
        1 => match t.trump {
            Some(f) if x > f.cut => SupportClass::StrongTrump,
            _ => SupportClass::WeakTrump,
        },
        _ => {
            let strong = match (t.scheme, t.clinton) {
                (ClassScheme::PerSide, Some(f)) => -x > f.cut,
                (ClassScheme::WholeDistribution, Some(f)) => x < f.cut,
                (_, None) => false,
            };
            if strong {
                SupportClass::StrongClinton
            } else {
                SupportClass::WeakClinton
            }
        }
    }
}

/// Percentage of each status group's users in each supporting class.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassByStatus {
    /// Indexed `[AccountStatus::position][SupportClass::position]`.
    pub counts: [[u64; 5]; 5],
    pub percent: [[f64; 5]; 5],
}

impl ClassByStatus {
    pub fn row(&self, status: AccountStatus) -> &[f64; 5] {
        &self.percent[status.position()]
    }
}

/// Cross-tabulates classified profiles by account status; unlabeled users
/// and unclassified profiles are skipped. Empty rows stay at zero.
pub fn class_by_status(profiles: &[StanceProfile], statuses: &StatusLookup) -> ClassByStatus {
    let mut counts = [[0u64; 5]; 5];
    for p in profiles {
        if let (Some(st), Some(c)) = (statuses.get(p.user), p.class) {
            counts[st.position()][c.position()] += 1;
        }
    }
    let mut percent = [[0.0; 5]; 5];
    for (row, out) in counts.iter().zip(percent.iter_mut()) {
        let total: u64 = row.iter().sum();
        if total > 0 {
            for (c, o) in row.iter().zip(out.iter_mut()) {
                *o = 100.0 * *c as f64 / total as f64;
            }
        }
    }
    ClassByStatus { counts, percent }
}

/// Shares of each class among `profiles`, in percent.
pub fn class_shares<'a>(profiles: impl IntoIterator<Item = &'a StanceProfile>) -> [f64; 5] {
    let mut counts = [0u64; 5];
    for p in profiles {
        if let Some(c) = p.class {
            counts[c.position()] += 1;
        }
    }
    let total: u64 = counts.iter().sum();
    counts.map(|c| {
        if total == 0 {
            0.0
        } else {
            100.0 * c as f64 / total as f64
        }
    })
}

fn writer(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    csv::Writer::from_path(path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::validation(format!("{}: {other:?}", path.display())),
    })
}

/// `user_id,S,class` for every classified profile, sorted by user id.
pub fn write_stance_csv(profiles: &[StanceProfile], corpus: &Corpus, path: &Path) -> Result<()> {
    let mut rows: Vec<(&str, i64, SupportClass)> = profiles
        .iter()
        .filter_map(|p| p.class.map(|c| (corpus.user_name(p.user), p.s, c)))
        .collect();
    rows.sort();
    let mut w = writer(path)?;
    w.write_record(["user_id", "S", "class"])?;
    for (u, s, c) in rows {
        w.write_record([u, &s.to_string(), c.as_str()])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Status × class percentage table.
pub fn write_class_by_status(table: &ClassByStatus, path: &Path) -> Result<()> {
    let mut w = writer(path)?;
    let mut header = vec!["status"];
    header.extend(SupportClass::ALL.iter().map(|c| c.as_str()));
    w.write_record(&header)?;
    for st in AccountStatus::ALL {
        let mut rec = vec![st.as_str().to_string()];
        rec.extend(table.row(st).iter().map(|p| format!("{p:.2}")));
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn profiles(scores: &[i64]) -> Vec<StanceProfile> {
        scores
            .iter()
            .enumerate()
            .map(|(i, &s)| StanceProfile {
                user: UserIdx(i as u32),
                n_pro_t: s.max(0) as u32,
                n_pro_c: (-s).max(0) as u32,
                s,
                class: None,
            })
            .collect()
    }

    /// Order-statistic oracle: position (n−1)p split into whole and fraction.
    fn oracle_quantile(v: &[f64], p: f64) -> f64 {
        let mut s = v.to_vec();
        s.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let pos = (s.len() as f64 - 1.0) * p;
        let k = pos as usize;
        if k + 1 >= s.len() {
            return s[k];
        }
        s[k] * (1.0 - (pos - k as f64)) + s[k + 1] * (pos - k as f64)
    }

    #[test]
    fn outlier_is_only_strong() {
        let scores = [1, 1, 2, 2, 3, 3, 100];
        let mut p = profiles(&scores);
        let t = classify_users(&mut p, ClassScheme::PerSide);
        let v: Vec<f64> = scores.iter().map(|&s| s as f64).collect();
        let fence = t.trump.unwrap();
        assert_eq!(fence.q1, oracle_quantile(&v, 0.25));
        assert_eq!(fence.q3, oracle_quantile(&v, 0.75));
        assert_eq!((fence.q1, fence.q3, fence.cut), (1.5, 3.0, 5.25));
        let strong: Vec<i64> = p
            .iter()
            .filter(|x| x.class == Some(SupportClass::StrongTrump))
            .map(|x| x.s)
            .collect();
        assert_eq!(strong, vec![100]);
        assert!(p[..6].iter().all(|x| x.class == Some(SupportClass::WeakTrump)));
    }

    #[test]
    fn zeros_are_undecided() {
        let mut p = profiles(&[0; 9]);
        classify_users(&mut p, ClassScheme::PerSide);
        assert!(p.iter().all(|x| x.class == Some(SupportClass::Undecided)));
    }

    #[test]
    fn small_side_is_weak() {
        let mut p = profiles(&[-50, -1, 5, 1, 1, 1, 1]);
        let t = classify_users(&mut p, ClassScheme::PerSide);
        assert!(t.clinton.is_none());
        assert_eq!(p[0].class, Some(SupportClass::WeakClinton));
        assert_eq!(p[2].class, Some(SupportClass::StrongTrump));
    }

    #[test]
    fn fence_boundary_is_weak() {
        // iqr = 0 so the cut sits exactly on every score
        let mut p = profiles(&[2, 2, 2, 2, 2]);
        classify_users(&mut p, ClassScheme::PerSide);
        assert!(p.iter().all(|x| x.class == Some(SupportClass::WeakTrump)));
    }

    #[test]
    fn whole_distribution_lower_fence() {
        let mut p = profiles(&[-40, -1, 0, 0, 1, 1, 2, 30]);
        let t = classify_users(&mut p, ClassScheme::WholeDistribution);
        let lower = t.clinton.unwrap().cut;
        let upper = t.trump.unwrap().cut;
        assert!(lower < -1.0 && upper > 2.0);
        assert_eq!(p[0].class, Some(SupportClass::StrongClinton));
        assert_eq!(p[1].class, Some(SupportClass::WeakClinton));
        assert_eq!(p[7].class, Some(SupportClass::StrongTrump));
    }

    #[test]
    fn cross_table_rows_sum_to_100() {
        let mut p = profiles(&[1, 2, -3, 0, 7, -1]);
        classify_users(&mut p, ClassScheme::PerSide);
        let st = StatusLookup(vec![
            Some(AccountStatus::Suspended),
            Some(AccountStatus::Suspended),
            Some(AccountStatus::Suspended),
            Some(AccountStatus::Ira),
            None,
            Some(AccountStatus::Ira),
        ]);
        let t = class_by_status(&p, &st);
        for s in [AccountStatus::Suspended, AccountStatus::Ira] {
            assert!((t.row(s).iter().sum::<f64>() - 100.0).abs() < 1e-9);
        }
        assert_eq!(t.row(AccountStatus::Verified).iter().sum::<f64>(), 0.0);
        assert_eq!(
            t.counts[AccountStatus::Ira.position()][SupportClass::Undecided.position()],
            1
        );
    }
}
