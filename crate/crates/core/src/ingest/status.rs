use std::collections::BTreeMap;
use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::intern::{Interner, UserIdx};
use crate::error::{Error, Result};

/// Platform status of an account.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AccountStatus {
    Suspended,
    NotFound,
    NotVerified,
    Verified,
    Ira,
}

impl AccountStatus {
    /// Row order used by the group tables.
    pub const ALL: [AccountStatus; 5] = [
        AccountStatus::NotFound,
        AccountStatus::NotVerified,
        AccountStatus::Suspended,
        AccountStatus::Verified,
        AccountStatus::Ira,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            AccountStatus::Suspended => "suspended",
            AccountStatus::NotFound => "not_found",
            AccountStatus::NotVerified => "not_verified",
            AccountStatus::Verified => "verified",
            AccountStatus::Ira => "ira",
        }
    }

    pub fn position(self) -> usize {
        Self::ALL.iter().position(|s| *s == self).unwrap()
    }
}

impl fmt::Display for AccountStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AccountStatus {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .trim()
            .to_ascii_lowercase()
            .chars()
            .map(|c| if c == ' ' || c == '-' { '_' } else { c })
            .collect();
        match key.as_str() {
            "suspended" => Ok(AccountStatus::Suspended),
            "not_found" | "notfound" => Ok(AccountStatus::NotFound),
            "not_verified" | "notverified" => Ok(AccountStatus::NotVerified),
            "verified" => Ok(AccountStatus::Verified),
            "ira" => Ok(AccountStatus::Ira),
            _ => Err(Error::validation(format!("unknown account status `{s}`"))),
        }
    }
}

/// One status per user id.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StatusTable {
    by_user: HashMap<String, AccountStatus>,
}

impl StatusTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a table from `(user, status)` pairs under the same rules as [`load_statuses`].
    pub fn from_pairs<I, S>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, AccountStatus)>,
        S: Into<String>,
    {
        let mut table = StatusTable::new();
        let mut conflicts: BTreeMap<String, Vec<AccountStatus>> = BTreeMap::new();
        for (user, status) in pairs {
            table.insert(user.into(), status, &mut conflicts);
        }
        if conflicts.is_empty() {
            Ok(table)
        } else {
            let listed: Vec<String> = conflicts
                .iter()
                .map(|(u, s)| {
                    let labels: Vec<&str> = s.iter().map(|x| x.as_str()).collect();
                    format!("{u}: {}", labels.join("/"))
                })
                .collect();
            Err(Error::validation(format!(
                "conflicting statuses for {} user(s): {}",
                conflicts.len(),
                listed.join(", ")
            )))
        }
    }

    fn insert(&mut self, user: String, status: AccountStatus, conflicts: &mut BTreeMap<String, Vec<AccountStatus>>) {
        match self.by_user.get(&user).copied() {
            None => {
                self.by_user.insert(user, status);
            }
            Some(prev) if prev == status => {}
            Some(AccountStatus::Ira) => {}
            Some(_) if status == AccountStatus::Ira => {
                self.by_user.insert(user, AccountStatus::Ira);
            }
            Some(prev) => {
                let entry = conflicts.entry(user).or_insert_with(|| vec![prev]);
                if !entry.contains(&status) {
                    entry.push(status);
                }
            }
        }
    }

    pub fn get(&self, user: &str) -> Option<AccountStatus> {
        self.by_user.get(user).copied()
    }

    pub fn len(&self) -> usize {
        self.by_user.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_user.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, AccountStatus)> {
        self.by_user.iter().map(|(k, v)| (k.as_str(), *v))
    }

    /// Status per dense user index of `users`.
    pub fn resolve(&self, users: &Interner) -> StatusLookup {
        StatusLookup(users.iter().map(|(_, name)| self.by_user.get(name).copied()).collect())
    }
}

/// Statuses resolved against a corpus user interner.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StatusLookup(pub Vec<Option<AccountStatus>>);

impl StatusLookup {
    #[inline]
    pub fn get(&self, user: UserIdx) -> Option<AccountStatus> {
        self.0.get(user.index()).copied().flatten()
    }

    pub fn is(&self, user: UserIdx, status: AccountStatus) -> bool {
        self.get(user) == Some(status)
    }

    /// Membership mask over user indices for one status.
    pub fn mask(&self, status: AccountStatus) -> Vec<bool> {
        self.0.iter().map(|s| *s == Some(status)).collect()
    }
}

/// Loads a `user_id,status` CSV (header required).
pub fn load_statuses(path: &Path) -> Result<StatusTable> {
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
        let (user, status) = match (row.get(0), row.get(1)) {
            (Some(u), Some(s)) if !u.is_empty() => (u, s),
            _ => {
                return Err(Error::validation(format!(
                    "{}:{line}: expected `user_id,status`",
                    path.display()
                )))
            }
        };
        let status: AccountStatus = status
            .parse()
            .map_err(|e| Error::validation(format!("{}:{line}: {e}", path.display())))?;
        pairs.push((user.to_string(), status));
    }
    StatusTable::from_pairs(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lookup_and_absent() {
        let t = StatusTable::from_pairs([("u1", AccountStatus::Verified)]).unwrap();
        assert_eq!(t.get("u1"), Some(AccountStatus::Verified));
        assert_eq!(t.get("nobody"), None);
    }

    #[test]
    fn ira_takes_precedence_either_order() {
        let a = StatusTable::from_pairs([("u1", AccountStatus::Ira), ("u1", AccountStatus::Suspended)]).unwrap();
        let b = StatusTable::from_pairs([("u1", AccountStatus::Suspended), ("u1", AccountStatus::Ira)]).unwrap();
        assert_eq!(a.get("u1"), Some(AccountStatus::Ira));
        assert_eq!(b.get("u1"), Some(AccountStatus::Ira));
    }

    #[test]
    fn conflicts_are_listed() {
        let err = StatusTable::from_pairs([
            ("u1", AccountStatus::Verified),
            ("u1", AccountStatus::Suspended),
            ("u2", AccountStatus::NotFound),
            ("u2", AccountStatus::NotFound),
        ])
        .unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("u1: verified/suspended"), "{msg}");
        assert!(!msg.contains("u2"));
    }

    #[test]
    fn status_spellings() {
        assert_eq!(
            "Not Verified".parse::<AccountStatus>().unwrap(),
            AccountStatus::NotVerified
        );
        assert_eq!("not-found".parse::<AccountStatus>().unwrap(), AccountStatus::NotFound);
        assert!("banned".parse::<AccountStatus>().is_err());
    }

    #[test]
    fn loads_from_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.csv");
        std::fs::write(&p, "user_id,status\nu1,verified\nu2,ira\nu2,suspended\n").unwrap();
        let t = load_statuses(&p).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t.get("u2"), Some(AccountStatus::Ira));
    }
}
