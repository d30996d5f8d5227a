use std::collections::HashSet;
use std::path::Path;

use super::intern::{Interner, Sym};
use crate::error::{Error, Result};

/// Set of official posting applications. Membership ignores case and surrounding whitespace.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ClientRegistry {
    official: HashSet<String>,
}

fn client_key(name: &str) -> String {
    name.trim().to_lowercase()
}

impl ClientRegistry {
    pub fn new<I, S>(names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        Self {
            official: names
                .into_iter()
                .map(|n| client_key(n.as_ref()))
                .filter(|n| !n.is_empty())
                .collect(),
        }
    }

    pub fn is_official(&self, client: &str) -> bool {
        self.official.contains(&client_key(client))
    }

    pub fn len(&self) -> usize {
        self.official.len()
    }

    pub fn is_empty(&self) -> bool {
        self.official.is_empty()
    }

    /// Official flag per corpus symbol.
    pub fn resolve(&self, symbols: &Interner) -> Vec<bool> {
        symbols.iter().map(|(_, s)| self.is_official(s)).collect()
    }
}

/// Official flags resolved against a corpus symbol table.
#[derive(Debug, Clone)]
pub struct OfficialLookup(Vec<bool>);

impl OfficialLookup {
    pub fn new(registry: &ClientRegistry, symbols: &Interner) -> Self {
        Self(registry.resolve(symbols))
    }

    #[inline]
    pub fn is_official(&self, client: Sym) -> bool {
        self.0.get(client.index()).copied().unwrap_or(false)
    }
}

/// One client name per line; blank lines and `#` comments are skipped.
pub fn load_client_registry(path: &Path) -> Result<ClientRegistry> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(ClientRegistry::new(
        text.lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#')),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn case_and_space_insensitive() {
        let r = ClientRegistry::new(["Twitter for iPhone", " Twitter Web Client "]);
        assert!(r.is_official("twitter for iphone"));
        assert!(r.is_official("  TWITTER WEB CLIENT"));
        assert!(!r.is_official("dlvr.it"));
    }

    #[test]
    fn file_loading_skips_comments() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.txt");
        std::fs::write(&p, "# official\nTwitter for Android\n\nTwitter Web Client\n").unwrap();
        let r = load_client_registry(&p).unwrap();
        assert_eq!(r.len(), 2);
        assert!(load_client_registry(&dir.path().join("missing")).is_err());
    }
}
