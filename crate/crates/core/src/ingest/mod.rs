//! Parsing of tweet dumps, account-status tables, outlet lists and client lists.

mod category;
mod clients;
mod corpus;
mod intern;
mod record;
mod status;

pub use category::{load_categories, normalize_domain, tag_news_category, CategoryLookup, CategoryMap, NewsCategory};
pub use clients::{load_client_registry, ClientRegistry, OfficialLookup};
pub use corpus::{
    load_corpus, write_corpus, Corpus, CorpusBuilder, CorpusFormat, LoadReport, MalformedLine, MAX_MALFORMED_FRACTION,
};
pub use intern::{Interner, Sym, UserIdx};
pub use record::{normalize_hashtag, ObservationWindow, Timestamp, TweetKind, TweetRecord, TweetRow};
pub use status::{load_statuses, AccountStatus, StatusLookup, StatusTable};
