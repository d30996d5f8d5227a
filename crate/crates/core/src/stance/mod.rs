//! Tweet stance labels, per-user support scores and supporting classes.
//!
//! `S = N_pro_T − N_pro_C` per user; positive scores are Trump supporters,
//! negative ones Clinton supporters, and Tukey fences on the score
//! distribution split each side into strong and weak.

mod classes;
mod lexicon;

pub use classes::{
    class_by_status, class_shares, classify_users, quantile_type7, score_users, write_class_by_status,
    write_stance_csv, ClassByStatus, ClassScheme, ClassThresholds, Fence, StanceProfile, SupportClass, MIN_SIDE_USERS,
};
pub use lexicon::{label_corpus, load_lexicon, Camp, Lexicon, LexiconLabeler, StanceLabeler, TweetLabel};
