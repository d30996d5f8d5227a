use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use super::category::normalize_domain;
use super::intern::{Interner, Sym, UserIdx};
use super::record::{normalize_hashtag, ObservationWindow, Timestamp, TweetKind, TweetRecord, TweetRow};
use crate::error::{Error, Result};

/// Share of malformed lines above which loading fails.
pub const MAX_MALFORMED_FRACTION: f64 = 0.10;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MalformedLine {
    pub line: u64,
    pub reason: String,
}

/// Bookkeeping from a corpus load.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct LoadReport {
    /// Non-blank data lines seen.
    pub lines: u64,
    pub malformed: u64,
    pub duplicates: u64,
    pub out_of_window: u64,
    pub first_malformed: Option<MalformedLine>,
}

impl LoadReport {
    fn note_malformed(&mut self, line: u64, reason: String) {
        self.malformed += 1;
        if self.first_malformed.is_none() {
            self.first_malformed = Some(MalformedLine { line, reason });
        }
    }
}

/// In-memory tweet collection with interned users and strings.
///
/// Immutable once built; share freely across reader threads.
#[derive(Debug, Clone, Default)]
pub struct Corpus {
    records: Vec<TweetRecord>,
    users: Interner,
    symbols: Interner,
    report: LoadReport,
}

impl PartialEq for Corpus {
    fn eq(&self, other: &Self) -> bool {
        self.records == other.records && self.users == other.users && self.symbols == other.symbols
    }
}

impl Corpus {
    pub fn records(&self) -> &[TweetRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn users(&self) -> &Interner {
        &self.users
    }

    pub fn symbols(&self) -> &Interner {
        &self.symbols
    }

    pub fn report(&self) -> &LoadReport {
        &self.report
    }

    pub fn user_name(&self, u: UserIdx) -> &str {
        self.users.name(u.0)
    }

    pub fn user(&self, name: &str) -> Option<UserIdx> {
        self.users.get(name).map(UserIdx)
    }

    pub fn symbol(&self, s: Sym) -> &str {
        self.symbols.name(s.0)
    }

    pub fn symbol_id(&self, name: &str) -> Option<Sym> {
        self.symbols.get(name).map(Sym)
    }

    pub fn num_users(&self) -> usize {
        self.users.len()
    }

    /// Converts a record back to its string form.
    pub fn row(&self, r: &TweetRecord) -> TweetRow {
        TweetRow {
            tweet_id: r.tweet_id.to_string(),
            author_id: self.user_name(r.author).to_string(),
            timestamp: r.timestamp.to_rfc3339(),
            kind: r.kind.as_str().to_string(),
            target_user_id: r.target.map(|t| self.user_name(t).to_string()),
            mentioned_user_ids: r.mentions.iter().map(|m| self.user_name(*m).to_string()).collect(),
            urls: r.urls.iter().map(|s| self.symbol(*s).to_string()).collect(),
            hashtags: r.hashtags.iter().map(|s| self.symbol(*s).to_string()).collect(),
            client: self.symbol(r.client).to_string(),
        }
    }

    /// Builds a corpus from string rows with the same validation as file loading.
    pub fn from_rows<I>(rows: I, window: ObservationWindow) -> Result<Corpus>
    where
        I: IntoIterator<Item = TweetRow>,
    {
        let mut b = CorpusBuilder::new(window);
        for (i, row) in rows.into_iter().enumerate() {
            b.push_row(i as u64 + 1, &row);
        }
        b.finish()
    }
}

/// List-valued column, either `;`-joined text or already split items.
enum ListField<'a> {
    Joined(&'a str),
    Items(&'a [String]),
}

impl<'a> ListField<'a> {
    fn items(&self) -> Box<dyn Iterator<Item = &'a str> + 'a> {
        match *self {
            ListField::Joined(s) => Box::new(s.split(';').map(str::trim).filter(|x| !x.is_empty())),
            ListField::Items(v) => Box::new(v.iter().map(|x| x.trim()).filter(|x| !x.is_empty())),
        }
    }
}

struct RawFields<'a> {
    tweet_id: &'a str,
    author: &'a str,
    timestamp: &'a str,
    kind: &'a str,
    target: Option<&'a str>,
    mentions: ListField<'a>,
    urls: ListField<'a>,
    hashtags: ListField<'a>,
    client: &'a str,
}

/// Incremental corpus construction; rows are validated as they arrive.
pub struct CorpusBuilder {
    window: ObservationWindow,
    corpus: Corpus,
}

impl CorpusBuilder {
    pub fn new(window: ObservationWindow) -> Self {
        Self {
            window,
            corpus: Corpus::default(),
        }
    }

    pub fn push_row(&mut self, line: u64, row: &TweetRow) {
        let fields = RawFields {
            tweet_id: &row.tweet_id,
            author: &row.author_id,
            timestamp: &row.timestamp,
            kind: &row.kind,
            target: row.target_user_id.as_deref(),
            mentions: ListField::Items(&row.mentioned_user_ids),
            urls: ListField::Items(&row.urls),
            hashtags: ListField::Items(&row.hashtags),
            client: &row.client,
        };
        self.accept(line, fields);
    }

    fn malformed(&mut self, line: u64, reason: impl Into<String>) {
        self.corpus.report.note_malformed(line, reason.into());
    }

    fn accept(&mut self, line: u64, f: RawFields<'_>) {
        self.corpus.report.lines += 1;
        let tweet_id = f.tweet_id.trim();
        let author = f.author.trim();
        if tweet_id.is_empty() {
            return self.malformed(line, "missing tweet_id");
        }
        if author.is_empty() {
            return self.malformed(line, "missing author_id");
        }
        let timestamp = match Timestamp::parse(f.timestamp) {
            Ok(t) => t,
            Err(e) => return self.malformed(line, e.to_string()),
        };
        let kind: TweetKind = match f.kind.parse() {
            Ok(k) => k,
            Err(e) => return self.malformed(line, e.to_string()),
        };
        let target = f.target.map(str::trim).filter(|t| !t.is_empty());
        if kind.requires_target() && target.is_none() {
            return self.malformed(line, format!("{kind} without target_user_id"));
        }
        let mut urls: SmallVec<[Sym; 2]> = SmallVec::new();
        for u in f.urls.items() {
            match normalize_domain(u) {
                Some(d) => urls.push(Sym(self.corpus.symbols.intern(&d))),
                None => return self.malformed(line, format!("unparseable url `{u}`")),
            }
        }
        if !self.window.contains(timestamp) {
            self.corpus.report.out_of_window += 1;
            return;
        }
        let c = &mut self.corpus;
        let author = UserIdx(c.users.intern(author));
        let target = target.map(|t| UserIdx(c.users.intern(t)));
        let mentions = f.mentions.items().map(|m| UserIdx(c.users.intern(m))).collect();
        let hashtags = f
            .hashtags
            .items()
            .map(|h| Sym(c.symbols.intern(&normalize_hashtag(h))))
            .collect();
        let client = Sym(c.symbols.intern(f.client.trim()));
        c.records.push(TweetRecord {
            tweet_id: tweet_id.into(),
            author,
            timestamp,
            kind,
            target,
            mentions,
            urls,
            hashtags,
            client,
        });
    }

    /// Drops repeated tweet ids (first occurrence wins) and applies the malformed-share limit.
    pub fn finish(mut self) -> Result<Corpus> {
        let records = &self.corpus.records;
        let mut order: Vec<u32> = (0..records.len() as u32).collect();
        order.sort_by(|&a, &b| {
            records[a as usize]
                .tweet_id
                .cmp(&records[b as usize].tweet_id)
                .then(a.cmp(&b))
        });
        let mut drop = vec![false; records.len()];
        let mut dups = 0u64;
        for w in order.windows(2) {
            if records[w[0] as usize].tweet_id == records[w[1] as usize].tweet_id {
                drop[w[1] as usize] = true;
                dups += 1;
            }
        }
        if dups > 0 {
            let mut i = 0;
            self.corpus.records.retain(|_| {
                let keep = !drop[i];
                i += 1;
                keep
            });
            self.corpus.report.duplicates = dups;
            self.corpus.report.malformed += dups;
            if self.corpus.report.first_malformed.is_none() {
                self.corpus.report.first_malformed = Some(MalformedLine {
                    line: 0,
                    reason: "duplicate tweet_id".into(),
                });
            }
        }
        let r = &self.corpus.report;
        if r.lines > 0 && (r.malformed as f64) > MAX_MALFORMED_FRACTION * r.lines as f64 {
            let first = r.first_malformed.as_ref().expect("malformed lines recorded");
            return Err(Error::validation(format!(
                "{} of {} lines malformed (limit {:.0}%); first offending line {}: {}",
                r.malformed,
                r.lines,
                MAX_MALFORMED_FRACTION * 100.0,
                first.line,
                first.reason
            )));
        }
        if r.malformed > 0 {
            log::warn!("skipped {} malformed corpus line(s)", r.malformed);
        }
        Ok(self.corpus)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusFormat {
    Csv,
    JsonLines,
}

impl CorpusFormat {
    pub fn from_path(path: &Path) -> Result<Self> {
        let ext = path
            .extension()
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase)
            .unwrap_or_default();
        match ext.as_str() {
            "csv" => Ok(CorpusFormat::Csv),
            "jsonl" | "ndjson" | "json" => Ok(CorpusFormat::JsonLines),
            _ => Err(Error::argument(format!(
                "cannot infer corpus format from `{}` (expected .csv or .jsonl)",
                path.display()
            ))),
        }
    }
}

/// Loads a line-delimited corpus, keeping records inside `window`.
///
/// Malformed lines are skipped and counted; more than 10% of them is an error.
pub fn load_corpus(path: &Path, window: ObservationWindow) -> Result<Corpus> {
    let format = CorpusFormat::from_path(path)?;
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::with_capacity(1 << 20, file);
    let mut builder = CorpusBuilder::new(window);
    match format {
        CorpusFormat::Csv => read_csv(path, reader, &mut builder)?,
        CorpusFormat::JsonLines => read_jsonl(path, reader, &mut builder)?,
    }
    builder.finish()
}

const CSV_COLUMNS: [&str; 9] = [
    "tweet_id",
    "author_id",
    "timestamp",
    "kind",
    "target_user_id",
    "mentioned_user_ids",
    "urls",
    "hashtags",
    "client",
];

fn read_csv<R: std::io::Read>(path: &Path, reader: R, builder: &mut CorpusBuilder) -> Result<()> {
    let mut rdr = csv::ReaderBuilder::new().flexible(true).from_reader(reader);
    let headers = match rdr.headers() {
        Ok(h) => h.clone(),
        Err(e) => {
            return match e.into_kind() {
                csv::ErrorKind::Io(io) => Err(Error::io(path, io)),
                other => Err(Error::validation(format!("{}: bad header: {other:?}", path.display()))),
            }
        }
    };
    if headers.is_empty() {
        return Ok(());
    }
    let col = |name: &str| headers.iter().position(|h| h.trim() == name);
    let idx: Vec<Option<usize>> = CSV_COLUMNS.iter().map(|c| col(c)).collect();
    for required in 0..4 {
        if idx[required].is_none() {
            return Err(Error::validation(format!(
                "{}: missing required column `{}`",
                path.display(),
                CSV_COLUMNS[required]
            )));
        }
    }
    let mut record = csv::StringRecord::new();
    loop {
        match rdr.read_record(&mut record) {
            Ok(false) => break,
            Ok(true) => {}
            Err(e) => {
                let line = e.position().map(|p| p.line()).unwrap_or(0);
                match e.into_kind() {
                    csv::ErrorKind::Io(io) => return Err(Error::io(path, io)),
                    other => {
                        builder.corpus.report.lines += 1;
                        builder.malformed(line, format!("{other:?}"));
                        continue;
                    }
                }
            }
        }
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        if record.len() == 1 && record[0].trim().is_empty() {
            continue;
        }
        if record.len() != headers.len() {
            builder.corpus.report.lines += 1;
            builder.malformed(
                line,
                format!("expected {} fields, found {}", headers.len(), record.len()),
            );
            continue;
        }
        let get = |i: usize| idx[i].map(|j| &record[j]).unwrap_or("");
        let fields = RawFields {
            tweet_id: get(0),
            author: get(1),
            timestamp: get(2),
            kind: get(3),
            target: Some(get(4)),
            mentions: ListField::Joined(get(5)),
            urls: ListField::Joined(get(6)),
            hashtags: ListField::Joined(get(7)),
            client: get(8),
        };
        builder.accept(line, fields);
    }
    Ok(())
}

/// Accepts either a JSON array of strings or a `;`-joined string.
#[derive(Deserialize)]
#[serde(untagged)]
enum JsonList {
    Items(Vec<String>),
    Joined(String),
}

impl Default for JsonList {
    fn default() -> Self {
        JsonList::Items(Vec::new())
    }
}

#[derive(Deserialize)]
struct JsonRow {
    tweet_id: serde_json::Value,
    author_id: serde_json::Value,
    timestamp: serde_json::Value,
    kind: String,
    #[serde(default)]
    target_user_id: Option<serde_json::Value>,
    #[serde(default)]
    mentioned_user_ids: JsonList,
    #[serde(default)]
    urls: JsonList,
    #[serde(default)]
    hashtags: JsonList,
    #[serde(default)]
    client: String,
}

fn json_scalar(v: &serde_json::Value) -> String {
    match v {
        serde_json::Value::String(s) => s.clone(),
        serde_json::Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn read_jsonl<R: BufRead>(path: &Path, reader: R, builder: &mut CorpusBuilder) -> Result<()> {
    for (i, line) in reader.lines().enumerate() {
        let line_no = i as u64 + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let row: JsonRow = match serde_json::from_str(&line) {
            Ok(r) => r,
            Err(e) => {
                builder.corpus.report.lines += 1;
                builder.malformed(line_no, e.to_string());
                continue;
            }
        };
        let tweet_id = json_scalar(&row.tweet_id);
        let author = json_scalar(&row.author_id);
        let timestamp = json_scalar(&row.timestamp);
        let target = row.target_user_id.as_ref().map(json_scalar);
        let list = |l: &'_ JsonList| -> Vec<String> {
            match l {
                JsonList::Items(v) => v.clone(),
                JsonList::Joined(s) => s.split(';').map(|x| x.to_string()).collect(),
            }
        };
        let (mentions, urls, hashtags) = (list(&row.mentioned_user_ids), list(&row.urls), list(&row.hashtags));
        let fields = RawFields {
            tweet_id: &tweet_id,
            author: &author,
            timestamp: &timestamp,
            kind: &row.kind,
            target: target.as_deref(),
            mentions: ListField::Items(&mentions),
            urls: ListField::Items(&urls),
            hashtags: ListField::Items(&hashtags),
            client: &row.client,
        };
        builder.accept(line_no, fields);
    }
    Ok(())
}

/// Writes `corpus` in the format implied by the extension of `path`.
pub fn write_corpus(corpus: &Corpus, path: &Path) -> Result<()> {
    let format = CorpusFormat::from_path(path)?;
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    match format {
        CorpusFormat::Csv => {
            let mut w = csv::Writer::from_writer(&mut out);
            w.write_record(CSV_COLUMNS)?;
            for r in corpus.records() {
                let row = corpus.row(r);
                w.write_record([
                    row.tweet_id.as_str(),
                    &row.author_id,
                    &row.timestamp,
                    &row.kind,
                    row.target_user_id.as_deref().unwrap_or(""),
                    &row.mentioned_user_ids.join(";"),
                    &row.urls.join(";"),
                    &row.hashtags.join(";"),
                    &row.client,
                ])?;
            }
            w.flush().map_err(|e| Error::io(path, e))?;
        }
        CorpusFormat::JsonLines => {
            for r in corpus.records() {
                let row = corpus.row(r);
                serde_json::to_writer(&mut out, &row).map_err(|e| Error::validation(e.to_string()))?;
                out.write_all(b"\n").map_err(|e| Error::io(path, e))?;
            }
        }
    }
    out.flush().map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = "tweet_id,author_id,timestamp,kind,target_user_id,mentioned_user_ids,urls,hashtags,client\n";

    fn window() -> ObservationWindow {
        ObservationWindow::new(
            Timestamp::parse("2016-06-01T00:00:00Z").unwrap(),
            Timestamp::parse("2016-11-08T23:59:59Z").unwrap(),
        )
        .unwrap()
    }

    fn fixture_lines(n: usize, outside: &[usize]) -> String {
        let mut s = String::from(HEADER);
        for i in 0..n {
            let ts = if outside.contains(&i) {
                "2016-05-01T00:00:00Z"
            } else {
                "2016-07-01T12:00:00Z"
            };
            s.push_str(&format!(
                "t{i},u{i},{ts},retweet,u{},u{};u{},https://www.foxnews.com/a,#MAGA;tcot,Twitter for iPhone\n",
                i + 1,
                i + 2,
                i + 3
            ));
        }
        s
    }

    fn write(dir: &Path, name: &str, body: &str) -> std::path::PathBuf {
        let p = dir.join(name);
        std::fs::write(&p, body).unwrap();
        p
    }

    #[test]
    fn empty_file_is_empty_corpus() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(dir.path(), "e.csv", "");
        let c = load_corpus(&p, window()).unwrap();
        assert!(c.is_empty());
        assert_eq!(c.report().malformed, 0);
        let p = write(dir.path(), "e.jsonl", "");
        assert!(load_corpus(&p, window()).unwrap().is_empty());
    }

    #[test]
    fn ten_good_lines() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(dir.path(), "c.csv", &fixture_lines(10, &[]));
        let c = load_corpus(&p, window()).unwrap();
        assert_eq!(c.len(), 10);
        let r = &c.records()[0];
        assert_eq!(c.symbol(r.urls[0]), "foxnews.com");
        assert_eq!(c.symbol(r.hashtags[0]), "maga");
        assert_eq!(c.user_name(r.target.unwrap()), "u1");
    }

    #[test]
    fn two_outside_window_are_dropped() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(dir.path(), "c.csv", &fixture_lines(10, &[3, 7]));
        let c = load_corpus(&p, window()).unwrap();
        assert_eq!(c.len(), 8);
        assert_eq!(c.report().out_of_window, 2);
    }

    #[test]
    fn malformed_under_limit_is_skipped() {
        let dir = tempfile::tempdir().unwrap();
        let mut body = fixture_lines(10, &[]);
        body.push_str("t99,u1,notatime,original,,,,,web\n");
        let p = write(dir.path(), "c.csv", &body);
        let c = load_corpus(&p, window()).unwrap();
        assert_eq!(c.len(), 10);
        assert_eq!(c.report().malformed, 1);
        assert_eq!(c.report().first_malformed.as_ref().unwrap().line, 12);
    }

    #[test]
    fn malformed_over_limit_names_first_line() {
        let dir = tempfile::tempdir().unwrap();
        let mut body = fixture_lines(8, &[]);
        body.push_str("t98,u1,2016-07-01T00:00:00Z,retweet,,,,,web\n");
        body.push_str("t99,u1,2016-07-01T00:00:00Z,bogus,,,,,web\n");
        let p = write(dir.path(), "c.csv", &body);
        let err = load_corpus(&p, window()).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        let msg = err.to_string();
        assert!(msg.contains("first offending line 10"), "{msg}");
    }

    #[test]
    fn duplicate_ids_count_as_malformed() {
        let mut rows = Vec::new();
        for i in 0..20 {
            rows.push(TweetRow {
                tweet_id: format!("t{}", i.min(18)),
                author_id: "a".into(),
                timestamp: "2016-07-01T00:00:00Z".into(),
                kind: "original".into(),
                ..Default::default()
            });
        }
        let c = Corpus::from_rows(rows, window()).unwrap();
        assert_eq!(c.len(), 19);
        assert_eq!(c.report().duplicates, 1);
    }

    #[test]
    fn unreadable_file_is_io_error() {
        let err = load_corpus(Path::new("/nonexistent/corpus.csv"), window()).unwrap_err();
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn jsonl_accepts_arrays_and_joined_lists() {
        let dir = tempfile::tempdir().unwrap();
        let body = concat!(
            r#"{"tweet_id":1,"author_id":"a","timestamp":"2016-07-01T00:00:00Z","kind":"reply","target_user_id":"b","mentioned_user_ids":["c","d"],"urls":["cnn.com"],"hashtags":"x;y","client":"web"}"#,
            "\n",
            r#"{"tweet_id":"2","author_id":"b","timestamp":"2016-07-01T00:00:00Z","kind":"original"}"#,
            "\n"
        );
        let p = write(dir.path(), "c.jsonl", body);
        let c = load_corpus(&p, window()).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.records()[0].mentions.len(), 2);
        assert_eq!(c.records()[0].hashtags.len(), 2);
        assert_eq!(&*c.records()[0].tweet_id, "1");
    }

    #[test]
    fn csv_round_trip_through_jsonl() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(dir.path(), "c.csv", &fixture_lines(10, &[]));
        let a = load_corpus(&p, window()).unwrap();
        let q = dir.path().join("c.jsonl");
        write_corpus(&a, &q).unwrap();
        let b = load_corpus(&q, window()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn unknown_extension_rejected() {
        assert!(CorpusFormat::from_path(Path::new("x.parquet")).is_err());
    }
}
