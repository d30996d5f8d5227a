use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::graph::{DirectedGraph, Interaction};
use super::summary::DegreeSummary;
use crate::error::{Error, Result};
use crate::ingest::{AccountStatus, Corpus, NewsCategory};

/// `source,target,weight` rows, one per edge.
pub fn write_edge_list(graph: &DirectedGraph, corpus: &Corpus, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_io(path, e))?;
    w.write_record(["source", "target", "weight"])?;
    for (s, t, wt) in graph.user_edges() {
        w.write_record([corpus.user_name(s), corpus.user_name(t), &wt.to_string()])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Graphviz rendering with node status and edge weights as attributes.
pub fn write_dot(graph: &DirectedGraph, corpus: &Corpus, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    let io = |e| Error::io(path, e);
    writeln!(out, "digraph \"{}\" {{", graph.kind()).map_err(io)?;
    for n in 0..graph.num_nodes() as u32 {
        let status = graph.status(n).map(AccountStatus::as_str).unwrap_or("unknown");
        writeln!(
            out,
            "  \"{}\" [status=\"{status}\"];",
            dot_escape(corpus.user_name(graph.user(n)))
        )
        .map_err(io)?;
    }
    for (s, t, w) in graph.user_edges() {
        writeln!(
            out,
            "  \"{}\" -> \"{}\" [weight={w}];",
            dot_escape(corpus.user_name(s)),
            dot_escape(corpus.user_name(t))
        )
        .map_err(io)?;
    }
    writeln!(out, "}}").map_err(io)?;
    out.flush().map_err(io)
}

fn csv_io(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::validation(format!("{}: {other:?}", path.display())),
    }
}

fn fmt1(x: f64) -> String {
    format!("{x:.4}")
}

/// Category-network table: N, E, ⟨k⟩/2, N_IRA, IRA mean out/in degree.
pub fn write_category_summary(rows: &[(NewsCategory, DegreeSummary)], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_io(path, e))?;
    w.write_record([
        "category",
        "nodes",
        "edges",
        "mean_half_degree",
        "n_ira",
        "ira_mean_out",
        "ira_mean_in",
    ])?;
    for (cat, s) in rows {
        let ira = s.group(AccountStatus::Ira);
        w.write_record([
            cat.as_str().to_string(),
            s.nodes.to_string(),
            s.edges.to_string(),
            fmt1(s.mean_half_degree()),
            ira.nodes.to_string(),
            fmt1(ira.mean_out()),
            fmt1(ira.mean_in()),
        ])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Ego-network table, one row per interaction layer plus the aggregate.
pub fn write_ego_summary(rows: &[(String, DegreeSummary)], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_io(path, e))?;
    w.write_record([
        "network",
        "nodes",
        "edges",
        "mean_degree",
        "n_ira",
        "ira_mean_out",
        "ira_mean_in",
        "total_weight",
    ])?;
    for (label, s) in rows {
        let ira = s.group(AccountStatus::Ira);
        w.write_record([
            label.clone(),
            s.nodes.to_string(),
            s.edges.to_string(),
            fmt1(s.mean_half_degree()),
            ira.nodes.to_string(),
            fmt1(ira.mean_out()),
            fmt1(ira.mean_in()),
            s.total_weight.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Status shares of the top active accounts per interaction layer.
pub fn write_top_active(rows: &[(Interaction, &'static str, super::summary::StatusShares)], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_io(path, e))?;
    let mut header = vec!["interaction".to_string(), "direction".into(), "ranked".into()];
    header.extend(AccountStatus::ALL.iter().map(|s| s.as_str().to_string()));
    header.push("unlabeled".into());
    w.write_record(&header)?;
    for (i, dir, s) in rows {
        let mut rec = vec![i.as_str().to_string(), dir.to_string(), s.ranked.to_string()];
        rec.extend(s.percent.iter().map(|p| format!("{p:.2}")));
        rec.push(format!("{:.2}", s.unlabeled_percent));
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}
