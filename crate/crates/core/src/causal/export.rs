use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::effects::CausalEffectMatrix;
use super::threshold::ThresholdResult;
use crate::error::{Error, Result};

fn writer(path: &Path) -> Result<csv::Writer<File>> {
    csv::Writer::from_path(path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::validation(format!("{}: {other:?}", path.display())),
    })
}

/// Table layout: one row per target, one column per source, cells `v ± se`.
pub fn write_effect_matrix(m: &CausalEffectMatrix, names: &[&str], path: &Path) -> Result<()> {
    let mut w = writer(path)?;
    let mut header = vec!["target"];
    header.extend_from_slice(names);
    w.write_record(&header)?;
    for (t, name) in names.iter().enumerate() {
        let mut rec = vec![name.to_string()];
        for s in 0..names.len() {
            let v = m.value[s][t];
            rec.push(if v == 0.0 {
                "0".to_string()
            } else {
                format!("{v:.3} ± {:.3}", m.stderr[s][t])
            });
        }
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Long list of every nonzero effect with its lag and selection flag.
pub fn write_links(m: &CausalEffectMatrix, selected: &ThresholdResult, names: &[&str], path: &Path) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["source", "target", "lag", "effect", "stderr", "selected"])?;
    for s in 0..m.len() {
        for t in 0..m.len() {
            if m.value[s][t] == 0.0 {
                continue;
            }
            let chosen = selected.links.contains(&(s, t));
            w.write_record([
                names[s].to_string(),
                names[t].to_string(),
                m.lag[s][t].map(|l| l.to_string()).unwrap_or_default(),
                format!("{:.6}", m.value[s][t]),
                format!("{:.6}", m.stderr[s][t]),
                chosen.to_string(),
            ])?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Graphviz network of the selected links: node size follows the
/// auto-effect, edge width follows the effect.
pub fn write_causal_dot(
    m: &CausalEffectMatrix,
    selected: &ThresholdResult,
    names: &[&str],
    colors: &[&str],
    path: &Path,
) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    let io = |e| Error::io(path, e);
    writeln!(out, "digraph causal {{").map_err(io)?;
    writeln!(out, "  // threshold = {:.4}", selected.threshold).map_err(io)?;
    for (i, name) in names.iter().enumerate() {
        let auto = m.value[i][i];
        writeln!(
            out,
            "  \"{name}\" [shape=circle, style=filled, fillcolor=\"{}\", size={auto:.4}, width={:.3}];",
            colors.get(i).copied().unwrap_or("white"),
            0.3 + 1.5 * auto
        )
        .map_err(io)?;
    }
    for &(s, t) in &selected.links {
        let v = m.value[s][t];
        writeln!(
            out,
            "  \"{}\" -> \"{}\" [effect={v:.4}, penwidth={:.3}];",
            names[s],
            names[t],
            1.0 + 10.0 * v
        )
        .map_err(io)?;
    }
    writeln!(out, "}}").map_err(io)?;
    out.flush().map_err(io)
}
