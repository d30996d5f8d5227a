use std::path::Path;

use super::heatmap::KsHeatmap;
use super::sampling::DegreeSampleVector;
use crate::error::{Error, Result};

fn writer(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    csv::Writer::from_path(path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::validation(format!("{}: {other:?}", path.display())),
    })
}

/// Wide table: one row per (group, direction), one column per category
/// network plus a stderr column for each.
pub fn write_sampled_degrees(vectors: &[DegreeSampleVector], categories: &[String], path: &Path) -> Result<()> {
    let mut w = writer(path)?;
    let mut header = vec!["group".to_string(), "direction".into(), "realizations".into()];
    for c in categories {
        header.push(c.clone());
        header.push(format!("{c}_stderr"));
    }
    w.write_record(&header)?;
    for v in vectors {
        let mut rec = vec![
            v.group.as_str().to_string(),
            v.direction.as_str().into(),
            v.realizations.to_string(),
        ];
        for (x, se) in v.values.iter().zip(&v.stderr) {
            rec.push(format!("{x:.6}"));
            rec.push(format!("{se:.6}"));
        }
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Square p-value matrix with group labels on both axes.
pub fn write_p_matrix(h: &KsHeatmap, path: &Path) -> Result<()> {
    let mut w = writer(path)?;
    let mut header = vec![String::from("group")];
    header.extend(h.groups.iter().map(|g| g.as_str().to_string()));
    w.write_record(&header)?;
    for (g, row) in h.groups.iter().zip(&h.cells) {
        let mut rec = vec![g.as_str().to_string()];
        rec.extend(row.iter().map(|c| format!("{:.6}", c.p_value)));
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Long-format plot data, one row per ordered pair.
pub fn write_heatmap_plot_data(h: &KsHeatmap, path: &Path) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["direction", "row", "col", "statistic", "p_value", "reject", "method"])?;
    for (a, row) in h.groups.iter().zip(&h.cells) {
        for (b, c) in h.groups.iter().zip(row) {
            let method = match c.method {
                super::KsMethod::Exact => "exact",
                super::KsMethod::Asymptotic => "asymptotic",
            };
            w.write_record([
                h.direction.as_str(),
                a.as_str(),
                b.as_str(),
                &format!("{:.6}", c.statistic),
                &format!("{:.6}", c.p_value),
                if c.reject { "true" } else { "false" },
                method,
            ])?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))
}
