//! Tab-separated report tables.

use std::path::{Path, PathBuf};

use crate::dataset::{write_text, DatasetError};
use crate::experiment::{StrategyReport, WorkloadErrorReport};
use crate::real::LoadReport;

#[derive(Clone, Debug, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Self {
        Table {
            header: header.iter().map(|h| h.as_ref().to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_tsv(&self) -> String {
        let mut s = self.header.join("\t");
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.join("\t"));
            s.push('\n');
        }
        s
    }

    pub fn write(&self, path: &Path) -> Result<(), DatasetError> {
        write_text(path, &self.to_tsv())
    }
}

fn f(v: f64) -> String {
    format!("{v:.6}")
}

/// One row describing a strategy's run; timing columns only when `timing`.
pub fn strategy_table(r: &StrategyReport, timing: bool) -> Table {
    let mut header = vec![
        "strategy",
        "queries",
        "repetitions",
        "nodes_per_query",
        "pages_per_query",
        "records_per_query",
        "answers_per_query",
        "candidate_objects",
        "candidate_areas",
        "subtractions",
        "pruned_areas",
        "postponed_areas",
        "hole_subtractions",
        "pruned_holes",
        "postponed_holes",
        "mc_draws",
        "mc_accepted",
    ];
    if timing {
        header.extend(["mean_ms", "median_ms", "precompute_ms"]);
    }
    let mut t = Table::new(&header);
    let c = &r.counters;
    let g = &c.geometry;
    let mut row = vec![
        r.strategy.map_or("-".into(), |s| s.to_string()),
        r.queries.to_string(),
        r.repetitions.to_string(),
        f(r.nodes_per_query),
        f(r.pages_per_query),
        f(r.records_per_query),
        f(r.answers_per_query),
        c.candidate_objects.to_string(),
        c.candidate_areas.to_string(),
        g.subtractions.to_string(),
        g.pruned_areas.to_string(),
        g.postponed_areas.to_string(),
        g.hole_subtractions.to_string(),
        g.pruned_holes.to_string(),
        g.postponed_holes.to_string(),
        c.mc_draws.to_string(),
        c.mc_accepted.to_string(),
    ];
    if timing {
        row.push(f(r.mean_ms));
        row.push(f(r.median_ms));
        row.push(r.precompute_ms.map_or("-".into(), f));
    }
    t.push(row);
    t
}

/// Writes `<dir>/<experiment>_<strategy>.tsv` for each report.
pub fn write_strategy_reports(
    dir: &Path,
    experiment: &str,
    reports: &[StrategyReport],
    timing: bool,
) -> Result<Vec<PathBuf>, DatasetError> {
    let mut paths = Vec::new();
    for r in reports {
        let name = r.strategy.map_or("all".into(), |s| s.to_string());
        let p = dir.join(format!("{experiment}_{name}.tsv"));
        strategy_table(r, timing).write(&p)?;
        paths.push(p);
    }
    Ok(paths)
}

/// Summary rows (one per setting) followed by nothing else.
pub fn error_summary_table(reports: &[WorkloadErrorReport]) -> Table {
    let mut t = Table::new(&["parameter", "value", "awe", "rwe", "rwe_queries"]);
    for r in reports {
        t.push(vec![
            r.label.clone(),
            r.value.to_string(),
            format!("{:.9}", r.awe),
            format!("{:.9}", r.rwe),
            r.rwe_queries.to_string(),
        ]);
    }
    t
}

/// Per-query estimates and references for one setting.
pub fn error_detail_table(r: &WorkloadErrorReport) -> Table {
    let mut t = Table::new(&["query", "estimate", "reference", "delta"]);
    for (i, (e, rf)) in r.estimates.iter().zip(&r.references).enumerate() {
        t.push(vec![
            i.to_string(),
            format!("{e:.9}"),
            format!("{rf:.9}"),
            format!("{:.9}", e - rf),
        ]);
    }
    t
}

pub fn load_table(r: &LoadReport) -> Table {
    let mut t = Table::new(&[
        "points_read",
        "points_inside_rects",
        "points_kept",
        "rects_read",
        "rects_degenerate",
        "rects_overlapping",
        "rects_kept",
    ]);
    t.push(vec![
        r.points_read.to_string(),
        r.points_inside_rects.to_string(),
        r.points_kept.to_string(),
        r.rects_read.to_string(),
        r.rects_degenerate.to_string(),
        r.rects_overlapping.to_string(),
        r.rects_kept.to_string(),
    ]);
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_names_every_column() {
        let t = strategy_table(&StrategyReport::default(), true);
        let tsv = t.to_tsv();
        let mut lines = tsv.lines();
        let h = lines.next().unwrap().split('\t').count();
        assert_eq!(lines.next().unwrap().split('\t').count(), h);
        assert!(tsv.starts_with("strategy\t"));
    }
}
