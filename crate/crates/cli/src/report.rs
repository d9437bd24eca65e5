//! Report emission for sweeps: CSV, JSON and the run manifest.

use std::io::Write;

use serde::Serialize;
use vinogradov::cache::CacheStats;
use vinogradov::lemmas::{slack_string, LemmaParams, SweepConfig, SweepOutcome, SweepSummary};

pub const CSV_HEADER: [&str; 13] =
    ["lemma_id", "variant", "x", "p", "a", "b", "c", "lhs", "rhs", "holds", "slack", "status", "note"];

fn param_cells(params: &LemmaParams) -> [String; 5] {
    let opt = |v: Option<u32>| v.map(|v| v.to_string()).unwrap_or_default();
    [
        params.x.map(|x| x.to_string()).unwrap_or_default(),
        params.p.to_string(),
        opt(params.a),
        opt(params.b),
        opt(params.c),
    ]
}

pub fn write_csv<W: Write>(out: W, outcomes: &[SweepOutcome]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for outcome in outcomes {
        let row: Vec<String> = match outcome {
            SweepOutcome::Checked(r) => {
                let mut row = vec![r.lemma_id.to_string(), r.variant.unwrap_or("").to_string()];
                row.extend(param_cells(&r.params));
                let status = if r.informational { "informational" } else { "checked" };
                row.extend([
                    r.lhs.to_string(),
                    r.rhs.to_string(),
                    r.holds.to_string(),
                    slack_string(&r.slack),
                    status.to_string(),
                    r.note.clone().unwrap_or_default(),
                ]);
                row
            }
            SweepOutcome::Skipped { lemma_id, params, reason } | SweepOutcome::Errored { lemma_id, params, error: reason } => {
                let status = if matches!(outcome, SweepOutcome::Skipped { .. }) { "skipped" } else { "error" };
                let mut row = vec![lemma_id.to_string(), String::new()];
                row.extend(param_cells(params));
                row.extend([String::new(), String::new(), String::new(), String::new(), status.to_string(), reason.clone()]);
                row
            }
        };
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
pub struct Report<'a> {
    pub engine_version: &'a str,
    pub config: &'a SweepConfig,
    pub summary: SweepSummary,
    pub outcomes: &'a [SweepOutcome],
}

#[derive(Serialize)]
pub struct CacheSection {
    pub path: Option<String>,
    #[serde(flatten)]
    pub stats: CacheStats,
}

/// Per-run metadata. Kept apart from the reports so those stay byte-stable.
#[derive(Serialize)]
pub struct RunManifest<'a> {
    pub command: String,
    pub config: &'a SweepConfig,
    pub engine: &'a str,
    pub engine_version: &'a str,
    pub threads: usize,
    pub started_at: String,
    pub finished_at: String,
    pub cache: CacheSection,
    pub summary: SweepSummary,
    pub failures: Vec<String>,
}

pub fn failure_lines(outcomes: &[SweepOutcome]) -> Vec<String> {
    outcomes
        .iter()
        .filter_map(|o| match o {
            SweepOutcome::Checked(r) if r.is_failure() => {
                Some(format!("lemma {} {}: {} > {}", r.lemma_id, r.params, r.lhs, r.rhs))
            }
            SweepOutcome::Errored { lemma_id, params, error } => Some(format!("lemma {lemma_id} {params}: {error}")),
            _ => None,
        })
        .collect()
}
