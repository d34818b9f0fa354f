//! Flat per-check rows and their CSV / JSON-lines encodings.

use std::collections::BTreeMap;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{SummaryRow, TrialRecord, ALL_CORNERS, ALL_SUITE};
use crate::graph::ColorProfile;

pub const CSV_HEADER: &str = "omega,p,trial,seed,check,target_profile,success,steps,retries,ms";

#[derive(Debug, Error)]
pub enum EmitError {
    #[error("no records to emit")]
    Empty,
    #[error("unsupported output format {0:?}: expected csv or jsonl")]
    UnsupportedFormat(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    JsonLines,
}

impl FromStr for OutputFormat {
    type Err = EmitError;

    fn from_str(s: &str) -> Result<Self, EmitError> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "jsonl" | "json-lines" => Ok(OutputFormat::JsonLines),
            other => Err(EmitError::UnsupportedFormat(other.to_string())),
        }
    }
}

/// One output line.
///
/// Per check: `pm` has one row per color with the color's corner as target;
/// `walk` one row per suite profile; `isolated` one row per color whose
/// `steps` is the number of isolated vertices over both sides and whose
/// `success` means there are none; `mcp` one row per suite profile whose
/// `success` is oracle membership. Inapplicable cells are empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub omega: f64,
    pub p: f64,
    pub trial: usize,
    pub seed: u64,
    pub check: String,
    pub target_profile: String,
    pub success: bool,
    pub steps: Option<usize>,
    pub retries: Option<usize>,
    pub ms: Option<f64>,
}

pub(super) fn record_rows(r: &TrialRecord) -> Vec<Row> {
    let row = |check: &str, target: String, success: bool, steps: Option<usize>, retries: Option<usize>, ms: Option<f64>| Row {
        omega: r.omega,
        p: r.p,
        trial: r.trial_index,
        seed: r.derived_seed,
        check: check.to_string(),
        target_profile: target,
        success,
        steps,
        retries,
        ms,
    };
    let corner = |c: usize| ColorProfile::corner(r.q, r.n, c).to_string();
    let mut out = Vec::new();
    if let Some(pm) = &r.pm_success {
        for (i, &ok) in pm.iter().enumerate() {
            out.push(row("pm", corner(i + 1), ok, None, None, None));
        }
    }
    for w in &r.walks {
        out.push(row("walk", w.target.to_string(), w.success, Some(w.steps), Some(w.retries), w.ms));
    }
    if let Some(iso) = &r.isolated {
        for (i, &(a, b)) in iso.iter().enumerate() {
            out.push(row("isolated", corner(i + 1), a + b == 0, Some(a + b), None, None));
        }
    }
    if let Some(mcp) = &r.mcp {
        for (t, member) in &mcp.suite_membership {
            out.push(row("mcp", t.to_string(), *member, None, None, None));
        }
    }
    out
}

/// All rows, in record order.
pub fn rows(records: &[TrialRecord]) -> Vec<Row> {
    records.iter().flat_map(record_rows).collect()
}

pub fn emit<W: Write>(records: &[TrialRecord], format: OutputFormat, mut out: W) -> Result<(), EmitError> {
    if records.is_empty() {
        return Err(EmitError::Empty);
    }
    match format {
        OutputFormat::Csv => {
            // Explicit header so it is present even when no record yields rows.
            let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
            w.write_record(CSV_HEADER.split(','))?;
            for r in rows(records) {
                w.serialize(r)?;
            }
            w.flush()?;
        }
        OutputFormat::JsonLines => {
            for r in rows(records) {
                serde_json::to_writer(&mut out, &r)?;
                out.write_all(b"\n")?;
            }
            out.flush()?;
        }
    }
    Ok(())
}

/// Summary table as CSV: `omega,check,count,successes,fraction,mean_steps`.
pub fn emit_summary<W: Write>(summary: &[SummaryRow], out: W) -> Result<(), EmitError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["omega", "check", "count", "successes", "fraction", "mean_steps"])?;
    for s in summary {
        w.write_record([
            s.omega.to_string(),
            s.check.clone(),
            s.count.to_string(),
            s.successes.to_string(),
            s.fraction().to_string(),
            s.mean_steps().map(|m| m.to_string()).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn is_corner(text: &str) -> bool {
    ColorProfile::parse(text).is_ok_and(|p| p.get(p.argmax()) == p.total())
}

/// Recomputes the summary from flat rows alone.
///
/// Grid points are recovered from row order: a new one starts whenever
/// `omega` changes or the trial index goes backwards.
pub fn summarize_rows(rows: &[Row]) -> Vec<SummaryRow> {
    let mut acc: BTreeMap<(usize, String), SummaryRow> = BTreeMap::new();
    let mut trials: BTreeMap<(usize, usize), (f64, bool, bool)> = BTreeMap::new();
    let mut grid = 0;
    let mut prev: Option<(f64, usize)> = None;
    for r in rows {
        if let Some((omega, trial)) = prev {
            if omega.to_bits() != r.omega.to_bits() || r.trial < trial {
                grid += 1;
            }
        }
        prev = Some((r.omega, r.trial));
        let mut bump = |check: &str, success: bool, steps: Option<usize>| {
            let s = acc.entry((grid, check.to_string())).or_insert_with(|| SummaryRow {
                grid_index: grid,
                omega: r.omega,
                check: check.to_string(),
                count: 0,
                successes: 0,
                steps_sum: 0,
                steps_count: 0,
            });
            s.count += 1;
            s.successes += success as usize;
            if let Some(v) = steps {
                s.steps_sum += v as u64;
                s.steps_count += 1;
            }
        };
        bump(&r.check, r.success, r.steps);
        if r.check == "walk" {
            let t = trials.entry((grid, r.trial)).or_insert((r.omega, true, true));
            t.2 &= r.success;
            if is_corner(&r.target_profile) {
                t.1 &= r.success;
            }
        }
    }
    for ((grid, _), (omega, corners, suite)) in trials {
        for (check, ok) in [(ALL_CORNERS, corners), (ALL_SUITE, suite)] {
            let s = acc.entry((grid, check.to_string())).or_insert_with(|| SummaryRow {
                grid_index: grid,
                omega,
                check: check.to_string(),
                count: 0,
                successes: 0,
                steps_sum: 0,
                steps_count: 0,
            });
            s.count += 1;
            s.successes += ok as usize;
        }
    }
    acc.into_values().collect()
}
