//! JSON and Markdown renderings of a verification run.

use std::fmt::Write as _;

use cfinsler_core::{ResidualRow, SampleCoords, C64};
use serde::Serialize;

use crate::config::RunConfig;
use crate::suites::SuiteOutcome;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Markdown,
}

#[derive(Serialize)]
struct JsonRun<'a> {
    schema_version: u32,
    config_hash: String,
    seed: u64,
    model: String,
    norm: String,
    pass: bool,
    suites: Vec<JsonSuite<'a>>,
}

#[derive(Serialize)]
struct JsonSuite<'a> {
    suite: &'a str,
    pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    runtime_ms: Option<u64>,
    rows: Vec<JsonRow<'a>>,
    errors: &'a [String],
    notes: &'a [String],
}

#[derive(Serialize)]
struct JsonRow<'a> {
    label: &'a str,
    // serde_json writes non-finite floats as null.
    value: f64,
    tolerance: f64,
    expect: &'static str,
    threshold: f64,
    samples: usize,
    pass: bool,
    worst: JsonCoords,
}

#[derive(Serialize)]
struct JsonCoords {
    z: Vec<[f64; 2]>,
    w: Option<Vec<[f64; 2]>>,
}

fn pairs(v: &[C64]) -> Vec<[f64; 2]> {
    v.iter().map(|c| [c.re, c.im]).collect()
}

impl From<&SampleCoords> for JsonCoords {
    fn from(s: &SampleCoords) -> Self {
        JsonCoords { z: pairs(&s.z), w: s.w.as_deref().map(pairs) }
    }
}

fn json_row(r: &ResidualRow) -> JsonRow<'_> {
    JsonRow {
        label: &r.label,
        value: r.value,
        tolerance: r.tol,
        expect: r.expect.as_str(),
        threshold: r.expect.threshold(r.tol),
        samples: r.samples,
        pass: r.pass(),
        worst: (&r.worst).into(),
    }
}

pub fn overall_pass(outcomes: &[SuiteOutcome]) -> bool {
    !outcomes.is_empty() && outcomes.iter().all(|o| o.report.pass())
}

pub fn render(cfg: &RunConfig, outcomes: &[SuiteOutcome], format: Format, timings: bool) -> String {
    match format {
        Format::Json => render_json(cfg, outcomes, timings),
        Format::Markdown => render_markdown(cfg, outcomes, timings),
    }
}

pub fn render_json(cfg: &RunConfig, outcomes: &[SuiteOutcome], timings: bool) -> String {
    let run = JsonRun {
        schema_version: SCHEMA_VERSION,
        config_hash: cfg.config_hash(),
        seed: cfg.seed,
        model: cfg.model.name(),
        norm: cfg.norm_label(),
        pass: overall_pass(outcomes),
        suites: outcomes
            .iter()
            .map(|o| JsonSuite {
                suite: &o.report.suite,
                pass: o.report.pass(),
                runtime_ms: timings.then_some(o.runtime_ms),
                rows: o.report.rows.iter().map(json_row).collect(),
                errors: &o.report.errors,
                notes: &o.report.notes,
            })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&run).expect("report serializes");
    text.push('\n');
    text
}

fn status(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

fn fmt_value(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else {
        format!("{x:.3e}")
    }
}

fn fmt_point(v: &[C64]) -> String {
    let parts: Vec<String> = v.iter().map(|c| format!("{:.4}{:+.4}i", c.re, c.im)).collect();
    format!("({})", parts.join(", "))
}

pub fn render_markdown(cfg: &RunConfig, outcomes: &[SuiteOutcome], timings: bool) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# Verification report\n");
    let _ = writeln!(out, "- model: {}", cfg.model.name());
    let _ = writeln!(out, "- norm: {}", cfg.norm_label());
    let _ = writeln!(out, "- seed: {}", cfg.seed);
    let _ = writeln!(out, "- config hash: `{}`", cfg.config_hash());
    let _ = writeln!(out, "- overall: {}", status(overall_pass(outcomes)));
    for o in outcomes {
        let r = &o.report;
        let _ = write!(out, "\n## {}: {}", r.suite, status(r.pass()));
        if timings {
            let _ = write!(out, " ({} ms)", o.runtime_ms);
        }
        let _ = writeln!(out, "\n");
        let _ = writeln!(out, "| check | value | tolerance | expect | samples | status |");
        let _ = writeln!(out, "|---|---|---|---|---|---|");
        for row in &r.rows {
            let _ = writeln!(
                out,
                "| {} | {} | {:.1e} | {} | {} | {} |",
                row.label.replace('|', "\\|"),
                fmt_value(row.value),
                row.tol,
                row.expect.as_str(),
                row.samples,
                status(row.pass())
            );
        }
        for row in r.failures() {
            let _ = write!(out, "\nWorst sample for `{}`: z = {}", row.label, fmt_point(&row.worst.z));
            if let Some(w) = &row.worst.w {
                let _ = write!(out, ", w = {}", fmt_point(w));
            }
            let _ = writeln!(out);
        }
        if !r.errors.is_empty() {
            let _ = writeln!(out, "\nErrors:\n");
            for e in &r.errors {
                let _ = writeln!(out, "- {e}");
            }
        }
        if !r.notes.is_empty() {
            let _ = writeln!(out, "\nNotes:\n");
            for n in &r.notes {
                let _ = writeln!(out, "- {n}");
            }
        }
    }
    out
}
