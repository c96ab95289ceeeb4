//! CSV rows and the JSON summary.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::harness::criteria::{CriterionOutcome, Suite};
use crate::harness::stats::StatReport;
use crate::spectra::SpectralRow;
use crate::words::Word;

#[derive(Debug, Serialize)]
pub struct WordRow {
    pub word: String,
    pub length: usize,
    pub h: usize,
    pub b: usize,
    pub c: usize,
    pub orbit_size: usize,
}

impl From<&Word> for WordRow {
    fn from(w: &Word) -> WordRow {
        let st = w.stats();
        WordRow {
            word: w.to_string(),
            length: st.length,
            h: st.h,
            b: st.b,
            c: st.c,
            orbit_size: st.orbit_size(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SimulateRow {
    pub replica: u64,
    pub t: f64,
    pub s: f64,
    pub k: usize,
    pub word: String,
    pub count: u64,
}

#[derive(Debug, Serialize)]
pub struct LimitRow {
    pub replica: u64,
    pub t: f64,
    pub s: f64,
    pub word: String,
    pub count: u64,
}

#[derive(Debug, Serialize)]
pub struct SpectraCsvRow {
    pub k: usize,
    pub trace_gamma: f64,
    pub cnbw: String,
    pub residual: f64,
    pub f_trace: f64,
    pub cycle_count: u64,
    pub tangle_free: bool,
}

impl From<&SpectralRow> for SpectraCsvRow {
    fn from(r: &SpectralRow) -> SpectraCsvRow {
        SpectraCsvRow {
            k: r.k,
            trace_gamma: r.trace_gamma,
            cnbw: r.cnbw.to_string(),
            residual: r.residual,
            f_trace: r.f_trace,
            cycle_count: r.cycle_count,
            tangle_free: r.tangle_free,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct CovRow {
    pub t1: f64,
    pub s1: f64,
    pub t2: f64,
    pub s2: f64,
    pub cov: Option<f64>,
    pub lo: Option<f64>,
    pub hi: Option<f64>,
}

/// Write rows as CSV with a header to `out`, or to stdout.
pub fn write_csv<S: Serialize>(out: Option<&Path>, rows: impl IntoIterator<Item = S>) -> anyhow::Result<()> {
    let sink: Box<dyn Write> = match out {
        Some(p) => Box::new(std::io::BufWriter::new(std::fs::File::create(p)?)),
        None => Box::new(std::io::stdout().lock()),
    };
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(sink);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct ReportJson {
    pub name: String,
    pub estimate: f64,
    pub se: f64,
    pub reference: f64,
    pub z: f64,
    pub pass: bool,
}

impl From<&StatReport> for ReportJson {
    fn from(r: &StatReport) -> ReportJson {
        ReportJson {
            name: r.name.clone(),
            estimate: r.estimate,
            se: r.std_error,
            reference: r.reference,
            z: r.z_score,
            pass: r.pass,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Summary {
    pub experiment: String,
    pub params: serde_json::Value,
    pub reports: Vec<ReportJson>,
}

/// Summary of a validation run; report names carry their criterion as `c<id>/`.
pub fn validation_summary(suite: Suite, seed: u64, outcomes: &[CriterionOutcome]) -> Summary {
    let criteria: Vec<serde_json::Value> = outcomes
        .iter()
        .map(|o| {
            serde_json::json!({
                "id": o.id,
                "title": o.title,
                "pass": o.pass(),
                "sigma_tests": o.statistical_tests(),
                "sigma_failures": o.statistical_failures(),
                "allowed_failures": o.allowed_failures(),
                "hard_failures": o.hard_failures(),
                "config": o.config,
            })
        })
        .collect();
    let reports = outcomes
        .iter()
        .flat_map(|o| {
            o.reports.iter().map(move |r| ReportJson { name: format!("c{}/{}", o.id, r.name), ..ReportJson::from(r) })
        })
        .collect();
    Summary {
        experiment: format!("validate-{}", suite.name()),
        params: serde_json::json!({
            "suite": suite.name(),
            "seed": seed,
            "pass": outcomes.iter().all(|o| o.pass()),
            "multiple_testing": "at most one 3-sigma failure per started 100 tests, none in families below 20",
            "criteria": criteria,
        }),
        reports,
    }
}

pub fn write_json(out: Option<&Path>, summary: &Summary) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(summary)? + "\n";
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}
