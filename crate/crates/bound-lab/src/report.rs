use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

use crate::error::{LabError, LabResult};
use crate::gate::{theorem_gate, GateReport};
use crate::spec::{Check, ExperimentSpec};
use crate::sweep::{boundedness_sweep, msharp_control_ratio, msharp_domination, weak11, RatioReport, RefinementReport, SweepVerdict};
use crate::verify::VerifyReport;

pub const SCHEMA_VERSION: u32 = 1;

/// What a run executes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Gate only.
    Gate,
    /// Gate (attached) and the ratio sweep.
    Sweep,
    /// Every check listed in the spec.
    Full,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckVerdict {
    pub check: Check,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub name: String,
    pub spec: ExperimentSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gate: Option<GateReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<RatioReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub domination: Option<RefinementReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub control: Option<RefinementReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weak11: Option<RefinementReport>,
    pub verdicts: Vec<CheckVerdict>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub experiments: Vec<ExperimentReport>,
    pub pass: bool,
}

fn refinement_verdict(r: &RefinementReport) -> CheckVerdict {
    CheckVerdict {
        check: r.check,
        pass: r.stable,
        detail: format!("max change {:.4} across resolutions (threshold {})", r.max_change, r.threshold),
    }
}

/// Runs one experiment in the order gate → sweep → domination → control.
pub fn run_experiment(spec: &ExperimentSpec, mode: Mode) -> LabResult<ExperimentReport> {
    let wants = |c: Check| match mode {
        Mode::Gate => c == Check::Gate,
        Mode::Sweep => c == Check::Gate || c == Check::RatioSweep,
        Mode::Full => spec.checks.contains(&c),
    };
    if mode == Mode::Gate && spec.gates.is_empty() {
        return Err(LabError::Spec(format!("experiment `{}` lists no gates", spec.name)));
    }
    let mut verdicts = Vec::new();
    let gate = if spec.gates.is_empty() { None } else { Some(theorem_gate(spec)?) };
    if let Some(g) = &gate {
        if mode == Mode::Gate || spec.checks.contains(&Check::Gate) {
            let failing: Vec<String> = g
                .verdicts
                .iter()
                .filter(|v| !v.applies)
                .map(|v| format!("{}: {}", v.gate.label(), v.violated.join(", ")))
                .collect();
            verdicts.push(CheckVerdict {
                check: Check::Gate,
                pass: g.applies(),
                detail: if failing.is_empty() { "applies".into() } else { failing.join("; ") },
            });
        }
    }
    let sweep = if wants(Check::RatioSweep) {
        let r = boundedness_sweep(spec)?;
        let expected = if spec.expect_growing { SweepVerdict::Growing } else { SweepVerdict::BoundedStable };
        verdicts.push(CheckVerdict {
            check: Check::RatioSweep,
            pass: r.verdict == expected,
            detail: format!("{}, last change {:.4}, growth {:.4}", r.verdict.label(), r.last_change, r.growth),
        });
        Some(r)
    } else {
        None
    };
    let domination = if wants(Check::MsharpDomination) {
        let r = msharp_domination(spec)?;
        verdicts.push(refinement_verdict(&r));
        Some(r)
    } else {
        None
    };
    let control = if wants(Check::MsharpControl) {
        let r = msharp_control_ratio(spec)?;
        verdicts.push(refinement_verdict(&r));
        Some(r)
    } else {
        None
    };
    // Domination is reported alongside the weak-type profile.
    let weak = if wants(Check::Weak11) || wants(Check::MsharpDomination) {
        let r = weak11(spec)?;
        if wants(Check::Weak11) {
            verdicts.push(refinement_verdict(&r));
        }
        Some(r)
    } else {
        None
    };
    let pass = verdicts.iter().all(|v| v.pass);
    Ok(ExperimentReport {
        name: spec.name.clone(),
        spec: spec.clone(),
        gate,
        sweep,
        domination,
        control,
        weak11: weak,
        verdicts,
        pass,
    })
}

pub fn run(specs: &[ExperimentSpec], mode: Mode) -> LabResult<Report> {
    let experiments = specs.iter().map(|s| run_experiment(s, mode)).collect::<LabResult<Vec<_>>>()?;
    let pass = experiments.iter().all(|e| e.pass);
    Ok(Report {
        schema_version: SCHEMA_VERSION,
        experiments,
        pass,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CsvRow {
    pub check: String,
    #[serde(rename = "N")]
    pub n: Option<usize>,
    #[serde(rename = "M")]
    pub m: usize,
    pub p_spec: String,
    pub w_spec: String,
    pub statistic: String,
    pub value: f64,
}

/// Rows per check, in report order.
pub fn csv_tables(e: &ExperimentReport) -> Vec<(Check, Vec<CsvRow>)> {
    let spec = &e.spec;
    let row = |check: String, n: Option<usize>, m: usize, statistic: String, value: f64| CsvRow {
        check,
        n,
        m,
        p_spec: spec.space.p_label(),
        w_spec: spec.space.w_label(),
        statistic,
        value,
    };
    let mut tables = Vec::new();
    if let Some(g) = &e.gate {
        let mut rows = Vec::new();
        for v in &g.verdicts {
            let check = format!("gate:{}", v.gate.label());
            rows.push(row(check.clone(), None, spec.resolution, "applies".into(), v.applies as u8 as f64));
            for h in &v.hypotheses {
                for (stat, val) in [("value", h.value), ("bound", h.bound), ("slack", h.slack)] {
                    if let Some(val) = val {
                        rows.push(row(check.clone(), None, spec.resolution, format!("{}:{stat}", h.name), val));
                    }
                }
            }
        }
        tables.push((Check::Gate, rows));
    }
    if let Some(s) = &e.sweep {
        let mut rows = Vec::new();
        for t in &s.truncations {
            for (stat, val) in [
                ("max_ratio", t.max_ratio),
                ("mean_ratio", t.mean_ratio),
                ("min_ratio", t.min_ratio),
                ("argmax", t.argmax as f64),
            ] {
                rows.push(row("ratio_sweep".into(), Some(t.n), s.resolution, stat.into(), val));
            }
        }
        for (stat, val) in [("last_change", s.last_change), ("spread", s.spread), ("growth", s.growth)] {
            rows.push(row("ratio_sweep".into(), None, s.resolution, stat.into(), val));
        }
        tables.push((Check::RatioSweep, rows));
    }
    for r in [&e.domination, &e.control, &e.weak11].into_iter().flatten() {
        let mut rows = Vec::new();
        for s in &r.resolutions {
            rows.push(row(r.check.label().into(), Some(r.truncation), s.resolution, "value".into(), s.value));
            rows.push(row(r.check.label().into(), Some(r.truncation), s.resolution, "argmax".into(), s.argmax as f64));
            rows.push(row(r.check.label().into(), Some(r.truncation), s.resolution, "excluded".into(), s.excluded as f64));
        }
        tables.push((r.check, rows));
    }
    tables
}

fn file_stem(name: &str, index: usize) -> String {
    let clean: String = name
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect();
    if clean.is_empty() {
        format!("experiment{index}")
    } else {
        clean
    }
}

/// Writes `report.json` and one CSV per experiment and check; returns the paths written.
pub fn write_report(report: &Report, out: &Path) -> LabResult<Vec<PathBuf>> {
    std::fs::create_dir_all(out)?;
    let mut written = Vec::new();
    let json = out.join("report.json");
    std::fs::write(&json, to_json(report)?)?;
    written.push(json);
    for (i, e) in report.experiments.iter().enumerate() {
        for (check, rows) in csv_tables(e) {
            let path = out.join(format!("{}.{}.csv", file_stem(&e.name, i), check.label()));
            let mut w = csv::Writer::from_path(&path)?;
            for r in rows {
                w.serialize(r)?;
            }
            w.flush()?;
            written.push(path);
        }
    }
    Ok(written)
}

pub fn write_verify(report: &VerifyReport, out: &Path) -> LabResult<Vec<PathBuf>> {
    std::fs::create_dir_all(out)?;
    let json = out.join("verify.json");
    std::fs::write(&json, to_json(report)?)?;
    let path = out.join("verify.csv");
    let mut w = csv::Writer::from_path(&path)?;
    for e in &report.entries {
        w.serialize(e)?;
    }
    w.flush()?;
    Ok(vec![json, path])
}

pub fn to_json<T: Serialize>(value: &T) -> LabResult<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| LabError::Io(std::io::Error::other(e)))?;
    s.push('\n');
    Ok(s)
}
