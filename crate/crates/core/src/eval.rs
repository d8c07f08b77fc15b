//! Overlap metrics and per-case / summary reports.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::volume::MaskVolume;

/// Dice similarity `2|A ∩ B| / (|A| + |B|)`; two empty masks score 1.
pub fn dice(a: &MaskVolume, b: &MaskVolume) -> Result<f64> {
    if a.geometry() != b.geometry() {
        return Err(Error::GeometryMismatch);
    }
    let (mut na, mut nb, mut both) = (0u64, 0u64, 0u64);
    for (&x, &y) in a.data().iter().zip(b.data()) {
        let (x, y) = (x != 0, y != 0);
        na += u64::from(x);
        nb += u64::from(y);
        both += u64::from(x && y);
    }
    if na + nb == 0 {
        return Ok(1.0);
    }
    Ok(2.0 * both as f64 / (na + nb) as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseRow {
    pub id: String,
    pub manual_mm3: f64,
    pub auto_mm3: f64,
    pub manual_voxels: u64,
    pub auto_voxels: u64,
    pub dsc_pct: f64,
}

pub fn case_report(pred: &MaskVolume, truth: &MaskVolume, case_id: &str) -> Result<CaseRow> {
    let dsc = dice(pred, truth)?;
    let voxel = truth.geometry().voxel_volume_mm3();
    let manual_voxels = truth.count() as u64;
    let auto_voxels = pred.count() as u64;
    Ok(CaseRow {
        id: case_id.to_string(),
        manual_mm3: manual_voxels as f64 * voxel,
        auto_mm3: auto_voxels as f64 * voxel,
        manual_voxels,
        auto_voxels,
        dsc_pct: 100.0 * dsc,
    })
}

/// Min, max, mean and sample (n - 1) standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub stddev: f64,
    /// False for a single value, where the sample deviation is undefined and
    /// `stddev` is reported as 0.
    pub stddev_defined: bool,
}

impl Stats {
    pub fn of(values: &[f64]) -> Result<Stats> {
        if values.is_empty() {
            return Err(Error::EmptyInput);
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let (stddev, stddev_defined) = if values.len() > 1 {
            let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
            ((ss / (n - 1.0)).sqrt(), true)
        } else {
            (0.0, false)
        };
        Ok(Stats { min, max, mean: mean.clamp(min, max), stddev, stddev_defined })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub manual_cm3: Stats,
    pub auto_cm3: Stats,
    pub manual_voxels: Stats,
    pub auto_voxels: Stats,
    pub dsc_pct: Stats,
}

pub fn summarize(rows: &[CaseRow]) -> Result<SummaryRow> {
    let column = |f: fn(&CaseRow) -> f64| Stats::of(&rows.iter().map(f).collect::<Vec<_>>());
    Ok(SummaryRow {
        manual_cm3: column(|r| r.manual_mm3 / 1000.0)?,
        auto_cm3: column(|r| r.auto_mm3 / 1000.0)?,
        manual_voxels: column(|r| r.manual_voxels as f64)?,
        auto_voxels: column(|r| r.auto_voxels as f64)?,
        dsc_pct: column(|r| r.dsc_pct)?,
    })
}

/// Report as `{"cases": [...], "summary": {"min", "max", "mean", "stddev"}}`,
/// the summary describing the DSC column (`null` without rows).
pub fn report_json(rows: &[CaseRow], summary: Option<&SummaryRow>) -> serde_json::Value {
    json!({
        "cases": rows,
        "summary": summary.map(|s| json!({
            "min": s.dsc_pct.min,
            "max": s.dsc_pct.max,
            "mean": s.dsc_pct.mean,
            "stddev": s.dsc_pct.stddev,
        })),
    })
}

/// Aligned plain-text table of case rows.
pub fn format_cases(rows: &[CaseRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<12} {:>14} {:>14} {:>12} {:>12} {:>8}",
        "case", "manual (mm3)", "auto (mm3)", "manual vox", "auto vox", "DSC (%)"
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{:<12} {:>14.1} {:>14.1} {:>12} {:>12} {:>8.2}",
            r.id, r.manual_mm3, r.auto_mm3, r.manual_voxels, r.auto_voxels, r.dsc_pct
        );
    }
    out
}

/// Summary table with min / max / mean ± stddev per column.
pub fn format_summary(s: &SummaryRow) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<8} {:>20} {:>20} {:>26} {:>26} {:>16}",
        "", "manual (cm3)", "auto (cm3)", "manual vox", "auto vox", "DSC (%)"
    );
    let cols = [s.manual_cm3, s.auto_cm3, s.manual_voxels, s.auto_voxels, s.dsc_pct];
    let _ = write!(out, "{:<8}", "min");
    for (i, c) in cols.iter().enumerate() {
        let _ = write!(out, " {:>w$.2}", c.min, w = width(i));
    }
    let _ = write!(out, "\n{:<8}", "max");
    for (i, c) in cols.iter().enumerate() {
        let _ = write!(out, " {:>w$.2}", c.max, w = width(i));
    }
    let _ = write!(out, "\n{:<8}", "mean±sd");
    for (i, c) in cols.iter().enumerate() {
        let cell = format!("{:.2} ± {:.2}", c.mean, c.stddev);
        let _ = write!(out, " {:>w$}", cell, w = width(i));
    }
    out.push('\n');
    if !s.dsc_pct.stddev_defined {
        out.push_str("(single case: standard deviation undefined, shown as 0)\n");
    }
    out
}

fn width(col: usize) -> usize {
    [20, 20, 26, 26, 16][col]
}
