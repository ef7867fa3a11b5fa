//! Report files: per-cell CSV/JSON emission, merging, and severity-sweep
//! extraction for plotting.
//!
//! The main report carries exactly the columns
//! `detector,cell,n,acc,auc,f1,seed`. Every emission also writes a
//! companion `<stem>_sweep.csv` in long format (detector, family,
//! severity, cell, auc) covering the cells that have a principal severity
//! scalar, ordered by detector, family and ascending severity — the shape
//! plotting tools want for severity-on-x curves.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bench::ReportRow;
use crate::corrupt::SeverityGrid;
use crate::error::{Error, Result};

/// Output encoding for the main report file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

impl ReportFormat {
    pub fn parse(token: &str) -> Result<Self> {
        match token {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(Error::Param(format!("unknown report format {other:?}"))),
        }
    }
}

/// One sweep-file line: a cell with its severity scalar.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub detector: String,
    pub family: String,
    pub severity: f64,
    pub cell: String,
    pub auc: f64,
}

/// Path of the companion sweep file for a main report path.
pub fn sweep_path(report: &Path) -> PathBuf {
    let stem = report
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "report".to_owned());
    report.with_file_name(format!("{stem}_sweep.csv"))
}

/// Write the main report plus its companion sweep CSV.
pub fn emit_report(
    rows: &[ReportRow],
    format: ReportFormat,
    path: impl AsRef<Path>,
    grid: &SeverityGrid,
) -> Result<()> {
    let path = path.as_ref();
    if rows.is_empty() {
        return Err(Error::Param("refusing to emit an empty report".into()));
    }
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    match format {
        ReportFormat::Csv => write_rows_csv(rows, path)?,
        ReportFormat::Json => {
            let json = serde_json::to_string_pretty(rows).expect("rows serialize");
            std::fs::write(path, json).map_err(|e| Error::io(path, e))?;
        }
    }
    let points = sweep_points(rows, grid, None)?;
    write_sweep_csv(&points, sweep_path(path))?;
    Ok(())
}

fn write_rows_csv(rows: &[ReportRow], path: &Path) -> Result<()> {
    let mut writer = csv::Writer::from_path(path).map_err(|e| Error::io(path, std::io::Error::other(e)))?;
    for row in rows {
        writer
            .serialize(row)
            .map_err(|e| Error::io(path, std::io::Error::other(e)))?;
    }
    writer
        .flush()
        .map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// Read a report back; `.json` files parse as JSON, anything else as CSV.
pub fn load_report(path: impl AsRef<Path>) -> Result<Vec<ReportRow>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    if path.extension().is_some_and(|e| e == "json") {
        serde_json::from_str(&text).map_err(|e| Error::Merge(format!("{}: {e}", path.display())))
    } else {
        let mut reader = csv::Reader::from_reader(text.as_bytes());
        let mut rows = Vec::new();
        for record in reader.deserialize() {
            let row: ReportRow =
                record.map_err(|e| Error::Merge(format!("{}: {e}", path.display())))?;
            rows.push(row);
        }
        Ok(rows)
    }
}

/// Concatenate reports, rejecting duplicate (detector, cell) pairs —
/// the usual sign of mixing incompatible runs.
pub fn merge_reports(paths: &[PathBuf]) -> Result<Vec<ReportRow>> {
    if paths.is_empty() {
        return Err(Error::Param("no report files given".into()));
    }
    let mut rows = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for path in paths {
        for row in load_report(path)? {
            if !seen.insert((row.detector.clone(), row.cell.clone())) {
                return Err(Error::Merge(format!(
                    "duplicate (detector, cell) pair ({:?}, {:?}) across report files",
                    row.detector, row.cell
                )));
            }
            rows.push(row);
        }
    }
    Ok(rows)
}

/// Long-format sweep points for rows whose cell has a severity scalar in
/// `grid`, optionally restricted to one corruption family. Rows whose
/// cell is not in the grid (and not `unaltered`) are a merge error.
pub fn sweep_points(
    rows: &[ReportRow],
    grid: &SeverityGrid,
    family: Option<&str>,
) -> Result<Vec<SweepPoint>> {
    let mut points = Vec::new();
    for row in rows {
        if row.cell == crate::corrupt::UNALTERED {
            continue;
        }
        let spec = grid.spec(&row.cell).ok_or_else(|| {
            Error::Merge(format!(
                "cell {:?} is not in the reference grid; reports come from incompatible grids",
                row.cell
            ))
        })?;
        let kind_family = spec.kind.kind_name();
        if family.is_some_and(|f| f != kind_family) {
            continue;
        }
        if let Some(severity) = spec.kind.severity() {
            points.push(SweepPoint {
                detector: row.detector.clone(),
                family: kind_family.to_owned(),
                severity,
                cell: row.cell.clone(),
                auc: row.auc,
            });
        }
    }
    points.sort_by(|a, b| {
        (a.detector.as_str(), a.family.as_str())
            .cmp(&(b.detector.as_str(), b.family.as_str()))
            .then(a.severity.total_cmp(&b.severity))
    });
    Ok(points)
}

/// Write sweep points as CSV with columns detector,family,severity,cell,auc.
pub fn write_sweep_csv(points: &[SweepPoint], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut writer = csv::Writer::from_path(path).map_err(|e| Error::io(path, std::io::Error::other(e)))?;
    for p in points {
        writer
            .serialize(p)
            .map_err(|e| Error::io(path, std::io::Error::other(e)))?;
    }
    writer.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corrupt::builtin_grid;

    fn row(detector: &str, cell: &str, auc: f64) -> ReportRow {
        ReportRow {
            detector: detector.to_owned(),
            cell: cell.to_owned(),
            n: 10,
            acc: 0.9,
            auc,
            f1: 0.8,
            seed: 42,
        }
    }

    #[test]
    fn csv_report_has_header_plus_row_per_cell() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("report.csv");
        let rows = vec![row("toy", "unaltered", 1.0), row("toy", "JPEG 60", 0.8)];
        emit_report(&rows, ReportFormat::Csv, &path, &builtin_grid()).unwrap();

        let text = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0], "detector,cell,n,acc,auc,f1,seed");
        assert!(lines[2].starts_with("toy,JPEG 60,10,"));
    }

    #[test]
    fn json_report_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("report.json");
        let rows = vec![row("toy", "unaltered", 1.0), row("toy", "Gau Noise 30", 0.62)];
        emit_report(&rows, ReportFormat::Json, &path, &builtin_grid()).unwrap();
        assert_eq!(load_report(&path).unwrap(), rows);
    }

    #[test]
    fn csv_report_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("report.csv");
        let rows = vec![row("toy", "unaltered", 1.0), row("toy", "Resize x8", 0.5)];
        emit_report(&rows, ReportFormat::Csv, &path, &builtin_grid()).unwrap();
        assert_eq!(load_report(&path).unwrap(), rows);
    }

    #[test]
    fn empty_report_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let err = emit_report(
            &[],
            ReportFormat::Csv,
            dir.path().join("r.csv"),
            &builtin_grid(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Param(_)));
    }

    // The noise family has six cells; the sweep must order them by sigma.
    #[test]
    fn noise_sweep_is_ordered_and_complete() {
        let grid = builtin_grid();
        let mut rows = vec![row("toy", "unaltered", 1.0)];
        // Deliberately shuffled severity order.
        for sigma in [30, 5, 50, 10, 40, 20] {
            rows.push(row("toy", &format!("Gau Noise {sigma}"), 1.0 - sigma as f64 / 100.0));
        }
        let points = sweep_points(&rows, &grid, Some("gaussian_noise")).unwrap();
        assert_eq!(points.len(), 6);
        let severities: Vec<f64> = points.iter().map(|p| p.severity).collect();
        assert_eq!(severities, vec![5.0, 10.0, 20.0, 30.0, 40.0, 50.0]);
    }

    #[test]
    fn merge_rejects_duplicates_and_unknown_cells() {
        let dir = tempfile::tempdir().unwrap();
        let grid = builtin_grid();
        let a = dir.path().join("a.csv");
        let b = dir.path().join("b.csv");
        emit_report(&[row("toy", "JPEG 60", 0.8)], ReportFormat::Csv, &a, &grid).unwrap();
        emit_report(&[row("toy", "JPEG 60", 0.7)], ReportFormat::Csv, &b, &grid).unwrap();
        let err = merge_reports(&[a.clone(), b]).unwrap_err();
        assert!(matches!(err, Error::Merge(_)));

        let rows = vec![row("toy", "Mystery Cell", 0.5)];
        assert!(matches!(
            sweep_points(&rows, &grid, None),
            Err(Error::Merge(_))
        ));

        assert!(merge_reports(&[]).is_err());
        let merged = merge_reports(&[a]).unwrap();
        assert_eq!(merged.len(), 1);
    }

    #[test]
    fn two_detector_reports_merge_into_two_series() {
        let dir = tempfile::tempdir().unwrap();
        let grid = builtin_grid();
        let a = dir.path().join("a.csv");
        let b = dir.path().join("b.csv");
        emit_report(
            &[row("det-a", "Gau Blur 3", 0.9), row("det-a", "Gau Blur 7", 0.7)],
            ReportFormat::Csv,
            &a,
            &grid,
        )
        .unwrap();
        emit_report(
            &[row("det-b", "Gau Blur 3", 0.8), row("det-b", "Gau Blur 7", 0.6)],
            ReportFormat::Csv,
            &b,
            &grid,
        )
        .unwrap();
        let merged = merge_reports(&[a, b]).unwrap();
        let points = sweep_points(&merged, &grid, Some("gaussian_blur")).unwrap();
        let detectors: Vec<&str> = points.iter().map(|p| p.detector.as_str()).collect();
        assert_eq!(detectors, vec!["det-a", "det-a", "det-b", "det-b"]);
    }
}
