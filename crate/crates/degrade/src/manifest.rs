//! Dataset manifests: CSV listings of test images with real/fake labels.
//!
//! Format: header `path,label[,id]`, one image per row. Relative paths
//! resolve against the manifest's own directory; the id column defaults
//! to the path as written.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::metrics::Label;

/// One dataset row: where the image lives, what it is, and the stable id
/// used for seeding and reporting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    /// Image path, resolved against the manifest directory.
    pub path: PathBuf,
    pub label: Label,
    pub item_id: String,
}

/// Parse a manifest CSV. Rows keep file order.
pub fn load_manifest(path: impl AsRef<Path>) -> Result<Vec<ManifestEntry>> {
    let path = path.as_ref();
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::Manifest(format!("{}: {e}", path.display())))?;

    let headers = reader
        .headers()
        .map_err(|e| Error::Manifest(format!("{}: {e}", path.display())))?
        .clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let (path_col, label_col) = match (col("path"), col("label")) {
        (Some(p), Some(l)) => (p, l),
        _ => {
            return Err(Error::Manifest(format!(
                "{}: header must contain `path` and `label` columns, got {:?}",
                path.display(),
                headers.iter().collect::<Vec<_>>()
            )))
        }
    };
    let id_col = col("id");

    let mut entries = Vec::new();
    let mut seen_ids = HashSet::new();
    for (row_idx, record) in reader.records().enumerate() {
        let row = row_idx + 2; // 1-based, counting the header line
        let record = record.map_err(|e| Error::Manifest(format!("row {row}: {e}")))?;
        let raw_path = record
            .get(path_col)
            .filter(|p| !p.is_empty())
            .ok_or_else(|| Error::Manifest(format!("row {row}: missing path")))?;
        let label_token = record
            .get(label_col)
            .ok_or_else(|| Error::Manifest(format!("row {row}: missing label")))?;
        let label = Label::parse(label_token).ok_or_else(|| {
            Error::Manifest(format!(
                "row {row}: unknown label {label_token:?} (expected real or fake)"
            ))
        })?;
        let item_id = id_col
            .and_then(|c| record.get(c))
            .filter(|id| !id.is_empty())
            .unwrap_or(raw_path)
            .to_owned();
        if !seen_ids.insert(item_id.clone()) {
            return Err(Error::Manifest(format!("row {row}: duplicate id {item_id:?}")));
        }

        let raw = Path::new(raw_path);
        let resolved = if raw.is_absolute() {
            raw.to_path_buf()
        } else {
            base.join(raw)
        };
        entries.push(ManifestEntry {
            path: resolved,
            label,
            item_id,
        });
    }
    Ok(entries)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_manifest(contents: &str) -> (tempfile::TempDir, PathBuf) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("manifest.csv");
        std::fs::write(&path, contents).unwrap();
        (dir, path)
    }

    #[test]
    fn two_row_manifest_parses() {
        let (dir, path) = write_manifest("path,label\na.png,real\nsub/b.png,fake\n");
        let entries = load_manifest(&path).unwrap();
        assert_eq!(entries.len(), 2);
        assert_eq!(entries[0].label, Label::Real);
        assert_eq!(entries[0].item_id, "a.png");
        assert_eq!(entries[0].path, dir.path().join("a.png"));
        assert_eq!(entries[1].path, dir.path().join("sub/b.png"));
    }

    #[test]
    fn unknown_label_names_the_row() {
        let (_dir, path) = write_manifest("path,label\na.png,real\nb.png,pristine\n");
        let err = load_manifest(&path).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("row 3") && msg.contains("pristine"), "{msg}");
    }

    #[test]
    fn duplicate_ids_rejected() {
        let (_dir, path) = write_manifest("path,label,id\na.png,real,x\nb.png,fake,x\n");
        let err = load_manifest(&path).unwrap_err();
        assert!(err.to_string().contains("duplicate id"), "{err}");
    }

    #[test]
    fn missing_header_rejected() {
        let (_dir, path) = write_manifest("file,verdict\na.png,real\n");
        assert!(matches!(load_manifest(&path), Err(Error::Manifest(_))));
    }

    #[test]
    fn explicit_ids_and_absolute_paths_kept() {
        let (_dir, path) = write_manifest("path,label,id\n/abs/a.png,real,item-1\n");
        let entries = load_manifest(&path).unwrap();
        assert_eq!(entries[0].item_id, "item-1");
        assert_eq!(entries[0].path, PathBuf::from("/abs/a.png"));
    }

    // Synthetic 1000-row manifest: count and order preserved.
    #[test]
    fn large_manifest_preserves_order() {
        let mut text = String::from("path,label\n");
        for i in 0..1000 {
            text.push_str(&format!("img_{i:04}.png,{}\n", if i % 2 == 0 { "real" } else { "fake" }));
        }
        let (_dir, path) = write_manifest(&text);
        let entries = load_manifest(&path).unwrap();
        assert_eq!(entries.len(), 1000);
        for (i, e) in entries.iter().enumerate() {
            assert_eq!(e.item_id, format!("img_{i:04}.png"));
        }
    }
}
