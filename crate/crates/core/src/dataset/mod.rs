//! Dataset manifests, frame decoding, feature caching, and feature
//! extraction over whole videos.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

mod cache;
mod features;
mod frames;

pub(crate) use cache::format_full as format_full_value;
pub use cache::{read_feature_cache, write_feature_cache};
pub use features::compute_features;
pub use frames::{FrameGeometry, FrameReader};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Projection {
    Erp,
}

/// One reference/distorted pair in a dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VideoEntry {
    pub video_id: String,
    pub group_id: String,
    pub reference_path: PathBuf,
    pub distorted_path: PathBuf,
    pub frame_count: usize,
    pub width: usize,
    pub height: usize,
    pub bit_depth: u8,
    #[serde(default)]
    pub dmos: Option<f64>,
    pub projection: Projection,
}

impl VideoEntry {
    pub fn geometry(&self) -> FrameGeometry {
        FrameGeometry {
            width: self.width,
            height: self.height,
            bit_depth: self.bit_depth,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub videos: Vec<VideoEntry>,
    /// Non-fatal validation notes (odd aspect ratios and the like).
    #[serde(skip)]
    pub warnings: Vec<String>,
}

/// Load and validate a manifest. `require_dmos` is set for training
/// manifests. Entry paths are resolved relative to the manifest file.
pub fn load_manifest(path: &Path, require_dmos: bool) -> Result<DatasetManifest> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut manifest: DatasetManifest = serde_json::from_str(&text).map_err(|e| {
        let msg = e.to_string();
        match msg.split('`').nth(1) {
            Some(field) if msg.starts_with("missing field") => Error::MissingField {
                path: path.to_path_buf(),
                field: field.to_string(),
            },
            _ => Error::parse(path, msg),
        }
    })?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    let mut seen = std::collections::BTreeSet::new();
    for entry in &mut manifest.videos {
        if !seen.insert(entry.video_id.clone()) {
            return Err(Error::DuplicateVideoId(entry.video_id.clone()));
        }
        for p in [&mut entry.reference_path, &mut entry.distorted_path] {
            if p.is_relative() {
                *p = base.join(&*p);
            }
            if !p.exists() {
                return Err(Error::DanglingPath {
                    video_id: entry.video_id.clone(),
                    path: p.clone(),
                });
            }
        }
        if require_dmos && entry.dmos.is_none() {
            return Err(Error::MissingField {
                path: path.to_path_buf(),
                field: format!("dmos (video {})", entry.video_id),
            });
        }
        if entry.bit_depth != 8 && entry.bit_depth != 10 {
            return Err(Error::parse(
                path,
                format!(
                    "video {}: bit depth {} unsupported (8 or 10)",
                    entry.video_id, entry.bit_depth
                ),
            ));
        }
        if entry.width != 2 * entry.height {
            manifest.warnings.push(format!(
                "video {}: {}x{} is not the 2:1 ERP aspect",
                entry.video_id, entry.width, entry.height
            ));
        }
    }
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_manifest(dir: &Path, body: &str) -> PathBuf {
        let path = dir.join("manifest.json");
        let mut f = std::fs::File::create(&path).unwrap();
        f.write_all(body.as_bytes()).unwrap();
        path
    }

    fn touch(dir: &Path, name: &str) {
        std::fs::write(dir.join(name), b"x").unwrap();
    }

    fn entry_json(id: &str, dmos: &str) -> String {
        format!(
            r#"{{"video_id":"{id}","group_id":"g1","reference_path":"ref.yuv",
                "distorted_path":"dist.yuv","frame_count":3,"width":64,"height":32,
                "bit_depth":8,{dmos}"projection":"erp"}}"#
        )
    }

    #[test]
    fn minimal_manifest_loads() {
        let dir = tempfile::tempdir().unwrap();
        touch(dir.path(), "ref.yuv");
        touch(dir.path(), "dist.yuv");
        let body = format!(r#"{{"videos":[{}]}}"#, entry_json("v1", r#""dmos":42.5,"#));
        let path = write_manifest(dir.path(), &body);
        let m = load_manifest(&path, true).unwrap();
        assert_eq!(m.videos.len(), 1);
        assert_eq!(m.videos[0].dmos, Some(42.5));
        assert!(m.videos[0].reference_path.is_absolute());
        assert!(m.warnings.is_empty());
    }

    #[test]
    fn missing_dmos_fails_in_training_mode_only() {
        let dir = tempfile::tempdir().unwrap();
        touch(dir.path(), "ref.yuv");
        touch(dir.path(), "dist.yuv");
        let body = format!(r#"{{"videos":[{}]}}"#, entry_json("v1", ""));
        let path = write_manifest(dir.path(), &body);
        assert!(matches!(
            load_manifest(&path, true),
            Err(Error::MissingField { .. })
        ));
        assert!(load_manifest(&path, false).is_ok());
    }

    #[test]
    fn duplicate_ids_and_dangling_paths_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        touch(dir.path(), "ref.yuv");
        touch(dir.path(), "dist.yuv");
        let body = format!(
            r#"{{"videos":[{},{}]}}"#,
            entry_json("v1", r#""dmos":1.0,"#),
            entry_json("v1", r#""dmos":2.0,"#)
        );
        let path = write_manifest(dir.path(), &body);
        assert!(matches!(
            load_manifest(&path, false),
            Err(Error::DuplicateVideoId(_))
        ));

        let body = format!(r#"{{"videos":[{}]}}"#, entry_json("v2", r#""dmos":1.0,"#))
            .replace("ref.yuv", "absent.yuv");
        let path = write_manifest(dir.path(), &body);
        match load_manifest(&path, false) {
            Err(Error::DanglingPath { video_id, .. }) => assert_eq!(video_id, "v2"),
            other => panic!("expected dangling path, got {other:?}"),
        }
    }

    #[test]
    fn missing_field_is_named() {
        let dir = tempfile::tempdir().unwrap();
        let body = r#"{"videos":[{"video_id":"v1"}]}"#;
        let path = write_manifest(dir.path(), body);
        match load_manifest(&path, false) {
            Err(Error::MissingField { field, .. }) => assert_eq!(field, "group_id"),
            other => panic!("expected missing field, got {other:?}"),
        }
    }

    #[test]
    fn non_erp_aspect_warns() {
        let dir = tempfile::tempdir().unwrap();
        touch(dir.path(), "ref.yuv");
        touch(dir.path(), "dist.yuv");
        let body = format!(r#"{{"videos":[{}]}}"#, entry_json("v1", r#""dmos":1.0,"#))
            .replace(r#""height":32"#, r#""height":40"#);
        let path = write_manifest(dir.path(), &body);
        let m = load_manifest(&path, false).unwrap();
        assert_eq!(m.warnings.len(), 1);
    }
}
