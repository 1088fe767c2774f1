//! Feature cache: one CSV per video plus a provenance sidecar.
//!
//! Values are written with 17 significant decimal digits so a
//! read-back tensor is bit-exact; the reader refuses caches whose
//! provenance differs from the active configuration.

use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::metrics::FeatureId;
use crate::tensor::{FeatureTensor, Provenance};

/// Shortest text that parses back to the identical f64 (17 significant
/// digits).
pub(crate) fn format_full(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv_path(dir: &Path, video_id: &str) -> PathBuf {
    dir.join(format!("{video_id}.csv"))
}

fn sidecar_path(dir: &Path, video_id: &str) -> PathBuf {
    dir.join(format!("{video_id}.provenance.json"))
}

pub fn write_feature_cache(dir: &Path, tensor: &FeatureTensor) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let path = csv_path(dir, &tensor.video_id);
    let mut out = String::new();
    out.push_str("frame,viewport");
    for id in tensor.feature_ids() {
        out.push(',');
        out.push_str(id.name());
    }
    out.push('\n');
    for f in 0..tensor.frames {
        for n in 0..tensor.viewports {
            out.push_str(&format!("{f},{n}"));
            for m in 0..tensor.n_features() {
                out.push(',');
                out.push_str(&format_full(tensor.get(f, n, m)));
            }
            out.push('\n');
        }
    }
    let mut file = std::fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
    file.write_all(out.as_bytes())
        .map_err(|e| Error::io(&path, e))?;

    let side = sidecar_path(dir, &tensor.video_id);
    let mut json = serde_json::to_string_pretty(&tensor.provenance).expect("provenance serializes");
    json.push('\n');
    std::fs::write(&side, json).map_err(|e| Error::io(&side, e))?;
    Ok(())
}

/// Read a cached tensor back. When `expected` is given, any provenance
/// difference is an error naming the field.
pub fn read_feature_cache(
    dir: &Path,
    video_id: &str,
    expected: Option<&Provenance>,
) -> Result<FeatureTensor> {
    let side = sidecar_path(dir, video_id);
    let text = std::fs::read_to_string(&side).map_err(|e| Error::io(&side, e))?;
    let provenance: Provenance =
        serde_json::from_str(&text).map_err(|e| Error::parse(&side, e.to_string()))?;
    if let Some(expected) = expected {
        check_provenance(expected, &provenance)?;
    }

    let path = csv_path(dir, video_id);
    let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::parse(&path, "empty cache file"))?;
    let columns: Vec<&str> = header.split(',').collect();
    if columns.len() < 3 || columns[0] != "frame" || columns[1] != "viewport" {
        return Err(Error::parse(&path, "bad header"));
    }
    let ids: Vec<FeatureId> = columns[2..]
        .iter()
        .map(|name| FeatureId::from_name(name))
        .collect::<Result<_>>()?;
    if ids != provenance.features {
        return Err(Error::ProvenanceMismatch(
            "csv feature columns differ from sidecar".into(),
        ));
    }

    let mut values = Vec::new();
    let mut frames = 0usize;
    let mut viewports = 0usize;
    for (lineno, line) in lines.enumerate() {
        let mut parts = line.split(',');
        let parse_idx = |s: Option<&str>| -> Result<usize> {
            s.and_then(|v| v.parse().ok())
                .ok_or_else(|| Error::parse(&path, format!("line {}", lineno + 2)))
        };
        let f = parse_idx(parts.next())?;
        let n = parse_idx(parts.next())?;
        frames = frames.max(f + 1);
        viewports = viewports.max(n + 1);
        for cell in parts {
            let v: f64 = cell
                .parse()
                .map_err(|_| Error::parse(&path, format!("line {}: bad float", lineno + 2)))?;
            values.push(v);
        }
    }
    FeatureTensor::new(video_id, frames, viewports, provenance, values)
}

fn check_provenance(expected: &Provenance, found: &Provenance) -> Result<()> {
    let mismatch = |field: &str, e: &dyn std::fmt::Debug, f: &dyn std::fmt::Debug| {
        Err(Error::ProvenanceMismatch(format!(
            "{field}: cache has {f:?}, current config expects {e:?}"
        )))
    };
    if expected.mode != found.mode {
        return mismatch("mode", &expected.mode, &found.mode);
    }
    if expected.pattern != found.pattern {
        return mismatch("pattern", &expected.pattern, &found.pattern);
    }
    if expected.fov_deg != found.fov_deg {
        return mismatch("fov_deg", &expected.fov_deg, &found.fov_deg);
    }
    if expected.viewport_size != found.viewport_size {
        return mismatch(
            "viewport_size",
            &expected.viewport_size,
            &found.viewport_size,
        );
    }
    if expected.features != found.features {
        return mismatch("features", &expected.features, &found.features);
    }
    if expected.feature_version != found.feature_version {
        return mismatch(
            "feature_version",
            &expected.feature_version,
            &found.feature_version,
        );
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::PatternKind;
    use crate::tensor::FeatureMode;

    fn provenance() -> Provenance {
        Provenance {
            mode: FeatureMode::PerViewport,
            pattern: Some(PatternKind::Tropical),
            fov_deg: Some(40.0),
            viewport_size: Some((64, 64)),
            features: vec![FeatureId::Gmsd, FeatureId::RTi],
            feature_version: "abc123".into(),
        }
    }

    fn tensor() -> FeatureTensor {
        let values: Vec<f64> = (0..3 * 2 * 2)
            .map(|i| (i as f64 + 0.1) * std::f64::consts::PI / 7.0)
            .collect();
        FeatureTensor::new("vid", 3, 2, provenance(), values).unwrap()
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let t = tensor();
        write_feature_cache(dir.path(), &t).unwrap();
        let back = read_feature_cache(dir.path(), "vid", Some(&provenance())).unwrap();
        assert_eq!(back, t);
        // Byte-identical rewrite.
        let first = std::fs::read(dir.path().join("vid.csv")).unwrap();
        write_feature_cache(dir.path(), &back).unwrap();
        let second = std::fs::read(dir.path().join("vid.csv")).unwrap();
        assert_eq!(first, second);
    }

    #[test]
    fn stale_fov_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        write_feature_cache(dir.path(), &tensor()).unwrap();
        let mut expect = provenance();
        expect.fov_deg = Some(30.0);
        match read_feature_cache(dir.path(), "vid", Some(&expect)) {
            Err(Error::ProvenanceMismatch(msg)) => assert!(msg.contains("fov")),
            other => panic!("expected provenance mismatch, got {other:?}"),
        }
    }

    #[test]
    fn hand_written_fixture_parses() {
        let dir = tempfile::tempdir().unwrap();
        let p = provenance();
        let mut json = serde_json::to_string_pretty(&p).unwrap();
        json.push('\n');
        std::fs::write(dir.path().join("fix.provenance.json"), json).unwrap();
        // Values chosen by hand; 2 frames x 1 viewport x 2 features.
        std::fs::write(
            dir.path().join("fix.csv"),
            "frame,viewport,GMSD,R_TI\n0,0,0.25,1.5\n1,0,0.125,2.5\n",
        )
        .unwrap();
        let t = read_feature_cache(dir.path(), "fix", None).unwrap();
        assert_eq!(t.frames, 2);
        assert_eq!(t.viewports, 1);
        assert_eq!(t.get(0, 0, 0), 0.25);
        assert_eq!(t.get(1, 0, 1), 2.5);
    }
}
