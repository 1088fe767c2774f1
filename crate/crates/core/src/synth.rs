//! Deterministic synthetic dataset generation: small ERP videos with
//! graded spatio-temporal distortions, for smoke runs and pipeline
//! tests that need real files without shipping binaries.

use std::io::Write;
use std::path::{Path, PathBuf};

use crate::dataset::{DatasetManifest, Projection, VideoEntry};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct SynthSpec {
    pub contents: usize,
    pub levels: usize,
    pub frames: usize,
    /// ERP width; height is width / 2.
    pub width: usize,
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            contents: 12,
            levels: 3,
            frames: 4,
            width: 64,
            seed: 1,
        }
    }
}

fn mix(parts: &[u64]) -> u64 {
    let mut z = 0x243F_6A88_85A3_08D3u64;
    for &p in parts {
        z ^= p.wrapping_mul(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
    }
    z
}

/// Uniform value in [0, 1) derived from the mixed key.
fn unit(parts: &[u64]) -> f64 {
    (mix(parts) >> 11) as f64 / (1u64 << 53) as f64
}

/// Reference luma: a mixture of moving sinusoids, one set of
/// parameters per content.
fn reference_pixel(
    seed: u64,
    content: usize,
    t: f64,
    x: usize,
    y: usize,
    w: usize,
    h: usize,
) -> f64 {
    let mut v = 128.0;
    for k in 0..3u64 {
        let c = content as u64;
        let amp = 18.0 + 22.0 * unit(&[seed, c, k, 0]);
        let fx = 1.0 + (3.0 * unit(&[seed, c, k, 1])).floor();
        let fy = 1.0 + (2.0 * unit(&[seed, c, k, 2])).floor();
        let phase = std::f64::consts::TAU * unit(&[seed, c, k, 3]);
        let speed = 0.25 + 0.6 * unit(&[seed, c, k, 4]);
        let xa = std::f64::consts::TAU * fx * (x as f64 + 0.5) / w as f64;
        let ya = std::f64::consts::TAU * fy * (y as f64 + 0.5) / h as f64;
        v += amp * (xa + phase + speed * t).sin() * ya.cos();
    }
    v
}

/// Distorted luma for level `l` (1-based): slowed motion plus graded
/// deterministic noise.
#[allow(clippy::too_many_arguments)]
fn distorted_pixel(
    seed: u64,
    content: usize,
    level: usize,
    t: f64,
    x: usize,
    y: usize,
    w: usize,
    h: usize,
) -> f64 {
    let slow = 1.0 - 0.13 * level as f64;
    let base = reference_pixel(seed, content, t * slow, x, y, w, h);
    let amp = 2.5 * level as f64;
    let noise =
        2.0 * unit(&[
            seed,
            content as u64,
            level as u64,
            x as u64,
            y as u64,
            t as u64,
        ]) - 1.0;
    base + amp * noise
}

fn write_yuv(
    path: &Path,
    frames: usize,
    w: usize,
    h: usize,
    pixel: impl Fn(usize, usize, usize) -> f64,
) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = std::io::BufWriter::new(file);
    let chroma = vec![128u8; (w / 2) * (h / 2) * 2];
    for t in 0..frames {
        let y_plane: Vec<u8> = (0..w * h)
            .map(|i| pixel(t, i % w, i / w).clamp(0.0, 255.0).round() as u8)
            .collect();
        out.write_all(&y_plane).map_err(|e| Error::io(path, e))?;
        out.write_all(&chroma).map_err(|e| Error::io(path, e))?;
    }
    Ok(())
}

/// Generate the dataset under `dir/videos`, write `dir/manifest.json`,
/// and return the manifest. The default DMOS decreases with the
/// distortion level, with a small per-content jitter.
pub fn generate(dir: &Path, spec: &SynthSpec) -> Result<(PathBuf, DatasetManifest)> {
    let videos_dir = dir.join("videos");
    std::fs::create_dir_all(&videos_dir).map_err(|e| Error::io(&videos_dir, e))?;
    let w = spec.width;
    let h = spec.width / 2;
    let mut entries = Vec::new();
    for content in 0..spec.contents {
        let ref_path = videos_dir.join(format!("c{content:02}_ref.yuv"));
        write_yuv(&ref_path, spec.frames, w, h, |t, x, y| {
            reference_pixel(spec.seed, content, t as f64, x, y, w, h)
        })?;
        for level in 1..=spec.levels {
            let dist_path = videos_dir.join(format!("c{content:02}_l{level}.yuv"));
            write_yuv(&dist_path, spec.frames, w, h, |t, x, y| {
                distorted_pixel(spec.seed, content, level, t as f64, x, y, w, h)
            })?;
            let jitter = 2.0 * unit(&[spec.seed, content as u64, 0xD305]) - 1.0;
            entries.push(VideoEntry {
                video_id: format!("c{content:02}_l{level}"),
                group_id: format!("c{content:02}"),
                reference_path: ref_path.clone(),
                distorted_path: dist_path,
                frame_count: spec.frames,
                width: w,
                height: h,
                bit_depth: 8,
                dmos: Some(88.0 - 20.0 * level as f64 + 1.5 * jitter),
                projection: Projection::Erp,
            });
        }
    }
    // On disk the entry paths are relative to the manifest file, so
    // the dataset directory can be moved or addressed from any cwd.
    let relative = DatasetManifest {
        videos: entries
            .iter()
            .map(|e| VideoEntry {
                reference_path: e
                    .reference_path
                    .strip_prefix(dir)
                    .expect("paths under dir")
                    .to_path_buf(),
                distorted_path: e
                    .distorted_path
                    .strip_prefix(dir)
                    .expect("paths under dir")
                    .to_path_buf(),
                ..e.clone()
            })
            .collect(),
        warnings: Vec::new(),
    };
    let manifest_path = dir.join("manifest.json");
    let mut json = serde_json::to_string_pretty(&relative).expect("manifest serializes");
    json.push('\n');
    std::fs::write(&manifest_path, json).map_err(|e| Error::io(&manifest_path, e))?;
    let manifest = DatasetManifest {
        videos: entries,
        warnings: Vec::new(),
    };
    Ok((manifest_path, manifest))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::load_manifest;

    #[test]
    fn generated_dataset_loads_and_is_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        let spec = SynthSpec {
            contents: 2,
            levels: 2,
            frames: 2,
            width: 32,
            seed: 3,
        };
        let (path, manifest) = generate(dir.path(), &spec).unwrap();
        assert_eq!(manifest.videos.len(), 4);
        let loaded = load_manifest(&path, true).unwrap();
        assert_eq!(loaded.videos.len(), 4);

        let bytes_a = std::fs::read(dir.path().join("videos/c00_l1.yuv")).unwrap();
        let dir2 = tempfile::tempdir().unwrap();
        generate(dir2.path(), &spec).unwrap();
        let bytes_b = std::fs::read(dir2.path().join("videos/c00_l1.yuv")).unwrap();
        assert_eq!(bytes_a, bytes_b);
    }

    #[test]
    fn reference_and_distortion_differ_and_grade() {
        let dir = tempfile::tempdir().unwrap();
        let spec = SynthSpec {
            contents: 1,
            levels: 3,
            frames: 2,
            width: 32,
            seed: 5,
        };
        let (_, manifest) = generate(dir.path(), &spec).unwrap();
        // Mean absolute distortion grows with the level.
        let read = |p: &Path| std::fs::read(p).unwrap();
        let reference = read(&manifest.videos[0].reference_path);
        let mut last = 0.0f64;
        for entry in &manifest.videos {
            let dist = read(&entry.distorted_path);
            let mad: f64 = reference
                .iter()
                .zip(&dist)
                .map(|(&a, &b)| (a as f64 - b as f64).abs())
                .sum::<f64>()
                / reference.len() as f64;
            assert!(mad > last, "level did not increase distortion");
            last = mad;
        }
    }
}
