//! Sphere-aware PSNR baselines, defined on full ERP frames.

use std::f64::consts::{PI, TAU};

use crate::error::Result;
use crate::frame::LumaFrame;
use crate::geometry::{direction_to_erp_pixel, Direction};
use crate::metrics::{spatial::mse_like_to_db, FeatureId, FeatureSample};

/// Default spherical sample count, following the point-set size of the
/// common S-PSNR tooling lineage.
pub const DEFAULT_SPHERE_POINTS: usize = 655_362;

/// PSNR with per-row weights cos(elevation of the row center), so each
/// sample counts by the sphere area it covers.
pub fn ws_psnr(reference: &LumaFrame, distorted: &LumaFrame) -> Result<FeatureSample> {
    reference.check_compatible(distorted)?;
    let w = reference.width();
    let h = reference.height();
    let mut weighted_err = 0.0;
    let mut weight_sum = 0.0;
    for y in 0..h {
        let elevation = (0.5 - (y as f64 + 0.5) / h as f64) * PI;
        let weight = elevation.cos();
        for x in 0..w {
            let d = reference.get(x, y) as f64 - distorted.get(x, y) as f64;
            weighted_err += weight * d * d;
        }
        weight_sum += weight * w as f64;
    }
    Ok(FeatureSample::new(
        FeatureId::WsPsnr,
        mse_like_to_db(weighted_err / weight_sum, reference.peak()),
    ))
}

/// Deterministic, spherically uniform Fibonacci lattice directions.
pub(crate) fn fibonacci_sphere(n_points: usize) -> impl Iterator<Item = Direction> {
    // Successive points advance azimuth by the golden angle.
    let golden = (1.0 + 5.0f64.sqrt()) / 2.0;
    (0..n_points).map(move |i| {
        let z = 1.0 - 2.0 * (i as f64 + 0.5) / n_points as f64;
        let azimuth = TAU * (i as f64 / golden);
        Direction::new(azimuth, z.asin())
    })
}

/// PSNR over a spherically uniform sample set re-projected into both
/// frames with nearest-neighbor lookup.
pub fn s_psnr(
    reference: &LumaFrame,
    distorted: &LumaFrame,
    n_points: usize,
) -> Result<FeatureSample> {
    reference.check_compatible(distorted)?;
    assert!(n_points >= 1, "n_points must be >= 1");
    let w = reference.width();
    let h = reference.height();
    let mut sum_sq = 0.0;
    for dir in fibonacci_sphere(n_points) {
        let (u, v) = direction_to_erp_pixel(dir, w, h);
        let x = (u.floor() as isize).rem_euclid(w as isize) as usize;
        let y = (v.floor() as isize).clamp(0, h as isize - 1) as usize;
        let d = reference.get(x, y) as f64 - distorted.get(x, y) as f64;
        sum_sq += d * d;
    }
    Ok(FeatureSample::new(
        FeatureId::SPsnr,
        mse_like_to_db(sum_sq / n_points as f64, reference.peak()),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::{psnr, PSNR_CAP_DB};

    fn textured(w: usize, h: usize) -> LumaFrame {
        // Values in [3, 252]: +-3 offsets stay clip-free.
        LumaFrame::from_fn(w, h, 8, |x, y| (3 + (x * 31 + y * 17) % 250) as f32)
    }

    #[test]
    fn identity_caps() {
        let f = textured(64, 32);
        assert_eq!(ws_psnr(&f, &f).unwrap().value, PSNR_CAP_DB);
        assert_eq!(s_psnr(&f, &f, 1000).unwrap().value, PSNR_CAP_DB);
    }

    #[test]
    fn uniform_error_equals_plain_psnr() {
        let f = textured(64, 32);
        let off = LumaFrame::from_fn(64, 32, 8, |x, y| (f.get(x, y) - 3.0).max(0.0));
        // Constant squared error is invariant to normalized weighting.
        let plain = psnr(&f, &off).unwrap().value;
        let ws = ws_psnr(&f, &off).unwrap().value;
        assert!((ws - plain).abs() < 1e-9);
        // And location-independent for spherical sampling: closed form.
        let sp = s_psnr(&f, &off, 50_000).unwrap().value;
        let expect = 10.0 * (255.0f64 * 255.0 / 9.0).log10();
        assert!((sp - expect).abs() < 1e-9);
    }

    #[test]
    fn pole_confined_error_is_downweighted() {
        let f = textured(128, 64);
        // Corrupt only the top two rows (north pole).
        let polar = LumaFrame::from_fn(128, 64, 8, |x, y| {
            if y < 2 {
                255.0 - f.get(x, y)
            } else {
                f.get(x, y)
            }
        });
        let plain = psnr(&f, &polar).unwrap().value;
        let ws = ws_psnr(&f, &polar).unwrap().value;
        let sp = s_psnr(&f, &polar, 50_000).unwrap().value;
        assert!(ws > plain + 5.0, "ws {ws} vs psnr {plain}");
        assert!(sp > plain + 5.0, "s-psnr {sp} vs psnr {plain}");
    }

    #[test]
    fn fibonacci_lattice_is_balanced() {
        // Mean z over the lattice vanishes and hemispheres split evenly.
        let dirs: Vec<_> = fibonacci_sphere(10_001).collect();
        let mean_z: f64 = dirs.iter().map(|d| d.elevation.sin()).sum::<f64>() / dirs.len() as f64;
        assert!(mean_z.abs() < 1e-3);
        let north = dirs.iter().filter(|d| d.elevation > 0.0).count();
        assert!((north as isize - 5000).abs() <= 1);
    }
}
