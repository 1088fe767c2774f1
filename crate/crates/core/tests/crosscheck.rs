//! Cross-implementation spot checks computed against an independent
//! SciPy-based reimplementation of the same constructions; the
//! expected values are frozen from that run.

use vq360_core::eval::srocc;
use vq360_core::frame::LumaFrame;
use vq360_core::metrics::{psnr_hvs, psnr_hvs_m};

#[test]
fn psnr_hvs_matches_external_reference_values() {
    let mut state = 99u64;
    let mut next = move || {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        ((state >> 33) % 256) as f32
    };
    let mut samples = Vec::new();
    for _ in 0..16 * 24 {
        samples.push(next());
    }
    let a = LumaFrame::new(24, 16, 8, samples);
    let b = LumaFrame::from_fn(24, 16, 8, |x, y| {
        (a.get(x, y) + ((x * 7 + y * 3) % 11) as f32 - 5.0).clamp(0.0, 255.0)
    });
    let hvs = psnr_hvs(&a, &b).unwrap().value;
    let hvsm = psnr_hvs_m(&a, &b).unwrap().value;
    assert!((hvs - 42.444707161286).abs() < 1e-9, "psnr_hvs {hvs}");
    assert!((hvsm - 62.802351990455).abs() < 1e-9, "psnr_hvs_m {hvsm}");
}

#[test]
fn srocc_matches_external_reference_value() {
    let x = [1.0, 2.0, 2.0, 2.0, 3.0, 3.0, 0.0, 5.0, 5.0, 1.0, 7.5, 7.5];
    let y = [2.0, 1.0, 1.0, 4.0, 4.0, 4.0, 0.5, 0.5, 6.0, 6.0, 3.0, 3.0];
    let got = srocc(&x, &y).unwrap();
    assert!((got - 0.170863309352518).abs() < 1e-12, "srocc {got}");
}

#[test]
fn ssim_matches_external_reference_value() {
    let mut state = 77u64;
    let mut next = move || {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        ((state >> 33) % 256) as f32
    };
    let mut samples = Vec::new();
    for _ in 0..20 * 32 {
        samples.push(next());
    }
    let a = LumaFrame::new(32, 20, 8, samples);
    let b = LumaFrame::from_fn(32, 20, 8, |x, y| {
        (a.get(x, y) + ((x * 5 + y * 11) % 13) as f32 - 6.0).clamp(0.0, 255.0)
    });
    let got = vq360_core::metrics::ssim(&a, &b).unwrap().value;
    assert!((got - 0.998666051665).abs() < 1e-9, "ssim {got}");
}
