//! Per-frame spatial features: SA, PSNR, SSIM, MS-SSIM, GMSD.

use crate::error::{Error, Result};
use crate::frame::LumaFrame;
use crate::metrics::{FeatureId, FeatureSample, PSNR_CAP_DB};

/// Column weights of the vertical Sobel kernel [w, 0, -w]; the
/// horizontal kernel is the transpose.
const SOBEL: [f64; 3] = [1.0, 2.0, 1.0];

/// Column weights of the vertical Prewitt kernel, as used by GMSD.
const PREWITT: [f64; 3] = [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0];

/// GMSD stability constant for the 8-bit intensity range.
const GMSD_C_8BIT: f64 = 170.0;

/// Gradient magnitude map sqrt((K*z)^2 + (K^T*z)^2) with edge
/// replication. Both 3x3 kernels have the form [w | 0 | -w], so each
/// response is evaluated as a weighted sum of left-right (top-bottom)
/// sample differences; taking differences first keeps the map exactly
/// invariant to a constant intensity offset.
fn gradient_magnitude(data: &[f64], width: usize, height: usize, weights: &[f64; 3]) -> Vec<f64> {
    let at = |x: isize, y: isize| -> f64 {
        let x = x.clamp(0, width as isize - 1) as usize;
        let y = y.clamp(0, height as isize - 1) as usize;
        data[y * width + x]
    };
    let mut out = Vec::with_capacity(width * height);
    for y in 0..height as isize {
        for x in 0..width as isize {
            let mut gv = 0.0;
            let mut gh = 0.0;
            for (i, &w) in weights.iter().enumerate() {
                let d = i as isize - 1;
                gv += w * (at(x - 1, y + d) - at(x + 1, y + d));
                gh += w * (at(x + d, y - 1) - at(x + d, y + 1));
            }
            out.push((gv * gv + gh * gh).sqrt());
        }
    }
    out
}

fn frame_to_f64(frame: &LumaFrame) -> Vec<f64> {
    frame.samples().iter().map(|&s| s as f64).collect()
}

fn check_min_size(frame: &LumaFrame, min: usize) -> Result<()> {
    if frame.width() < min || frame.height() < min {
        return Err(Error::FrameTooSmall {
            width: frame.width(),
            height: frame.height(),
            min,
        });
    }
    Ok(())
}

/// Per-pixel Sobel gradient magnitude, row-major.
pub fn sobel_map(z: &LumaFrame) -> Result<Vec<f64>> {
    check_min_size(z, 3)?;
    Ok(gradient_magnitude(
        &frame_to_f64(z),
        z.width(),
        z.height(),
        &SOBEL,
    ))
}

/// Spatial activity: RMS difference between the Sobel maps.
pub fn spatial_activity(reference: &LumaFrame, distorted: &LumaFrame) -> Result<FeatureSample> {
    reference.check_same_dims(distorted)?;
    let sr = sobel_map(reference)?;
    let sd = sobel_map(distorted)?;
    let sum_sq: f64 = sr.iter().zip(&sd).map(|(a, b)| (a - b) * (a - b)).sum();
    let value = (sum_sq / sr.len() as f64).sqrt();
    Ok(FeatureSample::new(FeatureId::Sa, value))
}

/// `10 log10(peak^2 / err)` with the identity cap applied.
pub(crate) fn mse_like_to_db(err: f64, peak: f64) -> f64 {
    if err <= 0.0 {
        PSNR_CAP_DB
    } else {
        (10.0 * (peak * peak / err).log10()).min(PSNR_CAP_DB)
    }
}

/// Plain peak signal-to-noise ratio in dB, capped at 100 dB.
pub fn psnr(reference: &LumaFrame, distorted: &LumaFrame) -> Result<FeatureSample> {
    reference.check_compatible(distorted)?;
    let n = reference.samples().len() as f64;
    let sum_sq: f64 = reference
        .samples()
        .iter()
        .zip(distorted.samples())
        .map(|(&a, &b)| {
            let d = a as f64 - b as f64;
            d * d
        })
        .sum();
    Ok(FeatureSample::new(
        FeatureId::Psnr,
        mse_like_to_db(sum_sq / n, reference.peak()),
    ))
}

/// Normalized 1-D Gaussian taps, odd length.
fn gaussian_kernel(len: usize, sigma: f64) -> Vec<f64> {
    debug_assert!(len % 2 == 1);
    let half = (len / 2) as isize;
    let mut taps: Vec<f64> = (-half..=half)
        .map(|i| (-(i * i) as f64 / (2.0 * sigma * sigma)).exp())
        .collect();
    let sum: f64 = taps.iter().sum();
    for t in &mut taps {
        *t /= sum;
    }
    taps
}

/// Windowed first/second moments via separable filtering over fully
/// valid windows. Returns (mu_x, mu_y, xx, yy, xy) maps plus the valid
/// output dimensions.
struct WindowMoments {
    mu_x: Vec<f64>,
    mu_y: Vec<f64>,
    xx: Vec<f64>,
    yy: Vec<f64>,
    xy: Vec<f64>,
}

fn window_moments(
    x: &[f64],
    y: &[f64],
    width: usize,
    height: usize,
    taps: &[f64],
) -> WindowMoments {
    let k = taps.len();
    let ow = width - k + 1;
    let oh = height - k + 1;
    // Horizontal pass.
    let mut hx = vec![0.0; ow * height];
    let mut hy = vec![0.0; ow * height];
    let mut hxx = vec![0.0; ow * height];
    let mut hyy = vec![0.0; ow * height];
    let mut hxy = vec![0.0; ow * height];
    for row in 0..height {
        for ox in 0..ow {
            let mut sx = 0.0;
            let mut sy = 0.0;
            let mut sxx = 0.0;
            let mut syy = 0.0;
            let mut sxy = 0.0;
            for (t, &w) in taps.iter().enumerate() {
                let a = x[row * width + ox + t];
                let b = y[row * width + ox + t];
                sx += w * a;
                sy += w * b;
                sxx += w * a * a;
                syy += w * b * b;
                sxy += w * a * b;
            }
            let o = row * ow + ox;
            hx[o] = sx;
            hy[o] = sy;
            hxx[o] = sxx;
            hyy[o] = syy;
            hxy[o] = sxy;
        }
    }
    // Vertical pass.
    let mut out = WindowMoments {
        mu_x: vec![0.0; ow * oh],
        mu_y: vec![0.0; ow * oh],
        xx: vec![0.0; ow * oh],
        yy: vec![0.0; ow * oh],
        xy: vec![0.0; ow * oh],
    };
    for oy in 0..oh {
        for ox in 0..ow {
            let mut sx = 0.0;
            let mut sy = 0.0;
            let mut sxx = 0.0;
            let mut syy = 0.0;
            let mut sxy = 0.0;
            for (t, &w) in taps.iter().enumerate() {
                let o = (oy + t) * ow + ox;
                sx += w * hx[o];
                sy += w * hy[o];
                sxx += w * hxx[o];
                syy += w * hyy[o];
                sxy += w * hxy[o];
            }
            let o = oy * ow + ox;
            out.mu_x[o] = sx;
            out.mu_y[o] = sy;
            out.xx[o] = sxx;
            out.yy[o] = syy;
            out.xy[o] = sxy;
        }
    }
    out
}

const SSIM_K1: f64 = 0.01;
const SSIM_K2: f64 = 0.03;
const SSIM_WINDOW: usize = 11;
const SSIM_SIGMA: f64 = 1.5;

/// Mean local SSIM and mean contrast-structure term over valid windows.
fn ssim_terms(x: &[f64], y: &[f64], width: usize, height: usize, peak: f64) -> (f64, f64) {
    let win = SSIM_WINDOW.min(width.min(height));
    let win = if win.is_multiple_of(2) { win - 1 } else { win };
    let taps = gaussian_kernel(win, SSIM_SIGMA);
    let m = window_moments(x, y, width, height, &taps);
    let c1 = (SSIM_K1 * peak) * (SSIM_K1 * peak);
    let c2 = (SSIM_K2 * peak) * (SSIM_K2 * peak);
    let mut ssim_sum = 0.0;
    let mut cs_sum = 0.0;
    let n = m.mu_x.len();
    for o in 0..n {
        let mu_x = m.mu_x[o];
        let mu_y = m.mu_y[o];
        let var_x = m.xx[o] - mu_x * mu_x;
        let var_y = m.yy[o] - mu_y * mu_y;
        let cov = m.xy[o] - mu_x * mu_y;
        let l = (2.0 * mu_x * mu_y + c1) / (mu_x * mu_x + mu_y * mu_y + c1);
        let cs = (2.0 * cov + c2) / (var_x + var_y + c2);
        ssim_sum += l * cs;
        cs_sum += cs;
    }
    (ssim_sum / n as f64, cs_sum / n as f64)
}

/// Single-scale SSIM with an 11x11 Gaussian window (sigma 1.5). The
/// window shrinks to the frame's short side when the frame is smaller
/// than 11 pixels.
pub fn ssim(reference: &LumaFrame, distorted: &LumaFrame) -> Result<FeatureSample> {
    reference.check_same_dims(distorted)?;
    let (mssim, _) = ssim_terms(
        &frame_to_f64(reference),
        &frame_to_f64(distorted),
        reference.width(),
        reference.height(),
        reference.peak(),
    );
    Ok(FeatureSample::new(FeatureId::Ssim, mssim))
}

/// Standard five-scale exponents from the multi-scale SSIM construction.
const MS_SSIM_WEIGHTS: [f64; 5] = [0.0448, 0.2856, 0.3001, 0.2363, 0.1333];

/// 2x2 mean downsampling (dyadic low pass), dims floored.
fn downsample2(data: &[f64], width: usize, height: usize) -> (Vec<f64>, usize, usize) {
    let ow = width / 2;
    let oh = height / 2;
    let mut out = Vec::with_capacity(ow * oh);
    for y in 0..oh {
        for x in 0..ow {
            let s = data[2 * y * width + 2 * x]
                + data[2 * y * width + 2 * x + 1]
                + data[(2 * y + 1) * width + 2 * x]
                + data[(2 * y + 1) * width + 2 * x + 1];
            out.push(s / 4.0);
        }
    }
    (out, ow, oh)
}

/// Number of usable MS-SSIM scales for the given short side: every
/// scale must keep at least one full SSIM window.
fn ms_ssim_scales(min_dim: usize) -> usize {
    let mut scales = 1;
    let mut d = min_dim;
    while scales < 5 && d / 2 >= SSIM_WINDOW {
        d /= 2;
        scales += 1;
    }
    scales
}

/// Multi-scale SSIM. Five scales on frames of short side >= 176; on
/// smaller frames the deepest scales are dropped and the exponents
/// renormalized to sum 1.
pub fn ms_ssim(reference: &LumaFrame, distorted: &LumaFrame) -> Result<FeatureSample> {
    reference.check_same_dims(distorted)?;
    let mut x = frame_to_f64(reference);
    let mut y = frame_to_f64(distorted);
    let mut width = reference.width();
    let mut height = reference.height();
    let peak = reference.peak();
    let scales = ms_ssim_scales(width.min(height));
    let mut weights: Vec<f64> = MS_SSIM_WEIGHTS[..scales].to_vec();
    if scales < 5 {
        let sum: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= sum;
        }
    }
    let mut value = 1.0;
    for (scale, &weight) in weights.iter().enumerate() {
        let (mssim, mcs) = ssim_terms(&x, &y, width, height, peak);
        if scale + 1 == scales {
            value *= mssim.max(0.0).powf(weight);
        } else {
            value *= mcs.max(0.0).powf(weight);
            let (nx, nw, nh) = downsample2(&x, width, height);
            let (ny, _, _) = downsample2(&y, width, height);
            x = nx;
            y = ny;
            width = nw;
            height = nh;
        }
    }
    Ok(FeatureSample::new(FeatureId::MsSsim, value))
}

/// GMSD over signed f64 planes; used directly by the temporal variant.
pub(crate) fn gmsd_on_planes(a: &[f64], b: &[f64], width: usize, height: usize, c: f64) -> f64 {
    let ma = gradient_magnitude(a, width, height, &PREWITT);
    let mb = gradient_magnitude(b, width, height, &PREWITT);
    let n = ma.len() as f64;
    let gms: Vec<f64> = ma
        .iter()
        .zip(&mb)
        .map(|(&u, &v)| (2.0 * u * v + c) / (u * u + v * v + c))
        .collect();
    let mean = gms.iter().sum::<f64>() / n;
    let var = gms.iter().map(|g| (g - mean) * (g - mean)).sum::<f64>() / n;
    var.sqrt()
}

pub(crate) fn gmsd_c_for_peak(peak: f64) -> f64 {
    GMSD_C_8BIT * (peak / 255.0) * (peak / 255.0)
}

/// Gradient magnitude similarity deviation (population standard
/// deviation of the GMS map, Prewitt gradients, c scaled to the
/// intensity range).
pub fn gmsd(reference: &LumaFrame, distorted: &LumaFrame) -> Result<FeatureSample> {
    reference.check_same_dims(distorted)?;
    check_min_size(reference, 3)?;
    let value = gmsd_on_planes(
        &frame_to_f64(reference),
        &frame_to_f64(distorted),
        reference.width(),
        reference.height(),
        gmsd_c_for_peak(reference.peak()),
    );
    Ok(FeatureSample::new(FeatureId::Gmsd, value))
}
