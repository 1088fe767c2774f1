//! PSNR-HVS and PSNR-HVS-M on CSF-weighted 8x8 block-DCT differences.
//!
//! Both scores are computed over non-overlapping 8x8 blocks (trailing
//! partial blocks dropped) using an orthonormal 2-D DCT-II. PSNR-HVS
//! weights every coefficient difference by the contrast sensitivity
//! function; PSNR-HVS-M additionally subtracts a per-block contrast
//! masking allowance from each AC difference before weighting.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::frame::LumaFrame;
use crate::metrics::{spatial::mse_like_to_db, FeatureId, FeatureSample};

/// Contrast sensitivity function coefficients, from the PSNR-HVS /
/// PSNR-HVS-M reference construction (Egiazarian et al. 2006,
/// Ponomarenko et al. 2007; derived from the JPEG luma quantization
/// table). Row = vertical frequency, column = horizontal frequency.
#[rustfmt::skip]
pub const CSF_COF: [[f64; 8]; 8] = [
    [1.608443, 2.339554, 2.573509, 1.608443, 1.072295, 0.643377, 0.504610, 0.421887],
    [2.144591, 2.144591, 1.838221, 1.354478, 0.989811, 0.443708, 0.428918, 0.467911],
    [1.838221, 1.979622, 1.608443, 1.072295, 0.643377, 0.451493, 0.372972, 0.459555],
    [1.838221, 1.513829, 1.169777, 0.887417, 0.504610, 0.295806, 0.321689, 0.415082],
    [1.429727, 1.169777, 0.695543, 0.459555, 0.378457, 0.236102, 0.249855, 0.334222],
    [1.072295, 0.735288, 0.467911, 0.402111, 0.317717, 0.247453, 0.227744, 0.279729],
    [0.525206, 0.402111, 0.329937, 0.295806, 0.249855, 0.212687, 0.214459, 0.254803],
    [0.357432, 0.279729, 0.270896, 0.262603, 0.229778, 0.257351, 0.249855, 0.259950],
];

/// Contrast masking coefficients from the same source (the normalized,
/// squared form of the CSF table).
#[rustfmt::skip]
pub const MASK_COF: [[f64; 8]; 8] = [
    [0.390625, 0.826446, 1.000000, 0.390625, 0.173611, 0.062500, 0.038447, 0.026874],
    [0.694444, 0.694444, 0.510204, 0.277008, 0.147929, 0.029727, 0.027778, 0.033058],
    [0.510204, 0.591716, 0.390625, 0.173611, 0.062500, 0.030779, 0.021004, 0.031888],
    [0.510204, 0.346021, 0.206612, 0.118906, 0.038447, 0.013212, 0.015625, 0.026015],
    [0.308642, 0.206612, 0.073046, 0.031888, 0.021626, 0.008417, 0.009426, 0.016866],
    [0.173611, 0.081633, 0.033058, 0.024414, 0.015242, 0.009246, 0.007831, 0.011815],
    [0.041649, 0.024414, 0.016437, 0.013212, 0.009426, 0.006830, 0.006944, 0.009803],
    [0.019290, 0.011815, 0.011080, 0.010412, 0.007972, 0.010000, 0.009426, 0.010203],
];

/// Orthonormal DCT-II basis: BASIS[u][x] = C(u) cos((2x+1) u pi / 16).
fn dct_basis() -> &'static [[f64; 8]; 8] {
    static BASIS: OnceLock<[[f64; 8]; 8]> = OnceLock::new();
    BASIS.get_or_init(|| {
        let mut b = [[0.0; 8]; 8];
        for (u, row) in b.iter_mut().enumerate() {
            let c = if u == 0 {
                (1.0f64 / 8.0).sqrt()
            } else {
                (2.0f64 / 8.0).sqrt()
            };
            for (x, v) in row.iter_mut().enumerate() {
                *v = c * ((2.0 * x as f64 + 1.0) * u as f64 * std::f64::consts::PI / 16.0).cos();
            }
        }
        b
    })
}

/// Orthonormal 2-D DCT-II of an 8x8 block.
pub(crate) fn dct2_8x8(block: &[f64; 64]) -> [f64; 64] {
    let basis = dct_basis();
    let mut rows = [0.0; 64];
    for y in 0..8 {
        for u in 0..8 {
            let mut acc = 0.0;
            for x in 0..8 {
                acc += basis[u][x] * block[y * 8 + x];
            }
            rows[y * 8 + u] = acc;
        }
    }
    let mut out = [0.0; 64];
    for v in 0..8 {
        for u in 0..8 {
            let mut acc = 0.0;
            for y in 0..8 {
                acc += basis[v][y] * rows[y * 8 + u];
            }
            out[v * 8 + u] = acc;
        }
    }
    out
}

/// MATLAB-style `var(A(:)) * numel(A)`: sum of squared deviations
/// scaled by N/(N-1).
fn vari(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let ssd: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    ssd * n / (n - 1.0)
}

/// Contrast masking allowance of one block (spatial samples + its DCT).
fn masking(block: &[f64; 64], dct: &[f64; 64]) -> f64 {
    let mut m = 0.0;
    for k in 0..8 {
        for l in 0..8 {
            if k != 0 || l != 0 {
                m += dct[k * 8 + l] * dct[k * 8 + l] * MASK_COF[k][l];
            }
        }
    }
    let pop = vari(block);
    let pop = if pop != 0.0 {
        let mut quad = [0.0f64; 4];
        for (q, (y0, x0)) in [(0usize, 0usize), (0, 4), (4, 0), (4, 4)]
            .iter()
            .enumerate()
        {
            let mut vals = [0.0; 16];
            for dy in 0..4 {
                for dx in 0..4 {
                    vals[dy * 4 + dx] = block[(y0 + dy) * 8 + x0 + dx];
                }
            }
            quad[q] = vari(&vals);
        }
        quad.iter().sum::<f64>() / pop
    } else {
        pop
    };
    (m * pop).sqrt() / 32.0
}

fn hvs_error_sums(reference: &LumaFrame, distorted: &LumaFrame) -> Result<(f64, f64)> {
    reference.check_compatible(distorted)?;
    if reference.width() < 8 || reference.height() < 8 {
        return Err(Error::FrameTooSmall {
            width: reference.width(),
            height: reference.height(),
            min: 8,
        });
    }
    let mut sum_hvs = 0.0;
    let mut sum_m = 0.0;
    let mut count = 0usize;
    let mut a = [0.0f64; 64];
    let mut b = [0.0f64; 64];
    for by in 0..reference.height() / 8 {
        for bx in 0..reference.width() / 8 {
            for y in 0..8 {
                for x in 0..8 {
                    a[y * 8 + x] = reference.get(bx * 8 + x, by * 8 + y) as f64;
                    b[y * 8 + x] = distorted.get(bx * 8 + x, by * 8 + y) as f64;
                }
            }
            let da = dct2_8x8(&a);
            let db = dct2_8x8(&b);
            let mask = masking(&a, &da).max(masking(&b, &db));
            for k in 0..8 {
                for l in 0..8 {
                    let u = (da[k * 8 + l] - db[k * 8 + l]).abs();
                    sum_hvs += (u * CSF_COF[k][l]) * (u * CSF_COF[k][l]);
                    let um = if k == 0 && l == 0 {
                        u
                    } else {
                        (u - mask / MASK_COF[k][l]).max(0.0)
                    };
                    sum_m += (um * CSF_COF[k][l]) * (um * CSF_COF[k][l]);
                }
            }
            count += 64;
        }
    }
    Ok((sum_hvs / count as f64, sum_m / count as f64))
}

/// PSNR on CSF-weighted DCT coefficient differences, in dB.
pub fn psnr_hvs(reference: &LumaFrame, distorted: &LumaFrame) -> Result<FeatureSample> {
    let (s, _) = hvs_error_sums(reference, distorted)?;
    Ok(FeatureSample::new(
        FeatureId::PsnrHvs,
        mse_like_to_db(s, reference.peak()),
    ))
}

/// PSNR-HVS with between-coefficient contrast masking, in dB.
pub fn psnr_hvs_m(reference: &LumaFrame, distorted: &LumaFrame) -> Result<FeatureSample> {
    let (_, s) = hvs_error_sums(reference, distorted)?;
    Ok(FeatureSample::new(
        FeatureId::PsnrHvsM,
        mse_like_to_db(s, reference.peak()),
    ))
}
