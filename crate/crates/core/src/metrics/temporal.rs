//! Temporal features over consecutive frame pairs.

use crate::error::Result;
use crate::frame::LumaFrame;
use crate::metrics::spatial::{gmsd_c_for_peak, gmsd_on_planes};
use crate::metrics::{FeatureId, FeatureSample};

/// Below this the reference is considered static for R-TI purposes.
const TI_EPSILON: f64 = 1e-8;
/// Bounded stand-in when motion appears only in the distorted video.
const R_TI_CAP: f64 = 10.0;

/// Current and previous frames of both sequences, all same size.
#[derive(Debug, Clone, Copy)]
pub struct FramePairWindow<'a> {
    pub ref_curr: &'a LumaFrame,
    pub ref_prev: &'a LumaFrame,
    pub dist_curr: &'a LumaFrame,
    pub dist_prev: &'a LumaFrame,
}

impl<'a> FramePairWindow<'a> {
    pub fn new(
        ref_curr: &'a LumaFrame,
        ref_prev: &'a LumaFrame,
        dist_curr: &'a LumaFrame,
        dist_prev: &'a LumaFrame,
    ) -> Result<Self> {
        ref_curr.check_same_dims(ref_prev)?;
        ref_curr.check_same_dims(dist_curr)?;
        ref_curr.check_same_dims(dist_prev)?;
        Ok(FramePairWindow {
            ref_curr,
            ref_prev,
            dist_curr,
            dist_prev,
        })
    }
}

fn frame_difference(curr: &LumaFrame, prev: &LumaFrame) -> Vec<f64> {
    curr.samples()
        .iter()
        .zip(prev.samples())
        .map(|(&c, &p)| c as f64 - p as f64)
        .collect()
}

fn population_std(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n).sqrt()
}

/// Temporal information: population standard deviation of the
/// inter-frame difference.
pub fn temporal_information(curr: &LumaFrame, prev: &LumaFrame) -> Result<f64> {
    curr.check_same_dims(prev)?;
    Ok(population_std(&frame_difference(curr, prev)))
}

/// Relative change in temporal information,
/// |TI_ref - TI_dist| / TI_ref. A static reference paired with a
/// static distortion yields 0; a static reference with a moving
/// distortion yields the documented cap.
pub fn relative_ti(w: &FramePairWindow) -> Result<FeatureSample> {
    let ti_ref = temporal_information(w.ref_curr, w.ref_prev)?;
    let ti_dist = temporal_information(w.dist_curr, w.dist_prev)?;
    let value = if ti_ref < TI_EPSILON {
        if ti_dist < TI_EPSILON {
            0.0
        } else {
            R_TI_CAP
        }
    } else {
        (ti_ref - ti_dist).abs() / ti_ref
    };
    Ok(FeatureSample::new(FeatureId::RTi, value))
}

/// GMSD between the signed inter-frame difference images of the two
/// sequences.
pub fn temporal_gmsd(w: &FramePairWindow) -> Result<FeatureSample> {
    let delta_ref = frame_difference(w.ref_curr, w.ref_prev);
    let delta_dist = frame_difference(w.dist_curr, w.dist_prev);
    let value = gmsd_on_planes(
        &delta_ref,
        &delta_dist,
        w.ref_curr.width(),
        w.ref_curr.height(),
        gmsd_c_for_peak(w.ref_curr.peak()),
    );
    Ok(FeatureSample::new(FeatureId::TGmsd, value))
}
