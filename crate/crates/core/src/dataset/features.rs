//! Whole-video feature extraction: stream frame pairs, render the
//! configured surfaces, and evaluate every requested feature.

use crate::error::{Error, Result};
use crate::frame::LumaFrame;
use crate::geometry::{render_collage, render_viewport, SamplingPattern};
use crate::metrics::{self, FeatureId, FramePairWindow};
use crate::tensor::{FeatureMode, FeatureTensor, Provenance};

use super::{FrameReader, VideoEntry};

fn compute_spatial(
    id: FeatureId,
    reference: &LumaFrame,
    distorted: &LumaFrame,
    sphere_points: usize,
) -> Result<f64> {
    Ok(match id {
        FeatureId::Sa => metrics::spatial_activity(reference, distorted)?.value,
        FeatureId::Psnr => metrics::psnr(reference, distorted)?.value,
        FeatureId::PsnrHvs => metrics::psnr_hvs(reference, distorted)?.value,
        FeatureId::PsnrHvsM => metrics::psnr_hvs_m(reference, distorted)?.value,
        FeatureId::Ssim => metrics::ssim(reference, distorted)?.value,
        FeatureId::MsSsim => metrics::ms_ssim(reference, distorted)?.value,
        FeatureId::Gmsd => metrics::gmsd(reference, distorted)?.value,
        FeatureId::WsPsnr => metrics::ws_psnr(reference, distorted)?.value,
        FeatureId::SPsnr => metrics::s_psnr(reference, distorted, sphere_points)?.value,
        FeatureId::RTi | FeatureId::TGmsd => unreachable!("temporal ids handled separately"),
    })
}

fn compute_temporal(id: FeatureId, window: &FramePairWindow) -> Result<f64> {
    Ok(match id {
        FeatureId::RTi => metrics::relative_ti(window)?.value,
        FeatureId::TGmsd => metrics::temporal_gmsd(window)?.value,
        _ => unreachable!("spatial ids handled separately"),
    })
}

/// Render the surfaces one frame contributes in the given mode.
fn surfaces(
    erp: &LumaFrame,
    mode: FeatureMode,
    pattern: Option<&SamplingPattern>,
) -> Vec<LumaFrame> {
    match mode {
        FeatureMode::Projection => vec![erp.clone()],
        FeatureMode::Collage => vec![render_collage(erp, pattern.expect("pattern checked"))],
        FeatureMode::PerViewport => pattern
            .expect("pattern checked")
            .specs
            .iter()
            .map(|spec| render_viewport(erp, spec))
            .collect(),
    }
}

/// Compute the full (frame x viewport x feature) tensor for one video.
/// The provenance block names the mode and feature set and is stored
/// verbatim in the tensor. Temporal features compare against the
/// previous frame's rendered surface and are 0 at frame 0. Peak
/// residency is the current and previous decoded frame of each stream
/// plus their rendered surfaces.
pub fn compute_features(
    entry: &VideoEntry,
    pattern: Option<&SamplingPattern>,
    provenance: Provenance,
    sphere_points: usize,
) -> Result<FeatureTensor> {
    let mode = provenance.mode;
    let feature_ids = provenance.features.clone();
    let feature_ids = feature_ids.as_slice();
    if mode != FeatureMode::Projection {
        assert!(
            pattern.is_some(),
            "pattern required outside projection mode"
        );
        debug_assert_eq!(pattern.map(|p| p.kind), provenance.pattern);
        if let Some(bad) = feature_ids.iter().find(|id| id.erp_only()) {
            return Err(Error::FeatureNotApplicable(bad.name().to_string()));
        }
    }
    let n_surfaces = match mode {
        FeatureMode::PerViewport => pattern.unwrap().len(),
        _ => 1,
    };
    let mut ref_reader = FrameReader::open(&entry.reference_path, entry.geometry())?;
    let mut dist_reader = FrameReader::open(&entry.distorted_path, entry.geometry())?;

    let mut values = Vec::with_capacity(entry.frame_count * n_surfaces * feature_ids.len());
    let mut prev_ref: Vec<LumaFrame> = Vec::new();
    let mut prev_dist: Vec<LumaFrame> = Vec::new();
    let mut frames_done = 0usize;
    while frames_done < entry.frame_count {
        let ref_frame = ref_reader.next_frame()?;
        let dist_frame = dist_reader.next_frame()?;
        let (ref_frame, dist_frame) = match (ref_frame, dist_frame) {
            (Some(r), Some(d)) => (r, d),
            (None, None) => break,
            (r, d) => {
                return Err(Error::FrameCountMismatch(
                    frames_done + r.is_some() as usize,
                    frames_done + d.is_some() as usize,
                ))
            }
        };
        if ref_frame.width() != entry.width || ref_frame.height() != entry.height {
            return Err(Error::DimensionMismatch(
                ref_frame.width(),
                ref_frame.height(),
                entry.width,
                entry.height,
            ));
        }
        ref_frame.check_same_dims(&dist_frame)?;

        let ref_surfaces = surfaces(&ref_frame, mode, pattern);
        let dist_surfaces = surfaces(&dist_frame, mode, pattern);
        for n in 0..n_surfaces {
            for &id in feature_ids {
                let value = if id.is_temporal() {
                    if frames_done == 0 {
                        // No predecessor; documented as 0.
                        0.0
                    } else {
                        let window = FramePairWindow::new(
                            &ref_surfaces[n],
                            &prev_ref[n],
                            &dist_surfaces[n],
                            &prev_dist[n],
                        )?;
                        compute_temporal(id, &window)?
                    }
                } else {
                    compute_spatial(id, &ref_surfaces[n], &dist_surfaces[n], sphere_points)?
                };
                values.push(value);
            }
        }
        prev_ref = ref_surfaces;
        prev_dist = dist_surfaces;
        frames_done += 1;
    }
    if frames_done == 0 {
        return Err(Error::EmptyTensor);
    }
    FeatureTensor::new(&entry.video_id, frames_done, n_surfaces, provenance, values)
}
