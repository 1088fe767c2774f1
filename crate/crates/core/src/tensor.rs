//! Per-video feature tensors and their provenance.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::PatternKind;
use crate::metrics::FeatureId;

/// Where a metric is evaluated: raw ERP frames, the tiled collage, or
/// each viewport individually.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureMode {
    Projection,
    Collage,
    PerViewport,
}

impl FeatureMode {
    pub fn name(self) -> &'static str {
        match self {
            FeatureMode::Projection => "projection",
            FeatureMode::Collage => "collage",
            FeatureMode::PerViewport => "vp",
        }
    }
}

impl std::str::FromStr for FeatureMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "projection" | "proj" => Ok(FeatureMode::Projection),
            "collage" => Ok(FeatureMode::Collage),
            "vp" | "per_viewport" => Ok(FeatureMode::PerViewport),
            other => Err(format!("unknown mode `{other}`")),
        }
    }
}

/// Configuration fingerprint carried with every tensor so stale caches
/// are rejected instead of silently reused.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub mode: FeatureMode,
    /// Absent in projection mode.
    pub pattern: Option<PatternKind>,
    pub fov_deg: Option<f64>,
    pub viewport_size: Option<(usize, usize)>,
    pub features: Vec<FeatureId>,
    /// Hash over the metric constant tables and geometry conventions.
    pub feature_version: String,
}

/// Feature values for one video, indexed by (frame, viewport, feature).
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTensor {
    pub video_id: String,
    pub frames: usize,
    pub viewports: usize,
    pub provenance: Provenance,
    values: Vec<f64>,
}

impl FeatureTensor {
    pub fn new(
        video_id: impl Into<String>,
        frames: usize,
        viewports: usize,
        provenance: Provenance,
        values: Vec<f64>,
    ) -> Result<Self> {
        let features = provenance.features.len();
        if frames == 0 || viewports == 0 || features == 0 {
            return Err(Error::EmptyTensor);
        }
        if values.len() != frames * viewports * features {
            return Err(Error::LengthMismatch(
                values.len(),
                frames * viewports * features,
            ));
        }
        if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteInput(format!(
                "feature tensor for {} at flat index {bad}",
                video_id.into()
            )));
        }
        Ok(FeatureTensor {
            video_id: video_id.into(),
            frames,
            viewports,
            provenance,
            values,
        })
    }

    pub fn feature_ids(&self) -> &[FeatureId] {
        &self.provenance.features
    }

    pub fn n_features(&self) -> usize {
        self.provenance.features.len()
    }

    #[inline]
    pub fn get(&self, frame: usize, viewport: usize, feature: usize) -> f64 {
        self.values[(frame * self.viewports + viewport) * self.n_features() + feature]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Time series of one (viewport, feature) cell.
    pub fn series(&self, viewport: usize, feature: usize) -> Vec<f64> {
        (0..self.frames)
            .map(|f| self.get(f, viewport, feature))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn provenance(features: Vec<FeatureId>) -> Provenance {
        Provenance {
            mode: FeatureMode::PerViewport,
            pattern: Some(PatternKind::Equatorial),
            fov_deg: Some(40.0),
            viewport_size: Some((32, 32)),
            features,
            feature_version: "test".into(),
        }
    }

    #[test]
    fn indexing_is_frame_viewport_feature() {
        let ids = vec![FeatureId::Gmsd, FeatureId::RTi];
        let values: Vec<f64> = (0..3 * 2 * 2).map(|i| i as f64).collect();
        let t = FeatureTensor::new("v", 3, 2, provenance(ids), values).unwrap();
        assert_eq!(t.get(0, 0, 0), 0.0);
        assert_eq!(t.get(0, 1, 0), 2.0);
        assert_eq!(t.get(1, 0, 0), 4.0);
        assert_eq!(t.series(1, 1), vec![3.0, 7.0, 11.0]);
    }

    #[test]
    fn non_finite_values_are_rejected() {
        let ids = vec![FeatureId::Gmsd];
        let err = FeatureTensor::new("v", 1, 1, provenance(ids), vec![f64::NAN]);
        assert!(matches!(err, Err(Error::NonFiniteInput(_))));
    }

    #[test]
    fn shape_mismatch_is_rejected() {
        let ids = vec![FeatureId::Gmsd];
        assert!(FeatureTensor::new("v", 2, 2, provenance(ids), vec![0.0; 3]).is_err());
    }
}
