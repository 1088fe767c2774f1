//! Run configuration: one document holding geometry, feature, and
//! pooling defaults, echoed into every output directory for
//! provenance.

use std::path::Path;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::geometry::{make_pattern, viewport_size_matching_erp, PatternKind, SamplingPattern};
use crate::metrics::{FeatureId, DEFAULT_SPHERE_POINTS};
use crate::pooling::PoolingConfig;
use crate::tensor::{FeatureMode, Provenance};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub mode: FeatureMode,
    pub pattern: PatternKind,
    pub fov_deg: f64,
    /// Explicit viewport size; `None` matches the ERP equator's
    /// angular density (the HMD preset sets 1080x1200 here).
    pub viewport_width: Option<usize>,
    pub viewport_height: Option<usize>,
    pub features: Vec<FeatureId>,
    pub sphere_points: usize,
    pub pooling: PoolingConfig,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            mode: FeatureMode::PerViewport,
            pattern: PatternKind::Uniform,
            fov_deg: 40.0,
            viewport_width: None,
            viewport_height: None,
            features: FeatureId::DEFAULT_SET.to_vec(),
            sphere_points: DEFAULT_SPHERE_POINTS,
            pooling: PoolingConfig::default(),
            seed: 7,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let cfg: RunConfig =
            serde_json::from_str(&text).map_err(|e| Error::parse(path, e.to_string()))?;
        cfg.pooling.validate()?;
        Ok(cfg)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut json = serde_json::to_string_pretty(self).expect("config serializes");
        json.push('\n');
        std::fs::write(path, json).map_err(|e| Error::io(path, e))
    }

    /// Viewport size for a given ERP width: the explicit override or
    /// the equator-density match.
    pub fn viewport_size(&self, erp_width: usize) -> (usize, usize) {
        match (self.viewport_width, self.viewport_height) {
            (Some(w), Some(h)) => (w, h),
            (Some(w), None) => (w, w),
            (None, Some(h)) => (h, h),
            (None, None) => {
                let side = viewport_size_matching_erp(self.fov_deg, erp_width);
                (side, side)
            }
        }
    }

    pub fn sampling_pattern(&self, erp_width: usize) -> Result<SamplingPattern> {
        let (w, h) = self.viewport_size(erp_width);
        make_pattern(self.pattern, self.fov_deg, w, h)
    }

    /// Provenance block matching this configuration.
    pub fn provenance(&self, erp_width: usize) -> Provenance {
        let uses_pattern = self.mode != FeatureMode::Projection;
        let (w, h) = self.viewport_size(erp_width);
        Provenance {
            mode: self.mode,
            pattern: uses_pattern.then_some(self.pattern),
            fov_deg: uses_pattern.then_some(self.fov_deg),
            viewport_size: uses_pattern.then_some((w, h)),
            features: self.features.clone(),
            feature_version: feature_version().to_string(),
        }
    }
}

/// Fingerprint of the metric constant tables and numeric conventions;
/// editing any of them silently would otherwise leave stale feature
/// caches readable.
pub fn feature_version() -> &'static str {
    static VERSION: OnceLock<String> = OnceLock::new();
    VERSION.get_or_init(|| {
        let mut hasher = Sha256::new();
        for row in crate::metrics::CSF_COF {
            for v in row {
                hasher.update(v.to_le_bytes());
            }
        }
        for row in crate::metrics::MASK_COF {
            for v in row {
                hasher.update(v.to_le_bytes());
            }
        }
        // Numeric conventions: bump this tag when kernels, windows, or
        // pooling recursions change behavior.
        hasher.update(b"sobel121|prewitt3|ssim11g1.5|msssim5w|gmsdc170|hvspool-v1");
        let digest = hasher.finalize();
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    })
}
