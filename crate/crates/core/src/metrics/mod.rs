//! Full-reference quality features.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

mod hvs;
mod spatial;
mod spherical;
pub mod temporal;

pub use hvs::{psnr_hvs, psnr_hvs_m, CSF_COF, MASK_COF};
pub use spatial::{gmsd, ms_ssim, psnr, sobel_map, spatial_activity, ssim};
pub use spherical::{s_psnr, ws_psnr, DEFAULT_SPHERE_POINTS};
pub use temporal::{relative_ti, temporal_gmsd, temporal_information, FramePairWindow};

/// Identity cap for the PSNR family on identical inputs, in dB.
pub const PSNR_CAP_DB: f64 = 100.0;

/// Which way a feature points: similarity features improve upwards,
/// distortion features improve downwards.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarity {
    HigherBetter,
    HigherWorse,
}

/// Stable identifiers for every feature the pipeline can compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FeatureId {
    #[serde(rename = "SA")]
    Sa,
    #[serde(rename = "PSNR")]
    Psnr,
    #[serde(rename = "PSNR_HVS")]
    PsnrHvs,
    #[serde(rename = "PSNR_HVS_M")]
    PsnrHvsM,
    #[serde(rename = "SSIM")]
    Ssim,
    #[serde(rename = "MS_SSIM")]
    MsSsim,
    #[serde(rename = "GMSD")]
    Gmsd,
    #[serde(rename = "R_TI")]
    RTi,
    #[serde(rename = "T_GMSD")]
    TGmsd,
    #[serde(rename = "WS_PSNR")]
    WsPsnr,
    #[serde(rename = "S_PSNR")]
    SPsnr,
}

impl FeatureId {
    pub const ALL: [FeatureId; 11] = [
        FeatureId::Sa,
        FeatureId::Psnr,
        FeatureId::PsnrHvs,
        FeatureId::PsnrHvsM,
        FeatureId::Ssim,
        FeatureId::MsSsim,
        FeatureId::Gmsd,
        FeatureId::RTi,
        FeatureId::TGmsd,
        FeatureId::WsPsnr,
        FeatureId::SPsnr,
    ];

    /// The feature set fused by the default model.
    pub const DEFAULT_SET: [FeatureId; 7] = [
        FeatureId::Sa,
        FeatureId::PsnrHvs,
        FeatureId::PsnrHvsM,
        FeatureId::MsSsim,
        FeatureId::Gmsd,
        FeatureId::RTi,
        FeatureId::TGmsd,
    ];

    /// Stable integer code (also the ordering used everywhere).
    pub fn code(self) -> u8 {
        match self {
            FeatureId::Sa => 0,
            FeatureId::Psnr => 1,
            FeatureId::PsnrHvs => 2,
            FeatureId::PsnrHvsM => 3,
            FeatureId::Ssim => 4,
            FeatureId::MsSsim => 5,
            FeatureId::Gmsd => 6,
            FeatureId::RTi => 7,
            FeatureId::TGmsd => 8,
            FeatureId::WsPsnr => 9,
            FeatureId::SPsnr => 10,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FeatureId::Sa => "SA",
            FeatureId::Psnr => "PSNR",
            FeatureId::PsnrHvs => "PSNR_HVS",
            FeatureId::PsnrHvsM => "PSNR_HVS_M",
            FeatureId::Ssim => "SSIM",
            FeatureId::MsSsim => "MS_SSIM",
            FeatureId::Gmsd => "GMSD",
            FeatureId::RTi => "R_TI",
            FeatureId::TGmsd => "T_GMSD",
            FeatureId::WsPsnr => "WS_PSNR",
            FeatureId::SPsnr => "S_PSNR",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        FeatureId::ALL
            .into_iter()
            .find(|id| id.name() == name)
            .ok_or_else(|| Error::UnknownFeature(name.to_string()))
    }

    pub fn polarity(self) -> Polarity {
        match self {
            FeatureId::Sa | FeatureId::Gmsd | FeatureId::RTi | FeatureId::TGmsd => {
                Polarity::HigherWorse
            }
            _ => Polarity::HigherBetter,
        }
    }

    /// Temporal features need the previous frame pair.
    pub fn is_temporal(self) -> bool {
        matches!(self, FeatureId::RTi | FeatureId::TGmsd)
    }

    /// Sphere-weighted baselines are defined on ERP frames only.
    pub fn erp_only(self) -> bool {
        matches!(self, FeatureId::WsPsnr | FeatureId::SPsnr)
    }

    /// Value on identical reference/distorted inputs.
    pub fn identity_value(self) -> f64 {
        match self {
            FeatureId::Ssim | FeatureId::MsSsim => 1.0,
            FeatureId::Sa | FeatureId::Gmsd | FeatureId::RTi | FeatureId::TGmsd => 0.0,
            _ => PSNR_CAP_DB,
        }
    }
}

impl std::fmt::Display for FeatureId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// One computed feature value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureSample {
    pub id: FeatureId,
    pub value: f64,
}

impl FeatureSample {
    pub fn new(id: FeatureId, value: f64) -> Self {
        FeatureSample { id, value }
    }
}
