//! Full-reference quality estimation for 360-degree (equirectangular)
//! video: gnomonic viewport rendering, spatio-temporal quality
//! features, HVS-aware temporal pooling, and learned fusion of the
//! pooled features into a subjective-quality prediction, plus the
//! correlation-based evaluation harnesses.

pub mod config;
pub mod dataset;
pub mod error;
pub mod eval;
pub mod frame;
pub mod geometry;
pub mod harness;
pub mod metrics;
pub mod pooling;
pub mod regress;
pub mod synth;
pub mod tensor;

pub use error::{Error, Result};
pub use frame::LumaFrame;
