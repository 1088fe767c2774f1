//! Single-channel intensity planes.

use crate::error::{Error, Result};

/// A luma plane: `width * height` intensities stored row-major.
///
/// Samples are `f32` so rendered (interpolated) viewports and decoded
/// integer frames share one representation; all metric arithmetic is
/// done in `f64`. Decoded samples are integral values in
/// `[0, 2^bit_depth - 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LumaFrame {
    width: usize,
    height: usize,
    bit_depth: u8,
    samples: Vec<f32>,
}

impl LumaFrame {
    pub fn new(width: usize, height: usize, bit_depth: u8, samples: Vec<f32>) -> Self {
        assert_eq!(samples.len(), width * height, "sample count mismatch");
        assert!(
            bit_depth == 8 || bit_depth == 10,
            "bit depth must be 8 or 10"
        );
        LumaFrame {
            width,
            height,
            bit_depth,
            samples,
        }
    }

    /// Frame filled with a single value.
    pub fn constant(width: usize, height: usize, bit_depth: u8, value: f32) -> Self {
        Self::new(width, height, bit_depth, vec![value; width * height])
    }

    /// Build from a per-pixel closure `f(x, y)`.
    pub fn from_fn(
        width: usize,
        height: usize,
        bit_depth: u8,
        mut f: impl FnMut(usize, usize) -> f32,
    ) -> Self {
        let mut samples = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                samples.push(f(x, y));
            }
        }
        Self::new(width, height, bit_depth, samples)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn bit_depth(&self) -> u8 {
        self.bit_depth
    }

    /// Peak sample value, `2^bit_depth - 1`.
    pub fn peak(&self) -> f64 {
        ((1u32 << self.bit_depth) - 1) as f64
    }

    pub fn samples(&self) -> &[f32] {
        &self.samples
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f32 {
        self.samples[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: f32) {
        self.samples[y * self.width + x] = value;
    }

    /// Sample with edge replication for out-of-range coordinates.
    #[inline]
    pub fn get_clamped(&self, x: isize, y: isize) -> f64 {
        let x = x.clamp(0, self.width as isize - 1) as usize;
        let y = y.clamp(0, self.height as isize - 1) as usize;
        self.samples[y * self.width + x] as f64
    }

    /// Check that `other` has the same dimensions.
    pub fn check_same_dims(&self, other: &LumaFrame) -> Result<()> {
        if self.width != other.width || self.height != other.height {
            return Err(Error::DimensionMismatch(
                self.width,
                self.height,
                other.width,
                other.height,
            ));
        }
        Ok(())
    }

    /// Same dimensions and same bit depth.
    pub fn check_compatible(&self, other: &LumaFrame) -> Result<()> {
        self.check_same_dims(other)?;
        if self.bit_depth != other.bit_depth {
            return Err(Error::BitDepthMismatch(self.bit_depth, other.bit_depth));
        }
        Ok(())
    }
}
