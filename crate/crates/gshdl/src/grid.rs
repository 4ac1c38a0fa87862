//! Dense image/feature planes and convolution kernels.
//!
//! `Grid2D` stores one or more channels row-major, channel after channel.
//! `Kernel2D` is a small odd-sized stencil centered on its middle tap;
//! `ComplexKernel2D` pairs a real and an imaginary stencil.

use crate::error::{Error, Result};

/// Multi-channel raster of finite real values, row-major per channel.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid2D {
    height: usize,
    width: usize,
    channels: usize,
    values: Vec<f64>,
}

impl Grid2D {
    pub fn new(height: usize, width: usize, channels: usize, values: Vec<f64>) -> Result<Self> {
        if height == 0 || width == 0 || channels == 0 {
            return Err(Error::Dimension(format!(
                "grid dims must be positive, got {height}x{width}x{channels}"
            )));
        }
        if values.len() != height * width * channels {
            return Err(Error::Dimension(format!(
                "value count {} does not match {height}x{width}x{channels}",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Data("grid contains non-finite values".into()));
        }
        Ok(Self { height, width, channels, values })
    }

    /// All-zero grid of the given shape.
    pub fn zeros(height: usize, width: usize, channels: usize) -> Self {
        assert!(height > 0 && width > 0 && channels > 0, "grid dims must be positive");
        Self { height, width, channels, values: vec![0.0; height * width * channels] }
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn pixels(&self) -> usize {
        self.height * self.width
    }

    #[inline]
    pub fn get(&self, channel: usize, row: usize, col: usize) -> f64 {
        self.values[(channel * self.height + row) * self.width + col]
    }

    #[inline]
    pub fn set(&mut self, channel: usize, row: usize, col: usize, v: f64) {
        self.values[(channel * self.height + row) * self.width + col] = v;
    }

    /// Borrow one channel plane as a row-major slice.
    pub fn channel(&self, channel: usize) -> &[f64] {
        let n = self.pixels();
        &self.values[channel * n..(channel + 1) * n]
    }

    pub fn channel_mut(&mut self, channel: usize) -> &mut [f64] {
        let n = self.pixels();
        &mut self.values[channel * n..(channel + 1) * n]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// Single-channel view of one plane, cloned out.
    pub fn extract_channel(&self, channel: usize) -> Grid2D {
        Grid2D {
            height: self.height,
            width: self.width,
            channels: 1,
            values: self.channel(channel).to_vec(),
        }
    }

    /// Stack grids of identical spatial dims along the channel axis.
    pub fn concat_channels(parts: &[&Grid2D]) -> Result<Grid2D> {
        let first = parts.first().ok_or_else(|| Error::Data("no grids to concatenate".into()))?;
        let (h, w) = (first.height, first.width);
        let mut values = Vec::new();
        let mut channels = 0;
        for g in parts {
            if g.height != h || g.width != w {
                return Err(Error::Dimension(format!(
                    "cannot concat {}x{} with {}x{}",
                    g.height, g.width, h, w
                )));
            }
            values.extend_from_slice(&g.values);
            channels += g.channels;
        }
        Ok(Grid2D { height: h, width: w, channels, values })
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

/// Odd-sized real stencil. `get(0, 0)` addresses the top-left tap; the
/// center tap is at `(height/2, width/2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel2D {
    height: usize,
    width: usize,
    values: Vec<f64>,
}

impl Kernel2D {
    pub fn new(height: usize, width: usize, values: Vec<f64>) -> Result<Self> {
        if height % 2 == 0 || width % 2 == 0 || height == 0 || width == 0 {
            return Err(Error::Dimension(format!(
                "kernel dims must be odd and positive, got {height}x{width}"
            )));
        }
        if values.len() != height * width {
            return Err(Error::Dimension(format!(
                "kernel value count {} does not match {height}x{width}",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Data("kernel contains non-finite values".into()));
        }
        Ok(Self { height, width, values })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.width + col]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn l1_norm(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).sum()
    }

    /// 180-degree spatial flip, turning convolution into correlation.
    pub fn flipped(&self) -> Kernel2D {
        let mut values = self.values.clone();
        values.reverse();
        Kernel2D { height: self.height, width: self.width, values }
    }
}

/// Complex stencil stored as matching real and imaginary parts.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexKernel2D {
    pub re: Kernel2D,
    pub im: Kernel2D,
}

impl ComplexKernel2D {
    pub fn new(re: Kernel2D, im: Kernel2D) -> Result<Self> {
        if re.height() != im.height() || re.width() != im.width() {
            return Err(Error::Dimension("real/imaginary kernel dims differ".into()));
        }
        Ok(Self { re, im })
    }

    pub fn height(&self) -> usize {
        self.re.height()
    }

    pub fn width(&self) -> usize {
        self.re.width()
    }

    /// |sum of complex taps|, i.e. the magnitude of the DC response.
    pub fn dc_magnitude(&self) -> f64 {
        let sr = self.re.sum();
        let si = self.im.sum();
        (sr * sr + si * si).sqrt()
    }

    pub fn l1_norm(&self) -> f64 {
        self.re
            .values()
            .iter()
            .zip(self.im.values())
            .map(|(a, b)| (a * a + b * b).sqrt())
            .sum()
    }
}
