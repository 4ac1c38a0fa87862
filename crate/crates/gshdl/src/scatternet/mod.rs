//! Wavelet scattering front-end.
//!
//! An input image is filtered with oriented complex bandpass kernels at a
//! few dyadic scales, the complex modulus makes each response
//! phase-insensitive, a parametric log tames the heavy right tail at the
//! finest scale, and a wide lowpass aggregates everything into slowly
//! varying per-pixel features. A second filtering pass over the envelopes
//! recovers high-frequency structure lost to the smoothing.

mod filters;

pub use filters::build_filter_bank;

use crate::error::{Error, Result};
use crate::grid::{ComplexKernel2D, Grid2D, Kernel2D};
use crate::numerics::conv::{conv_plane_into, conv_separable_into};

/// Front-end configuration.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct ScatterConfig {
    /// Number of dyadic scales.
    pub num_scales: usize,
    /// Filter orientations in degrees.
    pub orientations: Vec<f64>,
    /// Additive constant of the log transform applied at the finest scale.
    pub log_k_finest: f64,
    /// Compute features on a half-resolution copy as well and concatenate.
    pub dual_resolution: bool,
}

impl Default for ScatterConfig {
    fn default() -> Self {
        Self {
            num_scales: 2,
            orientations: vec![15.0, 45.0, 75.0, 105.0, 135.0, 165.0],
            log_k_finest: 1.1,
            dual_resolution: false,
        }
    }
}

impl ScatterConfig {
    pub fn validate(&self) -> Result<()> {
        if self.num_scales == 0 || self.num_scales > 3 {
            return Err(Error::Config(format!(
                "num_scales must be in 1..=3, got {}",
                self.num_scales
            )));
        }
        if self.orientations.is_empty() {
            return Err(Error::Config("at least one orientation required".into()));
        }
        if self.log_k_finest <= 0.0 {
            return Err(Error::Config("log_k_finest must be positive".into()));
        }
        Ok(())
    }

    /// Smoothing window scale 2^J in pixels.
    pub fn smoothing_scale(&self) -> f64 {
        (1usize << self.num_scales) as f64
    }

    /// Feature channels produced per input channel.
    pub fn channels_per_input(&self) -> usize {
        let r = self.orientations.len();
        let j = self.num_scales;
        let pairs = j * (j.saturating_sub(1)) / 2;
        let base = 1 + r * j + r * r * pairs;
        if self.dual_resolution {
            2 * base
        } else {
            base
        }
    }
}

/// One complex bandpass kernel plus its separable factorization.
#[derive(Debug, Clone)]
pub struct BandpassFilter {
    pub scale: usize,
    pub orientation_deg: f64,
    pub kernel: ComplexKernel2D,
    /// 1-D complex column/row factors of the modulated Gaussian part.
    pub(crate) col_re: Vec<f64>,
    pub(crate) col_im: Vec<f64>,
    pub(crate) row_re: Vec<f64>,
    pub(crate) row_im: Vec<f64>,
    /// 1-D factors of the Gaussian envelope (for the DC-correction term).
    pub(crate) env_1d: Vec<f64>,
    /// Complex DC-correction coefficient kappa.
    pub(crate) kappa_re: f64,
    pub(crate) kappa_im: f64,
}

/// The full filter set: J x |orientations| bandpass kernels plus a lowpass.
#[derive(Debug, Clone)]
pub struct ComplexFilterBank {
    pub bandpass: Vec<BandpassFilter>,
    pub lowpass: Kernel2D,
    pub(crate) lowpass_1d: Vec<f64>,
    pub num_scales: usize,
    pub num_orientations: usize,
}

impl ComplexFilterBank {
    pub fn filter(&self, scale: usize, orientation_index: usize) -> &BandpassFilter {
        &self.bandpass[(scale - 1) * self.num_orientations + orientation_index]
    }
}

/// Provenance of one feature channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum PathDescriptor {
    /// Lowpass of an input channel.
    Layer0 { input: u16 },
    /// First-order path (scale, orientation index).
    Layer1 { input: u16, scale: u8, orientation: u8 },
    /// Second-order path; second scale is strictly coarser than the first.
    Layer2 { input: u16, scale1: u8, orientation1: u8, scale2: u8, orientation2: u8 },
}

/// Per-pixel scattering features for one image.
#[derive(Debug, Clone)]
pub struct FeatureStack {
    pub layer0: Grid2D,
    pub layer1: Grid2D,
    pub layer2: Option<Grid2D>,
    pub path_index: Vec<PathDescriptor>,
}

impl FeatureStack {
    pub fn height(&self) -> usize {
        self.layer0.height()
    }

    pub fn width(&self) -> usize {
        self.layer0.width()
    }

    pub fn total_channels(&self) -> usize {
        self.layer0.channels()
            + self.layer1.channels()
            + self.layer2.as_ref().map_or(0, |g| g.channels())
    }

    /// All layers stacked into one multi-channel grid, ordered as
    /// `path_index`.
    pub fn concat(&self) -> Result<Grid2D> {
        let mut parts = vec![&self.layer0, &self.layer1];
        if let Some(l2) = &self.layer2 {
            parts.push(l2);
        }
        Grid2D::concat_channels(&parts)
    }
}

/// Envelope sqrt((x * psi_re)^2 + (x * psi_im)^2) of a single-channel grid.
pub fn modulus_envelope(input: &Grid2D, kernel: &ComplexKernel2D) -> Result<Grid2D> {
    let (re, im) = crate::numerics::conv2d_same_complex(input, kernel)?;
    let values: Vec<f64> = re
        .values()
        .iter()
        .zip(im.values())
        .map(|(a, b)| (a * a + b * b).sqrt())
        .collect();
    Grid2D::new(input.height(), input.width(), 1, values)
}

/// Pointwise log(u + k). Requires k > 0 and u >= 0.
pub fn parametric_log(envelope: &Grid2D, k: f64) -> Result<Grid2D> {
    if k <= 0.0 {
        return Err(Error::Config(format!("log parameter k must be positive, got {k}")));
    }
    if envelope.values().iter().any(|&v| v < 0.0) {
        return Err(Error::Data("parametric_log input must be nonnegative".into()));
    }
    let values: Vec<f64> = envelope.values().iter().map(|&u| (u + k).ln()).collect();
    Grid2D::new(envelope.height(), envelope.width(), envelope.channels(), values)
}

/// Scratch buffers reused across per-plane filtering passes.
struct Scratch {
    a: Vec<f64>,
    b: Vec<f64>,
    env: Vec<f64>,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl Scratch {
    fn new(n: usize) -> Self {
        Self {
            a: Vec::new(),
            b: vec![0.0; n],
            env: vec![0.0; n],
            re: vec![0.0; n],
            im: vec![0.0; n],
        }
    }
}

/// Fast separable evaluation of the modulus envelope.
///
/// The bandpass kernel is a modulated Gaussian minus kappa times the plain
/// envelope; both terms factor into 1-D passes, so the result equals the
/// direct `modulus_envelope` up to floating-point reassociation.
fn envelope_separable(
    src: &[f64],
    h: usize,
    w: usize,
    f: &BandpassFilter,
    s: &mut Scratch,
    out: &mut [f64],
) {
    let n = h * w;
    // Real and imaginary column passes of the modulated Gaussian.
    // Complex separable convolution: (col_re + i col_im) then (row_re + i row_im).
    // Column pass on real input.
    conv_separable_into(src, h, w, &f.col_re, &f.row_re, &mut s.a, &mut s.re[..]);
    conv_separable_into(src, h, w, &f.col_im, &f.row_im, &mut s.a, &mut s.b);
    for i in 0..n {
        s.re[i] -= s.b[i];
    }
    conv_separable_into(src, h, w, &f.col_re, &f.row_im, &mut s.a, &mut s.im[..]);
    conv_separable_into(src, h, w, &f.col_im, &f.row_re, &mut s.a, &mut s.b);
    for i in 0..n {
        s.im[i] += s.b[i];
    }
    // DC correction: subtract kappa * (envelope-smoothed input).
    conv_separable_into(src, h, w, &f.env_1d, &f.env_1d, &mut s.a, &mut s.env[..]);
    for i in 0..n {
        let re = s.re[i] - f.kappa_re * s.env[i];
        let im = s.im[i] - f.kappa_im * s.env[i];
        out[i] = (re * re + im * im).sqrt();
    }
}

fn lowpass_separable(src: &[f64], h: usize, w: usize, lp: &[f64], s: &mut Scratch, out: &mut [f64]) {
    conv_separable_into(src, h, w, lp, lp, &mut s.a, out);
}

/// Compute the full scattering feature stack for a (possibly multi-channel)
/// image. Channels are scattered independently and concatenated.
pub fn scatter(image: &Grid2D, bank: &ComplexFilterBank, config: &ScatterConfig) -> Result<FeatureStack> {
    config.validate()?;
    if bank.num_scales != config.num_scales || bank.num_orientations != config.orientations.len() {
        return Err(Error::Config(format!(
            "filter bank ({} scales, {} orientations) inconsistent with config ({}, {})",
            bank.num_scales,
            bank.num_orientations,
            config.num_scales,
            config.orientations.len()
        )));
    }
    if !image.is_finite() {
        return Err(Error::Data("scatter input contains non-finite values".into()));
    }

    let stack = scatter_single_resolution(image, bank, config)?;
    if !config.dual_resolution {
        return Ok(stack);
    }

    // Half-resolution pass: 2x2 box downsample, scatter, bilinear upsample.
    let small = downsample2(image);
    let small_stack = scatter_single_resolution(&small, bank, config)?;
    let up0 = upsample_bilinear(&small_stack.layer0, image.height(), image.width());
    let up1 = upsample_bilinear(&small_stack.layer1, image.height(), image.width());
    let up2 = small_stack
        .layer2
        .as_ref()
        .map(|g| upsample_bilinear(g, image.height(), image.width()));

    let layer0 = Grid2D::concat_channels(&[&stack.layer0, &up0])?;
    let layer1 = Grid2D::concat_channels(&[&stack.layer1, &up1])?;
    let layer2 = match (&stack.layer2, &up2) {
        (Some(a), Some(b)) => Some(Grid2D::concat_channels(&[a, b])?),
        (Some(a), None) => Some(a.clone()),
        _ => None,
    };
    let mut path_index = stack.path_index.clone();
    path_index.extend(small_stack.path_index.iter().copied());
    Ok(FeatureStack { layer0, layer1, layer2, path_index })
}

fn scatter_single_resolution(
    image: &Grid2D,
    bank: &ComplexFilterBank,
    config: &ScatterConfig,
) -> Result<FeatureStack> {
    let (h, w) = (image.height(), image.width());
    let n = h * w;
    let n_in = image.channels();
    let j_max = config.num_scales;
    let n_orient = config.orientations.len();
    let lp = &bank.lowpass_1d;
    let mut s = Scratch::new(n);

    let mut l0 = Vec::with_capacity(n_in * n);
    let mut l1 = Vec::new();
    let mut l2 = Vec::new();
    let mut path_l0 = Vec::new();
    let mut path_l1 = Vec::new();
    let mut path_l2 = Vec::new();

    let mut plane = vec![0.0; n];
    let mut envelope = vec![0.0; n];

    for c in 0..n_in {
        let src = image.channel(c);

        // L0: lowpass of the raw channel.
        lowpass_separable(src, h, w, lp, &mut s, &mut plane);
        l0.extend_from_slice(&plane);
        path_l0.push(PathDescriptor::Layer0 { input: c as u16 });

        // First-order envelopes, kept for the second-order pass.
        let mut first_order: Vec<(usize, usize, Vec<f64>)> = Vec::new();
        for j in 1..=j_max {
            for r in 0..n_orient {
                let f = bank.filter(j, r);
                envelope_separable(src, h, w, f, &mut s, &mut envelope);
                // Parametric log at the finest scale only.
                let u1: Vec<f64> = if j == 1 {
                    envelope.iter().map(|&u| (u + config.log_k_finest).ln()).collect()
                } else {
                    envelope.clone()
                };
                lowpass_separable(&u1, h, w, lp, &mut s, &mut plane);
                l1.extend_from_slice(&plane);
                path_l1.push(PathDescriptor::Layer1 {
                    input: c as u16,
                    scale: j as u8,
                    orientation: r as u8,
                });
                first_order.push((j, r, u1));
            }
        }

        // Second order: refilter |U1| with strictly coarser bandpasses.
        for (j1, r1, u1) in &first_order {
            if *j1 + 1 > j_max {
                continue;
            }
            let abs_u1: Vec<f64> = u1.iter().map(|v| v.abs()).collect();
            for j2 in (*j1 + 1)..=j_max {
                for r2 in 0..n_orient {
                    let f = bank.filter(j2, r2);
                    envelope_separable(&abs_u1, h, w, f, &mut s, &mut envelope);
                    lowpass_separable(&envelope, h, w, lp, &mut s, &mut plane);
                    l2.extend_from_slice(&plane);
                    path_l2.push(PathDescriptor::Layer2 {
                        input: c as u16,
                        scale1: *j1 as u8,
                        orientation1: *r1 as u8,
                        scale2: j2 as u8,
                        orientation2: r2 as u8,
                    });
                }
            }
        }
    }

    let layer0 = Grid2D::new(h, w, path_l0.len(), l0)?;
    let layer1 = Grid2D::new(h, w, path_l1.len(), l1)?;
    let layer2 = if path_l2.is_empty() {
        None
    } else {
        Some(Grid2D::new(h, w, path_l2.len(), l2)?)
    };
    let mut path_index = path_l0;
    path_index.extend(path_l1);
    path_index.extend(path_l2);
    Ok(FeatureStack { layer0, layer1, layer2, path_index })
}

fn downsample2(image: &Grid2D) -> Grid2D {
    let h2 = (image.height() + 1) / 2;
    let w2 = (image.width() + 1) / 2;
    let mut out = Grid2D::zeros(h2, w2, image.channels());
    for c in 0..image.channels() {
        for y in 0..h2 {
            for x in 0..w2 {
                let mut acc = 0.0;
                let mut cnt = 0.0;
                for dy in 0..2 {
                    for dx in 0..2 {
                        let sy = 2 * y + dy;
                        let sx = 2 * x + dx;
                        if sy < image.height() && sx < image.width() {
                            acc += image.get(c, sy, sx);
                            cnt += 1.0;
                        }
                    }
                }
                out.set(c, y, x, acc / cnt);
            }
        }
    }
    out
}

fn upsample_bilinear(image: &Grid2D, h: usize, w: usize) -> Grid2D {
    let mut out = Grid2D::zeros(h, w, image.channels());
    let sh = image.height();
    let sw = image.width();
    for c in 0..image.channels() {
        for y in 0..h {
            let fy = if h > 1 { y as f64 * (sh - 1) as f64 / (h - 1) as f64 } else { 0.0 };
            let y0 = fy.floor() as usize;
            let y1 = (y0 + 1).min(sh - 1);
            let ty = fy - y0 as f64;
            for x in 0..w {
                let fx = if w > 1 { x as f64 * (sw - 1) as f64 / (w - 1) as f64 } else { 0.0 };
                let x0 = fx.floor() as usize;
                let x1 = (x0 + 1).min(sw - 1);
                let tx = fx - x0 as f64;
                let v = (1.0 - ty) * ((1.0 - tx) * image.get(c, y0, x0) + tx * image.get(c, y0, x1))
                    + ty * ((1.0 - tx) * image.get(c, y1, x0) + tx * image.get(c, y1, x1));
                out.set(c, y, x, v);
            }
        }
    }
    out
}

#[allow(dead_code)]
pub(crate) fn conv_plane(src: &[f64], h: usize, w: usize, kernel: &Kernel2D) -> Vec<f64> {
    let mut out = vec![0.0; h * w];
    conv_plane_into(src, h, w, kernel, &mut out);
    out
}

#[cfg(test)]
mod tests;
