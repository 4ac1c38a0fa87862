//! Oriented complex bandpass kernels and the smoothing lowpass.
//!
//! Each bandpass is a Gaussian-windowed complex exponential with its DC
//! response subtracted exactly: psi(u) = g(u) (e^{i w·u} - kappa), where
//! kappa makes sum(psi) = 0. The spectrum is a single Gaussian bump at +w,
//! so the filter is analytic (one-sided) up to a tail of well under 1% of
//! the energy. Scale j halves the center frequency and doubles the window.

use super::{BandpassFilter, ComplexFilterBank, ScatterConfig};
use crate::error::Result;
use crate::grid::{ComplexKernel2D, Grid2D, Kernel2D};

/// Center frequency (radians per pixel) at scale j.
fn center_frequency(scale: usize) -> f64 {
    std::f64::consts::PI / (1 << scale) as f64
}

/// Gaussian envelope width at scale j, chosen so bandwidth scales with
/// frequency (constant-Q subbands).
fn envelope_sigma(scale: usize) -> f64 {
    0.85 * (1 << scale) as f64
}

/// Spatial kernel radius at scale j: 15x15 at j=1, 31x31 at j=2, 63x63 at j=3.
fn kernel_radius(scale: usize) -> usize {
    (1 << (scale + 2)) - 1
}

fn gaussian_1d(radius: usize, sigma: f64) -> Vec<f64> {
    let mut g = Vec::with_capacity(2 * radius + 1);
    for i in -(radius as isize)..=(radius as isize) {
        let t = i as f64 / sigma;
        g.push((-0.5 * t * t).exp());
    }
    g
}

/// Build one oriented bandpass with exact zero DC admission.
fn build_bandpass(scale: usize, orientation_deg: f64) -> BandpassFilter {
    let radius = kernel_radius(scale);
    let size = 2 * radius + 1;
    let sigma = envelope_sigma(scale);
    let omega = center_frequency(scale);
    let theta = orientation_deg.to_radians();
    let (wx, wy) = (omega * theta.cos(), omega * theta.sin());

    let mut env = gaussian_1d(radius, sigma);
    // Unit gain at the center frequency: a matched unit grating produces an
    // envelope near 1 at every scale, keeping subbands comparable.
    let gain: f64 = env.iter().sum();
    for g in env.iter_mut() {
        *g /= gain;
    }

    // 1-D complex factors: col varies with the row offset u (vertical),
    // row with the column offset v (horizontal).
    let mut col_re = Vec::with_capacity(size);
    let mut col_im = Vec::with_capacity(size);
    let mut row_re = Vec::with_capacity(size);
    let mut row_im = Vec::with_capacity(size);
    for (idx, &g) in env.iter().enumerate() {
        let u = idx as f64 - radius as f64;
        col_re.push(g * (wy * u).cos());
        col_im.push(g * (wy * u).sin());
        row_re.push(g * (wx * u).cos());
        row_im.push(g * (wx * u).sin());
    }

    // kappa = sum(g e^{iw u}) / sum(g), computed from the separable sums.
    let env_sum: f64 = env.iter().sum();
    let col_sum_re: f64 = col_re.iter().sum();
    let col_sum_im: f64 = col_im.iter().sum();
    let row_sum_re: f64 = row_re.iter().sum();
    let row_sum_im: f64 = row_im.iter().sum();
    let mod_sum_re = col_sum_re * row_sum_re - col_sum_im * row_sum_im;
    let mod_sum_im = col_sum_re * row_sum_im + col_sum_im * row_sum_re;
    let denom = env_sum * env_sum;
    let kappa_re = mod_sum_re / denom;
    let kappa_im = mod_sum_im / denom;

    // Assemble the full 2-D kernel for the direct-convolution contract.
    let mut re = Vec::with_capacity(size * size);
    let mut im = Vec::with_capacity(size * size);
    for u in 0..size {
        for v in 0..size {
            let m_re = col_re[u] * row_re[v] - col_im[u] * row_im[v];
            let m_im = col_re[u] * row_im[v] + col_im[u] * row_re[v];
            let e = env[u] * env[v];
            re.push(m_re - kappa_re * e);
            im.push(m_im - kappa_im * e);
        }
    }

    BandpassFilter {
        scale,
        orientation_deg,
        kernel: ComplexKernel2D::new(
            Kernel2D::new(size, size, re).expect("bandpass kernel shape"),
            Kernel2D::new(size, size, im).expect("bandpass kernel shape"),
        )
        .expect("bandpass kernel pair"),
        col_re,
        col_im,
        row_re,
        row_im,
        env_1d: env,
        kappa_re,
        kappa_im,
    }
}

/// Normalized Gaussian lowpass at scale 2^J.
fn build_lowpass(num_scales: usize) -> (Kernel2D, Vec<f64>) {
    let sigma = (1usize << num_scales) as f64;
    let radius = (3.0 * sigma).ceil() as usize;
    let mut g1 = gaussian_1d(radius, sigma);
    let s: f64 = g1.iter().sum();
    for v in g1.iter_mut() {
        *v /= s;
    }
    let size = 2 * radius + 1;
    let mut values = Vec::with_capacity(size * size);
    for u in 0..size {
        for v in 0..size {
            values.push(g1[u] * g1[v]);
        }
    }
    (Kernel2D::new(size, size, values).expect("lowpass shape"), g1)
}

/// Construct the full bank for a configuration.
pub fn build_filter_bank(config: &ScatterConfig) -> Result<ComplexFilterBank> {
    config.validate()?;
    let mut bandpass = Vec::with_capacity(config.num_scales * config.orientations.len());
    for scale in 1..=config.num_scales {
        for &deg in &config.orientations {
            bandpass.push(build_bandpass(scale, deg));
        }
    }
    let (lowpass, lowpass_1d) = build_lowpass(config.num_scales);
    Ok(ComplexFilterBank {
        bandpass,
        lowpass,
        lowpass_1d,
        num_scales: config.num_scales,
        num_orientations: config.orientations.len(),
    })
}

/// Fraction of spectral energy in the closed half-plane of the filter's
/// orientation, from a direct DFT on a padded grid. Used by tests and the
/// bank's construction-time sanity contract.
pub fn analytic_energy_fraction(filter: &BandpassFilter, grid: usize) -> f64 {
    let size = filter.kernel.height();
    let theta = filter.orientation_deg.to_radians();
    let (dx, dy) = (theta.cos(), theta.sin());
    let n = grid.max(size);
    let mut aligned = 0.0;
    let mut total = 0.0;
    for ky in 0..n {
        // Signed frequency in radians.
        let fy = signed_freq(ky, n);
        for kx in 0..n {
            let fx = signed_freq(kx, n);
            // DFT of the kernel at (fx, fy) by direct summation.
            let mut acc_re = 0.0;
            let mut acc_im = 0.0;
            for u in 0..size {
                for v in 0..size {
                    let y = u as f64 - (size / 2) as f64;
                    let x = v as f64 - (size / 2) as f64;
                    let phase = -(fx * x + fy * y);
                    let (s, c) = phase.sin_cos();
                    let kr = filter.kernel.re.get(u, v);
                    let ki = filter.kernel.im.get(u, v);
                    acc_re += kr * c - ki * s;
                    acc_im += kr * s + ki * c;
                }
            }
            let e = acc_re * acc_re + acc_im * acc_im;
            total += e;
            if fx * dx + fy * dy >= 0.0 {
                aligned += e;
            }
        }
    }
    aligned / total
}

fn signed_freq(k: usize, n: usize) -> f64 {
    let half = n / 2;
    let s = if k <= half { k as isize } else { k as isize - n as isize };
    2.0 * std::f64::consts::PI * s as f64 / n as f64
}

/// Envelope response of a pure grating, used to pick the best-matching
/// orientation in tests.
#[allow(dead_code)]
pub fn grating(height: usize, width: usize, wavelength: f64, orientation_deg: f64) -> Grid2D {
    let theta = orientation_deg.to_radians();
    let (dx, dy) = (theta.cos(), theta.sin());
    let freq = 2.0 * std::f64::consts::PI / wavelength;
    let mut g = Grid2D::zeros(height, width, 1);
    for y in 0..height {
        for x in 0..width {
            let phase = freq * (x as f64 * dx + y as f64 * dy);
            g.set(0, y, x, phase.cos());
        }
    }
    g
}
