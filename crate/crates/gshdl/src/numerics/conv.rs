//! Same-size 2-D convolution with symmetric-reflect boundary handling.
//!
//! The boundary mirrors without repeating the edge pixel: index -1 maps to 1,
//! index `n` maps to `n - 2`. Output pixel `p` is `sum_q input[p - q] * kernel[q]`
//! with the kernel centered on its middle tap.

use crate::error::{Error, Result};
use crate::grid::{ComplexKernel2D, Grid2D, Kernel2D};

/// Map an out-of-range index into [0, n) by mirror reflection about the
/// edge samples (period 2n - 2). Degenerates to 0 for n == 1.
#[inline]
pub fn reflect_index(i: isize, n: usize) -> usize {
    debug_assert!(n >= 1);
    if n == 1 {
        return 0;
    }
    let period = 2 * (n as isize - 1);
    let mut m = i % period;
    if m < 0 {
        m += period;
    }
    if m >= n as isize {
        m = period - m;
    }
    m as usize
}

fn check_kernel_fits(input: &Grid2D, kh: usize, kw: usize) -> Result<()> {
    if kh > 2 * input.height() || kw > 2 * input.width() {
        return Err(Error::Dimension(format!(
            "kernel {}x{} exceeds reflected-padding policy for input {}x{}",
            kh,
            kw,
            input.height(),
            input.width()
        )));
    }
    Ok(())
}

/// Convolve a single-channel grid with a real kernel, same output size.
pub fn conv2d_same(input: &Grid2D, kernel: &Kernel2D) -> Result<Grid2D> {
    if input.channels() != 1 {
        return Err(Error::Dimension(format!(
            "conv2d_same expects a single channel, got {}",
            input.channels()
        )));
    }
    if !input.is_finite() {
        return Err(Error::Data("conv2d_same input contains non-finite values".into()));
    }
    check_kernel_fits(input, kernel.height(), kernel.width())?;

    let (h, w) = (input.height(), input.width());
    let src = input.channel(0);
    let mut out = vec![0.0; h * w];
    conv_plane_into(src, h, w, kernel, &mut out);
    Grid2D::new(h, w, 1, out)
}

/// Convolve with a complex kernel; returns (real plane, imaginary plane).
pub fn conv2d_same_complex(input: &Grid2D, kernel: &ComplexKernel2D) -> Result<(Grid2D, Grid2D)> {
    let re = conv2d_same(input, &kernel.re)?;
    let im = conv2d_same(input, &kernel.im)?;
    Ok((re, im))
}

/// Core plane convolution. `out` must hold `h * w` values; the summation
/// order per pixel is fixed (row-major over kernel taps) so results are
/// reproducible bit-for-bit.
pub(crate) fn conv_plane_into(src: &[f64], h: usize, w: usize, kernel: &Kernel2D, out: &mut [f64]) {
    let kh = kernel.height();
    let kw = kernel.width();
    let rc = (kh / 2) as isize;
    let cc = (kw / 2) as isize;
    let kv = kernel.values();

    // Interior pixels avoid the reflection lookups entirely.
    let top = kh / 2;
    let left = kw / 2;
    let interior_rows = h as isize - kh as isize + 1;
    let interior_cols = w as isize - kw as isize + 1;

    if interior_rows > 0 && interior_cols > 0 {
        for y in top..top + interior_rows as usize {
            for x in left..left + interior_cols as usize {
                let mut acc = 0.0;
                // out[p] = sum_q in[p - q] k[q]; kernel tap (u,v) has offset
                // (u - rc, v - cc), so the input sample sits at p - offset.
                for u in 0..kh {
                    let iy = (y as isize - (u as isize - rc)) as usize;
                    let row = &src[iy * w..iy * w + w];
                    let krow = &kv[u * kw..u * kw + kw];
                    let base = x as isize + cc;
                    for (v, kval) in krow.iter().enumerate() {
                        acc += row[(base - v as isize) as usize] * kval;
                    }
                }
                out[y * w + x] = acc;
            }
        }
    }

    // Border pixels with reflection.
    let is_interior = |y: usize, x: usize| {
        interior_rows > 0
            && interior_cols > 0
            && y >= top
            && y < top + interior_rows as usize
            && x >= left
            && x < left + interior_cols as usize
    };
    for y in 0..h {
        for x in 0..w {
            if is_interior(y, x) {
                continue;
            }
            let mut acc = 0.0;
            for u in 0..kh {
                let iy = reflect_index(y as isize - (u as isize - rc), h);
                for v in 0..kw {
                    let ix = reflect_index(x as isize - (v as isize - cc), w);
                    acc += src[iy * w + ix] * kv[u * kw + v];
                }
            }
            out[y * w + x] = acc;
        }
    }
}

/// Correlation counterpart used by RBM hidden activations: accumulates
/// `sum_c corr(src_c, kernel_c)` into `out` without flipping at call sites.
pub(crate) fn corr_plane_accumulate(
    src: &[f64],
    h: usize,
    w: usize,
    kernel: &Kernel2D,
    out: &mut [f64],
) {
    let kh = kernel.height();
    let kw = kernel.width();
    let rc = (kh / 2) as isize;
    let cc = (kw / 2) as isize;
    let kv = kernel.values();

    for y in 0..h {
        let fast_row = y >= kh / 2 && y + kh / 2 < h;
        for x in 0..w {
            let mut acc = 0.0;
            if fast_row && x >= kw / 2 && x + kw / 2 < w {
                for u in 0..kh {
                    let iy = (y as isize + u as isize - rc) as usize;
                    let row = &src[iy * w..iy * w + w];
                    let krow = &kv[u * kw..u * kw + kw];
                    let base = x as isize - cc;
                    for (v, kval) in krow.iter().enumerate() {
                        acc += row[(base + v as isize) as usize] * kval;
                    }
                }
            } else {
                for u in 0..kh {
                    let iy = reflect_index(y as isize + u as isize - rc, h);
                    for v in 0..kw {
                        let ix = reflect_index(x as isize + v as isize - cc, w);
                        acc += src[iy * w + ix] * kv[u * kw + v];
                    }
                }
            }
            out[y * w + x] += acc;
        }
    }
}

/// Separable convolution: 1-D column pass then 1-D row pass, both with the
/// same reflect boundary. Equivalent to `conv2d_same` with the outer-product
/// kernel `col ⊗ row`.
pub(crate) fn conv_separable_into(
    src: &[f64],
    h: usize,
    w: usize,
    col: &[f64],
    row: &[f64],
    scratch: &mut Vec<f64>,
    out: &mut [f64],
) {
    scratch.clear();
    scratch.resize(h * w, 0.0);

    // Row pass: convolve each image row with `row`.
    let rl = row.len();
    let rcc = (rl / 2) as isize;
    for y in 0..h {
        let line = &src[y * w..y * w + w];
        let dst = &mut scratch[y * w..y * w + w];
        for x in 0..w {
            let mut acc = 0.0;
            if x >= rl / 2 && x + rl / 2 < w {
                let base = x as isize + rcc;
                for (v, kval) in row.iter().enumerate() {
                    acc += line[(base - v as isize) as usize] * kval;
                }
            } else {
                for (v, kval) in row.iter().enumerate() {
                    let ix = reflect_index(x as isize - (v as isize - rcc), w);
                    acc += line[ix] * kval;
                }
            }
            dst[x] = acc;
        }
    }

    // Column pass over the row-convolved image.
    let cl = col.len();
    let ccc = (cl / 2) as isize;
    for y in 0..h {
        let fast = y >= cl / 2 && y + cl / 2 < h;
        for x in 0..w {
            let mut acc = 0.0;
            if fast {
                let base = y as isize + ccc;
                for (u, kval) in col.iter().enumerate() {
                    acc += scratch[(base - u as isize) as usize * w + x] * kval;
                }
            } else {
                for (u, kval) in col.iter().enumerate() {
                    let iy = reflect_index(y as isize - (u as isize - ccc), h);
                    acc += scratch[iy * w + x] * kval;
                }
            }
            out[y * w + x] = acc;
        }
    }
}
