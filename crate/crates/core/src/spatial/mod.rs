//! Linear spatial smoothers with unit DC gain.
//!
//! All smoothers are separable. Box and FIR run a 1-D line filter along every
//! row, transpose, filter the rows again and transpose back. The recursive
//! Gaussian runs down strips of columns instead and transposes for the other
//! axis. Lines are independent, so the output does not depend on the thread
//! count.

mod boxf;
mod fir;
mod recursive;

use rayon::prelude::*;

use crate::error::{param_err, Result};
use crate::image::Image;

pub use fir::gaussian_taps;
pub use recursive::MIN_RECURSIVE_SIGMA;

/// How samples outside the image are synthesized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Boundary {
    /// Whole-sample reflection: `x[-k] = x[k]`, `x[n-1+k] = x[n-1-k]`,
    /// repeated periodically with period `2(n-1)`.
    #[default]
    Mirror,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpatialKind {
    Box { radius: usize },
    GaussianRecursive { sigma: f64 },
    GaussianFir { sigma: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpatialSpec {
    pub kind: SpatialKind,
    pub boundary: Boundary,
}

impl SpatialSpec {
    pub fn boxed(radius: usize) -> Self {
        Self {
            kind: SpatialKind::Box { radius },
            boundary: Boundary::Mirror,
        }
    }

    pub fn gaussian_recursive(sigma: f64) -> Self {
        Self {
            kind: SpatialKind::GaussianRecursive { sigma },
            boundary: Boundary::Mirror,
        }
    }

    pub fn gaussian_fir(sigma: f64) -> Self {
        Self {
            kind: SpatialKind::GaussianFir { sigma },
            boundary: Boundary::Mirror,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            SpatialKind::Box { .. } => Ok(()),
            SpatialKind::GaussianFir { sigma } => {
                if sigma.is_finite() && sigma > 0.0 {
                    Ok(())
                } else {
                    param_err(format!("sigma_s must be positive, got {sigma}"))
                }
            }
            SpatialKind::GaussianRecursive { sigma } => {
                if sigma.is_finite() && sigma >= MIN_RECURSIVE_SIGMA {
                    Ok(())
                } else {
                    param_err(format!(
                        "recursive Gaussian needs sigma_s >= {MIN_RECURSIVE_SIGMA}, got {sigma}"
                    ))
                }
            }
        }
    }

    /// Discrete 1-D taps of the explicit kernel, centred, summing to 1.
    ///
    /// Both Gaussian kinds report the truncated FIR taps; this is the window
    /// the direct bilateral oracle uses.
    pub fn taps(&self) -> Vec<f64> {
        match self.kind {
            SpatialKind::Box { radius } => vec![1.0 / (2 * radius + 1) as f64; 2 * radius + 1],
            SpatialKind::GaussianFir { sigma } | SpatialKind::GaussianRecursive { sigma } => {
                gaussian_taps(sigma)
            }
        }
    }

    /// Filters one `width x height` plane. Parameters must already be valid.
    pub(crate) fn filter_plane(&self, src: &[f64], width: usize, height: usize) -> Vec<f64> {
        match self.kind {
            SpatialKind::Box { radius } => separable(
                src,
                width,
                height,
                &boxf::BoxLine::new(radius, width),
                &boxf::BoxLine::new(radius, height),
            ),
            SpatialKind::GaussianFir { sigma } => {
                let line = fir::FirLine::new(sigma);
                separable(src, width, height, &line, &line)
            }
            SpatialKind::GaussianRecursive { sigma } => {
                recursive::RecursiveGaussian::new(sigma).filter_plane(src, width, height)
            }
        }
    }

    /// Filters every channel of `img`.
    pub fn apply(&self, img: &Image) -> Result<Image> {
        self.validate()?;
        let (w, h) = (img.width(), img.height());
        let mut out = Vec::with_capacity(img.samples().len());
        for c in 0..img.channels() {
            out.extend(self.filter_plane(img.channel(c), w, h));
        }
        Ok(img.with_samples(out))
    }
}

/// Normalized `(2r+1)^2` box average by running sums.
pub fn box_filter(img: &Image, radius: usize, boundary: Boundary) -> Image {
    SpatialSpec {
        kind: SpatialKind::Box { radius },
        boundary,
    }
    .apply(img)
    .expect("box filter accepts every radius")
}

/// Separable Gaussian convolution truncated at `±ceil(4σ)` taps.
pub fn gaussian_fir(img: &Image, sigma_s: f64, boundary: Boundary) -> Result<Image> {
    SpatialSpec {
        kind: SpatialKind::GaussianFir { sigma: sigma_s },
        boundary,
    }
    .apply(img)
}

/// Fourth-order recursive approximation of Gaussian convolution; cost per
/// pixel does not depend on `sigma_s`.
pub fn gaussian_recursive(img: &Image, sigma_s: f64, boundary: Boundary) -> Result<Image> {
    SpatialSpec {
        kind: SpatialKind::GaussianRecursive { sigma: sigma_s },
        boundary,
    }
    .apply(img)
}

/// Maps any integer position onto `[0, n)` by whole-sample reflection.
#[inline]
pub fn mirror_index(i: isize, n: usize) -> usize {
    if n == 1 {
        return 0;
    }
    let period = 2 * (n as isize - 1);
    let m = i.rem_euclid(period);
    if m < n as isize {
        m as usize
    } else {
        (period - m) as usize
    }
}

/// A 1-D filter applied independently to each line of a plane.
pub(crate) trait LineFilter: Sync {
    fn filter_line(&self, src: &[f64], dst: &mut [f64], scratch: &mut Vec<f64>);
}

fn filter_lines(src: &[f64], len: usize, line: &dyn LineFilter) -> Vec<f64> {
    let mut out = vec![0.0; src.len()];
    out.par_chunks_mut(len)
        .zip(src.par_chunks(len))
        .for_each_init(Vec::new, |scratch, (dst, s)| line.filter_line(s, dst, scratch));
    out
}

fn separable(
    src: &[f64],
    width: usize,
    height: usize,
    rows: &dyn LineFilter,
    cols: &dyn LineFilter,
) -> Vec<f64> {
    let tmp = filter_lines(src, width, rows);
    let t = transpose(&tmp, width, height);
    let t = filter_lines(&t, height, cols);
    transpose(&t, height, width)
}

/// Transposes a row-major `width x height` plane.
fn transpose(src: &[f64], width: usize, height: usize) -> Vec<f64> {
    const BLOCK: usize = 32;
    let mut out = vec![0.0; src.len()];
    for by in (0..height).step_by(BLOCK) {
        for bx in (0..width).step_by(BLOCK) {
            for y in by..(by + BLOCK).min(height) {
                for x in bx..(bx + BLOCK).min(width) {
                    out[x * height + y] = src[y * width + x];
                }
            }
        }
    }
    out
}
