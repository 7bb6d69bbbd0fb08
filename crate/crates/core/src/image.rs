//! Planar floating-point images.

use crate::error::{Error, Result};

/// A planar `f64` raster with 1 or 3 channels.
///
/// Samples are stored channel by channel, each channel row-major, so a
/// single channel is a contiguous slice of `width * height` samples.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    width: usize,
    height: usize,
    channels: usize,
    samples: Vec<f64>,
}

impl Image {
    pub fn new(width: usize, height: usize, channels: usize, samples: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Dimension(format!(
                "image dimensions must be positive, got {width}x{height}"
            )));
        }
        if channels != 1 && channels != 3 {
            return Err(Error::UnsupportedChannels(channels));
        }
        let expected = width * height * channels;
        if samples.len() != expected {
            return Err(Error::Dimension(format!(
                "expected {expected} samples for {width}x{height}x{channels}, got {}",
                samples.len()
            )));
        }
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::Parameter(format!("sample {i} is not finite")));
        }
        Ok(Self {
            width,
            height,
            channels,
            samples,
        })
    }

    /// Single-channel image filled with `value`.
    pub fn constant(width: usize, height: usize, value: f64) -> Result<Self> {
        Self::new(width, height, 1, vec![value; width * height])
    }

    /// Stacks single-channel planes of equal size into one image.
    pub fn from_planes(width: usize, height: usize, planes: Vec<Vec<f64>>) -> Result<Self> {
        let channels = planes.len();
        let samples = planes.into_iter().flatten().collect();
        Self::new(width, height, channels, samples)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn plane_len(&self) -> usize {
        self.width * self.height
    }

    pub fn channel(&self, c: usize) -> &[f64] {
        let n = self.plane_len();
        &self.samples[c * n..(c + 1) * n]
    }

    pub fn channel_image(&self, c: usize) -> Image {
        Image {
            width: self.width,
            height: self.height,
            channels: 1,
            samples: self.channel(c).to_vec(),
        }
    }

    pub fn get(&self, c: usize, x: usize, y: usize) -> f64 {
        self.samples[c * self.plane_len() + y * self.width + x]
    }

    pub fn min_max(&self) -> (f64, f64) {
        self.samples
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            })
    }

    pub fn same_shape(&self, other: &Image) -> bool {
        self.width == other.width && self.height == other.height && self.channels == other.channels
    }

    /// Builds an image of the same shape from computed samples. Used by the
    /// filters, which never produce non-finite values from finite input.
    pub(crate) fn with_samples(&self, samples: Vec<f64>) -> Image {
        debug_assert_eq!(samples.len(), self.samples.len());
        Image {
            width: self.width,
            height: self.height,
            channels: self.channels,
            samples,
        }
    }
}

pub fn image_from_bytes(bytes: &[u8], width: usize, height: usize, channels: usize) -> Result<Image> {
    Image::new(
        width,
        height,
        channels,
        bytes.iter().map(|&b| f64::from(b)).collect(),
    )
}

/// Quantizes to bytes: round half away from zero, then clamp to `[0, 255]`.
pub fn image_to_bytes(img: &Image) -> Vec<u8> {
    img.samples
        .iter()
        .map(|&v| v.round().clamp(0.0, 255.0) as u8)
        .collect()
}

/// Statistics of the signed per-sample difference `a - b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorStats {
    pub max_abs: f64,
    pub mean_abs: f64,
    /// Population standard deviation of the signed error.
    pub std_dev: f64,
}

pub fn error_stats(a: &Image, b: &Image) -> Result<ErrorStats> {
    if !a.same_shape(b) {
        return Err(Error::Dimension(format!(
            "cannot compare {}x{}x{} with {}x{}x{}",
            a.width, a.height, a.channels, b.width, b.height, b.channels
        )));
    }
    let n = a.samples.len() as f64;
    let mut max_abs = 0.0f64;
    let mut sum_abs = 0.0;
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for (x, y) in a.samples.iter().zip(&b.samples) {
        let d = x - y;
        max_abs = max_abs.max(d.abs());
        sum_abs += d.abs();
        sum += d;
        sum_sq += d * d;
    }
    let mean = sum / n;
    let var = (sum_sq / n - mean * mean).max(0.0);
    Ok(ErrorStats {
        max_abs,
        mean_abs: sum_abs / n,
        std_dev: var.sqrt(),
    })
}
