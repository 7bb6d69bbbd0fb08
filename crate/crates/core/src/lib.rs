//! Constant-time bilateral filtering with trigonometric range kernels.
//!
//! The bilateral filter
//!
//! ```text
//! out(x) = Σ_y w(y) φ(f(x-y) - f(x)) f(x-y) / Σ_y w(y) φ(f(x-y) - f(x))
//! ```
//!
//! is non-linear in `f`, but when the range kernel `φ` is a raised cosine
//! `[cos(ωs)]^N` it splits into a fixed number of *linear* spatial averages
//! of pointwise transforms of the image (`cos(νf)`, `sin(νf)`, `f·cos(νf)`,
//! `f·sin(νf)`). Each average can be computed with an O(1)-per-pixel
//! smoother (running-sum box or recursive Gaussian), so the cost per pixel
//! does not depend on the spatial filter size.
//!
//! Crate layout:
//!
//! - [`image`]: planar `f64` raster, 8-bit conversion and error statistics.
//! - [`spatial`]: box, FIR Gaussian and recursive Gaussian smoothers.
//! - [`kernel`]: raised-cosine and Taylor range kernels, degree selection.
//! - [`bilateral`]: the direct oracle, the trigonometric engine and the
//!   polynomial baseline.
//! - [`pnm`]: binary PGM/PPM codec.

pub mod bilateral;
pub mod error;
pub mod image;
pub mod kernel;
pub mod pnm;
pub mod spatial;

pub use bilateral::{
    bilateral, bilateral_color, bilateral_direct, bilateral_poly, bilateral_trig,
    AuxKind, AuxTerm, AuxiliaryImageSet, Engine, FilterStats, Filtered, ETA_GUARD,
};
pub use error::{Error, Result};
pub use image::{error_stats, image_from_bytes, image_to_bytes, ErrorStats, Image};
pub use kernel::{
    degree_estimate, gaussian_eval, make_taylor_kernel, make_trig_kernel, poly_eval, select_degree,
    sup_error, trig_eval, DegreeTable, PolyKernel, RangeKernel, TrigKernel,
};
pub use spatial::{box_filter, gaussian_fir, gaussian_recursive, Boundary, SpatialKind, SpatialSpec};
