//! Raised-cosine engine.
//!
//! With `φ(s) = Σ_n c_n cos(ν_n s)` and symmetric frequencies, the range
//! weight between a neighbour value `t` and the centre value `f` expands as
//!
//! ```text
//! φ(t - f) = Σ_n c_n [cos(ν_n t) cos(ν_n f) + sin(ν_n t) sin(ν_n f)]
//! ```
//!
//! so numerator and normalizer of the bilateral filter become per-pixel
//! combinations of spatial averages of `cos(νf)`, `sin(νf)`, `f cos(νf)` and
//! `f sin(νf)`. The `±ν` terms are merged into one real pair with weight
//! `2 c_n`; a zero frequency contributes `c_{N/2}` times the averages of `1`
//! and `f`. The average of the constant image is exactly 1, so it needs no
//! pass.

use rayon::prelude::*;

use super::{FilterStats, ETA_GUARD};
use crate::error::{param_err, Result};
use crate::image::Image;
use crate::kernel::TrigKernel;
use crate::spatial::SpatialSpec;

/// Which pointwise transform an auxiliary image holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AuxKind {
    Cos,
    Sin,
    FCos,
    FSin,
    /// The image itself (zero frequency).
    F,
}

/// One real frequency term of the expanded kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuxTerm {
    pub nu: f64,
    pub weight: f64,
}

impl AuxTerm {
    pub fn kinds(&self) -> &'static [AuxKind] {
        if self.nu == 0.0 {
            &[AuxKind::F]
        } else {
            &[AuxKind::Cos, AuxKind::Sin, AuxKind::FCos, AuxKind::FSin]
        }
    }
}

/// The auxiliary images a raised-cosine kernel requires for one plane.
///
/// Images are generated on demand, term by term, so memory stays bounded
/// for large degrees.
#[derive(Debug, Clone)]
pub struct AuxiliaryImageSet<'a> {
    plane: &'a [f64],
    terms: Vec<AuxTerm>,
}

impl<'a> AuxiliaryImageSet<'a> {
    pub fn new(plane: &'a [f64], kernel: &TrigKernel) -> Self {
        let n = kernel.degree();
        let terms = (n.div_ceil(2)..=n)
            .map(|i| {
                let nu = kernel.freqs()[i];
                let c = kernel.coeffs()[i];
                if 2 * i == n {
                    AuxTerm { nu: 0.0, weight: c }
                } else {
                    AuxTerm { nu, weight: 2.0 * c }
                }
            })
            .collect();
        Self { plane, terms }
    }

    /// Terms in ascending frequency; this is also the summation order.
    pub fn terms(&self) -> &[AuxTerm] {
        &self.terms
    }

    /// Total number of images that need a spatial pass.
    pub fn pass_count(&self) -> usize {
        self.terms.iter().map(|t| t.kinds().len()).sum()
    }

    pub fn image(&self, term: &AuxTerm, kind: AuxKind) -> Vec<f64> {
        let nu = term.nu;
        let p = self.plane.iter();
        match kind {
            AuxKind::Cos => p.map(|&f| (nu * f).cos()).collect(),
            AuxKind::Sin => p.map(|&f| (nu * f).sin()).collect(),
            AuxKind::FCos => p.map(|&f| f * (nu * f).cos()).collect(),
            AuxKind::FSin => p.map(|&f| f * (nu * f).sin()).collect(),
            AuxKind::F => self.plane.to_vec(),
        }
    }

    /// `cos(νf)` and `sin(νf)` for every sample, bit-identical to
    /// [`Self::image`]. Integer planes go through a per-term table.
    fn cos_sin(&self, nu: f64, table_len: Option<usize>) -> (Vec<f64>, Vec<f64>) {
        // separate loops: a fused sincos can differ from cos and sin in the last bit
        let cos = |f: f64| (nu * f).cos();
        let sin = |f: f64| (nu * f).sin();
        match table_len {
            Some(len) => {
                let ct: Vec<f64> = (0..len).map(|v| cos(v as f64)).collect();
                let st: Vec<f64> = (0..len).map(|v| sin(v as f64)).collect();
                (
                    self.plane.iter().map(|&f| ct[f as usize]).collect(),
                    self.plane.iter().map(|&f| st[f as usize]).collect(),
                )
            }
            None => (
                self.plane.iter().map(|&f| cos(f)).collect(),
                self.plane.iter().map(|&f| sin(f)).collect(),
            ),
        }
    }
}

/// Largest sample value for which a lookup table is used.
const MAX_TABLE_VALUE: f64 = 65535.0;

/// Table length when every sample is a small nonnegative integer.
fn integer_table_len(plane: &[f64]) -> Option<usize> {
    let mut hi = 0.0f64;
    for &f in plane {
        if !(0.0..=MAX_TABLE_VALUE).contains(&f) || f.fract() != 0.0 {
            return None;
        }
        hi = hi.max(f);
    }
    // a table larger than the plane costs more than it saves
    let len = hi as usize + 1;
    (len <= plane.len()).then_some(len)
}

pub(super) fn check_range(img: &Image, range_max: f64) -> Result<()> {
    let (lo, hi) = img.min_max();
    if lo < 0.0 || hi > range_max {
        return param_err(format!(
            "samples span [{lo}, {hi}], outside [0, {range_max}]; rescale the image or raise T"
        ));
    }
    Ok(())
}

/// Filtered auxiliary images of one term, plus the centre-pixel factors.
enum TermPasses {
    Zero(Vec<f64>),
    Pair {
        cos: Vec<f64>,
        sin: Vec<f64>,
        cos_bar: Vec<f64>,
        sin_bar: Vec<f64>,
        fcos_bar: Vec<f64>,
        fsin_bar: Vec<f64>,
    },
}

fn product(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x * y).collect()
}

pub(super) fn filter_plane(
    plane: &[f64],
    width: usize,
    height: usize,
    spatial: &SpatialSpec,
    kernel: &TrigKernel,
) -> (Vec<f64>, FilterStats) {
    let aux = AuxiliaryImageSet::new(plane, kernel);
    let table_len = integer_table_len(plane);
    let len = plane.len();
    let mut num = vec![0.0; len];
    let mut den = vec![0.0; len];
    let filter = |img: &[f64]| spatial.filter_plane(img, width, height);

    // Terms are filtered a batch at a time, concurrently, then folded into
    // the accumulators in term order so the sum never depends on batching.
    let batch = rayon::current_num_threads().max(1);
    for chunk in aux.terms().chunks(batch) {
        let passes: Vec<TermPasses> = chunk
            .par_iter()
            .map(|term| {
                if term.nu == 0.0 {
                    return TermPasses::Zero(filter(plane));
                }
                let (cos, sin) = aux.cos_sin(term.nu, table_len);
                let kinds = [AuxKind::Cos, AuxKind::Sin, AuxKind::FCos, AuxKind::FSin];
                let mut bars: Vec<Vec<f64>> = kinds
                    .par_iter()
                    .map(|kind| match kind {
                        AuxKind::Cos => filter(&cos),
                        AuxKind::Sin => filter(&sin),
                        AuxKind::FCos => filter(&product(plane, &cos)),
                        _ => filter(&product(plane, &sin)),
                    })
                    .collect();
                let [fsin_bar, fcos_bar, sin_bar, cos_bar] =
                    std::array::from_fn(|_| bars.pop().expect("four images per term"));
                TermPasses::Pair {
                    cos,
                    sin,
                    cos_bar,
                    sin_bar,
                    fcos_bar,
                    fsin_bar,
                }
            })
            .collect();

        for (term, pass) in chunk.iter().zip(&passes) {
            let c = term.weight;
            match pass {
                TermPasses::Zero(f_bar) => num
                    .par_iter_mut()
                    .zip(den.par_iter_mut())
                    .zip(f_bar.par_iter())
                    .for_each(|((n, d), fb)| {
                        *n += c * fb;
                        *d += c;
                    }),
                TermPasses::Pair {
                    cos,
                    sin,
                    cos_bar,
                    sin_bar,
                    fcos_bar,
                    fsin_bar,
                } => num
                    .par_iter_mut()
                    .zip(den.par_iter_mut())
                    .enumerate()
                    .for_each(|(i, (n, d))| {
                        let (co, s) = (cos[i], sin[i]);
                        *n += c * (co * fcos_bar[i] + s * fsin_bar[i]);
                        *d += c * (co * cos_bar[i] + s * sin_bar[i]);
                    }),
            }
        }
    }

    let mut guard_hits = 0;
    let out = plane
        .iter()
        .zip(num.iter().zip(&den))
        .map(|(&f, (&n, &d))| {
            if d < ETA_GUARD {
                guard_hits += 1;
                f
            } else {
                n / d
            }
        })
        .collect();

    (
        out,
        FilterStats {
            spatial_passes: aux.pass_count(),
            guard_hits,
        },
    )
}
