//! Bilateral filter engines.
//!
//! - [`bilateral_direct`]: brute-force window sum, any range function.
//! - [`bilateral_trig`]: O(1) per pixel for raised-cosine range kernels.
//! - [`bilateral_poly`]: O(1) per pixel for even polynomial range kernels.
//!
//! All three share the same normalization guard: where the normalizer `η`
//! falls below [`ETA_GUARD`] the input sample is passed through unchanged
//! and counted in [`FilterStats::guard_hits`].

mod direct;
mod poly;
mod trig;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::image::Image;
use crate::kernel::{PolyKernel, RangeKernel, TrigKernel};
use crate::spatial::SpatialSpec;

pub use trig::{AuxKind, AuxTerm, AuxiliaryImageSet};

pub const ETA_GUARD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FilterStats {
    /// Number of spatial filtering passes over auxiliary images.
    pub spatial_passes: usize,
    /// Pixels left unchanged because the normalizer was below the guard.
    pub guard_hits: usize,
}

impl std::ops::Add for FilterStats {
    type Output = FilterStats;

    fn add(self, rhs: FilterStats) -> FilterStats {
        FilterStats {
            spatial_passes: self.spatial_passes + rhs.spatial_passes,
            guard_hits: self.guard_hits + rhs.guard_hits,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Filtered {
    pub image: Image,
    pub stats: FilterStats,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Engine {
    Direct(RangeKernel),
    Trig(TrigKernel),
    Poly(PolyKernel),
}

impl Engine {
    fn filter_plane(&self, plane: &[f64], w: usize, h: usize, spatial: &SpatialSpec) -> (Vec<f64>, FilterStats) {
        match self {
            Engine::Direct(range) => direct::filter_plane(plane, w, h, &spatial.taps(), &|s| range.eval(s)),
            Engine::Trig(k) => trig::filter_plane(plane, w, h, spatial, k),
            Engine::Poly(p) => poly::filter_plane(plane, w, h, spatial, p),
        }
    }

    fn validate(&self, img: &Image) -> Result<()> {
        if let Engine::Trig(k) = self {
            trig::check_range(img, k.range_max())?;
        }
        Ok(())
    }
}

fn require_single_channel(img: &Image) -> Result<()> {
    if img.channels() != 1 {
        return Err(Error::Dimension(format!(
            "engine expects a single-channel image, got {} channels",
            img.channels()
        )));
    }
    Ok(())
}

/// Runs `engine` on every channel independently; channels are processed
/// concurrently and the result does not depend on the thread count.
pub fn bilateral(img: &Image, spatial: &SpatialSpec, engine: &Engine) -> Result<Filtered> {
    spatial.validate()?;
    engine.validate(img)?;
    let (w, h) = (img.width(), img.height());
    let results: Vec<(Vec<f64>, FilterStats)> = (0..img.channels())
        .into_par_iter()
        .map(|c| engine.filter_plane(img.channel(c), w, h, spatial))
        .collect();
    let mut stats = FilterStats::default();
    let mut samples = Vec::with_capacity(img.samples().len());
    for (plane, s) in results {
        samples.extend(plane);
        stats = stats + s;
    }
    Ok(Filtered {
        image: img.with_samples(samples),
        stats,
    })
}

/// Per-channel filtering of an RGB image.
pub fn bilateral_color(img: &Image, spatial: &SpatialSpec, engine: &Engine) -> Result<Filtered> {
    if img.channels() != 3 {
        return Err(Error::Dimension(format!(
            "color filtering expects 3 channels, got {}",
            img.channels()
        )));
    }
    bilateral(img, spatial, engine)
}

/// Brute-force bilateral filter over the explicit spatial window.
///
/// The window is the `(2r+1)^2` box for [`SpatialKind::Box`] and the
/// truncated FIR Gaussian taps for both Gaussian kinds, with mirror
/// boundaries.
///
/// [`SpatialKind::Box`]: crate::spatial::SpatialKind::Box
pub fn bilateral_direct(
    img: &Image,
    spatial: &SpatialSpec,
    range_fn: &(dyn Fn(f64) -> f64 + Sync),
) -> Result<Filtered> {
    require_single_channel(img)?;
    spatial.validate()?;
    let (out, stats) = direct::filter_plane(img.samples(), img.width(), img.height(), &spatial.taps(), range_fn);
    Ok(Filtered {
        image: img.with_samples(out),
        stats,
    })
}

/// Constant-time bilateral filter with a raised-cosine range kernel.
///
/// Samples must lie in `[0, T]` where `T` is the kernel's range bound.
pub fn bilateral_trig(img: &Image, spatial: &SpatialSpec, k: &TrigKernel) -> Result<Filtered> {
    require_single_channel(img)?;
    bilateral(img, spatial, &Engine::Trig(k.clone()))
}

/// Constant-time bilateral filter with an even polynomial range kernel.
pub fn bilateral_poly(img: &Image, spatial: &SpatialSpec, p: &PolyKernel) -> Result<Filtered> {
    require_single_channel(img)?;
    bilateral(img, spatial, &Engine::Poly(p.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{make_trig_kernel, TrigKernel};
    use crate::spatial::tests::random_image;
    use proptest::prelude::*;

    fn byte_image(w: usize, h: usize, seed: u64) -> Image {
        let img = random_image(w, h, seed);
        img.with_samples(img.samples().iter().map(|v| v.round()).collect())
    }

    /// Raised cosine with the smallest degree keeping it monotone.
    fn monotone_kernel(sigma_r: f64, extra: usize) -> TrigKernel {
        let rho = std::f64::consts::PI / 510.0 * sigma_r;
        let n = (rho.powi(-2)).ceil() as usize + extra;
        let k = TrigKernel::new(255.0, rho, n.max(1)).unwrap();
        assert!(k.is_monotone());
        k
    }

    fn spec_strategy() -> impl Strategy<Value = SpatialSpec> {
        prop_oneof![
            (0usize..5).prop_map(SpatialSpec::boxed),
            (0.5f64..6.0).prop_map(SpatialSpec::gaussian_recursive),
            (0.3f64..3.0).prop_map(SpatialSpec::gaussian_fir),
        ]
    }

    proptest! {
        #[test]
        fn output_stays_in_input_range(
            spec in spec_strategy(), w in 1usize..16, h in 1usize..16, seed in 0u64..10_000,
            sigma_r in 40.0f64..300.0, extra in 0usize..4,
        ) {
            let img = byte_image(w, h, seed);
            let k = monotone_kernel(sigma_r, extra);
            let out = bilateral_trig(&img, &spec, &k).unwrap();
            let (lo, hi) = img.min_max();
            prop_assert!(out.image.samples().iter().all(|&v| v >= lo - 1e-6 && v <= hi + 1e-6));
            // η ≥ w(0) φ(0) > 0 for monotone raised cosines
            prop_assert_eq!(out.stats.guard_hits, 0);
        }

        #[test]
        fn auxiliary_images_are_bounded(
            values in proptest::collection::vec(0.0f64..=255.0, 1..50),
            sigma_r in 5.0f64..300.0, n in 0usize..40,
        ) {
            let rho = std::f64::consts::PI / 510.0 * sigma_r;
            let k = TrigKernel::new(255.0, rho, n).unwrap();
            let aux = AuxiliaryImageSet::new(&values, &k);
            for term in aux.terms() {
                for &kind in term.kinds() {
                    prop_assert!(aux.image(term, kind).iter().all(|v| v.abs() <= 255.0));
                }
                if term.nu != 0.0 {
                    let c = aux.image(term, AuxKind::Cos);
                    let s = aux.image(term, AuxKind::Sin);
                    prop_assert!(c.iter().zip(&s).all(|(c, s)| (c * c + s * s - 1.0).abs() < 1e-12));
                }
            }
        }
    }

    fn max_horizontal_step(img: &Image) -> f64 {
        let (w, h) = (img.width(), img.height());
        (0..h)
            .flat_map(|y| (1..w).map(move |x| (x, y)))
            .map(|(x, y)| (img.get(0, x, y) - img.get(0, x - 1, y)).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn edges_survive_small_range_sigma() {
        let (w, h) = (40, 24);
        let samples = (0..w * h).map(|i| if i % w < w / 2 { 20.0 } else { 220.0 }).collect();
        let img = Image::new(w, h, 1, samples).unwrap();
        let spec = SpatialSpec::boxed(3);
        let before = max_horizontal_step(&img);

        let sharp = bilateral_trig(&img, &spec, &make_trig_kernel(20.0, 255.0, None).unwrap()).unwrap();
        assert!(max_horizontal_step(&sharp.image) >= 0.8 * before);

        let flat = bilateral_trig(&img, &spec, &make_trig_kernel(20.0, 255.0, Some(0)).unwrap()).unwrap();
        assert!(max_horizontal_step(&flat.image) < before);
    }

    #[test]
    fn color_channels_are_independent() {
        let gray = byte_image(12, 9, 8);
        let a = byte_image(12, 9, 9);
        let rgb = Image::from_planes(12, 9, vec![gray.samples().to_vec(), gray.samples().to_vec(), a.samples().to_vec()]).unwrap();
        let spec = SpatialSpec::gaussian_fir(1.5);
        let engine = Engine::Trig(make_trig_kernel(60.0, 255.0, None).unwrap());
        let out = bilateral_color(&rgb, &spec, &engine).unwrap();
        assert_eq!(out.image.channel(0), out.image.channel(1));
        for c in [0, 2] {
            let single = bilateral(&rgb.channel_image(c), &spec, &engine).unwrap();
            assert_eq!(out.image.channel(c), single.image.samples());
        }

        let flat = Image::from_planes(5, 4, vec![vec![10.0; 20], vec![128.0; 20], vec![250.0; 20]]).unwrap();
        let out = bilateral_color(&flat, &spec, &engine).unwrap();
        assert!(error_free(&out.image, &flat, 1e-9));
        assert!(bilateral_color(&gray, &spec, &engine).is_err());
    }

    fn error_free(a: &Image, b: &Image, tol: f64) -> bool {
        crate::image::error_stats(a, b).unwrap().max_abs < tol
    }

    #[test]
    fn single_channel_engines_reject_color() {
        let rgb = Image::constant(3, 3, 1.0).unwrap();
        let rgb = Image::from_planes(3, 3, vec![rgb.samples().to_vec(); 3]).unwrap();
        let k = make_trig_kernel(60.0, 255.0, None).unwrap();
        assert!(matches!(bilateral_trig(&rgb, &SpatialSpec::boxed(1), &k), Err(Error::Dimension(_))));
        assert!(bilateral_direct(&rgb, &SpatialSpec::boxed(1), &|_| 1.0).is_err());
    }

    #[test]
    fn output_independent_of_thread_count() {
        let img = byte_image(48, 40, 5);
        let k = make_trig_kernel(40.0, 255.0, None).unwrap();
        let spec = SpatialSpec::gaussian_recursive(4.0);
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| bilateral_trig(&img, &spec, &k).unwrap())
        };
        let one = run(1);
        assert_eq!(one, run(3));
        assert_eq!(one, run(8));
    }
}
