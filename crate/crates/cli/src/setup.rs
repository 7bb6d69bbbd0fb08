//! Shared plumbing: file I/O, spatial filter choice, engine construction.

use std::io::Write;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use trigbf::pnm::{read_pnm, write_pnm};
use trigbf::{make_taylor_kernel, make_trig_kernel, Engine, Image, RangeKernel, SpatialSpec};

use crate::args::{EngineChoice, KernelOpts, SpatialChoice};
use crate::{CliError, CliResult};

pub const BENCH_WIDTH: usize = 720;
pub const BENCH_HEIGHT: usize = 540;
const BENCH_SEED: u64 = 0x5eed_b11a;

pub fn read_image(path: &Path) -> CliResult<Image> {
    let bytes = std::fs::read(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    read_pnm(&bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Writes through a temporary file in the target directory so a failed run
/// never leaves a partial file behind.
pub fn write_atomic(path: &Path, data: &[u8]) -> CliResult<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let io_err = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(data).map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}

pub fn write_image(path: &Path, img: &Image) -> CliResult<()> {
    write_atomic(path, &write_pnm(img)?)
}

/// Uniform byte noise with a fixed seed.
pub fn synthetic_image() -> Image {
    let mut rng = ChaCha8Rng::seed_from_u64(BENCH_SEED);
    let bytes: Vec<u8> = (0..BENCH_WIDTH * BENCH_HEIGHT).map(|_| rng.gen()).collect();
    trigbf::image_from_bytes(&bytes, BENCH_WIDTH, BENCH_HEIGHT, 1).expect("valid synthetic dimensions")
}

/// Box radius solving `r(r+1)/3 = sigma²`, rounded.
pub fn box_radius(sigma_s: f64) -> usize {
    (((12.0 * sigma_s * sigma_s + 1.0).sqrt() - 1.0) / 2.0).round() as usize
}

pub fn spatial_spec(choice: SpatialChoice, sigma_s: f64) -> CliResult<SpatialSpec> {
    let spec = match choice {
        SpatialChoice::Box => SpatialSpec::boxed(box_radius(sigma_s)),
        SpatialChoice::GaussRecursive => SpatialSpec::gaussian_recursive(sigma_s),
        SpatialChoice::GaussFir => SpatialSpec::gaussian_fir(sigma_s),
    };
    spec.validate()?;
    Ok(spec)
}

/// An engine together with a short description of its size.
pub struct Built {
    pub engine: Engine,
    /// Raised-cosine degree (trig), Taylor terms (poly), none for direct.
    pub size: Option<usize>,
}

pub fn build_engine(choice: EngineChoice, sigma_r: f64, opts: &KernelOpts) -> CliResult<Built> {
    let trig = make_trig_kernel(sigma_r, opts.range_max, opts.degree)?;
    Ok(match choice {
        EngineChoice::Direct => Built {
            engine: Engine::Direct(RangeKernel::Gaussian { sigma: sigma_r }),
            size: None,
        },
        EngineChoice::Trig => Built {
            size: Some(trig.degree()),
            engine: Engine::Trig(trig),
        },
        EngineChoice::Poly => {
            let terms = opts.terms.map_or(trig.cosine_terms(), |t| t as usize);
            Built {
                engine: Engine::Poly(make_taylor_kernel(sigma_r, terms)?),
                size: Some(terms),
            }
        }
    })
}
