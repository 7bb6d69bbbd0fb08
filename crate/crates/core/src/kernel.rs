//! Range kernels: raised cosines, the Gaussian target and its Taylor
//! polynomial, plus degree selection and approximation error.

use std::f64::consts::PI;
use std::io::{self, Write};

use crate::error::{param_err, Result};

/// Degree used when the requested range sigma is already wide enough
/// (`γσ_r ≥ 1`) that any degree keeps the kernel monotone.
pub const DEFAULT_DEGREE: usize = 5;

/// Binomial weights `2^-N C(N,n)` underflow past this degree.
pub const MAX_DEGREE: usize = 1000;

pub const DEFAULT_GRID_POINTS: usize = 10001;

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        param_err(format!("{name} must be positive, got {v}"))
    }
}

/// Minimum raised-cosine degrees for Gaussians of given sigma, measured
/// empirically for one dynamic range.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeTable {
    pub range_max: f64,
    pub entries: Vec<(f64, usize)>,
}

impl DegreeTable {
    /// Empirical minimum degrees for 8-bit images (`T = 255`).
    pub fn eight_bit() -> Self {
        Self {
            range_max: 255.0,
            entries: vec![
                (200.0, 1),
                (150.0, 2),
                (100.0, 3),
                (80.0, 4),
                (60.0, 5),
                (50.0, 7),
                (40.0, 9),
            ],
        }
    }

    /// Exact-match lookup; intermediate sigmas are not interpolated.
    pub fn lookup(&self, sigma_r: f64, range_max: f64) -> Option<usize> {
        if range_max != self.range_max {
            return None;
        }
        self.entries
            .iter()
            .find(|(s, _)| *s == sigma_r)
            .map(|&(_, n)| n)
    }
}

/// `ceil((γσ_r)^-2)` with `γ = π/2T`, at least 1.
pub fn degree_estimate(sigma_r: f64, range_max: f64) -> Result<usize> {
    check_positive("sigma_r", sigma_r)?;
    check_positive("range max T", range_max)?;
    let rho = PI / (2.0 * range_max) * sigma_r;
    Ok(((1.0 / (rho * rho)).ceil() as usize).max(1))
}

/// Picks the raised-cosine degree for a Gaussian range kernel of width
/// `sigma_r`.
///
/// Without a table this is the plain estimate [`degree_estimate`]. With a
/// table, an exact sigma hit returns the tabulated degree; otherwise narrow
/// kernels (`γσ_r < 1`) use the estimate and wide ones use
/// [`DEFAULT_DEGREE`].
pub fn select_degree(sigma_r: f64, range_max: f64, lookup: Option<&DegreeTable>) -> Result<usize> {
    let estimate = degree_estimate(sigma_r, range_max)?;
    let Some(table) = lookup else {
        return Ok(estimate);
    };
    if let Some(n) = table.lookup(sigma_r, range_max) {
        return Ok(n);
    }
    let rho = PI / (2.0 * range_max) * sigma_r;
    Ok(if rho < 1.0 { estimate } else { DEFAULT_DEGREE })
}

/// Scaled raised cosine `[cos(ω s)]^N` with `ω = γ / (ρ √N)`, stored as its
/// binomial expansion `Σ_n c_n cos((2n-N) ω s)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigKernel {
    range_max: f64,
    gamma: f64,
    rho: f64,
    degree: usize,
    omega: f64,
    coeffs: Vec<f64>,
    freqs: Vec<f64>,
}

impl TrigKernel {
    /// Raised cosine of degree `degree` on `[-range_max, range_max]` with
    /// argument scale `rho`. Degree 0 is the constant kernel.
    pub fn new(range_max: f64, rho: f64, degree: usize) -> Result<Self> {
        check_positive("range max T", range_max)?;
        check_positive("rho", rho)?;
        if degree > MAX_DEGREE {
            return param_err(format!("degree {degree} exceeds the maximum {MAX_DEGREE}"));
        }
        let gamma = PI / (2.0 * range_max);
        let omega = if degree == 0 {
            0.0
        } else {
            gamma / (rho * (degree as f64).sqrt())
        };
        let coeffs = binomial_weights(degree);
        let freqs = (0..=degree)
            .map(|n| (2.0 * n as f64 - degree as f64) * omega)
            .collect();
        Ok(Self {
            range_max,
            gamma,
            rho,
            degree,
            omega,
            coeffs,
            freqs,
        })
    }

    pub fn range_max(&self) -> f64 {
        self.range_max
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn freqs(&self) -> &[f64] {
        &self.freqs
    }

    /// Number of distinct cosine terms, `floor(N/2) + 1`.
    pub fn cosine_terms(&self) -> usize {
        self.degree / 2 + 1
    }

    /// True when `|ω s| ≤ π/2` over the whole range, i.e. `ρ√N ≥ 1`; the
    /// kernel is then non-negative and non-increasing in `|s|`.
    pub fn is_monotone(&self) -> bool {
        self.degree == 0 || self.rho * (self.degree as f64).sqrt() >= 1.0
    }

    /// Evaluates the expansion; imaginary parts cancel pairwise.
    pub fn eval(&self, s: f64) -> f64 {
        self.coeffs
            .iter()
            .zip(&self.freqs)
            .map(|(c, f)| c * (f * s).cos())
            .sum()
    }

    /// Evaluates the closed form `[cos(ω s)]^N`.
    pub fn eval_power(&self, s: f64) -> f64 {
        (self.omega * s).cos().powi(self.degree as i32)
    }
}

fn binomial_weights(degree: usize) -> Vec<f64> {
    // log-space keeps 2^-N C(N,n) finite for large N
    let ln2n = degree as f64 * std::f64::consts::LN_2;
    let mut ln_c = 0.0;
    let mut out = vec![0.0; degree + 1];
    for n in 0..=degree / 2 {
        if n > 0 {
            ln_c += ((degree - n + 1) as f64).ln() - (n as f64).ln();
        }
        let c = (ln_c - ln2n).exp();
        out[n] = c;
        out[degree - n] = c;
    }
    out
}

/// Builds the raised cosine approximating a Gaussian of width `sigma_r`:
/// `γ = π/2T`, `ρ = γσ_r`, and `N` from the argument or from
/// [`select_degree`] with the 8-bit table.
pub fn make_trig_kernel(sigma_r: f64, range_max: f64, degree: Option<usize>) -> Result<TrigKernel> {
    check_positive("sigma_r", sigma_r)?;
    check_positive("range max T", range_max)?;
    let n = match degree {
        Some(n) => n,
        None => select_degree(sigma_r, range_max, Some(&DegreeTable::eight_bit()))?,
    };
    let rho = PI / (2.0 * range_max) * sigma_r;
    TrigKernel::new(range_max, rho, n)
}

pub fn trig_eval(k: &TrigKernel, s: f64) -> f64 {
    k.eval(s)
}

pub fn gaussian_eval(sigma: f64, s: f64) -> f64 {
    (-(s * s) / (2.0 * sigma * sigma)).exp()
}

/// Even polynomial `Σ_k b_k s^{2k}`: the truncated Taylor series of
/// `exp(-s²/2σ²)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyKernel {
    sigma: f64,
    coeffs_even: Vec<f64>,
}

impl PolyKernel {
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn coeffs_even(&self) -> &[f64] {
        &self.coeffs_even
    }

    pub fn terms(&self) -> usize {
        self.coeffs_even.len()
    }

    pub fn eval(&self, s: f64) -> f64 {
        let s2 = s * s;
        self.coeffs_even.iter().rev().fold(0.0, |acc, b| acc * s2 + b)
    }
}

pub fn make_taylor_kernel(sigma: f64, terms: usize) -> Result<PolyKernel> {
    check_positive("sigma", sigma)?;
    if terms == 0 {
        return param_err("Taylor kernel needs at least one term");
    }
    let step = -1.0 / (2.0 * sigma * sigma);
    let mut b = 1.0;
    let mut coeffs_even = Vec::with_capacity(terms);
    for k in 0..terms {
        if k > 0 {
            b *= step / k as f64;
        }
        coeffs_even.push(b);
    }
    Ok(PolyKernel { sigma, coeffs_even })
}

pub fn poly_eval(p: &PolyKernel, s: f64) -> f64 {
    p.eval(s)
}

/// A range kernel usable by the direct oracle.
#[derive(Debug, Clone, PartialEq)]
pub enum RangeKernel {
    Constant,
    Gaussian { sigma: f64 },
    Trig(TrigKernel),
    Poly(PolyKernel),
}

impl RangeKernel {
    pub fn eval(&self, s: f64) -> f64 {
        match self {
            RangeKernel::Constant => 1.0,
            RangeKernel::Gaussian { sigma } => gaussian_eval(*sigma, s),
            RangeKernel::Trig(k) => k.eval(s),
            RangeKernel::Poly(p) => p.eval(s),
        }
    }
}

/// Uniform grid of `points` samples over `[-T, T]`, endpoints included.
pub fn grid(range_max: f64, points: usize) -> impl Iterator<Item = f64> {
    let step = 2.0 * range_max / (points.max(2) - 1) as f64;
    (0..points).map(move |i| -range_max + step * i as f64)
}

/// Largest deviation from `exp(-s²/2σ²)` over a uniform grid on `[-T, T]`.
pub fn sup_error(kernel_eval: impl Fn(f64) -> f64, sigma: f64, range_max: f64, grid_points: usize) -> Result<f64> {
    if grid_points < 2 {
        return param_err("sup_error needs at least 2 grid points");
    }
    check_positive("sigma", sigma)?;
    Ok(grid(range_max, grid_points)
        .map(|s| (kernel_eval(s) - gaussian_eval(sigma, s)).abs())
        .fold(0.0, f64::max))
}

/// Shortest round-trip decimal, switching to exponent form for tiny values.
struct CsvNumber(f64);

impl std::fmt::Display for CsvNumber {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let v = self.0;
        if v != 0.0 && v.abs() < 1e-4 {
            write!(f, "{v:e}")
        } else {
            write!(f, "{v}")
        }
    }
}

/// A named curve for [`write_curves_csv`].
pub type Curve<'a> = (String, Box<dyn Fn(f64) -> f64 + 'a>);

/// Writes `s` followed by one column per named curve, sampled on the
/// uniform grid over `[-T, T]`.
pub fn write_curves_csv<W: Write>(
    mut out: W,
    range_max: f64,
    points: usize,
    columns: &[Curve<'_>],
) -> io::Result<()> {
    write!(out, "s")?;
    for (name, _) in columns {
        write!(out, ",{name}")?;
    }
    writeln!(out)?;
    for s in grid(range_max, points) {
        write!(out, "{s}")?;
        for (_, f) in columns {
            write!(out, ",{}", CsvNumber(f(s)))?;
        }
        writeln!(out)?;
    }
    Ok(())
}

/// `s, trig_value, gaussian_value, taylor_value` for the raised cosine
/// matched to `sigma` and its Taylor counterpart.
pub fn comparison_curves_csv<W: Write>(
    out: W,
    trig: &TrigKernel,
    taylor: &PolyKernel,
    sigma: f64,
    points: usize,
) -> io::Result<()> {
    let columns: Vec<Curve<'_>> = vec![
        ("trig_value".into(), Box::new(|s| trig.eval(s))),
        ("gaussian_value".into(), Box::new(move |s| gaussian_eval(sigma, s))),
        ("taylor_value".into(), Box::new(|s| taylor.eval(s))),
    ];
    write_curves_csv(out, trig.range_max(), points, &columns)
}
