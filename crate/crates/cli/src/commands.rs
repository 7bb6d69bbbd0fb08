use std::io::Write;
use std::time::{Duration, Instant};

use trigbf::kernel::{write_curves_csv, Curve};
use trigbf::{
    bilateral, error_stats, gaussian_eval, make_taylor_kernel, make_trig_kernel, Engine, ErrorStats, Filtered,
    Image, RangeKernel, SpatialSpec, TrigKernel,
};

use crate::args::{BenchArgs, CompareArgs, EngineChoice, FilterArgs, KernelArgs, SpatialChoice};
use crate::setup::{build_engine, read_image, spatial_spec, synthetic_image, write_atomic, write_image};
use crate::{CliError, CliResult};

pub fn filter(a: &FilterArgs) -> CliResult<()> {
    let spatial = spatial_spec(a.kernel.spatial.unwrap_or(SpatialChoice::GaussRecursive), a.sigma_s)?;
    let built = build_engine(a.engine, a.sigma_r, &a.kernel)?;
    let img = read_image(&a.input)?;

    let start = Instant::now();
    let out = bilateral(&img, &spatial, &built.engine)?;
    let elapsed = start.elapsed();
    write_image(&a.output, &out.image)?;

    println!("engine: {}", a.engine.name());
    match a.engine {
        EngineChoice::Trig => println!("degree N: {}", built.size.unwrap_or(0)),
        EngineChoice::Poly => println!("taylor terms: {}", built.size.unwrap_or(0)),
        EngineChoice::Direct => {}
    }
    println!("spatial passes: {}", out.stats.spatial_passes);
    println!("guard hits: {}", out.stats.guard_hits);
    println!("wall time: {:.3} ms", ms(elapsed));
    println!("threads: {}", rayon::current_num_threads());
    Ok(())
}

fn stats_line(label: &str, s: &ErrorStats) {
    println!(
        "{label}: max_abs {:.6e} mean_abs {:.6e} std_dev {:.6e}",
        s.max_abs, s.mean_abs, s.std_dev
    );
}

pub fn compare(a: &CompareArgs) -> CliResult<()> {
    let spatial = spatial_spec(a.kernel.spatial.unwrap_or(SpatialChoice::GaussFir), a.sigma_s)?;
    let trig = build_engine(EngineChoice::Trig, a.sigma_r, &a.kernel)?;
    let poly = build_engine(EngineChoice::Poly, a.sigma_r, &a.kernel)?;
    let Engine::Trig(trig_kernel) = &trig.engine else { unreachable!() };
    let img = read_image(&a.input)?;

    let run = |engine: &Engine| -> CliResult<Filtered> { Ok(bilateral(&img, &spatial, engine)?) };
    let direct = run(&Engine::Direct(RangeKernel::Gaussian { sigma: a.sigma_r }))?;
    let fast_trig = run(&trig.engine)?;
    let fast_poly = run(&poly.engine)?;
    let exact = run(&Engine::Direct(RangeKernel::Trig(trig_kernel.clone())))?;

    let trig_err = error_stats(&fast_trig.image, &direct.image)?;
    let poly_err = error_stats(&fast_poly.image, &direct.image)?;
    let exact_err = error_stats(&fast_trig.image, &exact.image)?;

    println!(
        "raised cosine N={} ({} cosine terms), taylor {} terms",
        trig_kernel.degree(),
        trig_kernel.cosine_terms(),
        poly.size.unwrap_or(0)
    );
    stats_line("trig vs direct (gaussian range)", &trig_err);
    stats_line("poly vs direct (gaussian range)", &poly_err);
    stats_line("trig vs direct (raised-cosine range)", &exact_err);
    println!(
        "guard hits: trig {} poly {} direct {}",
        fast_trig.stats.guard_hits, fast_poly.stats.guard_hits, direct.stats.guard_hits
    );

    if trig_err.std_dev <= poly_err.std_dev {
        println!("ordering: ok");
        Ok(())
    } else {
        Err(CliError::Check(format!(
            "trig std_dev {} exceeds poly std_dev {}",
            trig_err.std_dev, poly_err.std_dev
        )))
    }
}

/// A closed pipe (e.g. `| head`) is not an error.
fn to_stdout(data: &[u8]) -> CliResult<()> {
    match std::io::stdout().write_all(data) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

pub fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

const BENCH_SIGMA_S: [f64; 2] = [10.0, 100.0];
const BENCH_SIGMA_S_DIRECT: [f64; 3] = [3.0, 5.0, 10.0];
const BENCH_SIGMA_R_DIRECT: f64 = 80.0;

pub fn bench(a: &BenchArgs) -> CliResult<()> {
    let sigma_s: Vec<f64> = match (a.sigma_s, a.engine) {
        (Some(s), _) => vec![s],
        (None, EngineChoice::Direct) => BENCH_SIGMA_S_DIRECT.to_vec(),
        (None, _) => BENCH_SIGMA_S.to_vec(),
    };
    let sigma_r: Vec<f64> = match (a.sigma_r, a.engine) {
        (Some(r), _) => vec![r],
        (None, EngineChoice::Direct) => vec![BENCH_SIGMA_R_DIRECT],
        (None, _) => (1..=10).map(|i| 10.0 * f64::from(i)).collect(),
    };
    let spatial_choice = a.kernel.spatial.unwrap_or(SpatialChoice::GaussRecursive);

    // validate the whole grid before timing anything
    let mut jobs = Vec::new();
    for &ss in &sigma_s {
        for &sr in &sigma_r {
            jobs.push((ss, sr, spatial_spec(spatial_choice, ss)?, build_engine(a.engine, sr, &a.kernel)?));
        }
    }
    let img = match &a.input {
        Some(p) => read_image(p)?,
        None => synthetic_image(),
    };

    let threads = rayon::current_num_threads();
    let mut csv = String::from("sigma_s,sigma_r,N,engine,median_ms,threads\n");
    for (ss, sr, spatial, built) in &jobs {
        let times = time_runs(&img, spatial, &built.engine, a.reps as usize)?;
        let n = built.size.map_or(String::new(), |n| n.to_string());
        csv.push_str(&format!("{ss},{sr},{n},{},{:.3},{threads}\n", a.engine.name(), median(times)));
    }
    match &a.csv {
        Some(path) => write_atomic(path, csv.as_bytes()),
        None => to_stdout(csv.as_bytes()),
    }
}

fn time_runs(img: &Image, spatial: &SpatialSpec, engine: &Engine, reps: usize) -> CliResult<Vec<f64>> {
    (0..reps)
        .map(|_| {
            let start = Instant::now();
            let out = bilateral(img, spatial, engine)?;
            let t = ms(start.elapsed());
            drop(out);
            Ok(t)
        })
        .collect()
}

pub fn kernel(a: &KernelArgs) -> CliResult<()> {
    let t = a.range_max;
    let scaled = make_trig_kernel(a.sigma_r, t, a.degree)?;
    let taylor = make_taylor_kernel(a.sigma_r, a.terms as usize)?;
    let gamma = std::f64::consts::PI / (2.0 * t);
    let sigma = a.sigma_r;

    let mut columns: Vec<Curve<'_>> = (1..=5)
        .map(|n| {
            let f: Box<dyn Fn(f64) -> f64> = Box::new(move |s: f64| (gamma * s).cos().powi(n));
            (format!("cos_n{n}"), f)
        })
        .collect();
    columns.push(("scaled_trig".into(), Box::new(|s| TrigKernel::eval(&scaled, s))));
    columns.push(("gaussian".into(), Box::new(move |s| gaussian_eval(sigma, s))));
    columns.push(("taylor".into(), Box::new(|s| taylor.eval(s))));

    let mut buf = Vec::new();
    write_curves_csv(&mut buf, t, a.points as usize, &columns)?;
    match &a.csv {
        Some(path) => write_atomic(path, &buf),
        None => to_stdout(&buf),
    }
}
