use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn trigbf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trigbf")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write_pgm(path: &Path, w: usize, h: usize, pixel: impl Fn(usize, usize) -> u8) {
    let mut data = format!("P5\n{w} {h}\n255\n").into_bytes();
    for y in 0..h {
        for x in 0..w {
            data.push(pixel(x, y));
        }
    }
    std::fs::write(path, data).unwrap();
}

fn noisy_step(x: usize, y: usize) -> u8 {
    let base = if x < 20 { 50 } else { 190 };
    base + ((x * 7 + y * 13) % 23) as u8
}

fn fixture(dir: &Path) -> PathBuf {
    let p = dir.join("in.pgm");
    write_pgm(&p, 40, 30, noisy_step);
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn filter_writes_same_size_image() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture(dir.path());
    let out = dir.path().join("out.pgm");
    let o = trigbf(&["filter", s(&input), "-o", s(&out), "--sigma-s", "15", "--sigma-r", "80"]);
    assert!(o.status.success(), "{o:?}");
    let text = stdout(&o);
    assert!(text.contains("degree N: 4"), "{text}");
    assert!(text.contains("spatial passes: 9"), "{text}");
    assert!(text.contains("guard hits: 0"), "{text}");
    assert!(text.contains("threads: "), "{text}");
    let bytes = std::fs::read(&out).unwrap();
    assert!(bytes.starts_with(b"P5\n40 30\n255\n"));
    assert_eq!(bytes.len(), b"P5\n40 30\n255\n".len() + 40 * 30);
}

#[test]
fn filter_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture(dir.path());
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = trigbf(&["filter", s(&input), "-o", s(&out), "--sigma-s", "3", "--sigma-r", "30", "--spatial", "box"]);
        assert!(o.status.success(), "{o:?}");
        std::fs::read(out).unwrap()
    };
    assert_eq!(run("a.pgm"), run("b.pgm"));
}

#[test]
fn direct_on_constant_image_is_identity() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("flat.pgm");
    write_pgm(&input, 9, 7, |_, _| 117);
    let out = dir.path().join("out.pgm");
    let o = trigbf(&["filter", s(&input), "-o", s(&out), "--sigma-s", "2", "--sigma-r", "20", "--engine", "direct"]);
    assert!(o.status.success(), "{o:?}");
    assert_eq!(std::fs::read(&out).unwrap(), std::fs::read(&input).unwrap());
}

#[test]
fn color_images_round_trip_through_filter() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("c.ppm");
    let mut data = b"P6\n5 4\n255\n".to_vec();
    data.extend((0..60).map(|i| (i * 4) as u8));
    std::fs::write(&input, &data).unwrap();
    let out = dir.path().join("o.ppm");
    let o = trigbf(&["filter", s(&input), "-o", s(&out), "--sigma-s", "1", "--sigma-r", "60", "--engine", "poly"]);
    assert!(o.status.success(), "{o:?}");
    assert!(stdout(&o).contains("taylor terms: 3"));
    assert_eq!(std::fs::read(&out).unwrap().len(), data.len());
}

#[test]
fn usage_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture(dir.path());
    let out = dir.path().join("out.pgm");
    for bad in ["0", "-5"] {
        let o = trigbf(&["filter", s(&input), "-o", s(&out), "--sigma-s", "2", "--sigma-r", bad]);
        assert_eq!(o.status.code(), Some(1));
    }
    // recursive Gaussian below its minimum sigma
    let o = trigbf(&["filter", s(&input), "-o", s(&out), "--sigma-s", "0.2", "--sigma-r", "50"]);
    assert_eq!(o.status.code(), Some(1));
    // samples above T
    let o = trigbf(&["filter", s(&input), "-o", s(&out), "--sigma-s", "2", "--sigma-r", "50", "--range-max", "100"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(trigbf(&["frobnicate"]).status.code(), Some(1));
    assert!(!out.exists());
}

#[test]
fn io_and_parse_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out.pgm");
    let missing = dir.path().join("missing.pgm");
    let o = trigbf(&["filter", s(&missing), "-o", s(&out), "--sigma-s", "2", "--sigma-r", "50"]);
    assert_eq!(o.status.code(), Some(2));

    let truncated = dir.path().join("short.pgm");
    std::fs::write(&truncated, b"P5\n4 4\n255\n\x01\x02").unwrap();
    let o = trigbf(&["filter", s(&truncated), "-o", s(&out), "--sigma-s", "2", "--sigma-r", "50"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("expected 16 bytes"));
    assert!(!out.exists());
}

#[test]
fn help_exits_zero() {
    let o = trigbf(&["--help"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("compare"));
}

fn stat(text: &str, label: &str, field: &str) -> f64 {
    let line = text.lines().find(|l| l.starts_with(label)).unwrap_or_else(|| panic!("{label} in {text}"));
    let mut words = line.split_whitespace();
    while let Some(w) = words.next() {
        if w == field {
            return words.next().unwrap().parse().unwrap();
        }
    }
    panic!("{field} missing in {line}");
}

#[test]
fn compare_reports_ordering_and_exactness() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.pgm");
    write_pgm(&input, 48, 48, |x, y| if (x as i64 - 24).pow(2) + (y as i64 - 24).pow(2) < 200 { 200 } else { 40 } + ((x * 31 + y * 17) % 19) as u8);
    let o = trigbf(&["compare", s(&input), "--sigma-s", "3", "--sigma-r", "80"]);
    assert!(o.status.success(), "{o:?}");
    let text = stdout(&o);
    let trig = stat(&text, "trig vs direct (gaussian range)", "std_dev");
    let poly = stat(&text, "poly vs direct (gaussian range)", "std_dev");
    let exact = stat(&text, "trig vs direct (raised-cosine range)", "std_dev");
    assert!(trig <= poly, "{text}");
    assert!(exact < 1e-8, "{text}");
    assert!(text.contains("ordering: ok"));
}

#[test]
fn bench_emits_full_grid() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("small.pgm");
    write_pgm(&input, 24, 16, noisy_step);
    let csv = dir.path().join("bench.csv");
    let o = trigbf(&["bench", s(&input), "--reps", "1", "--csv", s(&csv)]);
    assert!(o.status.success(), "{o:?}");
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "sigma_s,sigma_r,N,engine,median_ms,threads");
    assert_eq!(lines.len(), 1 + 2 * 10);
    assert!(lines.iter().any(|l| l.starts_with("10,10,264,trig,")));
    assert!(lines.iter().any(|l| l.starts_with("100,80,4,trig,")));

    let o = trigbf(&["bench", s(&input), "--reps", "2", "--engine", "direct"]);
    assert!(o.status.success(), "{o:?}");
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[0].starts_with("3,80,,direct,"));
}

#[test]
fn kernel_curves() {
    let o = trigbf(&["kernel"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "s,cos_n1,cos_n2,cos_n3,cos_n4,cos_n5,scaled_trig,gaussian,taylor"
    );
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 511);
    for row in &rows {
        let s = row[0];
        if s == 0.0 {
            assert!(row[1..].iter().all(|&v| v == 1.0));
        } else {
            assert!(row[1..6].windows(2).all(|w| w[1] <= w[0]), "s={s}");
        }
        if s.abs() == 255.0 {
            assert!(row[1].abs() < 1e-12);
        }
    }
}
