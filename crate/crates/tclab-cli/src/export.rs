use crate::report::Failure;

/// Fixed-point decimal with 15 significant digits, scientific outside `[1e-5, 1e15)`.
pub fn sig15(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let mag = x.abs().log10().floor() as i32;
    if (-5..15).contains(&mag) {
        format!("{:.*}", (14 - mag) as usize, x)
    } else {
        format!("{:.14e}", x)
    }
}

/// Writes `rows` under `header`; an empty row set gives a header-only file.
pub fn write_samples(path: &str, header: &[String], rows: &[Vec<f64>]) -> Result<(), Failure> {
    let io = |e: csv::Error| Failure::Io(format!("cannot write {path}: {e}"));
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(r.iter().map(|v| sig15(*v))).map_err(io)?;
    }
    w.flush()
        .map_err(|e| Failure::Io(format!("cannot write {path}: {e}")))
}

/// `n` evenly spaced points of `[a, b]`, endpoints included.
pub fn grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![a],
        _ => (0..n)
            .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}
