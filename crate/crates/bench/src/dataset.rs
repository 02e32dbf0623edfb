//! Reading, writing and generating point sets.

use std::fmt::Write as _;
use std::path::Path;

use exact_kmeans::init::rng_from_seed;
use exact_kmeans::DataSet;
use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{BenchError, Result};

/// Parses one point per line, comma separated or whitespace separated.
/// Blank lines are skipped; `source` names the input in errors.
pub fn parse_dataset(text: &str, source: &str) -> Result<DataSet<f64>> {
    let mut values = Vec::new();
    let mut d = None;
    let mut rows = 0;
    for (line_no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let row = line_no + 1;
        let fields: Vec<&str> = if line.contains(',') {
            line.split(',').map(str::trim).collect()
        } else {
            line.split_whitespace().collect()
        };
        let err = |col: usize, msg: String| BenchError::Parse {
            path: source.to_string(),
            row,
            col,
            msg,
        };
        match d {
            None => d = Some(fields.len()),
            Some(want) if want != fields.len() => {
                return Err(err(
                    fields.len().min(want) + 1,
                    format!("expected {want} columns, found {}", fields.len()),
                ));
            }
            _ => {}
        }
        for (c, f) in fields.iter().enumerate() {
            let v: f64 = f
                .parse()
                .map_err(|_| err(c + 1, format!("`{f}` is not a number")))?;
            if !v.is_finite() {
                return Err(err(c + 1, format!("`{f}` is not finite")));
            }
            values.push(v);
        }
        rows += 1;
    }
    let Some(d) = d.filter(|_| rows > 0) else {
        return Err(BenchError::Data(format!("{source}: no points")));
    };
    Ok(DataSet::from_flat(values, d)?)
}

pub fn load_dataset(path: &Path) -> Result<DataSet<f64>> {
    let text = std::fs::read_to_string(path)?;
    parse_dataset(&text, &path.display().to_string())
}

/// Headerless CSV that [`parse_dataset`] reads back exactly.
pub fn to_csv(data: &DataSet<f64>) -> String {
    let mut out = String::new();
    for row in data.rows() {
        for (i, v) in row.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            write!(out, "{v:?}").expect("write to string");
        }
        out.push('\n');
    }
    out
}

/// `n` points around `k_true` centers drawn uniformly from the unit cube,
/// with isotropic Gaussian noise of the given variance. Center `c` owns a
/// contiguous block of rows; block sizes differ by at most one.
pub fn gen_gaussian(
    n: usize,
    d: usize,
    k_true: usize,
    variance: f64,
    seed: u64,
) -> Result<DataSet<f64>> {
    if k_true == 0 || n < k_true || d == 0 {
        return Err(BenchError::Usage(format!(
            "need n >= k_true >= 1 and d >= 1, got n={n} k_true={k_true} d={d}"
        )));
    }
    if !(variance > 0.0 && variance.is_finite()) {
        return Err(BenchError::Usage(format!(
            "variance must be positive, got {variance}"
        )));
    }
    let mut rng = rng_from_seed(seed);
    let centers: Vec<f64> = (0..k_true * d)
        .map(|_| rng.random_range(0.0..1.0))
        .collect();
    let noise = Normal::new(0.0, variance.sqrt()).expect("positive spread");
    let mut values = Vec::with_capacity(n * d);
    for c in 0..k_true {
        let size = n / k_true + usize::from(c < n % k_true);
        for _ in 0..size {
            values.extend(
                centers[c * d..(c + 1) * d]
                    .iter()
                    .map(|&m| m + noise.sample(&mut rng)),
            );
        }
    }
    Ok(DataSet::from_flat(values, d)?)
}

/// Identifier used in logs for a generated set.
pub fn gaussian_id(n: usize, d: usize, k_true: usize, variance: f64, seed: u64) -> String {
    format!("gauss-n{n}-d{d}-k{k_true}-v{variance:e}-s{seed}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_both_layouts() {
        let a = parse_dataset("0,0\n3,4\n", "a").unwrap();
        assert_eq!((a.n(), a.d()), (2, 2));
        assert_eq!(a.row(1), &[3.0, 4.0]);
        let b = parse_dataset("1 2 3\n4\t5 6\n\n", "b").unwrap();
        assert_eq!((b.n(), b.d()), (2, 3));
    }

    #[test]
    fn rejects_ragged_and_bad_values() {
        let e = parse_dataset("1,2\n1\n", "f").unwrap_err();
        assert!(matches!(e, BenchError::Parse { row: 2, .. }), "{e}");
        assert!(e.to_string().contains("expected 2 columns"));
        let e = parse_dataset("1,2\n3,x\n", "f").unwrap_err();
        assert!(matches!(e, BenchError::Parse { row: 2, col: 2, .. }));
        let e = parse_dataset("1,inf\n", "f").unwrap_err();
        assert!(matches!(e, BenchError::Parse { row: 1, col: 2, .. }));
        assert!(matches!(
            parse_dataset("\n \n", "f"),
            Err(BenchError::Data(_))
        ));
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let g = gen_gaussian(50, 3, 2, 0.3, 1).unwrap();
        let back = parse_dataset(&to_csv(&g), "g").unwrap();
        assert_eq!(back.as_flat(), g.as_flat());
    }

    #[test]
    fn gaussian_blocks_and_determinism() {
        let g = gen_gaussian(1000, 2, 4, 1e-12, 5).unwrap();
        for c in 0..4 {
            let first = g.row(c * 250);
            for i in c * 250..(c + 1) * 250 {
                assert!(g
                    .row(i)
                    .iter()
                    .zip(first)
                    .all(|(a, b)| (a - b).abs() < 1e-4));
            }
        }
        assert_eq!(
            gen_gaussian(1000, 2, 4, 1e-12, 5).unwrap().as_flat(),
            g.as_flat()
        );
        assert_ne!(
            gen_gaussian(1000, 2, 4, 1e-12, 6).unwrap().as_flat(),
            g.as_flat()
        );
        assert!(gen_gaussian(3, 2, 4, 1.0, 0).is_err());
        assert!(gen_gaussian(30, 2, 4, 0.0, 0).is_err());
    }
}
