use crate::error::{KmeansError, Result};
use crate::Scalar;

/// A dense `n x d` point matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DataSet<T> {
    values: Vec<T>,
    n: usize,
    d: usize,
}

impl<T: Scalar> DataSet<T> {
    /// Builds a data set from rows. Every row must have the same length and
    /// only finite entries.
    pub fn from_rows<R: AsRef<[T]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(KmeansError::InvalidArgument(
                "data set has no points".into(),
            ));
        }
        let d = rows[0].as_ref().len();
        if d == 0 {
            return Err(KmeansError::InvalidArgument(
                "points have zero dimensions".into(),
            ));
        }
        let mut values = Vec::with_capacity(n * d);
        for row in rows {
            let row = row.as_ref();
            if row.len() != d {
                return Err(KmeansError::DimensionMismatch {
                    expected: d,
                    got: row.len(),
                });
            }
            values.extend_from_slice(row);
        }
        Self::from_flat(values, d)
    }

    /// Builds a data set from a flat row-major buffer.
    pub fn from_flat(values: Vec<T>, d: usize) -> Result<Self> {
        if d == 0 {
            return Err(KmeansError::InvalidArgument(
                "points have zero dimensions".into(),
            ));
        }
        if values.is_empty() {
            return Err(KmeansError::InvalidArgument(
                "data set has no points".into(),
            ));
        }
        if !values.len().is_multiple_of(d) {
            return Err(KmeansError::DimensionMismatch {
                expected: d,
                got: values.len() % d,
            });
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(KmeansError::NonFinite {
                row: pos / d,
                col: pos % d,
            });
        }
        let n = values.len() / d;
        Ok(Self { values, n, d })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn d(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[T] {
        &self.values[i * self.d..(i + 1) * self.d]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[T]> {
        self.values.chunks_exact(self.d)
    }

    pub fn as_flat(&self) -> &[T] {
        &self.values
    }

    /// Element-wise sum of all points.
    pub fn column_sums(&self) -> Vec<T> {
        let mut out = vec![T::zero(); self.d];
        for row in self.rows() {
            for (o, &v) in out.iter_mut().zip(row) {
                *o += v;
            }
        }
        out
    }
}

/// `k` centers of dimension `d`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CentroidSet<T> {
    values: Vec<T>,
    k: usize,
    d: usize,
}

impl<T: Scalar> CentroidSet<T> {
    pub fn from_rows<R: AsRef<[T]>>(rows: &[R]) -> Result<Self> {
        if rows.is_empty() {
            return Err(KmeansError::InvalidArgument(
                "need at least one centroid".into(),
            ));
        }
        let d = rows[0].as_ref().len();
        let mut values = Vec::with_capacity(rows.len() * d);
        for row in rows {
            let row = row.as_ref();
            if row.len() != d {
                return Err(KmeansError::DimensionMismatch {
                    expected: d,
                    got: row.len(),
                });
            }
            values.extend_from_slice(row);
        }
        Self::from_flat(values, d)
    }

    pub fn from_flat(values: Vec<T>, d: usize) -> Result<Self> {
        if d == 0 || values.is_empty() || !values.len().is_multiple_of(d) {
            return Err(KmeansError::InvalidArgument(format!(
                "cannot shape {} values into centroids of dimension {d}",
                values.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(KmeansError::NonFinite {
                row: pos / d,
                col: pos % d,
            });
        }
        let k = values.len() / d;
        Ok(Self { values, k, d })
    }

    /// Copies the given data rows.
    pub fn from_indices(data: &DataSet<T>, indices: &[usize]) -> Self {
        let mut values = Vec::with_capacity(indices.len() * data.d());
        for &i in indices {
            values.extend_from_slice(data.row(i));
        }
        Self {
            values,
            k: indices.len(),
            d: data.d(),
        }
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn d(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn center(&self, j: usize) -> &[T] {
        &self.values[j * self.d..(j + 1) * self.d]
    }

    #[inline]
    pub fn center_mut(&mut self, j: usize) -> &mut [T] {
        &mut self.values[j * self.d..(j + 1) * self.d]
    }

    pub fn centers(&self) -> impl Iterator<Item = &[T]> {
        self.values.chunks_exact(self.d)
    }

    pub fn as_flat(&self) -> &[T] {
        &self.values
    }

    /// Largest relative coordinate difference against `other`, scaled by the
    /// magnitude of the larger coordinate (floored at one).
    pub fn max_relative_diff(&self, other: &Self) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| {
                let (a, b) = (a.as_f64(), b.as_f64());
                (a - b).abs() / a.abs().max(b.abs()).max(1.0)
            })
            .fold(0.0, f64::max)
    }
}

/// Current and previous cluster labels of every point.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Assignment {
    pub current: Vec<usize>,
    /// Empty before the first assignment step.
    pub previous: Vec<usize>,
}

impl Assignment {
    pub fn new(current: Vec<usize>) -> Self {
        Self {
            current,
            previous: Vec::new(),
        }
    }

    /// Number of points whose label differs from the previous step.
    pub fn changed(&self) -> usize {
        if self.previous.len() != self.current.len() {
            return self.current.len();
        }
        self.current
            .iter()
            .zip(&self.previous)
            .filter(|(a, b)| a != b)
            .count()
    }
}
