//! Binary attributes over a fixed instance set.
//!
//! An attribute is the sign pattern of one classifier evaluated on the `N`
//! instances, so it is stored as a vector over {-1, +1}. A set of `K`
//! attributes is an `N x K` [`AttributeMatrix`] with one attribute per column.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, shape, Error, Result};

pub(crate) fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Sign with the tie rule `sign(0) = +1`.
#[inline]
pub fn sign(x: f64) -> i8 {
    if x >= 0.0 {
        1
    } else {
        -1
    }
}

/// Real-valued `N x D` feature matrix, one instance per row.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    data: DMatrix<f64>,
}

impl FeatureMatrix {
    pub fn new(data: DMatrix<f64>) -> Result<Self> {
        if data.nrows() == 0 || data.ncols() == 0 {
            return Err(invalid(format!(
                "feature matrix must be non-empty, got {}x{}",
                data.nrows(),
                data.ncols()
            )));
        }
        check_finite(&data)?;
        Ok(Self { data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let d = rows.first().map_or(0, Vec::len);
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != d) {
            return Err(shape(format!("row {i} has {} columns, expected {d}", r.len())));
        }
        Self::new(DMatrix::from_fn(n, d, |i, j| rows[i][j]))
    }

    pub fn n(&self) -> usize {
        self.data.nrows()
    }

    pub fn dims(&self) -> usize {
        self.data.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.data
    }
}

pub(crate) fn check_finite(m: &DMatrix<f64>) -> Result<()> {
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            if !m[(i, j)].is_finite() {
                return Err(Error::NonFinite { row: i, col: j });
            }
        }
    }
    Ok(())
}

/// One attribute: a length-`N` vector over {-1, +1}.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AttributeVector {
    bits: Vec<i8>,
}

impl AttributeVector {
    pub fn new(bits: Vec<i8>) -> Result<Self> {
        if bits.is_empty() {
            return Err(invalid("attribute vector must have at least one instance"));
        }
        if let Some(i) = bits.iter().position(|&b| b != 1 && b != -1) {
            return Err(invalid(format!("entry {i} is {}, expected 1 or -1", bits[i])));
        }
        Ok(Self { bits })
    }

    pub fn bits(&self) -> &[i8] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }
}

/// `K` attributes over the same `N` instances, stored column-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AttributeMatrix {
    n: usize,
    k: usize,
    data: Vec<i8>,
}

impl AttributeMatrix {
    /// Builds from column-major bits.
    pub fn from_column_major(n: usize, k: usize, data: Vec<i8>) -> Result<Self> {
        if n == 0 || k == 0 {
            return Err(invalid(format!(
                "attribute matrix needs N >= 1 and K >= 1, got N={n}, K={k}"
            )));
        }
        if data.len() != n * k {
            return Err(shape(format!(
                "expected {} bits for {n}x{k}, got {}",
                n * k,
                data.len()
            )));
        }
        if let Some(p) = data.iter().position(|&b| b != 1 && b != -1) {
            return Err(invalid(format!(
                "entry at row {}, column {} is {}, expected 1 or -1",
                p % n,
                p / n,
                data[p]
            )));
        }
        Ok(Self { n, k, data })
    }

    pub fn from_columns(columns: Vec<AttributeVector>) -> Result<Self> {
        let n = columns.first().map_or(0, AttributeVector::len);
        let k = columns.len();
        if let Some((j, c)) = columns.iter().enumerate().find(|(_, c)| c.len() != n) {
            return Err(shape(format!(
                "column {j} has {} instances, expected {n}",
                c.len()
            )));
        }
        let data = columns.into_iter().flat_map(|c| c.bits).collect();
        Self::from_column_major(n, k, data)
    }

    pub fn from_rows(rows: &[Vec<i8>]) -> Result<Self> {
        let n = rows.len();
        let k = rows.first().map_or(0, Vec::len);
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != k) {
            return Err(shape(format!("row {i} has {} columns, expected {k}", r.len())));
        }
        let mut data = Vec::with_capacity(n * k);
        for j in 0..k {
            data.extend(rows.iter().map(|r| r[j]));
        }
        Self::from_column_major(n, k, data)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn get(&self, row: usize, col: usize) -> i8 {
        self.data[col * self.n + row]
    }

    pub fn column(&self, col: usize) -> &[i8] {
        &self.data[col * self.n..(col + 1) * self.n]
    }

    pub fn columns(&self) -> impl ExactSizeIterator<Item = &[i8]> + '_ {
        self.data.chunks_exact(self.n)
    }

    pub fn row(&self, row: usize) -> Vec<i8> {
        (0..self.k).map(|j| self.get(row, j)).collect()
    }

    pub fn attribute(&self, col: usize) -> AttributeVector {
        AttributeVector {
            bits: self.column(col).to_vec(),
        }
    }

    /// New matrix holding the given columns in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Result<Self> {
        if let Some(&c) = cols.iter().find(|&&c| c >= self.k) {
            return Err(invalid(format!("column {c} out of range for K={}", self.k)));
        }
        let data = cols.iter().flat_map(|&c| self.column(c).iter().copied()).collect();
        Self::from_column_major(self.n, cols.len(), data)
    }

    /// Real `N x K` copy with entries -1.0 / 1.0.
    pub fn to_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_iterator(self.n, self.k, self.data.iter().map(|&b| f64::from(b)))
    }
}

/// Category supervision for the max-margin coder.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelVector {
    labels: Vec<usize>,
}

impl LabelVector {
    pub fn new(labels: Vec<usize>) -> Result<Self> {
        if labels.is_empty() {
            return Err(invalid("label vector must be non-empty"));
        }
        Ok(Self { labels })
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Distinct labels in ascending order.
    pub fn classes(&self) -> Vec<usize> {
        let mut c = self.labels.clone();
        c.sort_unstable();
        c.dedup();
        c
    }
}

/// Signs of classifier scores, `sign(0) = +1`.
pub fn binarize(scores: &DMatrix<f64>) -> Result<AttributeMatrix> {
    check_finite(scores)?;
    let data = scores.iter().map(|&x| sign(x)).collect();
    AttributeMatrix::from_column_major(scores.nrows(), scores.ncols(), data)
}

/// `count` attributes with i.i.d. fair-coin bits, deterministic in `seed`.
pub fn random_attribute_set(n: usize, count: usize, seed: u64) -> Result<AttributeMatrix> {
    if n == 0 || count == 0 {
        return Err(invalid(format!(
            "random attribute set needs n >= 1 and count >= 1, got n={n}, count={count}"
        )));
    }
    let mut rng = seeded_rng(seed);
    let data = (0..n * count)
        .map(|_| if rng.random::<bool>() { 1 } else { -1 })
        .collect();
    AttributeMatrix::from_column_major(n, count, data)
}

/// Columns of `base` followed by columns of `extra`.
pub fn concat(base: &AttributeMatrix, extra: &AttributeMatrix) -> Result<AttributeMatrix> {
    if base.n != extra.n {
        return Err(shape(format!(
            "cannot concatenate attribute sets over {} and {} instances",
            base.n, extra.n
        )));
    }
    let mut data = Vec::with_capacity(base.data.len() + extra.data.len());
    data.extend_from_slice(&base.data);
    data.extend_from_slice(&extra.data);
    AttributeMatrix::from_column_major(base.n, base.k + extra.k, data)
}
