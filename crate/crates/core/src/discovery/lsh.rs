use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::attribute::{seeded_rng, sign, AttributeMatrix, FeatureMatrix};
use crate::error::{invalid, shape, Result};

/// Random-hyperplane hashing: one unit-norm hyperplane through the origin per bit.
#[derive(Debug, Clone, PartialEq)]
pub struct LshModel {
    /// `K x D`, unit-norm rows.
    pub hyperplanes: DMatrix<f64>,
    pub seed: u64,
}

impl LshModel {
    pub fn from_parts(hyperplanes: DMatrix<f64>, seed: u64) -> Result<Self> {
        if hyperplanes.nrows() == 0 || hyperplanes.ncols() == 0 {
            return Err(invalid("LSH model needs at least one bit and one dimension"));
        }
        for (k, row) in hyperplanes.row_iter().enumerate() {
            if (row.norm() - 1.0).abs() > 1e-9 {
                return Err(invalid(format!("hyperplane {k} is not unit norm")));
            }
        }
        Ok(Self { hyperplanes, seed })
    }

    pub fn dims(&self) -> usize {
        self.hyperplanes.ncols()
    }

    pub fn bits(&self) -> usize {
        self.hyperplanes.nrows()
    }

    pub fn encode(&self, f: &FeatureMatrix) -> Result<AttributeMatrix> {
        if f.dims() != self.dims() {
            return Err(shape(format!(
                "LSH model expects {} dimensions, features have {}",
                self.dims(),
                f.dims()
            )));
        }
        let responses = f.matrix() * self.hyperplanes.transpose();
        let data = responses.iter().map(|&x| sign(x)).collect();
        AttributeMatrix::from_column_major(f.n(), self.bits(), data)
    }
}

pub(crate) fn gaussian_unit_rows(rows: usize, dims: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = seeded_rng(seed);
    let mut w = DMatrix::from_fn(rows, dims, |_, _| rng.sample::<f64, _>(StandardNormal));
    for mut row in w.row_iter_mut() {
        let norm = row.norm();
        if norm > 0.0 {
            row /= norm;
        } else {
            row[0] = 1.0;
        }
    }
    w
}

pub fn train_lsh(dims: usize, bits: usize, seed: u64) -> Result<LshModel> {
    if dims == 0 || bits == 0 {
        return Err(invalid(format!("LSH needs dims >= 1 and bits >= 1, got {dims}, {bits}")));
    }
    Ok(LshModel {
        hyperplanes: gaussian_unit_rows(bits, dims, seed),
        seed,
    })
}
