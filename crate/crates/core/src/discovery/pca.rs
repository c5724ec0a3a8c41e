use nalgebra::{DMatrix, DVector};

use crate::attribute::FeatureMatrix;
use crate::error::{invalid, shape, Result};

/// Principal directions of a mean-centred feature matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct PcaModel {
    pub mean: DVector<f64>,
    /// `D x d`, orthonormal columns in order of decreasing variance.
    pub basis: DMatrix<f64>,
    pub explained_variance: Vec<f64>,
}

impl PcaModel {
    pub fn from_parts(mean: DVector<f64>, basis: DMatrix<f64>, explained_variance: Vec<f64>) -> Result<Self> {
        if basis.nrows() != mean.len() {
            return Err(shape(format!(
                "PCA basis has {} rows but mean has {} entries",
                basis.nrows(),
                mean.len()
            )));
        }
        if basis.ncols() == 0 || basis.ncols() > basis.nrows() {
            return Err(invalid(format!(
                "PCA basis must have between 1 and {} columns, got {}",
                basis.nrows(),
                basis.ncols()
            )));
        }
        if explained_variance.len() != basis.ncols() {
            return Err(shape("explained variance length differs from basis width"));
        }
        Ok(Self {
            mean,
            basis,
            explained_variance,
        })
    }

    pub fn input_dims(&self) -> usize {
        self.mean.len()
    }

    pub fn output_dims(&self) -> usize {
        self.basis.ncols()
    }
}

/// Number of kept components for a fraction of `dims`, rounded up.
pub fn kept_components(dims: usize, keep_fraction: f64) -> usize {
    // Guard against 0.6 * 10 landing a hair above 6.
    (((keep_fraction * dims as f64) - 1e-9).ceil() as usize).clamp(1, dims)
}

/// PCA keeping `ceil(keep_fraction * D)` directions.
pub fn fit_pca(f: &FeatureMatrix, keep_fraction: f64) -> Result<PcaModel> {
    if !(keep_fraction > 0.0 && keep_fraction <= 1.0) {
        return Err(invalid(format!("keep_fraction must be in (0, 1], got {keep_fraction}")));
    }
    fit_pca_components(f, kept_components(f.dims(), keep_fraction))
}

/// PCA keeping exactly `components` directions.
pub fn fit_pca_components(f: &FeatureMatrix, components: usize) -> Result<PcaModel> {
    let (n, dims) = (f.n(), f.dims());
    if n < 2 {
        return Err(invalid(format!("PCA needs at least 2 instances, got {n}")));
    }
    if components == 0 || components > dims {
        return Err(invalid(format!(
            "cannot keep {components} components of {dims}-dimensional data"
        )));
    }
    let m = f.matrix();
    let mean = m.row_mean().transpose();
    let mut centred = m.clone();
    for mut row in centred.row_iter_mut() {
        row -= mean.transpose();
    }
    let cov = centred.tr_mul(&centred) / (n - 1) as f64;
    let eig = cov.symmetric_eigen();

    let mut order: Vec<usize> = (0..dims).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));

    let mut basis = DMatrix::zeros(dims, components);
    let mut explained_variance = Vec::with_capacity(components);
    for (c, &idx) in order.iter().take(components).enumerate() {
        let mut v = eig.eigenvectors.column(idx).into_owned();
        // Deterministic orientation: largest-magnitude entry positive.
        let pivot = v.iamax();
        if v[pivot] < 0.0 {
            v.neg_mut();
        }
        basis.set_column(c, &v);
        explained_variance.push(eig.eigenvalues[idx].max(0.0));
    }
    PcaModel::from_parts(mean, basis, explained_variance)
}

/// Projects rows onto the kept directions: `(F - mean) * basis`.
pub fn apply_pca(model: &PcaModel, f: &FeatureMatrix) -> Result<FeatureMatrix> {
    if f.dims() != model.input_dims() {
        return Err(shape(format!(
            "PCA expects {} dimensions, features have {}",
            model.input_dims(),
            f.dims()
        )));
    }
    let mut centred = f.matrix().clone();
    for mut row in centred.row_iter_mut() {
        row -= model.mean.transpose();
    }
    FeatureMatrix::new(centred * &model.basis)
}
