//! Distance between a discovered attribute set and the Meaningful Subspace.
//!
//! Every discovered attribute `z` is reconstructed from the meaningful
//! attributes (columns of `A`) and the squared residual `||A r - z||^2` is
//! averaged over the discovered set. The plain form leaves `r` unconstrained;
//! the convex form restricts every column of `R` to the probability simplex,
//! i.e. measures the distance to the convex hull of the meaningful attributes.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::attribute::{AttributeMatrix, AttributeVector};
use crate::error::{invalid, shape, Result};
use crate::simplex::{HullSolver, SolverConfig};

/// Human-labelled attributes, one per column of `A`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeaningfulSubspace {
    attributes: AttributeMatrix,
}

impl MeaningfulSubspace {
    pub fn new(attributes: AttributeMatrix) -> Self {
        Self { attributes }
    }

    pub fn n(&self) -> usize {
        self.attributes.n()
    }

    pub fn j(&self) -> usize {
        self.attributes.k()
    }

    pub fn attributes(&self) -> &AttributeMatrix {
        &self.attributes
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        self.attributes.to_matrix()
    }
}

impl From<AttributeMatrix> for MeaningfulSubspace {
    fn from(attributes: AttributeMatrix) -> Self {
        Self::new(attributes)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DistanceMode {
    Plain,
    Cvx,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructionResult {
    /// `J x K`; column `k` reconstructs discovered attribute `k`.
    pub reconstruction: DMatrix<f64>,
    /// Squared residual per discovered attribute.
    pub per_attribute_residuals: Vec<f64>,
    pub mean_distance: f64,
    /// `mean_distance / N`.
    pub normalized_distance: f64,
    pub mode: DistanceMode,
    pub converged: Vec<bool>,
    pub iterations: Vec<usize>,
}

impl ReconstructionResult {
    fn assemble(
        n: usize,
        j: usize,
        mode: DistanceMode,
        columns: Vec<(DVector<f64>, f64, bool, usize)>,
    ) -> Self {
        let k = columns.len();
        let mut reconstruction = DMatrix::zeros(j, k);
        let mut per_attribute_residuals = Vec::with_capacity(k);
        let mut converged = Vec::with_capacity(k);
        let mut iterations = Vec::with_capacity(k);
        for (c, (r, res, conv, it)) in columns.into_iter().enumerate() {
            reconstruction.set_column(c, &r);
            per_attribute_residuals.push(res);
            converged.push(conv);
            iterations.push(it);
        }
        let mean_distance = per_attribute_residuals.iter().sum::<f64>() / k as f64;
        Self {
            reconstruction,
            per_attribute_residuals,
            mean_distance,
            normalized_distance: mean_distance / n as f64,
            mode,
            converged,
            iterations,
        }
    }

    pub fn all_converged(&self) -> bool {
        self.converged.iter().all(|&c| c)
    }
}

fn to_target(bits: &[i8]) -> DVector<f64> {
    DVector::from_iterator(bits.len(), bits.iter().map(|&b| f64::from(b)))
}

fn check_rows(s: &MeaningfulSubspace, n: usize) -> Result<()> {
    if s.n() != n {
        return Err(shape(format!(
            "meaningful subspace has {} instances, discovered attributes have {n}",
            s.n()
        )));
    }
    Ok(())
}

/// Minimum-norm least-squares operator `A^+` with the usual rank cutoff.
struct LeastSquares {
    design: DMatrix<f64>,
    pinv: DMatrix<f64>,
}

impl LeastSquares {
    fn new(design: DMatrix<f64>) -> Result<Self> {
        let (n, j) = design.shape();
        let svd = design.clone().svd(true, true);
        let sigma_max = svd.singular_values.max();
        let cutoff = n.max(j) as f64 * f64::EPSILON * sigma_max;
        let pinv = svd
            .pseudo_inverse(cutoff)
            .map_err(|e| crate::Error::Numeric(e.to_string()))?;
        Ok(Self { design, pinv })
    }

    fn solve(&self, z: &DVector<f64>) -> (DVector<f64>, f64) {
        let r = &self.pinv * z;
        let residual = (&self.design * &r - z).norm_squared();
        (r, residual)
    }
}

/// Unconstrained reconstruction of one attribute.
pub fn reconstruct_ls(
    s: &MeaningfulSubspace,
    z: &AttributeVector,
) -> Result<(DVector<f64>, f64)> {
    check_rows(s, z.len())?;
    Ok(LeastSquares::new(s.matrix())?.solve(&to_target(z.bits())))
}

/// Average unconstrained reconstruction error of `d` from `s`.
pub fn distance_plain(s: &MeaningfulSubspace, d: &AttributeMatrix) -> Result<ReconstructionResult> {
    check_rows(s, d.n())?;
    let ls = LeastSquares::new(s.matrix())?;
    let columns = d
        .columns()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|col| {
            let (r, res) = ls.solve(&to_target(col));
            (r, res, true, 0)
        })
        .collect();
    Ok(ReconstructionResult::assemble(d.n(), s.j(), DistanceMode::Plain, columns))
}

/// Simplex-constrained reconstruction of one attribute.
pub fn reconstruct_cvx(
    s: &MeaningfulSubspace,
    z: &AttributeVector,
    cfg: &SolverConfig,
) -> Result<crate::simplex::SimplexFit> {
    check_rows(s, z.len())?;
    let solver = HullSolver::new(s.matrix(), *cfg)?;
    Ok(solver.solve(&to_target(z.bits())))
}

/// Average squared distance from each column of `d` to the convex hull of `s`.
pub fn distance_cvx(
    s: &MeaningfulSubspace,
    d: &AttributeMatrix,
    cfg: &SolverConfig,
) -> Result<ReconstructionResult> {
    check_rows(s, d.n())?;
    let solver = HullSolver::new(s.matrix(), *cfg)?;
    let columns = d
        .columns()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|col| {
            let fit = solver.solve(&to_target(col));
            (fit.coefficients, fit.residual, fit.converged, fit.iterations)
        })
        .collect();
    Ok(ReconstructionResult::assemble(d.n(), s.j(), DistanceMode::Cvx, columns))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankedMethod {
    pub name: String,
    pub mean_distance: f64,
}

/// Orders methods by convex-hull distance, closest first; ties by name.
pub fn rank_methods(
    entries: &[(String, AttributeMatrix)],
    s: &MeaningfulSubspace,
    cfg: &SolverConfig,
) -> Result<Vec<RankedMethod>> {
    if entries.is_empty() {
        return Err(invalid("no methods to rank"));
    }
    let mut ranked = entries
        .iter()
        .map(|(name, d)| {
            Ok(RankedMethod {
                name: name.clone(),
                mean_distance: distance_cvx(s, d, cfg)?.mean_distance,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    ranked.sort_by(|a, b| {
        a.mean_distance
            .total_cmp(&b.mean_distance)
            .then_with(|| a.name.cmp(&b.name))
    });
    Ok(ranked)
}

/// Sorts pre-computed scores the same way [`rank_methods`] does.
pub fn rank_scores(mut scores: Vec<RankedMethod>) -> Vec<RankedMethod> {
    scores.sort_by(|a, b| {
        a.mean_distance
            .total_cmp(&b.mean_distance)
            .then_with(|| a.name.cmp(&b.name))
    });
    scores
}
