//! Euclidean projection onto the probability simplex and a projected-gradient
//! solver for `min ||A r - z||^2` subject to `r >= 0`, `sum(r) = 1`.

use nalgebra::{DMatrix, DVector};

use crate::error::{invalid, Error, Result};

/// Projected-gradient settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub max_iterations: usize,
    /// Stop once `|f_prev - f_next| <= objective_tolerance * max(f_prev, 1)`.
    pub objective_tolerance: f64,
    pub step_rule: StepRule,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepRule {
    /// Constant step `1 / L`, `L` the largest eigenvalue of the Gram matrix.
    Lipschitz,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iterations: 10_000,
            objective_tolerance: 1e-8,
            step_rule: StepRule::Lipschitz,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(invalid("max_iterations must be at least 1"));
        }
        if !(self.objective_tolerance > 0.0 && self.objective_tolerance.is_finite()) {
            return Err(invalid(format!(
                "objective_tolerance must be positive and finite, got {}",
                self.objective_tolerance
            )));
        }
        Ok(())
    }
}

/// Projection of `v` onto `{w : w >= 0, sum(w) = 1}` by sorting and thresholding.
pub fn project_simplex(v: &[f64]) -> Result<Vec<f64>> {
    if v.is_empty() {
        return Err(invalid("cannot project an empty vector onto the simplex"));
    }
    if let Some(i) = v.iter().position(|x| !x.is_finite()) {
        return Err(Error::NonFinite { row: i, col: 0 });
    }
    Ok(project_simplex_unchecked(v))
}

pub(crate) fn project_simplex_unchecked(v: &[f64]) -> Vec<f64> {
    let mut sorted = v.to_vec();
    sorted.sort_unstable_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (j, &u) in sorted.iter().enumerate() {
        cumulative += u;
        let candidate = (cumulative - 1.0) / (j + 1) as f64;
        if u - candidate > 0.0 {
            theta = candidate;
        }
    }
    v.iter().map(|&x| (x - theta).max(0.0)).collect()
}

/// Outcome of one simplex-constrained fit.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexFit {
    pub coefficients: DVector<f64>,
    pub residual: f64,
    pub converged: bool,
    pub iterations: usize,
}

/// Projected gradient descent over the simplex for a fixed design matrix.
///
/// The Gram matrix and its step size are computed once so the solver can be
/// reused for every column of a discovered attribute set.
#[derive(Debug, Clone)]
pub struct HullSolver {
    design: DMatrix<f64>,
    gram: DMatrix<f64>,
    lipschitz: f64,
    config: SolverConfig,
}

impl HullSolver {
    pub fn new(design: DMatrix<f64>, config: SolverConfig) -> Result<Self> {
        config.validate()?;
        if design.ncols() == 0 || design.nrows() == 0 {
            return Err(invalid("design matrix must be non-empty"));
        }
        let gram = design.transpose() * &design;
        let lipschitz = largest_eigenvalue(&gram);
        if !(lipschitz.is_finite() && lipschitz > 0.0) {
            return Err(Error::Numeric(format!(
                "Gram matrix has non-positive spectral bound {lipschitz}"
            )));
        }
        Ok(Self {
            design,
            gram,
            lipschitz,
            config,
        })
    }

    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    pub fn solve(&self, target: &DVector<f64>) -> SimplexFit {
        let j = self.gram.nrows();
        let b = self.design.tr_mul(target);
        let zz = target.norm_squared();
        let objective = |r: &DVector<f64>, gr: &DVector<f64>| r.dot(gr) - 2.0 * r.dot(&b) + zz;

        // Start from the best vertex or the barycentre, whichever fits better.
        let mut r = DVector::from_element(j, 1.0 / j as f64);
        let mut gr = &self.gram * &r;
        let mut f = objective(&r, &gr);
        for v in 0..j {
            let fv = self.gram[(v, v)] - 2.0 * b[v] + zz;
            if fv < f {
                r = DVector::zeros(j);
                r[v] = 1.0;
                gr = self.gram.column(v).into_owned();
                f = fv;
            }
        }

        let mut step = 1.0 / self.lipschitz;
        let mut converged = false;
        let mut iterations = 0;
        while iterations < self.config.max_iterations {
            iterations += 1;
            let grad = &gr - &b;
            let trial: Vec<f64> = r.iter().zip(grad.iter()).map(|(ri, gi)| ri - step * gi).collect();
            let next = DVector::from_vec(project_simplex_unchecked(&trial));
            let next_gr = &self.gram * &next;
            let f_next = objective(&next, &next_gr);
            if f_next > f + 1e-12 * f.abs().max(1.0) {
                // Power iteration underestimated the spectral bound.
                step *= 0.5;
                continue;
            }
            debug_assert!(f_next <= f + 1e-12 * f.abs().max(1.0));
            let change = (f - f_next).abs();
            let stalled = next == r;
            r = next;
            gr = next_gr;
            let scale = f.abs().max(1.0);
            f = f_next;
            if stalled || change <= self.config.objective_tolerance * scale {
                converged = true;
                break;
            }
        }

        let residual = (&self.design * &r - target).norm_squared();
        SimplexFit {
            coefficients: r,
            residual,
            converged,
            iterations,
        }
    }
}

/// Largest eigenvalue of a symmetric positive semidefinite matrix by power iteration.
pub(crate) fn largest_eigenvalue(sym: &DMatrix<f64>) -> f64 {
    let n = sym.nrows();
    let mut v = DVector::from_fn(n, |i, _| 1.0 + i as f64 / (n as f64 + 1.0));
    v /= v.norm();
    let mut lambda = 0.0;
    for _ in 0..1000 {
        let w = sym * &v;
        let next = v.dot(&w);
        let norm = w.norm();
        if norm == 0.0 {
            return sym.diagonal().max();
        }
        v = w / norm;
        if (next - lambda).abs() <= 1e-13 * next.abs() {
            lambda = next;
            break;
        }
        lambda = next;
    }
    lambda
}
