//! Spectral hashing with the analytic eigenfunctions of a uniform distribution.
//!
//! Data is rotated onto its principal directions, each direction is treated as
//! uniform on its observed range `[a, b]`, and the 1-D Laplacian eigenfunctions
//! `sin(pi/2 + k pi (x - a) / (b - a))` are ranked by their analytic
//! eigenvalue `1 - exp(-(eps^2 / 2) (k pi / (b - a))^2)` with `eps = 1`. The
//! `K` smallest become the bits.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;

use crate::attribute::{sign, AttributeMatrix, FeatureMatrix};
use crate::discovery::pca::{apply_pca, fit_pca_components, PcaModel};
use crate::error::{invalid, shape, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShMode {
    pub direction: usize,
    pub harmonic: usize,
    pub eigenvalue: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShModel {
    pub pca: PcaModel,
    /// `(min, max)` of the projected training data per principal direction.
    pub ranges: Vec<(f64, f64)>,
    pub modes: Vec<ShMode>,
}

fn frequency(harmonic: usize, range: (f64, f64)) -> f64 {
    harmonic as f64 * PI / (range.1 - range.0)
}

fn analytic_eigenvalue(omega: f64) -> f64 {
    -(-0.5 * omega * omega).exp_m1()
}

fn is_degenerate(range: (f64, f64)) -> bool {
    let scale = range.0.abs().max(range.1.abs()).max(1.0);
    range.1 - range.0 <= 1e-12 * scale
}

impl ShModel {
    pub fn from_parts(pca: PcaModel, ranges: Vec<(f64, f64)>, modes: Vec<ShMode>) -> Result<Self> {
        if ranges.len() != pca.output_dims() {
            return Err(shape(format!(
                "{} ranges for {} principal directions",
                ranges.len(),
                pca.output_dims()
            )));
        }
        if modes.is_empty() {
            return Err(invalid("spectral hashing model needs at least one mode"));
        }
        for m in &modes {
            if m.direction >= ranges.len() || m.harmonic == 0 || is_degenerate(ranges[m.direction]) {
                return Err(invalid(format!(
                    "invalid mode (direction {}, harmonic {})",
                    m.direction, m.harmonic
                )));
            }
        }
        Ok(Self { pca, ranges, modes })
    }

    pub fn dims(&self) -> usize {
        self.pca.input_dims()
    }

    pub fn bits(&self) -> usize {
        self.modes.len()
    }

    pub fn encode(&self, f: &FeatureMatrix) -> Result<AttributeMatrix> {
        if f.dims() != self.dims() {
            return Err(shape(format!(
                "spectral hashing model expects {} dimensions, features have {}",
                self.dims(),
                f.dims()
            )));
        }
        let projected = apply_pca(&self.pca, f)?;
        let p = projected.matrix();
        let mut data = Vec::with_capacity(f.n() * self.bits());
        for mode in &self.modes {
            let (a, b) = self.ranges[mode.direction];
            let k = mode.harmonic as f64;
            for i in 0..f.n() {
                let x = p[(i, mode.direction)];
                data.push(sign((FRAC_PI_2 + k * PI * (x - a) / (b - a)).sin()));
            }
        }
        AttributeMatrix::from_column_major(f.n(), self.bits(), data)
    }
}

pub fn train_sh(f: &FeatureMatrix, bits: usize) -> Result<ShModel> {
    if bits == 0 {
        return Err(invalid("spectral hashing needs at least one bit"));
    }
    if f.n() < 2 {
        return Err(invalid(format!("spectral hashing needs at least 2 instances, got {}", f.n())));
    }
    let pca = fit_pca_components(f, bits.min(f.dims()))?;
    let projected = apply_pca(&pca, f)?;
    let ranges: Vec<(f64, f64)> = projected
        .matrix()
        .column_iter()
        .map(|c| (c.min(), c.max()))
        .collect();

    let mut candidates: Vec<(f64, usize, usize)> = Vec::new();
    for (direction, &range) in ranges.iter().enumerate() {
        if is_degenerate(range) {
            continue;
        }
        for harmonic in 1..=bits {
            candidates.push((frequency(harmonic, range), direction, harmonic));
        }
    }
    if candidates.is_empty() {
        return Err(invalid("every principal direction has zero range"));
    }
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    if candidates.len() < bits {
        return Err(invalid(format!(
            "only {} spectral modes available for {bits} bits",
            candidates.len()
        )));
    }
    let modes = candidates
        .into_iter()
        .take(bits)
        .map(|(omega, direction, harmonic)| ShMode {
            direction,
            harmonic,
            eigenvalue: analytic_eigenvalue(omega),
        })
        .collect();
    ShModel::from_parts(pca, ranges, modes)
}
