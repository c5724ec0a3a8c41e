//! Max-margin binary coder.
//!
//! A block-coordinate surrogate for category-driven code learning: codes start
//! as random-hyperplane bits, then each epoch
//!
//! 1. fits one-vs-rest hinge classifiers that predict the category from the codes,
//! 2. refits every bit's hyperplane to reproduce the current code bits from the features,
//! 3. greedily flips training bits whose flip lowers that sample's category hinge loss.
//!
//! All hinge fits use per-sample subgradient steps with `lr / epoch` step size
//! and a seeded visiting order, so training is deterministic per seed.

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;

use crate::attribute::{seeded_rng, sign, AttributeMatrix, FeatureMatrix, LabelVector};
use crate::discovery::lsh::gaussian_unit_rows;
use crate::error::{invalid, shape, Result};

const PASSES_PER_FIT: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MmcHyperparams {
    pub lambda: f64,
    pub epochs: usize,
    pub learning_rate: f64,
}

impl Default for MmcHyperparams {
    fn default() -> Self {
        Self {
            lambda: 1e-4,
            epochs: 20,
            learning_rate: 0.1,
        }
    }
}

impl MmcHyperparams {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(invalid(format!("lambda must be non-negative, got {}", self.lambda)));
        }
        if self.epochs == 0 {
            return Err(invalid("epochs must be at least 1"));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(invalid(format!(
                "learning rate must be positive, got {}",
                self.learning_rate
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MmcModel {
    /// `K x (D + 1)`: weights followed by the bias.
    pub hyperplanes: DMatrix<f64>,
    pub seed: u64,
    pub hyperparams: MmcHyperparams,
}

/// Category hinge loss before and after each greedy flip phase.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MmcTrace {
    pub flip_phases: Vec<FlipPhase>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlipPhase {
    pub loss_before: f64,
    pub loss_after: f64,
    pub flips: usize,
}

impl MmcModel {
    pub fn from_parts(hyperplanes: DMatrix<f64>, seed: u64, hyperparams: MmcHyperparams) -> Result<Self> {
        if hyperplanes.nrows() == 0 || hyperplanes.ncols() < 2 {
            return Err(invalid("max-margin model needs at least one bit and one dimension"));
        }
        if hyperplanes.iter().any(|w| !w.is_finite()) {
            return Err(invalid("max-margin hyperplanes must be finite"));
        }
        hyperparams.validate()?;
        Ok(Self {
            hyperplanes,
            seed,
            hyperparams,
        })
    }

    pub fn dims(&self) -> usize {
        self.hyperplanes.ncols() - 1
    }

    pub fn bits(&self) -> usize {
        self.hyperplanes.nrows()
    }

    pub fn encode(&self, f: &FeatureMatrix) -> Result<AttributeMatrix> {
        if f.dims() != self.dims() {
            return Err(shape(format!(
                "max-margin model expects {} dimensions, features have {}",
                self.dims(),
                f.dims()
            )));
        }
        let d = self.dims();
        let weights = self.hyperplanes.columns(0, d);
        let bias = self.hyperplanes.column(d);
        let mut responses = f.matrix() * weights.transpose();
        for mut row in responses.row_iter_mut() {
            row += bias.transpose();
        }
        let data = responses.iter().map(|&x| sign(x)).collect();
        AttributeMatrix::from_column_major(f.n(), self.bits(), data)
    }
}

fn hinge(margin: f64) -> f64 {
    (1.0 - margin).max(0.0)
}

/// `w . [x, 1]` for a row `w` of length `x.len() + 1`.
fn affine(w: &[f64], x: &[f64]) -> f64 {
    let d = x.len();
    w[..d].iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + w[d]
}

/// One regularized hinge subgradient step on the augmented input `[x, 1]`.
fn hinge_step(w: &mut [f64], x: &[f64], target: f64, eta: f64, lambda: f64) {
    let d = x.len();
    let margin = target * affine(w, x);
    for wi in &mut w[..d] {
        *wi *= 1.0 - eta * lambda;
    }
    if margin < 1.0 {
        for (wi, &xi) in w[..d].iter_mut().zip(x) {
            *wi += eta * target * xi;
        }
        w[d] += eta * target;
    }
}

struct Trainer<'a> {
    rows: Vec<Vec<f64>>,
    classes: Vec<usize>,
    class_count: usize,
    hp: &'a MmcHyperparams,
    rng: rand_chacha::ChaCha8Rng,
}

impl Trainer<'_> {
    fn order(&mut self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.rows.len()).collect();
        idx.shuffle(&mut self.rng);
        idx
    }

    fn fit_category(&mut self, codes: &[Vec<f64>], category: &mut [Vec<f64>], eta: f64) {
        for _ in 0..PASSES_PER_FIT {
            for i in self.order() {
                for (c, v) in category.iter_mut().enumerate() {
                    let y = if self.classes[i] == c { 1.0 } else { -1.0 };
                    hinge_step(v, &codes[i], y, eta, self.hp.lambda);
                }
            }
        }
    }

    fn fit_bits(&mut self, codes: &[Vec<f64>], planes: &mut [Vec<f64>], eta: f64) {
        for _ in 0..PASSES_PER_FIT {
            for i in self.order() {
                for (k, w) in planes.iter_mut().enumerate() {
                    hinge_step(w, &self.rows[i], codes[i][k], eta, self.hp.lambda);
                }
            }
        }
    }

    fn row_loss(&self, code: &[f64], class: usize, category: &[Vec<f64>]) -> f64 {
        category
            .iter()
            .enumerate()
            .map(|(c, v)| {
                let y = if class == c { 1.0 } else { -1.0 };
                hinge(y * affine(v, code))
            })
            .sum()
    }

    fn total_loss(&self, codes: &[Vec<f64>], category: &[Vec<f64>]) -> f64 {
        codes
            .iter()
            .zip(&self.classes)
            .map(|(code, &c)| self.row_loss(code, c, category))
            .sum()
    }

    fn flip_phase(&self, codes: &mut [Vec<f64>], category: &[Vec<f64>]) -> FlipPhase {
        let loss_before = self.total_loss(codes, category);
        let mut flips = 0;
        for (i, code) in codes.iter_mut().enumerate() {
            let class = self.classes[i];
            let mut current = self.row_loss(code, class, category);
            for k in 0..code.len() {
                code[k] = -code[k];
                let flipped = self.row_loss(code, class, category);
                if flipped < current {
                    current = flipped;
                    flips += 1;
                } else {
                    code[k] = -code[k];
                }
            }
        }
        FlipPhase {
            loss_before,
            loss_after: self.total_loss(codes, category),
            flips,
        }
    }
}

pub fn train_mmc(
    f: &FeatureMatrix,
    y: &LabelVector,
    bits: usize,
    hyperparams: MmcHyperparams,
    seed: u64,
) -> Result<MmcModel> {
    train_mmc_traced(f, y, bits, hyperparams, seed).map(|(m, _)| m)
}

pub fn train_mmc_traced(
    f: &FeatureMatrix,
    y: &LabelVector,
    bits: usize,
    hyperparams: MmcHyperparams,
    seed: u64,
) -> Result<(MmcModel, MmcTrace)> {
    hyperparams.validate()?;
    if bits == 0 {
        return Err(invalid("max-margin coder needs at least one bit"));
    }
    if y.len() != f.n() {
        return Err(shape(format!("{} labels for {} instances", y.len(), f.n())));
    }
    let distinct = y.classes();
    if distinct.len() < 2 {
        return Err(invalid("max-margin coder needs at least 2 classes"));
    }
    if f.n() < 2 * distinct.len() {
        return Err(invalid(format!(
            "max-margin coder needs at least {} instances for {} classes, got {}",
            2 * distinct.len(),
            distinct.len(),
            f.n()
        )));
    }
    let classes: Vec<usize> = y
        .labels()
        .iter()
        .map(|l| distinct.binary_search(l).expect("label is in class list"))
        .collect();

    let m = f.matrix();
    let dims = f.dims();
    let rows: Vec<Vec<f64>> = m.row_iter().map(|r| r.iter().copied().collect()).collect();

    // Random hyperplanes through the data mean.
    let mean: DVector<f64> = m.row_mean().transpose();
    let init = gaussian_unit_rows(bits, dims, seed);
    let mut planes: Vec<Vec<f64>> = init
        .row_iter()
        .map(|w| {
            let mut p: Vec<f64> = w.iter().copied().collect();
            p.push(-w.dot(&mean.transpose()));
            p
        })
        .collect();
    let mut codes: Vec<Vec<f64>> = rows
        .iter()
        .map(|x| planes.iter().map(|w| f64::from(sign(affine(w, x)))).collect())
        .collect();

    let mut trainer = Trainer {
        rows,
        classes,
        class_count: distinct.len(),
        hp: &hyperparams,
        rng: seeded_rng(seed.wrapping_add(0x5DEE_CE66)),
    };
    let mut category = vec![vec![0.0; bits + 1]; trainer.class_count];
    let mut trace = MmcTrace::default();

    for epoch in 1..=hyperparams.epochs {
        let eta = hyperparams.learning_rate / epoch as f64;
        trainer.fit_category(&codes, &mut category, eta);
        trainer.fit_bits(&codes, &mut planes, eta);
        trace.flip_phases.push(trainer.flip_phase(&mut codes, &category));
    }
    // Final refit so the hyperplanes track the last flipped codes.
    let eta = hyperparams.learning_rate / (hyperparams.epochs + 1) as f64;
    trainer.fit_bits(&codes, &mut planes, eta);

    let hyperplanes = DMatrix::from_fn(bits, dims + 1, |k, j| planes[k][j]);
    let model = MmcModel::from_parts(hyperplanes, seed, hyperparams)?;
    Ok((model, trace))
}
