//! Validation protocol for the meaningfulness distance.
//!
//! A human-labelled set is split in two: one half plays the Meaningful
//! Subspace and the other half plays a "discovered" set that is meaningful by
//! construction. Random attributes give the non-meaningful reference, and the
//! noise curve tracks the distance as random attributes are appended to a
//! discovered set.

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::Serialize;

use crate::attribute::{concat, random_attribute_set, seeded_rng, AttributeMatrix};
use crate::distance::{distance_cvx, MeaningfulSubspace};
use crate::error::{invalid, shape, Result};
use crate::simplex::SolverConfig;

pub const MEANINGFUL_ROW: &str = "MeaningfulAttributeSet";
pub const NON_MEANINGFUL_ROW: &str = "NonMeaningfulAttributeSet";

/// Stride between noise levels in the per-trial seed schedule.
pub const NOISE_SEED_STRIDE: u64 = 10_007;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitProtocol {
    pub seed: u64,
    pub left_fraction: f64,
}

impl Default for SplitProtocol {
    fn default() -> Self {
        Self {
            seed: 0,
            left_fraction: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Split {
    pub left: MeaningfulSubspace,
    pub right: AttributeMatrix,
    pub left_columns: Vec<usize>,
    pub right_columns: Vec<usize>,
}

/// Size of the left side: `ceil(fraction * j)`, kept within `[1, j - 1]`.
pub fn left_size(j: usize, fraction: f64) -> usize {
    let raw = ((fraction * j as f64) - 1e-9).ceil().max(0.0) as usize;
    raw.clamp(1, j - 1)
}

pub fn split_meaningful(s: &MeaningfulSubspace, proto: &SplitProtocol) -> Result<Split> {
    let j = s.j();
    if j < 2 {
        return Err(invalid(format!("cannot split a meaningful set of {j} attribute(s)")));
    }
    if !(proto.left_fraction > 0.0 && proto.left_fraction < 1.0) {
        return Err(invalid(format!(
            "left_fraction must be in (0, 1), got {}",
            proto.left_fraction
        )));
    }
    let mut order: Vec<usize> = (0..j).collect();
    order.shuffle(&mut seeded_rng(proto.seed));
    let cut = left_size(j, proto.left_fraction);
    let (left_columns, right_columns) = (order[..cut].to_vec(), order[cut..].to_vec());
    Ok(Split {
        left: MeaningfulSubspace::new(s.attributes().select_columns(&left_columns)?),
        right: s.attributes().select_columns(&right_columns)?,
        left_columns,
        right_columns,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreRow {
    pub name: String,
    pub attributes: usize,
    pub mean_distance: f64,
    pub normalized_distance: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SplitReport {
    pub seed: u64,
    pub left_fraction: f64,
    pub instances: usize,
    pub left_columns: Vec<usize>,
    pub right_columns: Vec<usize>,
    pub random_seed: u64,
    /// Meaningful row, non-meaningful row, then one row per method in input order.
    pub rows: Vec<ScoreRow>,
    /// Row names ordered by ascending distance, ties by name.
    pub ranking: Vec<String>,
}

impl SplitReport {
    pub fn row(&self, name: &str) -> Option<&ScoreRow> {
        self.rows.iter().find(|r| r.name == name)
    }
}

fn score(name: &str, s: &MeaningfulSubspace, d: &AttributeMatrix, cfg: &SolverConfig) -> Result<ScoreRow> {
    let res = distance_cvx(s, d, cfg)?;
    Ok(ScoreRow {
        name: name.to_string(),
        attributes: d.k(),
        mean_distance: res.mean_distance,
        normalized_distance: res.normalized_distance,
        converged: res.all_converged(),
    })
}

pub fn run_split_validation(
    s: &MeaningfulSubspace,
    methods: &[(String, AttributeMatrix)],
    proto: &SplitProtocol,
    cfg: &SolverConfig,
) -> Result<SplitReport> {
    if let Some((name, m)) = methods.iter().find(|(_, m)| m.n() != s.n()) {
        return Err(shape(format!(
            "method {name} covers {} instances, meaningful set covers {}",
            m.n(),
            s.n()
        )));
    }
    let split = split_meaningful(s, proto)?;
    let random_k = methods
        .iter()
        .map(|(_, m)| m.k())
        .max()
        .unwrap_or(split.right.k());
    let random_seed = proto.seed.wrapping_add(1);
    let random = random_attribute_set(s.n(), random_k, random_seed)?;

    let mut rows = vec![
        score(MEANINGFUL_ROW, &split.left, &split.right, cfg)?,
        score(NON_MEANINGFUL_ROW, &split.left, &random, cfg)?,
    ];
    for (name, m) in methods {
        rows.push(score(name, &split.left, m, cfg)?);
    }
    let mut ranking: Vec<&ScoreRow> = rows.iter().collect();
    ranking.sort_by(|a, b| a.mean_distance.total_cmp(&b.mean_distance).then_with(|| a.name.cmp(&b.name)));
    let ranking = ranking.into_iter().map(|r| r.name.clone()).collect();

    Ok(SplitReport {
        seed: proto.seed,
        left_fraction: proto.left_fraction,
        instances: s.n(),
        left_columns: split.left_columns,
        right_columns: split.right_columns,
        random_seed,
        rows,
        ranking,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoiseCurve {
    pub counts: Vec<usize>,
    pub distances: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
}

/// Seed for trial `trial` at noise level `t`.
pub fn noise_seed(seed: u64, t: usize, trial: usize) -> u64 {
    seed.wrapping_add((t as u64).wrapping_mul(NOISE_SEED_STRIDE))
        .wrapping_add(trial as u64)
}

pub fn run_noise_curve(
    d: &AttributeMatrix,
    s: &MeaningfulSubspace,
    max_noise: usize,
    step: usize,
    trials: usize,
    seed: u64,
    cfg: &SolverConfig,
) -> Result<NoiseCurve> {
    if step == 0 || max_noise < step || trials == 0 {
        return Err(invalid(format!(
            "noise grid needs step >= 1, max_noise >= step and trials >= 1 \
             (got step={step}, max_noise={max_noise}, trials={trials})"
        )));
    }
    if d.n() != s.n() {
        return Err(shape(format!(
            "discovered set covers {} instances, meaningful set covers {}",
            d.n(),
            s.n()
        )));
    }
    let counts: Vec<usize> = (0..=max_noise / step).map(|i| i * step).collect();
    let base = distance_cvx(s, d, cfg)?.mean_distance;

    let cells: Vec<(usize, usize)> = counts[1..]
        .iter()
        .flat_map(|&t| (0..trials).map(move |trial| (t, trial)))
        .collect();
    let values = cells
        .par_iter()
        .map(|&(t, trial)| {
            let noise = random_attribute_set(d.n(), t, noise_seed(seed, t, trial))?;
            Ok(distance_cvx(s, &concat(d, &noise)?, cfg)?.mean_distance)
        })
        .collect::<Result<Vec<f64>>>()?;

    let mut distances = vec![base];
    distances.extend(
        values
            .chunks_exact(trials)
            .map(|chunk| chunk.iter().sum::<f64>() / trials as f64),
    );
    Ok(NoiseCurve {
        counts,
        distances,
        trials,
        seed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HitCost {
    pub ours: usize,
    pub traditional: usize,
    pub ratio: f64,
    /// Set when labelling attributes costs more HITs than labelling instances.
    pub exceeds_traditional: bool,
}

/// Labelling cost of naming `j` attributes versus keywording `n` instances.
pub fn hit_cost_analysis(j: usize, n: usize) -> Result<HitCost> {
    if j == 0 || n == 0 {
        return Err(invalid(format!("need J >= 1 and N >= 1, got J={j}, N={n}")));
    }
    Ok(HitCost {
        ours: j,
        traditional: n,
        ratio: j as f64 / n as f64,
        exceeds_traditional: j > n,
    })
}
