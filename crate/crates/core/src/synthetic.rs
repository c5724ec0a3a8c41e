//! Synthetic attribute sets with planted shared structure.

use rand::seq::index::sample;
use rand::Rng;

use crate::attribute::{seeded_rng, sign, AttributeMatrix};
use crate::error::{invalid, Result};

/// `j` attributes over `n` instances that share a small latent basis.
///
/// `max(2, ceil(j / 5))` latent attributes are drawn as fair coins. Every
/// output column is the sign of a random convex combination of one to three
/// latent attributes, after which each bit is flipped independently with
/// probability `flip_rate`.
pub fn planted_meaningful_set(n: usize, j: usize, flip_rate: f64, seed: u64) -> Result<AttributeMatrix> {
    if n == 0 || j == 0 {
        return Err(invalid(format!("need n >= 1 and j >= 1, got n={n}, j={j}")));
    }
    if !(0.0..=1.0).contains(&flip_rate) {
        return Err(invalid(format!("flip_rate must be in [0, 1], got {flip_rate}")));
    }
    let mut rng = seeded_rng(seed);
    let latent_count = j.div_ceil(5).max(2);
    let latent: Vec<Vec<f64>> = (0..latent_count)
        .map(|_| {
            (0..n)
                .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
                .collect()
        })
        .collect();

    let mut data = Vec::with_capacity(n * j);
    for _ in 0..j {
        let support = rng.random_range(1..=3.min(latent_count));
        let chosen = sample(&mut rng, latent_count, support).into_vec();
        let mut weights: Vec<f64> = (0..support).map(|_| rng.random::<f64>() + 1e-3).collect();
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= total);
        for i in 0..n {
            let v: f64 = chosen.iter().zip(&weights).map(|(&l, w)| w * latent[l][i]).sum();
            let mut bit = sign(v);
            if rng.random::<f64>() < flip_rate {
                bit = -bit;
            }
            data.push(bit);
        }
    }
    AttributeMatrix::from_column_major(n, j, data)
}
