//! Grid enumeration over the simplex, used to check the projected-gradient solver.

use crate::attribute::AttributeVector;
use crate::distance::MeaningfulSubspace;
use crate::error::{invalid, shape, Result};

pub const MAX_ORACLE_ATTRIBUTES: usize = 4;

/// Smallest `||A r - z||^2` over simplex points whose coordinates are
/// multiples of `grid_step`.
pub fn brute_force_cvx_oracle(
    s: &MeaningfulSubspace,
    z: &AttributeVector,
    grid_step: f64,
) -> Result<f64> {
    let j = s.j();
    if j > MAX_ORACLE_ATTRIBUTES {
        return Err(invalid(format!(
            "grid oracle supports at most {MAX_ORACLE_ATTRIBUTES} meaningful attributes, got {j}"
        )));
    }
    if !(grid_step > 0.0 && grid_step <= 0.1) {
        return Err(invalid(format!("grid_step must be in (0, 0.1], got {grid_step}")));
    }
    if s.n() != z.len() {
        return Err(shape(format!("{} instances vs {}", s.n(), z.len())));
    }
    let inv = 1.0 / grid_step;
    let divisions = if (inv - inv.round()).abs() < 1e-9 {
        inv.round() as usize
    } else {
        inv.ceil() as usize
    };

    let columns: Vec<Vec<f64>> = s
        .attributes()
        .columns()
        .map(|c| c.iter().map(|&b| f64::from(b)).collect())
        .collect();
    let target: Vec<f64> = z.bits().iter().map(|&b| f64::from(b)).collect();

    let mut counts = vec![0usize; j];
    let mut best = f64::INFINITY;
    enumerate(&mut counts, 0, divisions, &mut |counts| {
        let mut obj = 0.0;
        for (i, &t) in target.iter().enumerate() {
            let mut v = 0.0;
            for (c, &cnt) in columns.iter().zip(counts.iter()) {
                v += c[i] * cnt as f64 / divisions as f64;
            }
            obj += (v - t) * (v - t);
        }
        if obj < best {
            best = obj;
        }
    });
    Ok(best)
}

fn enumerate(counts: &mut [usize], pos: usize, remaining: usize, visit: &mut impl FnMut(&[usize])) {
    if pos + 1 == counts.len() {
        counts[pos] = remaining;
        visit(counts);
        return;
    }
    for c in 0..=remaining {
        counts[pos] = c;
        enumerate(counts, pos + 1, remaining - c, visit);
    }
}
