//! Explicit feature map for the histogram intersection kernel.
//!
//! Each non-negative input `x` is mapped to `2 * order + 1` components whose
//! inner products approximate `min(x, y)`. The map samples the kernel
//! signature `kappa(w) = 2 / (pi * (1 + 4 w^2))` at multiples of `period`:
//!
//! ```text
//! psi_0(x)      = sqrt(x * L * kappa(0))
//! psi_2j-1(x)   = sqrt(2 * x * L * kappa(j L)) * cos(j L ln x)
//! psi_2j(x)     = sqrt(2 * x * L * kappa(j L)) * sin(j L ln x)
//! ```
//!
//! with `psi(0) = 0`.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::attribute::FeatureMatrix;
use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LiftConfig {
    pub order: usize,
    pub period: f64,
}

impl Default for LiftConfig {
    fn default() -> Self {
        Self {
            order: 1,
            period: 0.65,
        }
    }
}

impl LiftConfig {
    pub fn validate(&self) -> Result<()> {
        if self.order == 0 {
            return Err(invalid("lift order must be at least 1"));
        }
        if !(self.period > 0.0 && self.period.is_finite()) {
            return Err(invalid(format!("lift period must be positive, got {}", self.period)));
        }
        Ok(())
    }

    pub fn components(&self) -> usize {
        2 * self.order + 1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lifted {
    pub features: FeatureMatrix,
    /// Number of negative inputs clamped to zero.
    pub clamped: usize,
}

fn intersection_signature(w: f64) -> f64 {
    2.0 / (PI * (1.0 + 4.0 * w * w))
}

/// Lifts a single scalar into `out` (length `2 * order + 1`).
pub fn lift_scalar(x: f64, cfg: &LiftConfig, out: &mut [f64]) {
    debug_assert_eq!(out.len(), cfg.components());
    if x <= 0.0 {
        out.fill(0.0);
        return;
    }
    let l = cfg.period;
    let log_x = x.ln();
    out[0] = (x * l * intersection_signature(0.0)).sqrt();
    for j in 1..=cfg.order {
        let w = j as f64 * l;
        let amp = (2.0 * x * l * intersection_signature(w)).sqrt();
        out[2 * j - 1] = amp * (w * log_x).cos();
        out[2 * j] = amp * (w * log_x).sin();
    }
}

/// Lifts every entry; output column `d * (2 * order + 1) + c` holds component
/// `c` of input dimension `d`.
pub fn lift_features(f: &FeatureMatrix, cfg: &LiftConfig) -> Result<Lifted> {
    cfg.validate()?;
    let m = f.matrix();
    let width = cfg.components();
    let mut out = DMatrix::zeros(f.n(), f.dims() * width);
    let mut clamped = 0;
    let mut buf = vec![0.0; width];
    for i in 0..f.n() {
        for d in 0..f.dims() {
            let mut x = m[(i, d)];
            if x < 0.0 {
                clamped += 1;
                x = 0.0;
            }
            lift_scalar(x, cfg, &mut buf);
            for (c, &v) in buf.iter().enumerate() {
                out[(i, d * width + c)] = v;
            }
        }
    }
    Ok(Lifted {
        features: FeatureMatrix::new(out)?,
        clamped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lifted_dot(x: f64, y: f64, cfg: &LiftConfig) -> f64 {
        let mut a = vec![0.0; cfg.components()];
        let mut b = vec![0.0; cfg.components()];
        lift_scalar(x, cfg, &mut a);
        lift_scalar(y, cfg, &mut b);
        a.iter().zip(&b).map(|(p, q)| p * q).sum()
    }

    #[test]
    fn triples_dimensionality() {
        let f = FeatureMatrix::new(DMatrix::from_element(3, 10, 0.5)).unwrap();
        let lifted = lift_features(&f, &LiftConfig::default()).unwrap();
        assert_eq!(lifted.features.dims(), 30);
        assert_eq!(lifted.clamped, 0);
    }

    #[test]
    fn zero_row_maps_to_zero() {
        let f = FeatureMatrix::new(DMatrix::zeros(1, 4)).unwrap();
        let lifted = lift_features(&f, &LiftConfig::default()).unwrap();
        assert!(lifted.features.matrix().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn scalar_pair_matches_min() {
        // Closed form: sqrt(xy) L [kappa(0) + 2 kappa(L) cos(L ln(y/x))] = 0.40782...
        let v = lifted_dot(0.4, 0.9, &LiftConfig::default());
        assert!((v - 0.4).abs() / 0.4 < 0.10, "{v}");
        assert!((v - 0.407_822_029).abs() < 1e-8, "{v}");
    }

    #[test]
    fn self_product_is_close_to_identity() {
        // For x = y the phase vanishes: x L (kappa(0) + 2 kappa(L)).
        let cfg = LiftConfig::default();
        let expected = 0.65 * (2.0 / PI) * (1.0 + 2.0 / (1.0 + 4.0 * 0.65 * 0.65));
        for x in [0.01, 0.3, 1.0, 7.0] {
            assert!((lifted_dot(x, x, &cfg) - x * expected).abs() < 1e-12);
        }
    }

    #[test]
    fn negatives_are_clamped_and_counted() {
        let f = FeatureMatrix::from_rows(&[vec![-1.0, 0.5], vec![0.2, -0.3]]).unwrap();
        let lifted = lift_features(&f, &LiftConfig::default()).unwrap();
        assert_eq!(lifted.clamped, 2);
        assert!(lifted.features.matrix().row(0).columns(0, 3).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn config_validation() {
        assert!(LiftConfig { order: 0, period: 0.65 }.validate().is_err());
        assert!(LiftConfig { order: 1, period: 0.0 }.validate().is_err());
        assert_eq!(LiftConfig { order: 2, period: 0.5 }.components(), 5);
    }
}
