//! Feature preprocessing and the three attribute discovery baselines.

pub mod lift;
pub mod lsh;
pub mod mmc;
pub mod pca;
pub mod sh;

pub use lift::{lift_features, LiftConfig, Lifted};
pub use lsh::{train_lsh, LshModel};
pub use mmc::{train_mmc, train_mmc_traced, FlipPhase, MmcHyperparams, MmcModel, MmcTrace};
pub use pca::{apply_pca, fit_pca, fit_pca_components, kept_components, PcaModel};
pub use sh::{train_sh, ShMode, ShModel};

use crate::attribute::{AttributeMatrix, FeatureMatrix};
use crate::error::Result;

pub const DEFAULT_PCA_KEEP: f64 = 0.6;

/// A trained classifier bank producing one bit per attribute.
#[derive(Debug, Clone, PartialEq)]
pub enum DiscoveryModel {
    Lsh(LshModel),
    Sh(ShModel),
    Mmc(MmcModel),
}

impl DiscoveryModel {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Lsh(_) => "lsh",
            Self::Sh(_) => "sh",
            Self::Mmc(_) => "mmc",
        }
    }

    pub fn dims(&self) -> usize {
        match self {
            Self::Lsh(m) => m.dims(),
            Self::Sh(m) => m.dims(),
            Self::Mmc(m) => m.dims(),
        }
    }

    pub fn bits(&self) -> usize {
        match self {
            Self::Lsh(m) => m.bits(),
            Self::Sh(m) => m.bits(),
            Self::Mmc(m) => m.bits(),
        }
    }
}

/// Signs of the model's per-bit responses on every row of `f`.
pub fn encode(model: &DiscoveryModel, f: &FeatureMatrix) -> Result<AttributeMatrix> {
    match model {
        DiscoveryModel::Lsh(m) => m.encode(f),
        DiscoveryModel::Sh(m) => m.encode(f),
        DiscoveryModel::Mmc(m) => m.encode(f),
    }
}

/// Optional lifting followed by optional PCA, fitted on training features.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Preprocessor {
    pub lift: Option<LiftConfig>,
    pub pca: Option<PcaModel>,
}

impl Preprocessor {
    /// Fits the PCA stage (if `pca_keep` is set) on the lifted training data and
    /// returns the transformed training features with the lift clamp count.
    pub fn fit(
        f: &FeatureMatrix,
        lift: Option<LiftConfig>,
        pca_keep: Option<f64>,
    ) -> Result<(Self, FeatureMatrix, usize)> {
        let (lifted, clamped) = match &lift {
            Some(cfg) => {
                let out = lift_features(f, cfg)?;
                (out.features, out.clamped)
            }
            None => (f.clone(), 0),
        };
        let (pca, out) = match pca_keep {
            Some(keep) => {
                let model = fit_pca(&lifted, keep)?;
                let out = apply_pca(&model, &lifted)?;
                (Some(model), out)
            }
            None => (None, lifted),
        };
        Ok((Self { lift, pca }, out, clamped))
    }

    pub fn apply(&self, f: &FeatureMatrix) -> Result<(FeatureMatrix, usize)> {
        let (lifted, clamped) = match &self.lift {
            Some(cfg) => {
                let out = lift_features(f, cfg)?;
                (out.features, out.clamped)
            }
            None => (f.clone(), 0),
        };
        let out = match &self.pca {
            Some(model) => apply_pca(model, &lifted)?,
            None => lifted,
        };
        Ok((out, clamped))
    }
}
