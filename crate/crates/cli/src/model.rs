//! JSON schema for trained discovery models.
//!
//! `dims` is the raw feature width the model accepts; preprocessing (lifting,
//! then PCA) maps it to the width the hashing stage was trained on.

use attrmeaning::discovery::{
    DiscoveryModel, LiftConfig, LshModel, MmcHyperparams, MmcModel, PcaModel, Preprocessor, ShMode, ShModel,
};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelDocument {
    #[serde(flatten)]
    pub payload: Payload,
    pub dims: usize,
    pub bits: usize,
    pub seed: u64,
    pub preprocess: PreprocessDoc,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Payload {
    Lsh {
        hyperplanes: Vec<Vec<f64>>,
    },
    Sh {
        pca: PcaDoc,
        ranges: Vec<[f64; 2]>,
        modes: Vec<ModeDoc>,
    },
    Mmc {
        hyperplanes: Vec<Vec<f64>>,
        lambda: f64,
        epochs: usize,
        learning_rate: f64,
    },
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct PreprocessDoc {
    pub lift: Option<LiftDoc>,
    pub pca: Option<PcaDoc>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LiftDoc {
    pub order: usize,
    pub period: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PcaDoc {
    pub mean: Vec<f64>,
    /// One row per kept direction.
    pub basis: Vec<Vec<f64>>,
    pub explained_variance: Vec<f64>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ModeDoc {
    pub direction: usize,
    pub harmonic: usize,
    pub eigenvalue: f64,
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn from_rows(what: &str, rows: &[Vec<f64>]) -> CliResult<DMatrix<f64>> {
    let width = rows.first().map(Vec::len).unwrap_or(0);
    if rows.is_empty() || width == 0 || rows.iter().any(|r| r.len() != width) {
        return Err(CliError::input(format!("model {what} must be a non-empty rectangular matrix")));
    }
    Ok(DMatrix::from_fn(rows.len(), width, |i, j| rows[i][j]))
}

impl PcaDoc {
    fn from_model(m: &PcaModel) -> Self {
        Self {
            mean: m.mean.iter().copied().collect(),
            basis: rows(&m.basis.transpose()),
            explained_variance: m.explained_variance.clone(),
        }
    }

    fn to_model(&self) -> CliResult<PcaModel> {
        let basis = from_rows("PCA basis", &self.basis)?.transpose();
        Ok(PcaModel::from_parts(
            DVector::from_vec(self.mean.clone()),
            basis,
            self.explained_variance.clone(),
        )?)
    }
}

impl ModelDocument {
    pub fn new(model: &DiscoveryModel, pre: &Preprocessor, dims: usize, seed: u64) -> Self {
        let payload = match model {
            DiscoveryModel::Lsh(m) => Payload::Lsh {
                hyperplanes: rows(&m.hyperplanes),
            },
            DiscoveryModel::Sh(m) => Payload::Sh {
                pca: PcaDoc::from_model(&m.pca),
                ranges: m.ranges.iter().map(|&(a, b)| [a, b]).collect(),
                modes: m
                    .modes
                    .iter()
                    .map(|m| ModeDoc {
                        direction: m.direction,
                        harmonic: m.harmonic,
                        eigenvalue: m.eigenvalue,
                    })
                    .collect(),
            },
            DiscoveryModel::Mmc(m) => Payload::Mmc {
                hyperplanes: rows(&m.hyperplanes),
                lambda: m.hyperparams.lambda,
                epochs: m.hyperparams.epochs,
                learning_rate: m.hyperparams.learning_rate,
            },
        };
        Self {
            payload,
            dims,
            bits: model.bits(),
            seed,
            preprocess: PreprocessDoc {
                lift: pre.lift.map(|c| LiftDoc {
                    order: c.order,
                    period: c.period,
                }),
                pca: pre.pca.as_ref().map(PcaDoc::from_model),
            },
        }
    }

    /// Rebuilds the preprocessing chain and model, checking every width.
    pub fn into_parts(self) -> CliResult<(Preprocessor, DiscoveryModel)> {
        let lift = self.preprocess.lift.map(|l| LiftConfig {
            order: l.order,
            period: l.period,
        });
        if let Some(cfg) = &lift {
            cfg.validate()?;
        }
        let pca = self.preprocess.pca.as_ref().map(PcaDoc::to_model).transpose()?;
        let mut width = self.dims * lift.map_or(1, |c| c.components());
        if let Some(p) = &pca {
            if p.input_dims() != width {
                return Err(CliError::input(format!(
                    "model PCA expects {} dimensions, preprocessing yields {width}",
                    p.input_dims()
                )));
            }
            width = p.output_dims();
        }
        let model = match self.payload {
            Payload::Lsh { hyperplanes } => {
                DiscoveryModel::Lsh(LshModel::from_parts(from_rows("hyperplanes", &hyperplanes)?, self.seed)?)
            }
            Payload::Sh { pca, ranges, modes } => DiscoveryModel::Sh(ShModel::from_parts(
                pca.to_model()?,
                ranges.iter().map(|r| (r[0], r[1])).collect(),
                modes
                    .iter()
                    .map(|m| ShMode {
                        direction: m.direction,
                        harmonic: m.harmonic,
                        eigenvalue: m.eigenvalue,
                    })
                    .collect(),
            )?),
            Payload::Mmc {
                hyperplanes,
                lambda,
                epochs,
                learning_rate,
            } => DiscoveryModel::Mmc(MmcModel::from_parts(
                from_rows("hyperplanes", &hyperplanes)?,
                self.seed,
                MmcHyperparams {
                    lambda,
                    epochs,
                    learning_rate,
                },
            )?),
        };
        if model.dims() != width || model.bits() != self.bits {
            return Err(CliError::input(format!(
                "model declares {} bits over {width} preprocessed dimensions, payload has {} bits over {}",
                self.bits,
                model.bits(),
                model.dims()
            )));
        }
        Ok((Preprocessor { lift, pca }, model))
    }
}
