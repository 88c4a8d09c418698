//! The two projection backends behind one interface.

use serde::{Deserialize, Serialize};

use crate::autoencoder::AeModel;
use crate::dataset::Dataset;
use crate::error::Result;
use crate::pca::PcaModel;
use crate::Point2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Pca,
    Autoencoder,
}

impl std::str::FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "pca" => Ok(ModelKind::Pca),
            "autoencoder" | "ae" => Ok(ModelKind::Autoencoder),
            other => Err(format!("unknown method '{other}'")),
        }
    }
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ModelKind::Pca => "pca",
            ModelKind::Autoencoder => "autoencoder",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DrModel {
    Pca(PcaModel),
    Autoencoder(AeModel),
}

impl DrModel {
    pub fn kind(&self) -> ModelKind {
        match self {
            DrModel::Pca(_) => ModelKind::Pca,
            DrModel::Autoencoder(_) => ModelKind::Autoencoder,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            DrModel::Pca(m) => m.dim(),
            DrModel::Autoencoder(m) => m.dim(),
        }
    }

    /// Position of a full feature vector on the plane (forward projection).
    pub fn project(&self, x: &[f64]) -> Result<Point2> {
        match self {
            DrModel::Pca(m) => m.project(x),
            DrModel::Autoencoder(m) => m.encode(x),
        }
    }

    pub fn project_all(&self, data: &Dataset) -> Result<Vec<Point2>> {
        data.rows().map(|r| self.project(r)).collect()
    }
}

impl From<PcaModel> for DrModel {
    fn from(m: PcaModel) -> Self {
        DrModel::Pca(m)
    }
}

impl From<AeModel> for DrModel {
    fn from(m: AeModel) -> Self {
        DrModel::Autoencoder(m)
    }
}
