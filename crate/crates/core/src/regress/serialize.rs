//! Versioned JSON model persistence with byte-exact round trips.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::regress::svr::SvrBody;
use crate::regress::{Hyperparams, ModelBody, ModelKind, QualityModel, Tree};

pub const MODEL_SCHEMA_VERSION: u32 = 1;

/// On-disk form of a trained model. Forest and boosted models store
/// their trees under `trees`; the SVR body keeps its own block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelDocument {
    pub schema_version: u32,
    pub kind: ModelKind,
    pub feature_layout: Vec<String>,
    pub hyperparams: Hyperparams,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub trees: Option<Vec<Tree>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub base_score: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub learning_rate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub svr: Option<SvrBody>,
}

impl From<&QualityModel> for ModelDocument {
    fn from(model: &QualityModel) -> Self {
        let mut doc = ModelDocument {
            schema_version: MODEL_SCHEMA_VERSION,
            kind: model.kind,
            feature_layout: model.feature_layout.clone(),
            hyperparams: model.hyperparams.clone(),
            seed: model.seed,
            trees: None,
            base_score: None,
            learning_rate: None,
            svr: None,
        };
        match &model.body {
            ModelBody::Forest(trees) => doc.trees = Some(trees.clone()),
            ModelBody::Boosted {
                base_score,
                learning_rate,
                trees,
            } => {
                doc.trees = Some(trees.clone());
                doc.base_score = Some(*base_score);
                doc.learning_rate = Some(*learning_rate);
            }
            ModelBody::Svr(body) => doc.svr = Some(body.clone()),
        }
        doc
    }
}

impl ModelDocument {
    pub fn into_model(self) -> Result<QualityModel> {
        if self.schema_version != MODEL_SCHEMA_VERSION {
            return Err(Error::DegenerateInput(format!(
                "unsupported model schema version {}",
                self.schema_version
            )));
        }
        let body = match self.kind {
            ModelKind::Rfr => ModelBody::Forest(
                self.trees
                    .ok_or_else(|| Error::DegenerateInput("rfr model without trees".into()))?,
            ),
            ModelKind::Gbr => ModelBody::Boosted {
                base_score: self
                    .base_score
                    .ok_or_else(|| Error::DegenerateInput("gbr model without base_score".into()))?,
                learning_rate: self.learning_rate.ok_or_else(|| {
                    Error::DegenerateInput("gbr model without learning_rate".into())
                })?,
                trees: self
                    .trees
                    .ok_or_else(|| Error::DegenerateInput("gbr model without trees".into()))?,
            },
            ModelKind::Svr => ModelBody::Svr(
                self.svr
                    .ok_or_else(|| Error::DegenerateInput("svr model without svr body".into()))?,
            ),
        };
        Ok(QualityModel {
            kind: self.kind,
            feature_layout: self.feature_layout,
            hyperparams: self.hyperparams,
            seed: self.seed,
            body,
        })
    }
}

impl QualityModel {
    pub fn to_json(&self) -> String {
        let doc = ModelDocument::from(self);
        let mut json = serde_json::to_string_pretty(&doc).expect("model serializes");
        json.push('\n');
        json
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let doc: ModelDocument = serde_json::from_str(json)
            .map_err(|e| Error::DegenerateInput(format!("model parse error: {e}")))?;
        doc.into_model()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let json = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&json).map_err(|e| match e {
            Error::DegenerateInput(msg) => Error::parse(path, msg),
            other => other,
        })
    }
}
