//! Versioned JSON model files. A model file embeds the training schema and
//! its fingerprint; loading against data with a different schema fails
//! before any prediction runs.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::adtree::AdtModel;
use crate::dataset::{schema_fingerprint, Attribute, Dataset};
use crate::error::{Error, Result};
use crate::tree::TreeModel;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Id3,
    C45,
    Adt,
}

impl Algorithm {
    pub fn display_name(&self) -> &'static str {
        match self {
            Algorithm::Id3 => "ID3",
            Algorithm::C45 => "C4.5",
            Algorithm::Adt => "ADT",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum ModelKind {
    Tree(TreeModel),
    Adt(AdtModel),
}

/// A trained model plus everything needed to check and render it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub format_version: u32,
    pub algorithm: Algorithm,
    pub attributes: Vec<Attribute>,
    pub class_index: usize,
    pub schema_fingerprint: String,
    pub model: ModelKind,
}

impl ModelFile {
    pub fn new(algorithm: Algorithm, trained_on: &Dataset, model: ModelKind) -> ModelFile {
        ModelFile {
            format_version: FORMAT_VERSION,
            algorithm,
            attributes: trained_on.attributes.clone(),
            class_index: trained_on.class_index,
            schema_fingerprint: trained_on.schema_fingerprint(),
            model,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<ModelFile> {
        let file: ModelFile = serde_json::from_str(text)?;
        if file.format_version != FORMAT_VERSION {
            return Err(Error::ModelFormat(format!(
                "unsupported format version {} (expected {})",
                file.format_version, FORMAT_VERSION
            )));
        }
        let expected = schema_fingerprint(&file.attributes, file.class_index);
        if file.schema_fingerprint != expected {
            return Err(Error::ModelFormat(
                "schema fingerprint does not match the embedded schema".into(),
            ));
        }
        match (&file.algorithm, &file.model) {
            (Algorithm::Adt, ModelKind::Adt(_)) => {}
            (Algorithm::Id3 | Algorithm::C45, ModelKind::Tree(_)) => {}
            _ => {
                return Err(Error::ModelFormat(
                    "algorithm tag does not match the stored model".into(),
                ))
            }
        }
        Ok(file)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<ModelFile> {
        let text = fs::read_to_string(path)?;
        ModelFile::from_json(&text)
    }

    /// Fails unless `d` declares exactly the schema the model was trained on.
    pub fn check_compatible(&self, d: &Dataset) -> Result<()> {
        if d.schema_fingerprint() != self.schema_fingerprint {
            return Err(Error::SchemaMismatch(format!(
                "dataset schema fingerprint {} differs from the model's {}",
                &d.schema_fingerprint()[..12],
                &self.schema_fingerprint[..12]
            )));
        }
        Ok(())
    }

    pub fn class_values(&self) -> &[String] {
        self.attributes[self.class_index]
            .values()
            .expect("class attribute is nominal")
    }
}
