use std::path::Path;

use serde::{Deserialize, Serialize};

use super::params::FittedGmm;
use crate::error::{Error, Result};

pub const MODEL_FORMAT: &str = "gmm-credit/fitted-gmm";
pub const MODEL_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct Envelope<T> {
    format: String,
    version: u32,
    #[serde(flatten)]
    body: T,
}

pub(crate) fn to_versioned_json<T: Serialize>(format: &str, version: u32, body: &T) -> Result<String> {
    let env = Envelope {
        format: format.to_owned(),
        version,
        body,
    };
    serde_json::to_string_pretty(&env).map_err(|e| Error::ModelFile(e.to_string()))
}

pub(crate) fn from_versioned_json<T: for<'de> Deserialize<'de>>(
    format: &str,
    version: u32,
    text: &str,
) -> Result<T> {
    let env: Envelope<T> =
        serde_json::from_str(text).map_err(|e| Error::ModelFile(e.to_string()))?;
    if env.format != format || env.version != version {
        return Err(Error::ModelFile(format!(
            "expected {format} v{version}, found {} v{}",
            env.format, env.version
        )));
    }
    Ok(env.body)
}

impl FittedGmm {
    pub fn to_json(&self) -> Result<String> {
        to_versioned_json(MODEL_FORMAT, MODEL_VERSION, self)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let fitted: FittedGmm = from_versioned_json(MODEL_FORMAT, MODEL_VERSION, text)?;
        fitted.params.validate()?;
        Ok(fitted)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}
