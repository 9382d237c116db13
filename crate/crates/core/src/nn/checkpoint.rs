use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NamedArray {
    pub shape: Vec<usize>,
    pub data: Vec<f64>,
}

impl NamedArray {
    pub fn from_array(a: &Array2<f64>) -> Self {
        NamedArray {
            shape: a.shape().to_vec(),
            data: a.iter().copied().collect(),
        }
    }

    pub fn to_array(&self) -> Result<Array2<f64>> {
        match self.shape[..] {
            [r, c] => Array2::from_shape_vec((r, c), self.data.clone())
                .map_err(|e| Error::Format(format!("array shape: {e}"))),
            _ => Err(Error::Format(format!("expected 2-d shape, got {:?}", self.shape))),
        }
    }
}

/// Named parameter arrays plus an echo of the configuration that produced them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub format_version: u32,
    pub config: serde_json::Value,
    pub params: BTreeMap<String, NamedArray>,
}

impl Checkpoint {
    pub fn new(config: serde_json::Value) -> Self {
        Checkpoint {
            format_version: CHECKPOINT_VERSION,
            config,
            params: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, name: &str, a: &Array2<f64>) {
        self.params.insert(name.to_string(), NamedArray::from_array(a));
    }

    pub fn get(&self, name: &str) -> Result<Array2<f64>> {
        self.params
            .get(name)
            .ok_or_else(|| Error::Format(format!("checkpoint has no array '{name}'")))?
            .to_array()
    }

    pub fn to_json(&self) -> Result<String> {
        if let Some((name, _)) = self.params.iter().find(|(_, a)| a.data.iter().any(|v| !v.is_finite())) {
            return Err(Error::Format(format!("array '{name}' has non-finite values")));
        }
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Checkpoint> {
        let c: Checkpoint = serde_json::from_str(text)?;
        if c.format_version != CHECKPOINT_VERSION {
            return Err(Error::Format(format!(
                "checkpoint version {} is not supported",
                c.format_version
            )));
        }
        Ok(c)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Checkpoint> {
        let path = path.as_ref();
        Self::from_json(&fs::read_to_string(path).map_err(|e| Error::io(path, e))?)
    }
}
