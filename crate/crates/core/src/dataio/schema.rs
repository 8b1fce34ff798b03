use std::collections::{BTreeMap, HashSet};
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum ColumnKind {
    Numeric,
    /// Numeric with `$` and thousands separators stripped before parsing.
    Currency,
    Categorical(Vec<String>),
    /// Nominal column encoded as the 1-based position of its level.
    Coded(Vec<String>),
    Target,
    Ignore,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ColumnSpec {
    pub name: String,
    pub kind: ColumnKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Delimiter {
    /// Runs of spaces or tabs.
    Whitespace,
    Byte(u8),
}

/// Column layout and decoding rules for one delimited credit dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetSchema {
    pub name: String,
    pub columns: Vec<ColumnSpec>,
    pub target: String,
    pub target_map: BTreeMap<String, u8>,
    pub delimiter: Delimiter,
    pub header: bool,
    /// Cell value marking a missing entry. Rows containing it in any used
    /// column are dropped at load time.
    pub missing: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SchemaFile {
    version: u32,
    name: String,
    delimiter: String,
    #[serde(default)]
    header: bool,
    missing: Option<String>,
    target: String,
    target_map: BTreeMap<String, u8>,
    column: Vec<ColumnFile>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ColumnFile {
    name: String,
    kind: String,
    levels: Option<Vec<String>>,
}

pub const SCHEMA_VERSION: u32 = 1;

impl DatasetSchema {
    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let file: SchemaFile = toml::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
        if file.version != SCHEMA_VERSION {
            return Err(Error::Schema(format!(
                "unsupported schema version {} (expected {SCHEMA_VERSION})",
                file.version
            )));
        }
        let delimiter = match file.delimiter.as_str() {
            "whitespace" | "space" => Delimiter::Whitespace,
            "tab" => Delimiter::Byte(b'\t'),
            d if d.len() == 1 => Delimiter::Byte(d.as_bytes()[0]),
            d => return Err(Error::Schema(format!("unsupported delimiter {d:?}"))),
        };
        let columns = file
            .column
            .into_iter()
            .map(|c| {
                let kind = match (c.kind.as_str(), c.levels) {
                    ("numeric", None) => ColumnKind::Numeric,
                    ("currency", None) => ColumnKind::Currency,
                    ("target", None) => ColumnKind::Target,
                    ("ignore", None) => ColumnKind::Ignore,
                    ("categorical", Some(levels)) => ColumnKind::Categorical(levels),
                    ("coded", Some(levels)) => ColumnKind::Coded(levels),
                    ("categorical" | "coded", None) => {
                        return Err(Error::Schema(format!("column {:?} needs levels", c.name)))
                    }
                    (kind @ ("numeric" | "currency" | "target" | "ignore"), Some(_)) => {
                        return Err(Error::Schema(format!(
                            "column {:?}: levels given for a {kind} column",
                            c.name
                        )))
                    }
                    (kind, _) => {
                        return Err(Error::Schema(format!(
                            "column {:?}: unknown kind {kind:?}",
                            c.name
                        )))
                    }
                };
                Ok(ColumnSpec { name: c.name, kind })
            })
            .collect::<Result<Vec<_>>>()?;
        let schema = DatasetSchema {
            name: file.name,
            columns,
            target: file.target,
            target_map: file.target_map,
            delimiter,
            header: file.header,
            missing: file.missing,
        };
        schema.validate()?;
        Ok(schema)
    }

    pub fn validate(&self) -> Result<()> {
        let mut names = HashSet::new();
        for c in &self.columns {
            if !names.insert(c.name.as_str()) {
                return Err(Error::Schema(format!("duplicate column {:?}", c.name)));
            }
            if let ColumnKind::Categorical(levels) | ColumnKind::Coded(levels) = &c.kind {
                if levels.is_empty() {
                    return Err(Error::Schema(format!("column {:?} has no levels", c.name)));
                }
                let mut seen = HashSet::new();
                for l in levels {
                    if !seen.insert(l) {
                        return Err(Error::Schema(format!(
                            "column {:?} repeats level {l:?}",
                            c.name
                        )));
                    }
                }
            }
        }
        let targets: Vec<_> = self
            .columns
            .iter()
            .filter(|c| c.kind == ColumnKind::Target)
            .collect();
        match targets.as_slice() {
            [t] if t.name == self.target => {}
            [t] => {
                return Err(Error::Schema(format!(
                    "target column {:?} does not match declared target {:?}",
                    t.name, self.target
                )))
            }
            _ => {
                return Err(Error::Schema(format!(
                    "expected exactly one target column, found {}",
                    targets.len()
                )))
            }
        }
        if let Some(v) = self.target_map.values().find(|&&v| v > 1) {
            return Err(Error::Schema(format!("target map value {v} is not 0 or 1")));
        }
        if !(self.target_map.values().any(|&v| v == 0) && self.target_map.values().any(|&v| v == 1))
        {
            return Err(Error::Schema("target map must cover both classes".into()));
        }
        if self.feature_width() == 0 {
            return Err(Error::Schema("schema has no feature columns".into()));
        }
        Ok(())
    }

    /// Number of encoded feature columns (full one-hot for categoricals).
    pub fn feature_width(&self) -> usize {
        self.columns
            .iter()
            .map(|c| match &c.kind {
                ColumnKind::Numeric | ColumnKind::Currency | ColumnKind::Coded(_) => 1,
                ColumnKind::Categorical(levels) => levels.len(),
                ColumnKind::Target | ColumnKind::Ignore => 0,
            })
            .sum()
    }
}
