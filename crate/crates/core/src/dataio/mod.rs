//! Dataset ingestion: schema-driven loading, one-hot encoding, seeded splits.

mod encode;
mod matrix;
mod schema;
mod sets;
mod split;
mod table;

pub use encode::encode_features;
pub use matrix::{FeatureMatrix, LabelVector, LabeledSet};
pub use schema::{ColumnKind, ColumnSpec, DatasetSchema, Delimiter, SCHEMA_VERSION};
pub use sets::{read_set, read_set_file, write_set, write_set_file};
pub use split::{split, train_size};
pub use table::{load_dataset, parse_dataset, RawTable};
