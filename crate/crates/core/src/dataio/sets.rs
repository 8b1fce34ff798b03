//! CSV form of a labeled set: `orig_index,<feature columns...>,label`.
//!
//! Floats are written in shortest round-trip form so a set read back is
//! bit-identical to the one written.

use std::io::{Read, Write};
use std::path::Path;

use super::matrix::{FeatureMatrix, LabelVector, LabeledSet};
use crate::error::{Error, Result};

pub fn write_set<W: Write>(out: W, set: &LabeledSet) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["orig_index".to_string()];
    header.extend(set.x.columns().iter().cloned());
    header.push("label".into());
    w.write_record(&header)?;
    let mut rec = Vec::with_capacity(header.len());
    for (k, row) in set.x.rows().enumerate() {
        rec.clear();
        rec.push(set.orig_index[k].to_string());
        rec.extend(row.iter().map(|v| v.to_string()));
        rec.push(set.y.as_slice()[k].to_string());
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::io("<csv writer>", e))?;
    Ok(())
}

pub fn write_set_file(path: impl AsRef<Path>, set: &LabeledSet) -> Result<()> {
    let path = path.as_ref();
    let f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_set(std::io::BufWriter::new(f), set)
}

pub fn read_set<R: Read>(input: R) -> Result<LabeledSet> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers()?.clone();
    let width = header.len();
    if width < 3 || &header[0] != "orig_index" || &header[width - 1] != "label" {
        return Err(Error::InvalidArgument(
            "set file must have orig_index, feature columns and label".into(),
        ));
    }
    let columns: Vec<String> = header.iter().skip(1).take(width - 2).map(str::to_owned).collect();
    let mut values = Vec::new();
    let mut labels = Vec::new();
    let mut index = Vec::new();
    for (row, rec) in r.records().enumerate() {
        let rec = rec?;
        let bad = |value: &str, column: &str| Error::BadNumber {
            row,
            column: column.to_owned(),
            value: value.to_owned(),
        };
        index.push(rec[0].parse::<usize>().map_err(|_| bad(&rec[0], "orig_index"))?);
        for (j, name) in columns.iter().enumerate() {
            let cell = &rec[j + 1];
            values.push(cell.parse::<f64>().map_err(|_| bad(cell, name))?);
        }
        let last = &rec[width - 1];
        labels.push(last.parse::<u8>().map_err(|_| bad(last, "label"))?);
    }
    LabeledSet::new(
        FeatureMatrix::new(values, columns)?,
        LabelVector::new(labels)?,
        index,
    )
}

pub fn read_set_file(path: impl AsRef<Path>) -> Result<LabeledSet> {
    let path = path.as_ref();
    let f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_set(std::io::BufReader::new(f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn write_read_is_bit_exact(
            rows in prop::collection::vec(prop::collection::vec(-1e12f64..1e12, 3), 1..20),
            seed_label in 0u8..2,
        ) {
            let x = FeatureMatrix::from_rows_unnamed(&rows).unwrap();
            let y = LabelVector::new(vec![seed_label; rows.len()]).unwrap();
            let set = LabeledSet::new(x, y, (0..rows.len()).map(|i| i * 3).collect()).unwrap();
            let mut buf = Vec::new();
            write_set(&mut buf, &set).unwrap();
            let back = read_set(buf.as_slice()).unwrap();
            prop_assert_eq!(back, set);
        }
    }
}
