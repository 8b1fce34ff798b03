use super::matrix::{FeatureMatrix, LabelVector};
use super::schema::{ColumnKind, DatasetSchema};
use super::table::RawTable;
use crate::error::{Error, Result};

/// Expands categoricals to full one-hot groups, replaces coded columns by
/// their 1-based level position, passes numerics through and maps the target
/// column to 0/1.
///
/// Output columns follow schema order; indicator columns are named
/// `column=level` in the schema's level order.
pub fn encode_features(
    table: &RawTable,
    schema: &DatasetSchema,
) -> Result<(FeatureMatrix, LabelVector)> {
    if table.n_cols() != schema.columns.len() {
        return Err(Error::Dimension(format!(
            "table has {} columns, schema has {}",
            table.n_cols(),
            schema.columns.len()
        )));
    }
    let mut names = Vec::with_capacity(schema.feature_width());
    for col in &schema.columns {
        match &col.kind {
            ColumnKind::Numeric | ColumnKind::Currency | ColumnKind::Coded(_) => {
                names.push(col.name.clone())
            }
            ColumnKind::Categorical(levels) => {
                names.extend(levels.iter().map(|l| format!("{}={l}", col.name)))
            }
            ColumnKind::Target | ColumnKind::Ignore => {}
        }
    }

    let d = names.len();
    let mut values = Vec::with_capacity(table.n_rows() * d);
    let mut labels = Vec::with_capacity(table.n_rows());
    for (r, row) in table.rows.iter().enumerate() {
        for (cell, col) in row.iter().zip(&schema.columns) {
            match &col.kind {
                ColumnKind::Numeric => values.push(parse_number(cell, r, &col.name)?),
                ColumnKind::Currency => {
                    let cleaned: String = cell
                        .chars()
                        .filter(|c| !matches!(c, '$' | ',' | ' '))
                        .collect();
                    values.push(parse_number(&cleaned, r, &col.name)?);
                }
                ColumnKind::Categorical(levels) => {
                    let hit = level_index(levels, cell, r, &col.name)?;
                    values.extend((0..levels.len()).map(|k| if k == hit { 1.0 } else { 0.0 }));
                }
                ColumnKind::Coded(levels) => {
                    values.push((level_index(levels, cell, r, &col.name)? + 1) as f64)
                }
                ColumnKind::Target => {
                    let y = schema.target_map.get(cell).ok_or_else(|| Error::UnknownTarget {
                        row: r,
                        value: cell.clone(),
                    })?;
                    labels.push(*y);
                }
                ColumnKind::Ignore => {}
            }
        }
    }
    Ok((FeatureMatrix::new(values, names)?, LabelVector::new(labels)?))
}

fn level_index(levels: &[String], cell: &str, row: usize, column: &str) -> Result<usize> {
    levels
        .iter()
        .position(|l| l == cell)
        .ok_or_else(|| Error::UnknownLevel {
            row,
            column: column.to_owned(),
            value: cell.to_owned(),
        })
}

fn parse_number(cell: &str, row: usize, column: &str) -> Result<f64> {
    cell.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::BadNumber {
            row,
            column: column.to_owned(),
            value: cell.to_owned(),
        })
}

#[cfg(test)]
mod tests {
    use super::super::table::parse_dataset;
    use super::*;

    fn schema(cols: &str) -> DatasetSchema {
        DatasetSchema::from_toml(&format!(
            r#"
version = 1
name = "toy"
delimiter = ","
target = "y"
[target_map]
g = 1
b = 0
{cols}
[[column]]
name = "y"
kind = "target"
"#
        ))
        .unwrap()
    }

    #[test]
    fn one_hot_two_levels() {
        let s = schema("[[column]]\nname = \"c\"\nkind = \"categorical\"\nlevels = [\"A\", \"B\"]\n");
        let t = parse_dataset("A,g\nB,b\n", &s).unwrap();
        let (x, y) = encode_features(&t, &s).unwrap();
        assert_eq!(x.row(0), &[1.0, 0.0]);
        assert_eq!(x.row(1), &[0.0, 1.0]);
        assert_eq!(x.columns(), &["c=A", "c=B"]);
        assert_eq!(y.as_slice(), &[1, 0]);
    }

    #[test]
    fn mixed_table_width() {
        let s = schema(
            "[[column]]\nname = \"n\"\nkind = \"numeric\"\n\
             [[column]]\nname = \"c\"\nkind = \"categorical\"\nlevels = [\"p\", \"q\", \"r\"]\n",
        );
        let t = parse_dataset("1.5,q,g\n-2,r,b\n", &s).unwrap();
        let (x, _) = encode_features(&t, &s).unwrap();
        assert_eq!(x.n_cols(), 4);
        assert_eq!(x.row(0), &[1.5, 0.0, 1.0, 0.0]);
        assert_eq!(x.row(1), &[-2.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn coded_levels_follow_schema_order() {
        let s = schema("[[column]]\nname = \"c\"\nkind = \"coded\"\nlevels = [\"u\", \"y\", \"l\"]\n");
        let t = parse_dataset("l,g\nu,b\ny,g\n", &s).unwrap();
        let (x, _) = encode_features(&t, &s).unwrap();
        assert_eq!(x.as_slice(), &[3.0, 1.0, 2.0]);
        assert_eq!(x.columns(), &["c"]);
        assert!(matches!(parse_dataset("zz,g\n", &s), Err(Error::UnknownLevel { row: 0, .. })));
    }

    #[test]
    fn unknown_target_is_an_error() {
        let s = schema("[[column]]\nname = \"n\"\nkind = \"numeric\"\n");
        let t = parse_dataset("1,g\n2,maybe\n", &s).unwrap();
        let err = encode_features(&t, &s).unwrap_err();
        assert!(matches!(err, Error::UnknownTarget { row: 1, .. }));
    }

    #[test]
    fn currency_and_ignore_columns() {
        let s = schema(
            "[[column]]\nname = \"amt\"\nkind = \"currency\"\n\
             [[column]]\nname = \"note\"\nkind = \"ignore\"\n",
        );
        let t = parse_dataset("\"$60,000.00 \",whatever,g\n$12.50,,b\n", &s).unwrap();
        let (x, _) = encode_features(&t, &s).unwrap();
        assert_eq!(x.as_slice(), &[60000.0, 12.5]);
        assert_eq!(x.columns(), &["amt"]);
    }

    #[test]
    fn bad_number_reports_column() {
        let s = schema("[[column]]\nname = \"n\"\nkind = \"numeric\"\n");
        let t = parse_dataset("abc,g\n", &s).unwrap();
        assert!(matches!(
            encode_features(&t, &s),
            Err(Error::BadNumber { row: 0, .. })
        ));
    }
}
