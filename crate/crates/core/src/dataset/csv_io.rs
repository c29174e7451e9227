//! CSV ingestion and emission: RFC-4180-style, mandatory header row,
//! `.` decimal separator.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{assign_label_ids, DataError, Dataset};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

/// Designates the label column of a CSV file by header name or 0-based
/// position.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum LabelColumn {
    Name(String),
    Index(usize),
}

pub(super) fn load<F: Scalar>(path: &Path, label: &LabelColumn) -> Result<Dataset<F>, DataError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;

    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| csv_error(path, e))?
        .iter()
        .map(str::to_owned)
        .collect();
    let label_pos = match label {
        LabelColumn::Name(name) => headers.iter().position(|h| h == name).ok_or_else(|| {
            DataError::MissingLabelColumn {
                name: name.clone(),
                available: headers.clone(),
            }
        })?,
        LabelColumn::Index(i) => {
            if *i >= headers.len() {
                return Err(DataError::MissingLabelColumn {
                    name: format!("#{i}"),
                    available: headers.clone(),
                });
            }
            *i
        }
    };

    let feature_names: Vec<String> = headers
        .iter()
        .enumerate()
        .filter(|&(c, _)| c != label_pos)
        .map(|(_, h)| h.clone())
        .collect();
    if feature_names.is_empty() {
        return Err(DataError::Invalid(
            "CSV has no feature columns besides the label".into(),
        ));
    }

    let mut values: Vec<F> = Vec::new();
    let mut raw_labels: Vec<String> = Vec::new();
    for (row_idx, record) in reader.records().enumerate() {
        let row_no = row_idx + 1; // 1-based data row, header excluded
        let record = record.map_err(|e| csv_error(path, e))?;
        let mut feature_col = 0usize;
        for (col, field) in record.iter().enumerate() {
            if col == label_pos {
                raw_labels.push(field.to_owned());
                continue;
            }
            let column = &feature_names[feature_col];
            feature_col += 1;
            if field.is_empty() {
                return Err(DataError::MissingValue {
                    row: row_no,
                    column: column.clone(),
                });
            }
            let v: f64 = field.parse().map_err(|_| DataError::NonNumeric {
                line: row_no,
                column: column.clone(),
                value: field.to_owned(),
            })?;
            values.push(F::from_f64_lossy(v));
        }
    }
    if raw_labels.is_empty() {
        return Err(DataError::Parse {
            line: 1,
            message: "no data rows".into(),
        });
    }

    let (labels, label_names) = assign_label_ids(&raw_labels)?;
    Dataset::new(
        Matrix::from_vec(values, feature_names.len()),
        labels,
        feature_names,
        label_names,
    )
}

pub(super) fn write<F: Scalar>(dataset: &Dataset<F>, path: &Path) -> Result<(), DataError> {
    let mut writer = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    let mut header: Vec<String> = dataset.feature_names().to_vec();
    header.push("class".into());
    writer.write_record(&header).map_err(|e| csv_error(path, e))?;
    for i in 0..dataset.n_samples() {
        let mut record: Vec<String> = dataset
            .row(i)
            .iter()
            .map(|v| format!("{v}")) // shortest round-trip representation
            .collect();
        record.push(dataset.label_name(dataset.label(i)).to_owned());
        writer.write_record(&record).map_err(|e| csv_error(path, e))?;
    }
    writer.flush().map_err(|source| DataError::Io {
        path: path.to_owned(),
        source,
    })
}

fn csv_error(path: &Path, e: csv::Error) -> DataError {
    let line = e
        .position()
        .map(|p| usize::try_from(p.line()).unwrap_or(0))
        .unwrap_or(0);
    match e.kind() {
        csv::ErrorKind::Io(_) => {
            if let csv::ErrorKind::Io(source) = e.into_kind() {
                DataError::Io {
                    path: path.to_owned(),
                    source,
                }
            } else {
                unreachable!()
            }
        }
        _ => DataError::Parse {
            line,
            message: e.to_string(),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::ClassId;
    use std::io::Write as _;

    fn write_temp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f.flush().unwrap();
        f
    }

    #[test]
    fn loads_by_label_name() {
        let f = write_temp("a,b,class,c\n1,2,yes,3\n4,5,no,6\n7,8,no,9\n");
        let d: Dataset<f64> =
            Dataset::load_csv(f.path(), &LabelColumn::Name("class".into())).unwrap();
        assert_eq!(d.n_features(), 3);
        assert_eq!(d.n_samples(), 3);
        assert_eq!(d.feature_names(), &["a".to_owned(), "b".to_owned(), "c".to_owned()]);
        assert_eq!(d.row(0), &[1.0, 2.0, 3.0]);
        assert_eq!(d.label_name(d.label(0)), "yes");
    }

    #[test]
    fn loads_by_label_index() {
        let f = write_temp("x,y\n0.5,p\n1.5,q\n");
        let d: Dataset<f64> = Dataset::load_csv(f.path(), &LabelColumn::Index(1)).unwrap();
        assert_eq!(d.n_features(), 1);
        assert_eq!(d.label_names(), &["p".to_owned(), "q".to_owned()]);
    }

    #[test]
    fn missing_label_column_lists_available() {
        let f = write_temp("a,b\n1,2\n");
        let err =
            Dataset::<f64>::load_csv(f.path(), &LabelColumn::Name("class".into())).unwrap_err();
        match err {
            DataError::MissingLabelColumn { name, available } => {
                assert_eq!(name, "class");
                assert_eq!(available, vec!["a".to_owned(), "b".to_owned()]);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn empty_cell_names_the_row() {
        let f = write_temp("a,class\n1,x\n,y\n");
        let err =
            Dataset::<f64>::load_csv(f.path(), &LabelColumn::Name("class".into())).unwrap_err();
        assert!(matches!(err, DataError::MissingValue { row: 2, .. }));
    }

    #[test]
    fn ragged_row_is_a_parse_error() {
        let f = write_temp("a,b,class\n1,2,x\n1,2,3,y\n");
        let err =
            Dataset::<f64>::load_csv(f.path(), &LabelColumn::Name("class".into())).unwrap_err();
        assert!(matches!(err, DataError::Parse { .. }));
    }

    #[test]
    fn csv_round_trip_preserves_profile_and_rows() {
        let f = write_temp("a,b,class\n1.25,2.5,yes\n4.125,5.0,no\n7.75,8.875,no\n");
        let d: Dataset<f64> =
            Dataset::load_csv(f.path(), &LabelColumn::Name("class".into())).unwrap();
        let out = tempfile::NamedTempFile::new().unwrap();
        d.write_csv(out.path()).unwrap();
        let back: Dataset<f64> =
            Dataset::load_csv(out.path(), &LabelColumn::Name("class".into())).unwrap();
        assert_eq!(back.profile().unwrap(), d.profile().unwrap());
        assert_eq!(back.features(), d.features());
        assert_eq!(back.labels(), d.labels());
        assert_eq!(back.label(0), ClassId::SECOND); // "no" < "yes"
    }
}
