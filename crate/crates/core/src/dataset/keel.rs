//! KEEL `.dat` parser: `@`-prefixed header lines, then comma-separated rows
//! after `@data`; the class value is the last field.

use std::fs;
use std::path::Path;

use super::{assign_label_ids, DataError, Dataset};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

pub(super) fn load<F: Scalar>(path: &Path) -> Result<Dataset<F>, DataError> {
    let text = fs::read_to_string(path).map_err(|source| DataError::Io {
        path: path.to_owned(),
        source,
    })?;
    parse(&text)
}

pub(super) fn parse<F: Scalar>(text: &str) -> Result<Dataset<F>, DataError> {
    let mut saw_relation = false;
    let mut attribute_names: Vec<String> = Vec::new();
    let mut data_line: Option<usize> = None;

    let mut values: Vec<F> = Vec::new();
    let mut raw_labels: Vec<String> = Vec::new();

    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if data_line.is_none() {
            let Some(rest) = line.strip_prefix('@') else {
                return Err(DataError::Parse {
                    line: line_no,
                    message: format!("expected a header directive before @data, found {line:?}"),
                });
            };
            let (keyword, tail) = match rest.find(char::is_whitespace) {
                Some(pos) => (&rest[..pos], rest[pos..].trim()),
                None => (rest, ""),
            };
            match keyword.to_ascii_lowercase().as_str() {
                "relation" => {
                    if tail.is_empty() {
                        return Err(DataError::Parse {
                            line: line_no,
                            message: "@relation is missing a name".into(),
                        });
                    }
                    saw_relation = true;
                }
                "attribute" => {
                    let name: String = tail
                        .chars()
                        .take_while(|c| !c.is_whitespace() && *c != '{' && *c != '[')
                        .collect();
                    if name.is_empty() {
                        return Err(DataError::Parse {
                            line: line_no,
                            message: "@attribute is missing a name".into(),
                        });
                    }
                    attribute_names.push(name);
                }
                "inputs" | "input" | "outputs" | "output" => {}
                "data" => {
                    if !saw_relation {
                        return Err(DataError::Parse {
                            line: line_no,
                            message: "found @data before @relation".into(),
                        });
                    }
                    if attribute_names.len() < 2 {
                        return Err(DataError::Parse {
                            line: line_no,
                            message: format!(
                                "need at least 2 @attribute declarations (features + class), found {}",
                                attribute_names.len()
                            ),
                        });
                    }
                    data_line = Some(line_no);
                }
                other => {
                    return Err(DataError::Parse {
                        line: line_no,
                        message: format!("unknown header directive @{other}"),
                    });
                }
            }
        } else {
            parse_row(line, line_no, &attribute_names, &mut values, &mut raw_labels)?;
        }
    }

    let Some(data_line) = data_line else {
        return Err(DataError::Parse {
            line: last_line,
            message: "missing @data sentinel".into(),
        });
    };
    if raw_labels.is_empty() {
        return Err(DataError::Parse {
            line: data_line,
            message: "no data rows".into(),
        });
    }

    let n_features = attribute_names.len() - 1;
    let (labels, label_names) = assign_label_ids(&raw_labels)?;
    Dataset::new(
        Matrix::from_vec(values, n_features),
        labels,
        attribute_names[..n_features].to_vec(),
        label_names,
    )
}

fn parse_row<F: Scalar>(
    line: &str,
    line_no: usize,
    attribute_names: &[String],
    values: &mut Vec<F>,
    raw_labels: &mut Vec<String>,
) -> Result<(), DataError> {
    let fields: Vec<&str> = line.split(',').map(str::trim).collect();
    if fields.len() != attribute_names.len() {
        return Err(DataError::Parse {
            line: line_no,
            message: format!(
                "expected {} comma-separated fields, found {}",
                attribute_names.len(),
                fields.len()
            ),
        });
    }
    let class_pos = fields.len() - 1;
    for (col, &field) in fields.iter().enumerate() {
        if col == class_pos {
            raw_labels.push(field.to_owned());
            continue;
        }
        if field.is_empty() || field == "?" || field == "<null>" {
            return Err(DataError::MissingValue {
                row: line_no,
                column: attribute_names[col].clone(),
            });
        }
        let v: f64 = field.parse().map_err(|_| DataError::NonNumeric {
            line: line_no,
            column: attribute_names[col].clone(),
            value: field.to_owned(),
        })?;
        values.push(F::from_f64_lossy(v));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::ClassId;

    const SAMPLE: &str = "\
@relation toy
@attribute a real [0.0, 10.0]
@attribute b real
@attribute cls {positive, negative}
@inputs a, b
@outputs cls
@data
1.0, 2.0, positive
3.0, 4.0, negative
5.5, 6.5, negative
";

    #[test]
    fn parses_header_and_rows() {
        let d: Dataset<f64> = parse(SAMPLE).unwrap();
        assert_eq!(d.n_samples(), 3);
        assert_eq!(d.n_features(), 2);
        assert_eq!(d.feature_names(), &["a".to_owned(), "b".to_owned()]);
        // "negative" < "positive" lexicographically, so it takes id 0.
        assert_eq!(d.label_names(), &["negative".to_owned(), "positive".to_owned()]);
        assert_eq!(d.label(0), ClassId::SECOND);
        assert_eq!(d.row(2), &[5.5, 6.5]);
    }

    #[test]
    fn empty_data_section_is_an_error() {
        let text = "@relation t\n@attribute a real\n@attribute c {x,y}\n@data\n";
        let err = parse::<f64>(text).unwrap_err();
        match err {
            DataError::Parse { message, .. } => assert!(message.contains("no data rows")),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn three_classes_is_a_cardinality_error() {
        let text = "@relation t\n@attribute a real\n@attribute c {x,y,z}\n@data\n1,x\n2,y\n3,z\n";
        let err = parse::<f64>(text).unwrap_err();
        assert!(matches!(err, DataError::ClassCardinality { found } if found.len() == 3));
    }

    #[test]
    fn non_numeric_feature_is_a_type_error() {
        let text = "@relation t\n@attribute a real\n@attribute c {x,y}\n@data\nfoo,x\n2,y\n";
        let err = parse::<f64>(text).unwrap_err();
        assert!(matches!(err, DataError::NonNumeric { line: 5, .. }));
    }

    #[test]
    fn malformed_header_names_the_line() {
        let text = "@relation t\n@wat is this\n@data\n";
        let err = parse::<f64>(text).unwrap_err();
        assert!(matches!(err, DataError::Parse { line: 2, .. }));
    }

    #[test]
    fn field_count_mismatch_names_the_line() {
        let text = "@relation t\n@attribute a real\n@attribute c {x,y}\n@data\n1,2,x\n";
        let err = parse::<f64>(text).unwrap_err();
        assert!(matches!(err, DataError::Parse { line: 5, .. }));
    }

    #[test]
    fn missing_value_markers_are_rejected() {
        let text = "@relation t\n@attribute a real\n@attribute c {x,y}\n@data\n?,x\n1,y\n";
        let err = parse::<f64>(text).unwrap_err();
        assert!(matches!(err, DataError::MissingValue { row: 5, .. }));
    }
}
