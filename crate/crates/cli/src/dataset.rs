//! CSV datasets.
//!
//! Labeled files have the header `y,x1,...,xn` with `y` one of `-1`, `+1`
//! or `1`. Any other header is read as unlabeled points.

use std::io::{Read, Write};
use std::path::Path;

use radon_svm::svm::Label;
use radon_svm::{LabeledPointSet, PointSet};

use crate::{CliError, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Dataset {
    Labeled(LabeledPointSet),
    Unlabeled(PointSet),
}

impl Dataset {
    pub fn points(&self) -> PointSet {
        match self {
            Dataset::Labeled(d) => {
                PointSet::with_dim(d.dim(), d.points().to_vec()).expect("validated points")
            }
            Dataset::Unlabeled(p) => p.clone(),
        }
    }

    pub fn labeled(self) -> Result<LabeledPointSet> {
        match self {
            Dataset::Labeled(d) => Ok(d),
            Dataset::Unlabeled(_) => Err(CliError::Usage(
                "this command needs labeled data (header y,x1,...,xn)".into(),
            )),
        }
    }
}

fn parse_label(field: &str) -> Option<Label> {
    match field {
        "1" | "+1" => Some(Label::Positive),
        "-1" | "\u{2212}1" => Some(Label::Negative),
        _ => None,
    }
}

fn parse_value(field: &str, line: u64) -> Result<f64> {
    match field.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(CliError::Parse {
            line,
            message: format!("expected a finite number, found {field:?}"),
        }),
    }
}

pub fn read_dataset<R: Read>(input: R) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(input);
    let header = reader
        .headers()
        .map_err(|e| CliError::Parse {
            line: 1,
            message: e.to_string(),
        })?
        .clone();
    if header.is_empty() || header.iter().all(str::is_empty) {
        return Err(CliError::Parse {
            line: 1,
            message: "missing header".into(),
        });
    }
    let labeled = header.get(0).is_some_and(|h| h.eq_ignore_ascii_case("y"));
    let dim = header.len() - usize::from(labeled);
    if dim == 0 {
        return Err(CliError::Parse {
            line: 1,
            message: "no coordinate columns".into(),
        });
    }

    let mut points = Vec::new();
    let mut labels = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| CliError::Parse {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != header.len() {
            return Err(CliError::Parse {
                line,
                message: format!("expected {} fields, found {}", header.len(), record.len()),
            });
        }
        let mut fields = record.iter();
        if labeled {
            let raw = fields.next().unwrap_or_default();
            let label = parse_label(raw).ok_or_else(|| CliError::Parse {
                line,
                message: format!("label must be -1 or +1, found {raw:?}"),
            })?;
            labels.push(label);
        }
        points.push(fields.map(|f| parse_value(f, line)).collect::<Result<Vec<_>>>()?);
    }
    Ok(if labeled {
        Dataset::Labeled(LabeledPointSet::new(points, labels)?)
    } else {
        Dataset::Unlabeled(PointSet::with_dim(dim, points)?)
    })
}

pub fn read_dataset_file(path: &Path) -> Result<Dataset> {
    if path.as_os_str() == "-" {
        return read_dataset(std::io::stdin().lock());
    }
    let file = std::fs::File::open(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    read_dataset(file)
}

/// Writes `y,x1,...,xn` rows. Values use the shortest representation that
/// parses back to the same `f64`, so the file round-trips exactly.
pub fn write_dataset<W: Write>(data: &LabeledPointSet, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io_err = |e: csv::Error| CliError::Io {
        path: "<output>".into(),
        source: e.into(),
    };
    let mut header = vec!["y".to_string()];
    header.extend((1..=data.dim()).map(|d| format!("x{d}")));
    w.write_record(&header).map_err(io_err)?;
    for (p, label) in data.points().iter().zip(data.labels()) {
        let mut row = vec![if *label == Label::Positive { "1" } else { "-1" }.to_string()];
        row.extend(p.iter().map(f64::to_string));
        w.write_record(&row).map_err(io_err)?;
    }
    w.flush().map_err(|source| CliError::Io {
        path: "<output>".into(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_labeled_csv() {
        let text = "y,x1,x2\n-1,0,1\n-1,0,-1\n+1,2,0\n";
        let Dataset::Labeled(d) = read_dataset(text.as_bytes()).unwrap() else {
            panic!("expected labels");
        };
        assert_eq!(d.len(), 3);
        assert_eq!(d.label(2), Label::Positive);
        assert_eq!(d.point(1), &[0.0, -1.0]);
    }

    #[test]
    fn reads_unlabeled_csv() {
        let text = "x1,x2\n0,0\n1,0\n";
        let Dataset::Unlabeled(p) = read_dataset(text.as_bytes()).unwrap() else {
            panic!("expected points");
        };
        assert_eq!(p.len(), 2);
    }

    #[test]
    fn errors_name_the_line() {
        let text = "y,x1\n1,0\n1,zero\n";
        let err = read_dataset(text.as_bytes()).unwrap_err();
        assert!(err.to_string().starts_with("line 3:"), "{err}");

        let text = "y,x1\n1,0\n2,1\n";
        let err = read_dataset(text.as_bytes()).unwrap_err();
        assert!(err.to_string().starts_with("line 3:"), "{err}");

        let text = "y,x1,x2\n1,0,0\n-1,1\n";
        let err = read_dataset(text.as_bytes()).unwrap_err();
        assert!(err.to_string().starts_with("line 3:"), "{err}");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn written_files_parse_back() {
        let d = LabeledPointSet::new(
            vec![vec![0.1, -3.0e-17], vec![1.0 / 3.0, 2.5e300]],
            vec![Label::Negative, Label::Positive],
        )
        .unwrap();
        let mut buf = Vec::new();
        write_dataset(&d, &mut buf).unwrap();
        assert_eq!(read_dataset(buf.as_slice()).unwrap(), Dataset::Labeled(d));
    }
}
