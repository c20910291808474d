//! CSV ingestion: rows of (value, status) split into control and case
//! vectors, with an optional log transform at load time.

use concroc::error::{Error, Result};
use csv::{ReaderBuilder, Trim};
use std::path::Path;

/// Loading options; columns are looked up by header name.
pub struct CsvOptions {
    pub log_transform: bool,
    pub value_col: String,
    pub status_col: String,
    pub delimiter: u8,
}

/// A loaded two-group dataset plus a digest of the raw file bytes.
#[derive(Debug)]
pub struct Dataset {
    pub controls: Vec<f64>,
    pub cases: Vec<f64>,
    pub digest: String,
}

// FNV-1a over the raw bytes: stable across platforms and runs, cheap,
// and good enough to identify an input file in a report.
fn fnv1a(bytes: &[u8]) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100_0000_01b3);
    }
    format!("{h:016x}")
}

fn distinct_count(values: &[f64]) -> usize {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    sorted.dedup();
    sorted.len()
}

/// Read a dataset file: '#' lines are comments, a header row is
/// required, status must be 0 (control) or 1 (case). Errors name the
/// offending line.
pub fn load_csv(path: &Path, opts: &CsvOptions) -> Result<Dataset> {
    let bytes = std::fs::read(path)?;
    let digest = fnv1a(&bytes);
    let mut reader = ReaderBuilder::new()
        .delimiter(opts.delimiter)
        .comment(Some(b'#'))
        .trim(Trim::All)
        .from_reader(bytes.as_slice());

    let headers = reader.headers()?.clone();
    let col = |name: &str| {
        headers.iter().position(|h| h == name).ok_or_else(|| {
            Error::Csv(format!("missing column '{name}' in header"))
        })
    };
    let value_idx = col(&opts.value_col)?;
    let status_idx = col(&opts.status_col)?;

    let mut controls = Vec::new();
    let mut cases = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map(|p| p.line()).unwrap_or(0) as usize;
        let field = |idx: usize| {
            record.get(idx).ok_or_else(|| {
                Error::Csv(format!("line {line}: too few fields"))
            })
        };
        let raw_value = field(value_idx)?;
        let mut value: f64 = raw_value.parse().map_err(|_| {
            Error::Csv(format!("line {line}: cannot parse value '{raw_value}'"))
        })?;
        if !value.is_finite() {
            return Err(Error::Csv(format!("line {line}: non-finite value")));
        }
        if opts.log_transform {
            if value <= 0.0 {
                return Err(Error::NonPositiveForLog { index: line, value });
            }
            value = value.ln();
        }
        match field(status_idx)? {
            "0" => controls.push(value),
            "1" => cases.push(value),
            other => {
                return Err(Error::Csv(format!(
                    "line {line}: status must be 0 or 1, got '{other}'"
                )))
            }
        }
    }

    for (name, group) in [("controls", &controls), ("cases", &cases)] {
        let distinct = distinct_count(group);
        if distinct < 2 {
            return Err(Error::InvalidParam {
                name,
                reason: format!(
                    "need at least 2 distinct values, got {distinct} in {} rows",
                    group.len()
                ),
            });
        }
    }

    Ok(Dataset {
        controls,
        cases,
        digest,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn opts() -> CsvOptions {
        CsvOptions {
            log_transform: false,
            value_col: "value".into(),
            status_col: "status".into(),
            delimiter: b',',
        }
    }

    fn write_temp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn splits_groups_by_status() {
        let f = write_temp("value,status\n1,0\n2,0\n3,1\n4,1\n");
        let d = load_csv(f.path(), &opts()).unwrap();
        assert_eq!(d.controls, vec![1.0, 2.0]);
        assert_eq!(d.cases, vec![3.0, 4.0]);
        assert_eq!(d.digest.len(), 16);
    }

    #[test]
    fn skips_comments_and_honors_column_names() {
        let f = write_temp("# generated\nid,score,status\n7,1.5,0\n8,2.5,0\n9,3.5,1\n10,4,1\n");
        let d = load_csv(
            f.path(),
            &CsvOptions {
                value_col: "score".into(),
                ..opts()
            },
        )
        .unwrap();
        assert_eq!(d.controls, vec![1.5, 2.5]);
        assert_eq!(d.cases, vec![3.5, 4.0]);
    }

    #[test]
    fn log_transform_rejects_nonpositive_with_line() {
        let f = write_temp("value,status\n1,0\n2,0\n0,1\n4,1\n");
        let err = load_csv(
            f.path(),
            &CsvOptions {
                log_transform: true,
                ..opts()
            },
        )
        .unwrap_err();
        assert!(matches!(err, Error::NonPositiveForLog { index: 4, .. }));
    }

    #[test]
    fn bad_rows_name_their_line() {
        let f = write_temp("value,status\n1,0\n2,0\nx,1\n");
        let err = load_csv(f.path(), &opts()).unwrap_err().to_string();
        assert!(err.contains("line 4"), "{err}");

        let f = write_temp("value,status\n1,0\n2,0\n3,2\n");
        let err = load_csv(f.path(), &opts()).unwrap_err().to_string();
        assert!(err.contains("line 4") && err.contains("status"), "{err}");
    }

    #[test]
    fn missing_column_and_degenerate_groups_are_rejected() {
        let f = write_temp("v,status\n1,0\n2,1\n");
        assert!(load_csv(f.path(), &opts()).is_err());

        let f = write_temp("value,status\n1,0\n1,0\n2,1\n3,1\n");
        let err = load_csv(f.path(), &opts()).unwrap_err().to_string();
        assert!(err.contains("controls"), "{err}");
    }

    #[test]
    fn alternative_delimiter_and_unbalanced_groups() {
        let mut content = String::from("value;status\n");
        for i in 0..51 {
            content.push_str(&format!("{};0\n", 10.0 + i as f64));
        }
        for i in 0..90 {
            content.push_str(&format!("{};1\n", 30.0 + i as f64));
        }
        let f = write_temp(&content);
        let d = load_csv(
            f.path(),
            &CsvOptions {
                delimiter: b';',
                ..opts()
            },
        )
        .unwrap();
        assert_eq!(d.controls.len(), 51);
        assert_eq!(d.cases.len(), 90);
    }

    #[test]
    fn log_transform_applies_ln() {
        let f = write_temp("value,status\n1,0\n2.718281828459045,0\n1,1\n7.389056098930650,1\n");
        let d = load_csv(
            f.path(),
            &CsvOptions {
                log_transform: true,
                ..opts()
            },
        )
        .unwrap();
        assert!((d.controls[1] - 1.0).abs() <= 1e-15);
        assert!((d.cases[1] - 2.0).abs() <= 1e-15);
    }
}
