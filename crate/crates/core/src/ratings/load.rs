//! Log-file parsing.
//!
//! Canonical format: UTF-8, one record per line,
//! `user<TAB>item<TAB>rating[<TAB>date]`, `#`-prefixed comment lines and
//! blank lines skipped. The MovieLens native `::`-separated layout
//! (`user::item::rating::timestamp`) is accepted via [`LogFormat::MovieLens`].

use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::error::{Error, Result};

use super::{LogDate, RatingLog, RatingScale, RatingsMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LogFormat {
    #[default]
    Tsv,
    MovieLens,
}

impl std::str::FromStr for LogFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tsv" => Ok(LogFormat::Tsv),
            "movielens" | "ml" => Ok(LogFormat::MovieLens),
            other => Err(Error::InvalidParam(format!(
                "unknown log format '{other}' (expected tsv or movielens)"
            ))),
        }
    }
}

/// Reads a log file into raw, in-order records without deduplication.
/// Use this to build several matrices over one shared id universe via
/// [`RatingsMatrix::from_log_sets`].
pub fn read_logs(path: &Path, scale: RatingScale, format: LogFormat) -> Result<Vec<RatingLog>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);
    let shown = path.display().to_string();
    let mut logs = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let lineno = idx + 1;
        let trimmed = line.trim_end_matches(['\r', '\n']);
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let log = parse_record(trimmed, format)
            .map_err(|msg| Error::parse(&shown, lineno, msg))?;
        if !scale.contains(log.rating) {
            return Err(Error::parse(
                &shown,
                lineno,
                format!(
                    "rating {} outside scale [{}, {}] in record '{trimmed}'",
                    log.rating, scale.min, scale.max
                ),
            ));
        }
        logs.push(log);
    }
    if logs.is_empty() {
        return Err(Error::EmptyInput { path: shown });
    }
    Ok(logs)
}

/// Reads a log file into a deduplicated [`RatingsMatrix`].
pub fn load_logs(path: &Path, scale: RatingScale, format: LogFormat) -> Result<RatingsMatrix> {
    RatingsMatrix::from_logs(read_logs(path, scale, format)?, scale)
}

fn parse_record(line: &str, format: LogFormat) -> std::result::Result<RatingLog, String> {
    let fields: Vec<&str> = match format {
        LogFormat::Tsv => line.split('\t').collect(),
        LogFormat::MovieLens => line.split("::").collect(),
    };
    if fields.len() < 3 || fields.len() > 4 {
        return Err(format!(
            "expected user, item, rating[, date] but found {} fields",
            fields.len()
        ));
    }
    let rating: f64 = fields[2]
        .trim()
        .parse()
        .map_err(|_| format!("unparseable rating '{}'", fields[2]))?;
    let date = match fields.get(3) {
        None => None,
        Some(raw) => Some(
            LogDate::parse(raw.trim()).ok_or_else(|| format!("unparseable date '{raw}'"))?,
        ),
    };
    if fields[0].is_empty() || fields[1].is_empty() {
        return Err("empty user or item id".to_owned());
    }
    Ok(RatingLog {
        user: fields[0].to_owned(),
        item: fields[1].to_owned(),
        rating,
        date,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_temp(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    fn scale15() -> RatingScale {
        RatingScale::new(1.0, 5.0).unwrap()
    }

    #[test]
    fn loads_tsv_with_comments_and_dates() {
        let f = write_temp("# header\nu1\ti1\t5\nu1\ti2\t3\t2004-07-21\n\nu2\ti1\t4\n");
        let m = load_logs(f.path(), scale15(), LogFormat::Tsv).unwrap();
        assert_eq!(m.len(), 3);
        assert_eq!(m.n_users(), 2);
        let u1 = m.users().get("u1").unwrap();
        let i2 = m.items().get("i2").unwrap();
        assert_eq!(m.rating(u1, i2), Some(3.0));
        let entry = m.user_row(u1).iter().find(|e| e.other == i2).unwrap();
        assert_eq!(entry.date, LogDate::parse("2004-07-21"));
    }

    #[test]
    fn loads_movielens_native_format() {
        let f = write_temp("1::1193::5::978300760\n1::661::3::978302109\n");
        let m = load_logs(f.path(), scale15(), LogFormat::MovieLens).unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m.users().get("1"), Some(0));
        assert_eq!(m.items().get("1193"), Some(0));
        let entry = m.user_row(0)[0];
        assert!(entry.date.is_some());
    }

    #[test]
    fn parse_failure_reports_line_number() {
        let f = write_temp("u1\ti1\t5\nu2\ti1\tbad\n");
        let err = load_logs(f.path(), scale15(), LogFormat::Tsv).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains(":2:"), "{msg}");
        assert!(msg.contains("bad"), "{msg}");
    }

    #[test]
    fn out_of_scale_record_is_named_with_line() {
        let f = write_temp("u1\ti1\t9\n");
        let err = load_logs(f.path(), scale15(), LogFormat::Tsv).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains(":1:") && msg.contains("u1\ti1\t9"), "{msg}");
    }

    #[test]
    fn empty_file_is_an_error() {
        let f = write_temp("# only comments\n");
        let err = load_logs(f.path(), scale15(), LogFormat::Tsv).unwrap_err();
        assert!(matches!(err, Error::EmptyInput { .. }));
    }

    #[test]
    fn write_then_load_round_trips_fingerprint() {
        let f = write_temp("u1\ti1\t5\nu1\ti2\t3\t2004-07-21\nu2\ti1\t4\t978300760\n");
        let m = load_logs(f.path(), scale15(), LogFormat::Tsv).unwrap();
        let out = tempfile::NamedTempFile::new().unwrap();
        m.write_logs(out.path()).unwrap();
        let again = load_logs(out.path(), scale15(), LogFormat::Tsv).unwrap();
        assert_eq!(m.fingerprint(), again.fingerprint());
        assert_eq!(m.len(), again.len());
    }
}
