//! Count tables: `series,year,matches,total` CSV, one row per series and year.

use std::io::{Read, Write};

use indexmap::IndexMap;
use thiserror::Error;

use crate::stats::{CountPoint, CountSeries};

pub const HEADER: [&str; 4] = ["series", "year", "matches", "total"];

#[derive(Debug, Error)]
pub enum CountsError {
    #[error("line {line}: {message}")]
    Row { line: u64, message: String },
    #[error(
        "line {line}: duplicate row for series {series:?} year {year} (first on line {first_line})"
    )]
    Duplicate {
        line: u64,
        first_line: u64,
        series: String,
        year: i32,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Series keyed by id, in order of first appearance.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CountTable {
    series: IndexMap<String, CountSeries>,
}

impl CountTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds or replaces a series.
    pub fn insert(&mut self, series: CountSeries) {
        self.series.insert(series.id().to_string(), series);
    }

    pub fn get(&self, id: &str) -> Option<&CountSeries> {
        self.series.get(id)
    }

    pub fn iter(&self) -> impl Iterator<Item = &CountSeries> {
        self.series.values()
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.series.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.series.len()
    }

    pub fn is_empty(&self) -> bool {
        self.series.is_empty()
    }
}

impl FromIterator<CountSeries> for CountTable {
    fn from_iter<T: IntoIterator<Item = CountSeries>>(iter: T) -> Self {
        let mut t = CountTable::new();
        iter.into_iter().for_each(|s| t.insert(s));
        t
    }
}

fn field<T: std::str::FromStr>(
    rec: &csv::StringRecord,
    i: usize,
    line: u64,
) -> Result<T, CountsError> {
    let raw = rec.get(i).unwrap_or("");
    raw.trim().parse().map_err(|_| CountsError::Row {
        line,
        message: format!("{} {raw:?} is not an integer", HEADER[i]),
    })
}

/// Parses a count table. Rows of one series may appear in any year order.
pub fn import_counts<R: Read>(source: R) -> Result<CountTable, CountsError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(source);
    let headers = rdr.headers()?.clone();
    if headers.iter().map(str::trim).ne(HEADER) {
        return Err(CountsError::Row {
            line: 1,
            message: format!(
                "expected header {:?}, found {:?}",
                HEADER.join(","),
                headers.iter().collect::<Vec<_>>().join(",")
            ),
        });
    }
    let mut rows: IndexMap<String, Vec<(CountPoint, u64)>> = IndexMap::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != 4 {
            return Err(CountsError::Row {
                line,
                message: format!("expected 4 fields, found {}", rec.len()),
            });
        }
        let series = rec[0].trim().to_string();
        if series.is_empty() {
            return Err(CountsError::Row {
                line,
                message: "empty series id".into(),
            });
        }
        let point = CountPoint {
            year: field(&rec, 1, line)?,
            matches: field(&rec, 2, line)?,
            total: field(&rec, 3, line)?,
        };
        if point.total == 0 {
            return Err(CountsError::Row {
                line,
                message: "total must be positive".into(),
            });
        }
        if point.matches > point.total {
            return Err(CountsError::Row {
                line,
                message: format!("matches {} exceed total {}", point.matches, point.total),
            });
        }
        let entry = rows.entry(series.clone()).or_default();
        if let Some((_, first_line)) = entry.iter().find(|(p, _)| p.year == point.year) {
            return Err(CountsError::Duplicate {
                line,
                first_line: *first_line,
                series,
                year: point.year,
            });
        }
        entry.push((point, line));
    }
    Ok(rows
        .into_iter()
        .map(|(id, pts)| {
            CountSeries::new(id, pts.into_iter().map(|(p, _)| p)).expect("rows validated above")
        })
        .collect())
}

/// Writes the canonical form: header, series in table order, years ascending.
pub fn export_counts<W: Write>(table: &CountTable, out: W) -> Result<(), CountsError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(HEADER)?;
    for s in table.iter() {
        for p in s.points() {
            w.write_record([
                s.id().to_string(),
                p.year.to_string(),
                p.matches.to_string(),
                p.total.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn import_group_rows() {
        let csv =
            "series,year,matches,total\ngroup1,2022,86988,5371500\ngroup1,2023,159655,5260000\n";
        let t = import_counts(csv.as_bytes()).unwrap();
        let s = t.get("group1").unwrap();
        let inc = crate::stats::count_increase(
            s.point(2022).unwrap().matches,
            s.point(2023).unwrap().matches,
        )
        .unwrap();
        assert_eq!(format!("{:.1}", inc * 100.0), "83.5");
    }

    #[test]
    fn matches_over_total_rejected() {
        let csv = "series,year,matches,total\na,2022,10,5\n";
        let err = import_counts(csv.as_bytes()).unwrap_err();
        assert!(matches!(err, CountsError::Row { line: 2, .. }), "{err}");
    }

    #[test]
    fn duplicate_rejected() {
        let csv = "series,year,matches,total\ngroup1,2022,1,5\ngroup1,2023,1,5\ngroup1,2022,2,5\n";
        let err = import_counts(csv.as_bytes()).unwrap_err();
        assert!(matches!(
            err,
            CountsError::Duplicate {
                line: 4,
                first_line: 2,
                ..
            }
        ));
    }

    #[test]
    fn schema_errors_name_lines() {
        for (csv, line) in [
            ("series,year,count,total\n", 1),
            ("series,year,matches,total\na,20x3,1,5\n", 2),
            ("series,year,matches,total\na,2020,1,5\na,2021,-1,5\n", 3),
            ("series,year,matches,total\na,2020,1\n", 2),
            ("series,year,matches,total\na,2020,0,0\n", 2),
        ] {
            match import_counts(csv.as_bytes()) {
                Err(CountsError::Row { line: l, .. }) => assert_eq!(l, line, "{csv}"),
                other => panic!("{csv}: {other:?}"),
            }
        }
    }

    #[test]
    fn canonical_round_trip() {
        let csv = "series,year,matches,total\nb,2021,3,10\nb,2022,4,10\na,2022,1,7\n";
        let t = import_counts(csv.as_bytes()).unwrap();
        let mut out = Vec::new();
        export_counts(&t, &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), csv);
    }

    #[test]
    fn unsorted_years_are_sorted() {
        let csv = "series,year,matches,total\nb,2022,4,10\nb,2021,3,10\n";
        let t = import_counts(csv.as_bytes()).unwrap();
        let years: Vec<i32> = t.get("b").unwrap().years().collect();
        assert_eq!(years, [2021, 2022]);
    }
}
