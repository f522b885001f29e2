//! Drift and excess reports and their text, CSV and JSON renderings.
//!
//! Reports hold the raw values computed by [`crate::stats`]. Renderers only
//! format them: text output rounds percentages to one decimal, CSV and JSON
//! carry full precision.

use std::fmt::Write as _;
use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use crate::stats::{self, CountSeries, StatsError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Text,
    Csv,
    Json,
}

#[derive(Debug, Clone)]
pub struct DriftOptions {
    /// Years shown in the per-year table.
    pub years: Option<RangeInclusive<i32>>,
    pub base_year: Option<i32>,
    pub target_year: Option<i32>,
    pub growth: f64,
    /// Denominator for the excess share; defaults to the target-year total.
    pub total: Option<u64>,
}

impl Default for DriftOptions {
    fn default() -> Self {
        DriftOptions {
            years: None,
            base_year: None,
            target_year: None,
            growth: stats::DEFAULT_GROWTH_SINGLE,
            total: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointReport {
    pub year: i32,
    pub matches: u64,
    pub total: u64,
    pub share: f64,
    /// Change from the previous calendar year; absent when undefined.
    pub yoy_change: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IncreaseReport {
    pub base_year: i32,
    pub target_year: i32,
    pub base_matches: u64,
    pub target_matches: u64,
    pub count_increase: Option<f64>,
    pub share_increase: Option<f64>,
    pub implied_total_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExcessReport {
    pub base_year: i32,
    pub target_year: i32,
    pub growth: f64,
    pub base_count: u64,
    pub expected: u64,
    pub actual: u64,
    pub excess: i64,
    pub total: u64,
    pub excess_share: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesReport {
    pub series: String,
    pub points: Vec<PointReport>,
    pub increase: Option<IncreaseReport>,
    pub excess: Option<ExcessReport>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DriftReport {
    pub series: Vec<SeriesReport>,
}

/// Picks `(base, target)`: the requested years, else the last year of the
/// series and the year before it.
fn year_pair(series: &CountSeries, opts: &DriftOptions) -> Result<Option<(i32, i32)>, StatsError> {
    let missing = |year| StatsError::MissingYear {
        series: series.id().to_string(),
        year,
    };
    let target = match opts.target_year {
        Some(y) => {
            series.point(y).ok_or_else(|| missing(y))?;
            y
        }
        None => match series.points().last() {
            Some(p) => p.year,
            None => return Ok(None),
        },
    };
    let base = match opts.base_year {
        Some(y) => {
            series.point(y).ok_or_else(|| missing(y))?;
            y
        }
        None => {
            if series.point(target - 1).is_none() {
                if opts.target_year.is_some() {
                    return Err(missing(target - 1));
                }
                return Ok(None);
            }
            target - 1
        }
    };
    Ok(Some((base, target)))
}

/// Increase between `base` and `target` for one series.
pub fn increase(
    series: &CountSeries,
    base: i32,
    target: i32,
) -> Result<IncreaseReport, StatsError> {
    let missing = |year| StatsError::MissingYear {
        series: series.id().to_string(),
        year,
    };
    let b = series.point(base).ok_or_else(|| missing(base))?;
    let t = series.point(target).ok_or_else(|| missing(target))?;
    let count_increase = stats::count_increase(b.matches, t.matches).ok();
    let share_increase = stats::share_increase(b.matches, b.total, t.matches, t.total).ok();
    let implied_total_ratio = count_increase
        .zip(share_increase)
        .map(|(c, s)| stats::implied_total_ratio(c, s));
    Ok(IncreaseReport {
        base_year: base,
        target_year: target,
        base_matches: b.matches,
        target_matches: t.matches,
        count_increase,
        share_increase,
        implied_total_ratio,
    })
}

/// Excess of the `target` count over the projection of the `base` count.
pub fn excess_report(
    series: &CountSeries,
    base: i32,
    target: i32,
    growth: f64,
    total: Option<u64>,
) -> Result<ExcessReport, StatsError> {
    let missing = |year| StatsError::MissingYear {
        series: series.id().to_string(),
        year,
    };
    let b = series.point(base).ok_or_else(|| missing(base))?;
    let t = series.point(target).ok_or_else(|| missing(target))?;
    let expected = stats::baseline_projection(b.matches, growth)?;
    let total = total.unwrap_or(t.total);
    let ex = stats::excess(t.matches, expected, Some(total))?;
    Ok(ExcessReport {
        base_year: base,
        target_year: target,
        growth,
        base_count: b.matches,
        expected,
        actual: t.matches,
        excess: ex.count,
        total,
        excess_share: ex.share.expect("total supplied"),
    })
}

pub fn series_report(
    series: &CountSeries,
    opts: &DriftOptions,
) -> Result<SeriesReport, StatsError> {
    let shown = match &opts.years {
        Some(w) => series.window(w),
        None => series.clone(),
    };
    let points = shown
        .points()
        .iter()
        .map(|p| PointReport {
            year: p.year,
            matches: p.matches,
            total: p.total,
            share: p.share(),
            yoy_change: series.yoy_at(p.year),
        })
        .collect();
    let (increase, excess) = match year_pair(series, opts)? {
        Some((base, target)) => (
            Some(increase(series, base, target)?),
            Some(excess_report(
                series,
                base,
                target,
                opts.growth,
                opts.total,
            )?),
        ),
        None => (None, None),
    };
    Ok(SeriesReport {
        series: series.id().to_string(),
        points,
        increase,
        excess,
    })
}

pub fn drift_report<'a>(
    series: impl IntoIterator<Item = &'a CountSeries>,
    opts: &DriftOptions,
) -> Result<DriftReport, StatsError> {
    Ok(DriftReport {
        series: series
            .into_iter()
            .map(|s| series_report(s, opts))
            .collect::<Result<_, _>>()?,
    })
}

/// Signed percentage with one decimal, e.g. `+5.0%`.
pub fn signed_pct(x: f64) -> String {
    let s = format!("{:+.1}%", x * 100.0);
    if s == "-0.0%" {
        "+0.0%".to_string()
    } else {
        s
    }
}

/// Share as a percentage with two decimals, e.g. `2.10%`.
pub fn share_pct(x: f64) -> String {
    format!("{:.2}%", x * 100.0)
}

fn opt_pct(x: Option<f64>) -> String {
    x.map(signed_pct).unwrap_or_else(|| "-".into())
}

fn opt_raw(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn render_drift_text(r: &DriftReport) -> String {
    let mut out = String::new();
    for s in &r.series {
        let _ = writeln!(out, "series: {}", s.series);
        let _ = writeln!(
            out,
            "{:>6}  {:>10}  {:>10}  {:>8}  {:>8}",
            "year", "matches", "total", "share", "yoy"
        );
        for p in &s.points {
            let _ = writeln!(
                out,
                "{:>6}  {:>10}  {:>10}  {:>8}  {:>8}",
                p.year,
                p.matches,
                p.total,
                share_pct(p.share),
                opt_pct(p.yoy_change)
            );
        }
        if let Some(inc) = &s.increase {
            let _ = writeln!(
                out,
                "increase {}->{}: count {} ({} -> {}), share {}",
                inc.base_year,
                inc.target_year,
                opt_pct(inc.count_increase),
                inc.base_matches,
                inc.target_matches,
                opt_pct(inc.share_increase),
            );
        }
        out.push('\n');
    }
    out
}

fn render_drift_csv(r: &DriftReport) -> String {
    let mut out = String::from(
        "series,year,matches,total,share,yoy_change,count_increase,share_increase,implied_total_ratio\n",
    );
    for s in &r.series {
        for p in &s.points {
            let inc = s.increase.as_ref().filter(|i| i.target_year == p.year);
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                csv_field(&s.series),
                p.year,
                p.matches,
                p.total,
                p.share,
                opt_raw(p.yoy_change),
                opt_raw(inc.and_then(|i| i.count_increase)),
                opt_raw(inc.and_then(|i| i.share_increase)),
                opt_raw(inc.and_then(|i| i.implied_total_ratio)),
            );
        }
    }
    out
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn render_drift(r: &DriftReport, format: Format) -> String {
    match format {
        Format::Text => render_drift_text(r),
        Format::Csv => render_drift_csv(r),
        Format::Json => serde_json::to_string_pretty(r).expect("report serializes") + "\n",
    }
}

/// One excess row per series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExcessRow {
    pub series: String,
    #[serde(flatten)]
    pub excess: ExcessReport,
}

pub fn render_excess(rows: &[ExcessRow], format: Format) -> String {
    let mut out = String::new();
    match format {
        Format::Text => {
            let _ = writeln!(
                out,
                "{:<12} {:>11} {:>7} {:>10} {:>10} {:>10} {:>9} {:>10} {:>8}",
                "series",
                "years",
                "growth",
                "base_count",
                "expected",
                "actual",
                "excess",
                "total",
                "share"
            );
            for r in rows {
                let e = &r.excess;
                let _ = writeln!(
                    out,
                    "{:<12} {:>11} {:>7} {:>10} {:>10} {:>10} {:>9} {:>10} {:>8}",
                    r.series,
                    format!("{}->{}", e.base_year, e.target_year),
                    signed_pct(e.growth),
                    e.base_count,
                    e.expected,
                    e.actual,
                    e.excess,
                    e.total,
                    share_pct(e.excess_share),
                );
            }
        }
        Format::Csv => {
            out.push_str("series,base_year,target_year,growth,base_count,expected,actual,excess,total,excess_share\n");
            for r in rows {
                let e = &r.excess;
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{},{}",
                    csv_field(&r.series),
                    e.base_year,
                    e.target_year,
                    e.growth,
                    e.base_count,
                    e.expected,
                    e.actual,
                    e.excess,
                    e.total,
                    e.excess_share
                );
            }
        }
        Format::Json => {
            out = serde_json::to_string_pretty(rows).expect("rows serialize") + "\n";
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::CountPoint;

    fn series(id: &str, pts: &[(i32, u64, u64)]) -> CountSeries {
        CountSeries::new(
            id,
            pts.iter().map(|&(year, matches, total)| CountPoint {
                year,
                matches,
                total,
            }),
        )
        .unwrap()
    }

    #[test]
    fn pct_rendering() {
        assert_eq!(signed_pct(0.0210 / 0.0200 - 1.0), "+5.0%");
        assert_eq!(signed_pct(-0.0001), "+0.0%");
        assert_eq!(signed_pct(-0.12), "-12.0%");
        assert_eq!(share_pct(0.021), "2.10%");
    }

    #[test]
    fn default_year_pair_is_last_two() {
        let s = series("g", &[(2021, 10, 100), (2022, 20, 100), (2023, 30, 100)]);
        let r = series_report(&s, &DriftOptions::default()).unwrap();
        let inc = r.increase.unwrap();
        assert_eq!((inc.base_year, inc.target_year), (2022, 2023));
        assert_eq!(r.points[0].yoy_change, None);
    }

    #[test]
    fn single_year_has_gaps() {
        let s = series("g", &[(2023, 30, 100)]);
        let r = series_report(&s, &DriftOptions::default()).unwrap();
        assert!(r.increase.is_none());
        let text = render_drift(&DriftReport { series: vec![r] }, Format::Text);
        assert!(text.lines().nth(2).unwrap().trim_end().ends_with('-'));
    }

    #[test]
    fn missing_requested_year_is_error() {
        let s = series("g", &[(2022, 20, 100), (2023, 30, 100)]);
        let opts = DriftOptions {
            base_year: Some(2019),
            ..DriftOptions::default()
        };
        assert!(matches!(
            series_report(&s, &opts),
            Err(StatsError::MissingYear { year: 2019, .. })
        ));
    }

    #[test]
    fn excess_defaults_to_target_total() {
        let s = series("g", &[(2022, 100, 1000), (2023, 120, 2000)]);
        let e = excess_report(&s, 2022, 2023, 0.05, None).unwrap();
        assert_eq!((e.expected, e.excess, e.total), (105, 15, 2000));
        assert_eq!(e.excess_share, 15.0 / 2000.0);
    }
}
