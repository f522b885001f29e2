//! Yearly prevalence statistics: shares, year-on-year changes, increases,
//! baseline projections and excess counts.

use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::index::YearTermIndex;
use crate::query::{Query, QueryError};

/// Default organic growth allowance for single-term groups.
pub const DEFAULT_GROWTH_SINGLE: f64 = 0.05;
/// Default organic growth allowance for multi-term groups.
pub const DEFAULT_GROWTH_MULTI: f64 = 0.11;

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("total must be positive")]
    ZeroTotal,
    #[error("year-on-year change undefined: previous share is zero")]
    UndefinedChange,
    #[error("increase undefined: previous count is zero")]
    ZeroBase,
    #[error("growth allowance {0} must be greater than -1")]
    InvalidGrowth(f64),
    #[error("series {series:?}: year {year} has {matches} matches but total {total}")]
    MatchesExceedTotal {
        series: String,
        year: i32,
        matches: u64,
        total: u64,
    },
    #[error("series {series:?}: year {year} listed twice")]
    DuplicateYear { series: String, year: i32 },
    #[error("series {series:?} has no data for year {year}")]
    MissingYear { series: String, year: i32 },
    #[error("series {0:?}: need at least two consecutive years with positive shares")]
    InsufficientData(String),
}

/// Fraction of documents matching: `matches / total`.
pub fn share(matches: u64, total: u64) -> Result<f64, StatsError> {
    if total == 0 {
        return Err(StatsError::ZeroTotal);
    }
    Ok(matches as f64 / total as f64)
}

/// Relative change of a share: `current / previous - 1`.
///
/// A share of 2.00% followed by 2.10% is a +5% change.
pub fn yoy_change(share_curr: f64, share_prev: f64) -> Result<f64, StatsError> {
    if share_prev <= 0.0 {
        return Err(StatsError::UndefinedChange);
    }
    Ok(share_curr / share_prev - 1.0)
}

/// Growth of the raw match count between two years.
pub fn count_increase(n_prev: u64, n_curr: u64) -> Result<f64, StatsError> {
    if n_prev == 0 {
        return Err(StatsError::ZeroBase);
    }
    Ok(n_curr as f64 / n_prev as f64 - 1.0)
}

/// Growth of the prevalence share between two years.
pub fn share_increase(
    n_prev: u64,
    total_prev: u64,
    n_curr: u64,
    total_curr: u64,
) -> Result<f64, StatsError> {
    if n_prev == 0 {
        return Err(StatsError::ZeroBase);
    }
    yoy_change(share(n_curr, total_curr)?, share(n_prev, total_prev)?)
}

/// The `total_prev / total_curr` ratio under which a count increase and a
/// share increase describe the same pair of counts.
pub fn implied_total_ratio(count_inc: f64, share_inc: f64) -> f64 {
    (1.0 + share_inc) / (1.0 + count_inc)
}

/// Rounds half away from zero, treating values within floating-point noise of
/// a tie as the tie.
fn round_half_away(x: f64) -> f64 {
    let floor = x.floor();
    let frac = x - floor;
    if (frac - 0.5).abs() <= 16.0 * f64::EPSILON * x.abs().max(1.0) {
        if x >= 0.0 {
            floor + 1.0
        } else {
            floor
        }
    } else {
        x.round()
    }
}

/// Expected count after one year of organic growth `g`, rounded half away
/// from zero.
pub fn baseline_projection(n_base: u64, g: f64) -> Result<u64, StatsError> {
    if !g.is_finite() || g <= -1.0 {
        return Err(StatsError::InvalidGrowth(g));
    }
    Ok(round_half_away(n_base as f64 * (1.0 + g)) as u64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Excess {
    pub count: i64,
    pub share: Option<f64>,
}

/// Documents above the projection; negative when the count fell short.
pub fn excess(actual: u64, expected: u64, total: Option<u64>) -> Result<Excess, StatsError> {
    let count = actual as i64 - expected as i64;
    let share = match total {
        Some(0) => return Err(StatsError::ZeroTotal),
        Some(t) => Some(count as f64 / t as f64),
        None => None,
    };
    Ok(Excess { count, share })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountPoint {
    pub year: i32,
    pub matches: u64,
    pub total: u64,
}

impl CountPoint {
    pub fn share(&self) -> f64 {
        self.matches as f64 / self.total as f64
    }
}

/// Yearly `(matches, total)` counts for one series, years ascending.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountSeries {
    id: String,
    points: Vec<CountPoint>,
}

impl CountSeries {
    /// Validates and sorts the points.
    pub fn new(
        id: impl Into<String>,
        points: impl IntoIterator<Item = CountPoint>,
    ) -> Result<Self, StatsError> {
        let id = id.into();
        let mut points: Vec<CountPoint> = points.into_iter().collect();
        points.sort_by_key(|p| p.year);
        for p in &points {
            if p.total == 0 {
                return Err(StatsError::ZeroTotal);
            }
            if p.matches > p.total {
                return Err(StatsError::MatchesExceedTotal {
                    series: id,
                    year: p.year,
                    matches: p.matches,
                    total: p.total,
                });
            }
        }
        if let Some(w) = points.windows(2).find(|w| w[0].year == w[1].year) {
            return Err(StatsError::DuplicateYear {
                series: id,
                year: w[0].year,
            });
        }
        Ok(CountSeries { id, points })
    }

    /// A series of query matches over every indexed year.
    pub fn from_index(
        id: impl Into<String>,
        index: &YearTermIndex,
        q: &Query,
    ) -> Result<Self, QueryError> {
        let totals = index.totals();
        let points = index
            .eval_counts(q)?
            .into_iter()
            .map(|(year, matches)| CountPoint {
                year,
                matches,
                total: totals[&year],
            });
        Ok(CountSeries::new(id, points).expect("index counts are consistent"))
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn points(&self) -> &[CountPoint] {
        &self.points
    }

    pub fn years(&self) -> impl Iterator<Item = i32> + '_ {
        self.points.iter().map(|p| p.year)
    }

    pub fn point(&self, year: i32) -> Option<&CountPoint> {
        self.points
            .binary_search_by_key(&year, |p| p.year)
            .ok()
            .map(|i| &self.points[i])
    }

    pub fn share_at(&self, year: i32) -> Option<f64> {
        self.point(year).map(CountPoint::share)
    }

    /// Share change from `year - 1` to `year`; `None` when either year is
    /// missing or the earlier share is zero.
    pub fn yoy_at(&self, year: i32) -> Option<f64> {
        let prev = self.share_at(year - 1)?;
        yoy_change(self.share_at(year)?, prev).ok()
    }

    /// Restricts the series to a year window.
    pub fn window(&self, years: &RangeInclusive<i32>) -> CountSeries {
        CountSeries {
            id: self.id.clone(),
            points: self
                .points
                .iter()
                .filter(|p| years.contains(&p.year))
                .copied()
                .collect(),
        }
    }

    fn changes_in(&self, window: &RangeInclusive<i32>) -> Vec<(i32, f64)> {
        self.points
            .iter()
            .map(|p| p.year)
            .filter(|y| window.contains(y) && window.contains(&(y - 1)))
            .filter_map(|y| self.yoy_at(y).map(|c| (y, c)))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChangeMode {
    /// Largest signed change (largest uptick).
    #[default]
    Signed,
    /// Largest change by magnitude; the sign is kept in the result.
    Absolute,
}

/// Largest year-on-year share change whose both years fall in `window`.
pub fn max_historical_change(
    series: &CountSeries,
    window: RangeInclusive<i32>,
    mode: ChangeMode,
) -> Result<(f64, i32), StatsError> {
    let key = |c: f64| match mode {
        ChangeMode::Signed => c,
        ChangeMode::Absolute => c.abs(),
    };
    series
        .changes_in(&window)
        .into_iter()
        .fold(None, |best: Option<(f64, i32)>, (y, c)| match best {
            Some((b, _)) if key(b) >= key(c) => best,
            _ => Some((c, y)),
        })
        .ok_or_else(|| StatsError::InsufficientData(series.id.clone()))
}

/// Mean year-on-year share change over `window`.
pub fn mean_yoy_change(
    series: &CountSeries,
    window: RangeInclusive<i32>,
) -> Result<f64, StatsError> {
    let changes = series.changes_in(&window);
    if changes.is_empty() {
        return Err(StatsError::InsufficientData(series.id.clone()));
    }
    Ok(changes.iter().map(|(_, c)| c).sum::<f64>() / changes.len() as f64)
}

/// Mean year-on-year growth of raw counts over `window`.
pub fn mean_count_growth(
    series: &CountSeries,
    window: RangeInclusive<i32>,
) -> Result<f64, StatsError> {
    let growth: Vec<f64> = series
        .points
        .iter()
        .filter(|p| window.contains(&p.year) && window.contains(&(p.year - 1)))
        .filter_map(|p| {
            let prev = series.point(p.year - 1)?;
            count_increase(prev.matches, p.matches).ok()
        })
        .collect();
    if growth.is_empty() {
        return Err(StatsError::InsufficientData(series.id.clone()));
    }
    Ok(growth.iter().sum::<f64>() / growth.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryShare {
    pub category: String,
    /// Matching documents carrying the category.
    pub matched: u64,
    /// All documents of the year carrying the category.
    pub all: u64,
    /// `matched / matching documents`.
    pub share_among_matches: f64,
    /// `all / documents in year`.
    pub share_among_all: f64,
    /// `matched / all`: how often documents of this category match.
    pub match_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategorySkew {
    pub year: i32,
    pub matched_docs: u64,
    pub total_docs: u64,
    pub rows: Vec<CategoryShare>,
    pub warning: Option<String>,
}

/// Subject-category mix of the documents matching `q`, against the mix of
/// all documents of the year. Multi-category documents count once per
/// category.
pub fn category_skew(
    index: &YearTermIndex,
    q: &Query,
    year: i32,
) -> Result<CategorySkew, QueryError> {
    let matching = index.matching_docs(q, year)?;
    let total_docs = index.total(year).ok_or(QueryError::UnknownYear(year))?;
    let matched_docs = matching.len() as u64;
    if index.categories().is_empty() {
        return Ok(CategorySkew {
            year,
            matched_docs,
            total_docs,
            rows: Vec::new(),
            warning: Some("corpus carries no category metadata".into()),
        });
    }
    let mut matched = vec![0u64; index.categories().len()];
    for &di in &matching {
        for &c in &index.docs()[di].categories {
            matched[c as usize] += 1;
        }
    }
    let frac = |a: u64, b: u64| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    let rows = index
        .categories()
        .iter()
        .zip(matched)
        .map(|(cat, m)| {
            let all = index.category_total(cat, year).unwrap_or(0);
            CategoryShare {
                category: cat.clone(),
                matched: m,
                all,
                share_among_matches: frac(m, matched_docs),
                share_among_all: frac(all, total_docs),
                match_rate: frac(m, all),
            }
        })
        .collect();
    Ok(CategorySkew {
        year,
        matched_docs,
        total_docs,
        rows,
        warning: None,
    })
}
