//! Standalone SVG line charts of yearly series.

use std::fmt::Write as _;
use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::stats::CountSeries;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    #[default]
    YoyChange,
    Share,
    Count,
}

impl Metric {
    fn label(self) -> &'static str {
        match self {
            Metric::YoyChange => "year-on-year change of share",
            Metric::Share => "share of documents",
            Metric::Count => "matching documents",
        }
    }

    fn value(self, s: &CountSeries, year: i32) -> Option<f64> {
        match self {
            Metric::YoyChange => s.yoy_at(year),
            Metric::Share => s.share_at(year),
            Metric::Count => s.point(year).map(|p| p.matches as f64),
        }
    }

    fn tick_label(self, v: f64) -> String {
        match self {
            Metric::YoyChange => {
                let s = format!("{:+.1}%", v * 100.0);
                if s == "-0.0%" {
                    "+0.0%".into()
                } else {
                    s
                }
            }
            Metric::Share => format!("{:.2}%", v * 100.0),
            Metric::Count => format!("{v:.0}"),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PlotError {
    #[error("no series selected")]
    NoSeries,
    #[error("empty year range")]
    EmptyYears,
    #[error("series {series:?} has no data in {from}-{to}")]
    NoData { series: String, from: i32, to: i32 },
}

#[derive(Debug, Clone)]
pub struct PlotSpec {
    pub series: Vec<CountSeries>,
    pub metric: Metric,
    pub years: RangeInclusive<i32>,
    pub width: u32,
    pub height: u32,
    pub title: Option<String>,
}

impl PlotSpec {
    pub fn new(series: Vec<CountSeries>, metric: Metric, years: RangeInclusive<i32>) -> Self {
        PlotSpec {
            series,
            metric,
            years,
            width: 800,
            height: 480,
            title: None,
        }
    }
}

const PALETTE: [&str; 10] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf",
];

fn esc(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Renders the chart. Years where the metric is undefined break the line.
pub fn render_svg(spec: &PlotSpec) -> Result<String, PlotError> {
    if spec.series.is_empty() {
        return Err(PlotError::NoSeries);
    }
    let (from, to) = (*spec.years.start(), *spec.years.end());
    if from > to {
        return Err(PlotError::EmptyYears);
    }
    let years: Vec<i32> = spec.years.clone().collect();
    let values: Vec<Vec<Option<f64>>> = spec
        .series
        .iter()
        .map(|s| years.iter().map(|&y| spec.metric.value(s, y)).collect())
        .collect();
    if let Some(s) = spec
        .series
        .iter()
        .find(|s| s.years().all(|y| !spec.years.contains(&y)))
    {
        return Err(PlotError::NoData {
            series: s.id().to_string(),
            from,
            to,
        });
    }

    let all = values.iter().flatten().flatten().copied();
    let (mut lo, mut hi) = all.fold((0.0f64, 0.0f64), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if hi - lo < 1e-12 {
        hi = lo + 1.0;
    }
    let pad = (hi - lo) * 0.05;
    if lo < 0.0 {
        lo -= pad;
    }
    hi += pad;

    let (w, h) = (spec.width as f64, spec.height as f64);
    let (left, right, top, bottom) = (80.0, 180.0, 40.0, 50.0);
    let plot_w = (w - left - right).max(10.0);
    let plot_h = (h - top - bottom).max(10.0);
    let x_of = |i: usize| {
        if years.len() == 1 {
            left + plot_w / 2.0
        } else {
            left + plot_w * i as f64 / (years.len() - 1) as f64
        }
    };
    let y_of = |v: f64| top + plot_h * (hi - v) / (hi - lo);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}" font-family="sans-serif" font-size="12">"#,
        spec.width, spec.height, spec.width, spec.height
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    if let Some(t) = &spec.title {
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="22" text-anchor="middle" font-size="15">{}</text>"#,
            left + plot_w / 2.0,
            esc(t)
        );
    }

    // axes
    let _ = writeln!(
        svg,
        r##"<g class="axes" stroke="#333"><line x1="{l:.1}" y1="{t:.1}" x2="{l:.1}" y2="{b:.1}"/><line x1="{l:.1}" y1="{b:.1}" x2="{r:.1}" y2="{b:.1}"/></g>"##,
        l = left,
        t = top,
        b = top + plot_h,
        r = left + plot_w
    );
    if lo < 0.0 && hi > 0.0 {
        let _ = writeln!(
            svg,
            r##"<line class="zero" x1="{:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#999" stroke-dasharray="4 3"/>"##,
            left,
            left + plot_w,
            y = y_of(0.0)
        );
    }
    for (i, y) in years.iter().enumerate() {
        let x = x_of(i);
        let _ = writeln!(
            svg,
            r##"<g class="x-tick"><line x1="{x:.1}" y1="{b:.1}" x2="{x:.1}" y2="{b2:.1}" stroke="#333"/><text x="{x:.1}" y="{ty:.1}" text-anchor="middle">{y}</text></g>"##,
            b = top + plot_h,
            b2 = top + plot_h + 5.0,
            ty = top + plot_h + 20.0,
        );
    }
    const Y_TICKS: usize = 5;
    for i in 0..=Y_TICKS {
        let v = lo + (hi - lo) * i as f64 / Y_TICKS as f64;
        let y = y_of(v);
        let _ = writeln!(
            svg,
            r##"<g class="y-tick"><line x1="{x0:.1}" y1="{y:.1}" x2="{left:.1}" y2="{y:.1}" stroke="#333"/><text x="{tx:.1}" y="{ty:.1}" text-anchor="end">{}</text></g>"##,
            spec.metric.tick_label(v),
            x0 = left - 5.0,
            tx = left - 8.0,
            ty = y + 4.0,
        );
    }
    let _ = writeln!(
        svg,
        r#"<text class="x-label" x="{:.1}" y="{:.1}" text-anchor="middle">year</text>"#,
        left + plot_w / 2.0,
        h - 8.0
    );
    let _ = writeln!(
        svg,
        r#"<text class="y-label" transform="translate(16 {:.1}) rotate(-90)" text-anchor="middle">{}</text>"#,
        top + plot_h / 2.0,
        spec.metric.label()
    );

    for (si, (s, vals)) in spec.series.iter().zip(&values).enumerate() {
        let color = PALETTE[si % PALETTE.len()];
        let _ = writeln!(svg, r#"<g class="series" data-series="{}">"#, esc(s.id()));
        let mut run: Vec<(f64, f64)> = Vec::new();
        let flush = |run: &mut Vec<(f64, f64)>, svg: &mut String| {
            match run.len() {
                0 => {}
                1 => {
                    let _ = writeln!(
                        svg,
                        r#"<circle cx="{:.1}" cy="{:.1}" r="3" fill="{color}"/>"#,
                        run[0].0, run[0].1
                    );
                }
                _ => {
                    let pts: Vec<String> =
                        run.iter().map(|(x, y)| format!("{x:.1},{y:.1}")).collect();
                    let _ = writeln!(
                        svg,
                        r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
                        pts.join(" ")
                    );
                }
            }
            run.clear();
        };
        for (i, v) in vals.iter().enumerate() {
            match v {
                Some(v) => run.push((x_of(i), y_of(*v))),
                None => flush(&mut run, &mut svg),
            }
        }
        flush(&mut run, &mut svg);
        let _ = writeln!(svg, "</g>");

        let ly = top + 10.0 + 18.0 * si as f64;
        let lx = left + plot_w + 15.0;
        let _ = writeln!(
            svg,
            r#"<g class="legend"><line x1="{lx:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="2"/><text x="{:.1}" y="{:.1}">{}</text></g>"#,
            lx + 20.0,
            lx + 26.0,
            ly + 4.0,
            esc(s.id())
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::CountPoint;

    fn series(id: &str, shares: &[(i32, u64)]) -> CountSeries {
        CountSeries::new(
            id,
            shares.iter().map(|&(year, matches)| CountPoint {
                year,
                matches,
                total: 1000,
            }),
        )
        .unwrap()
    }

    #[test]
    fn two_series_two_polylines_five_ticks() {
        let a = series(
            "a",
            &[
                (2018, 10),
                (2019, 11),
                (2020, 12),
                (2021, 12),
                (2022, 13),
                (2023, 20),
            ],
        );
        let b = series(
            "b",
            &[
                (2018, 50),
                (2019, 50),
                (2020, 49),
                (2021, 51),
                (2022, 50),
                (2023, 50),
            ],
        );
        let svg = render_svg(&PlotSpec::new(vec![a, b], Metric::YoyChange, 2019..=2023)).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert_eq!(svg.matches(r#"class="x-tick""#).count(), 5);
        assert!(svg.contains(">2019<") && svg.contains(">2023<"));
    }

    #[test]
    fn deterministic() {
        let a = series("a", &[(2019, 10), (2020, 11), (2021, 12)]);
        let spec = PlotSpec::new(vec![a], Metric::Share, 2019..=2021);
        assert_eq!(render_svg(&spec).unwrap(), render_svg(&spec).unwrap());
    }

    #[test]
    fn zero_share_breaks_yoy_line() {
        let a = series(
            "a",
            &[
                (2019, 10),
                (2020, 12),
                (2021, 0),
                (2022, 5),
                (2023, 6),
                (2024, 7),
            ],
        );
        let svg = render_svg(&PlotSpec::new(vec![a], Metric::YoyChange, 2019..=2024)).unwrap();
        // 2019 has no predecessor; 2022 has a zero-share predecessor.
        assert_eq!(svg.matches("<polyline").count(), 2);
    }

    #[test]
    fn empty_selection_rejected() {
        assert_eq!(
            render_svg(&PlotSpec::new(vec![], Metric::Share, 2019..=2023)),
            Err(PlotError::NoSeries)
        );
        let a = series("a", &[(2010, 1)]);
        assert!(matches!(
            render_svg(&PlotSpec::new(vec![a], Metric::Share, 2019..=2023)),
            Err(PlotError::NoData { .. })
        ));
    }
}
