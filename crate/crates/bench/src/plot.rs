//! SVG figures: loss against step, plus the (p0, p1) path for two-parameter
//! traces.

use std::path::Path;

use plotters::coord::ranged1d::{AsRangedCoord, ValueFormatter};
use plotters::coord::Shift;
use plotters::prelude::*;
use thiserror::Error;

use crate::run::TraceRecord;

#[derive(Debug, Error)]
pub enum PlotError {
    #[error("nothing to plot")]
    Empty,
    #[error("loss must be positive on a log axis (series `{0}`)")]
    NonPositive(String),
    #[error("drawing failed: {0}")]
    Draw(String),
}

fn draw_err<E: std::fmt::Display>(e: E) -> PlotError {
    PlotError::Draw(e.to_string())
}

pub struct Series<'a> {
    pub label: &'a str,
    pub records: &'a [TraceRecord],
}

const COLORS: [RGBColor; 6] = [
    RGBColor(31, 119, 180),
    RGBColor(255, 127, 14),
    RGBColor(44, 160, 44),
    RGBColor(214, 39, 40),
    RGBColor(148, 103, 189),
    RGBColor(140, 86, 75),
];

fn span(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    });
    if lo == hi {
        (lo - 0.5, hi + 0.5)
    } else {
        let pad = (hi - lo) * 0.05;
        (lo - pad, hi + pad)
    }
}

/// Whether every series snapshots exactly two parameters.
pub fn has_trajectories(series: &[Series]) -> bool {
    !series.is_empty()
        && series.iter().all(|s| {
            s.records
                .iter()
                .all(|r| r.params.as_ref().is_some_and(|p| p.len() == 2))
        })
}

fn loss_panel<Y>(
    area: &DrawingArea<SVGBackend, Shift>,
    y: Y,
    last_step: u64,
    series: &[Series],
) -> Result<(), PlotError>
where
    Y: AsRangedCoord<Value = f64>,
    Y::CoordDescType: ValueFormatter<f64>,
{
    let mut chart = ChartBuilder::on(area)
        .caption("loss", ("sans-serif", 20))
        .margin(12)
        .x_label_area_size(36)
        .y_label_area_size(64)
        .build_cartesian_2d(0u64..last_step, y)
        .map_err(draw_err)?;
    chart
        .configure_mesh()
        .x_desc("step")
        .draw()
        .map_err(draw_err)?;
    for (i, s) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        chart
            .draw_series(LineSeries::new(
                s.records.iter().map(|r| (r.step, r.loss)),
                color.stroke_width(2),
            ))
            .map_err(draw_err)?
            .label(s.label)
            .legend(move |(x, y)| {
                PathElement::new(vec![(x, y), (x + 16, y)], color.stroke_width(2))
            });
    }
    chart
        .configure_series_labels()
        .background_style(WHITE.mix(0.8))
        .border_style(BLACK)
        .draw()
        .map_err(draw_err)
}

pub fn render_svg(series: &[Series], out: &Path, log_loss: bool) -> Result<(), PlotError> {
    if series.is_empty() || series.iter().all(|s| s.records.is_empty()) {
        return Err(PlotError::Empty);
    }
    if log_loss {
        if let Some(s) = series
            .iter()
            .find(|s| s.records.iter().any(|r| r.loss <= 0.0))
        {
            return Err(PlotError::NonPositive(s.label.to_string()));
        }
    }
    let paths = has_trajectories(series);
    let size = if paths { (1280, 560) } else { (720, 560) };
    let root = SVGBackend::new(out, size).into_drawing_area();
    root.fill(&WHITE).map_err(draw_err)?;
    let (left, right) = if paths {
        let (l, r) = root.split_horizontally(size.0 / 2);
        (l, Some(r))
    } else {
        (root.clone(), None)
    };

    let last_step = series
        .iter()
        .flat_map(|s| s.records.last())
        .map(|r| r.step)
        .max()
        .unwrap_or(1);
    let losses = || series.iter().flat_map(|s| s.records.iter().map(|r| r.loss));
    if log_loss {
        let lo = losses().fold(f64::INFINITY, f64::min);
        let hi = losses().fold(f64::NEG_INFINITY, f64::max);
        loss_panel(&left, (lo * 0.9..hi * 1.1).log_scale(), last_step, series)?;
    } else {
        let (lo, hi) = span(losses());
        loss_panel(&left, lo..hi, last_step, series)?;
    }

    if let Some(right) = right {
        let point = |r: &TraceRecord| {
            let p = r.params.as_ref().expect("checked above");
            (p[0], p[1])
        };
        let (x0, x1) = span(
            series
                .iter()
                .flat_map(|s| s.records.iter().map(|r| point(r).0)),
        );
        let (y0, y1) = span(
            series
                .iter()
                .flat_map(|s| s.records.iter().map(|r| point(r).1)),
        );
        let mut chart = ChartBuilder::on(&right)
            .caption("trajectory", ("sans-serif", 20))
            .margin(12)
            .x_label_area_size(36)
            .y_label_area_size(64)
            .build_cartesian_2d(x0..x1, y0..y1)
            .map_err(draw_err)?;
        chart
            .configure_mesh()
            .x_desc("p0")
            .y_desc("p1")
            .draw()
            .map_err(draw_err)?;
        for (i, s) in series.iter().enumerate() {
            let color = COLORS[i % COLORS.len()];
            chart
                .draw_series(LineSeries::new(
                    s.records.iter().map(point),
                    color.stroke_width(2),
                ))
                .map_err(draw_err)?
                .label(s.label)
                .legend(move |(x, y)| {
                    PathElement::new(vec![(x, y), (x + 16, y)], color.stroke_width(2))
                });
        }
        chart
            .configure_series_labels()
            .background_style(WHITE.mix(0.8))
            .border_style(BLACK)
            .draw()
            .map_err(draw_err)?;
    }
    root.present().map_err(draw_err)?;
    Ok(())
}
