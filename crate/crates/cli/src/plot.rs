//! SVG overlays of curves sharing an axis.

use std::path::Path;

use plotters::prelude::*;

use crate::error::CliError;
use crate::table::Table;

const PALETTE: [RGBColor; 6] = [
    RGBColor(31, 119, 180),
    RGBColor(214, 39, 40),
    RGBColor(44, 160, 44),
    RGBColor(148, 103, 189),
    RGBColor(255, 127, 14),
    RGBColor(23, 190, 207),
];

fn label(t: &Table) -> String {
    match t.meta("scheme") {
        Some(s) if t.metric == "sum_rate" => format!("{s} {}", t.kind),
        _ => t.kind.clone(),
    }
}

fn plot_err<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Plot(e.to_string())
}

/// Draws every table as a line (simulated curves as markers) into an SVG at `path`.
/// With `log_y` non-positive values are dropped.
pub fn overlay(path: &Path, title: &str, y_label: &str, log_y: bool, tables: &[&Table]) -> Result<(), CliError> {
    let keep = |v: f64| v.is_finite() && (!log_y || v > 0.0);
    let points: Vec<Vec<(f64, f64)>> = tables
        .iter()
        .map(|t| t.rows.iter().filter(|r| keep(r.value)).map(|r| (r.gamma_bar_db, r.value)).collect())
        .collect();
    let all = points.iter().flatten();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for (x, y) in all {
        x0 = x0.min(*x);
        x1 = x1.max(*x);
        y0 = y0.min(*y);
        y1 = y1.max(*y);
    }
    if !x0.is_finite() {
        return Ok(());
    }
    if x1 <= x0 {
        x1 = x0 + 1.0;
    }
    if y1 <= y0 {
        y1 = y0 + 1.0;
    }
    let root = SVGBackend::new(path, (800, 560)).into_drawing_area();
    root.fill(&WHITE).map_err(plot_err)?;
    let mut builder = ChartBuilder::on(&root);
    builder
        .caption(title, ("sans-serif", 22))
        .margin(16)
        .x_label_area_size(44)
        .y_label_area_size(72);

    macro_rules! draw {
        ($chart:expr) => {{
            let mut chart = $chart;
            chart
                .configure_mesh()
                .x_desc("average SNR (dB)")
                .y_desc(y_label)
                .draw()
                .map_err(plot_err)?;
            for (i, (t, pts)) in tables.iter().zip(&points).enumerate() {
                let color = PALETTE[i % PALETTE.len()];
                if t.kind == "monte_carlo" {
                    chart
                        .draw_series(pts.iter().map(|p| Circle::new(*p, 4, color.stroke_width(2))))
                        .map_err(plot_err)?
                        .label(label(t))
                        .legend(move |(x, y)| Circle::new((x + 10, y), 4, color.stroke_width(2)));
                } else {
                    chart
                        .draw_series(LineSeries::new(pts.iter().copied(), color.stroke_width(2)))
                        .map_err(plot_err)?
                        .label(label(t))
                        .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 20, y)], color.stroke_width(2)));
                }
            }
            chart
                .configure_series_labels()
                .background_style(WHITE.mix(0.8))
                .border_style(BLACK)
                .draw()
                .map_err(plot_err)?;
        }};
    }

    if log_y {
        draw!(builder
            .build_cartesian_2d(x0..x1, (y0 * 0.5..(y1 * 2.0).min(1.5)).log_scale())
            .map_err(plot_err)?);
    } else {
        let pad = 0.05 * (y1 - y0);
        draw!(builder.build_cartesian_2d(x0..x1, (y0 - pad)..(y1 + pad)).map_err(plot_err)?);
    }
    root.present().map_err(plot_err)?;
    Ok(())
}
