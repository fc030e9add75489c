use std::fmt::Write;

use mmc_core::bench::SweepRow;

const CHART_W: f64 = 480.0;
const CHART_H: f64 = 320.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 130.0;
const MARGIN_T: f64 = 36.0;
const MARGIN_B: f64 = 48.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];

struct Chart<'a> {
    title: String,
    axis: String,
    series: Vec<(String, Vec<&'a SweepRow>)>,
}

fn group(rows: &[SweepRow]) -> Vec<Chart<'_>> {
    let mut charts: Vec<Chart> = Vec::new();
    for row in rows {
        let title = format!("{} data, varying {}", row.regime, row.axis);
        let idx = match charts.iter().position(|c| c.title == title) {
            Some(i) => i,
            None => {
                charts.push(Chart {
                    title,
                    axis: row.axis.to_string(),
                    series: Vec::new(),
                });
                charts.len() - 1
            }
        };
        let chart = &mut charts[idx];
        let model = row.model.to_string();
        match chart.series.iter_mut().find(|(m, _)| *m == model) {
            Some((_, points)) => points.push(row),
            None => chart.series.push((model, vec![row])),
        }
    }
    for chart in &mut charts {
        for (_, points) in &mut chart.series {
            points.sort_by_key(|r| r.axis_value);
        }
    }
    charts
}

fn extent(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        });
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 {
        return (lo - 0.5, hi + 0.5);
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn draw_chart(out: &mut String, chart: &Chart, y0: f64) {
    let plot_w = CHART_W - MARGIN_L - MARGIN_R;
    let plot_h = CHART_H - MARGIN_T - MARGIN_B;
    let points = || chart.series.iter().flat_map(|(_, p)| p.iter());
    let (x_lo, x_hi) = extent(points().map(|r| r.axis_value as f64));
    let (y_lo, y_hi) = extent(points().flat_map(|r| {
        let s = if r.metric_std.is_finite() { r.metric_std } else { 0.0 };
        [r.metric_mean - s, r.metric_mean + s]
    }));
    let sx = |x: f64| MARGIN_L + (x - x_lo) / (x_hi - x_lo) * plot_w;
    let sy = |y: f64| y0 + MARGIN_T + (y_hi - y) / (y_hi - y_lo) * plot_h;

    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" font-size="14" text-anchor="middle">{}</text>"#,
        MARGIN_L + plot_w / 2.0,
        y0 + 20.0,
        escape(&chart.title)
    );
    let _ = writeln!(
        out,
        r##"<rect x="{MARGIN_L:.1}" y="{:.1}" width="{plot_w:.1}" height="{plot_h:.1}" fill="none" stroke="#444"/>"##,
        y0 + MARGIN_T
    );
    for i in 0..=4 {
        let y = y_lo + (y_hi - y_lo) * i as f64 / 4.0;
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" font-size="10" text-anchor="end">{y:.3}</text>"#,
            MARGIN_L - 6.0,
            sy(y) + 3.0
        );
    }
    let mut ticks: Vec<usize> = points().map(|r| r.axis_value).collect();
    ticks.sort_unstable();
    ticks.dedup();
    for t in ticks {
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" font-size="10" text-anchor="middle">{t}</text>"#,
            sx(t as f64),
            y0 + MARGIN_T + plot_h + 14.0
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" font-size="11" text-anchor="middle">{}</text>"#,
        MARGIN_L + plot_w / 2.0,
        y0 + CHART_H - 12.0,
        escape(&chart.axis)
    );
    let _ = writeln!(
        out,
        r#"<text x="14" y="{:.1}" font-size="11" text-anchor="middle" transform="rotate(-90 14 {:.1})">mean test log-likelihood</text>"#,
        y0 + MARGIN_T + plot_h / 2.0,
        y0 + MARGIN_T + plot_h / 2.0
    );

    for (i, (model, rows)) in chart.series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let finite: Vec<&&SweepRow> = rows.iter().filter(|r| r.metric_mean.is_finite()).collect();
        let coords: Vec<String> = finite
            .iter()
            .map(|r| format!("{:.1},{:.1}", sx(r.axis_value as f64), sy(r.metric_mean)))
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            coords.join(" ")
        );
        for r in finite {
            let (x, y) = (sx(r.axis_value as f64), sy(r.metric_mean));
            if r.metric_std.is_finite() && r.metric_std > 0.0 {
                let (top, bottom) = (sy(r.metric_mean + r.metric_std), sy(r.metric_mean - r.metric_std));
                let _ = writeln!(
                    out,
                    r#"<path d="M{x:.1},{top:.1}V{bottom:.1}M{:.1},{top:.1}H{:.1}M{:.1},{bottom:.1}H{:.1}" stroke="{color}" fill="none"/>"#,
                    x - 3.0,
                    x + 3.0,
                    x - 3.0,
                    x + 3.0
                );
            }
            let _ = writeln!(out, r#"<circle cx="{x:.1}" cy="{y:.1}" r="2.5" fill="{color}"/>"#);
        }
        let ly = y0 + MARGIN_T + 12.0 + 16.0 * i as f64;
        let lx = MARGIN_L + plot_w + 12.0;
        let _ = writeln!(
            out,
            r#"<line x1="{lx:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="2"/>"#,
            lx + 18.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" font-size="11">{}</text>"#,
            lx + 24.0,
            ly + 4.0,
            escape(model)
        );
    }
}

/// One chart per (regime, axis), stacked vertically; one polyline per model with ±std whiskers.
pub fn render(rows: &[SweepRow]) -> String {
    let charts = group(rows);
    let height = CHART_H * charts.len().max(1) as f64;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{CHART_W}" height="{height}" viewBox="0 0 {CHART_W} {height}" font-family="sans-serif">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for (i, chart) in charts.iter().enumerate() {
        draw_chart(&mut out, chart, CHART_H * i as f64);
    }
    out.push_str("</svg>\n");
    out
}
