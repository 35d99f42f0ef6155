//! Static SVG plots rendered from sweep CSV text. A plot is a pure
//! function of the CSV bytes, so regenerating it from the same file is
//! byte-stable.

use anyhow::{bail, Context, Result};

use crate::harness::SweepAxis;

const WIDTH: f64 = 880.0;
const HEIGHT: f64 = 540.0;
const MARGIN_L: f64 = 90.0;
const MARGIN_R: f64 = 250.0;
const MARGIN_T: f64 = 48.0;
const MARGIN_B: f64 = 64.0;

const PALETTE: [&str; 12] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf", "#393b79", "#ad494a",
];

#[derive(Clone, Debug)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

fn fmt(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let a = v.abs();
    if (1e-3..1e5).contains(&a) {
        let s = format!("{v:.4}");
        let s = s.trim_end_matches('0').trim_end_matches('.').to_string();
        if s.is_empty() {
            "0".to_string()
        } else {
            s
        }
    } else {
        format!("{v:.3e}")
    }
}

/// Render one chart. Series are drawn in the given order with a fixed
/// palette; non-finite points are skipped.
pub fn render_svg(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    let finite: Vec<(f64, f64)> = series
        .iter()
        .flat_map(|s| s.points.iter().copied())
        .filter(|(x, y)| x.is_finite() && y.is_finite())
        .collect();
    let (x0, x1, y0, y1) = if finite.is_empty() {
        (0.0, 1.0, 0.0, 1.0)
    } else {
        let xs: Vec<f64> = finite.iter().map(|p| p.0).collect();
        let ys: Vec<f64> = finite.iter().map(|p| p.1).collect();
        let (xa, xb) = (
            xs.iter().cloned().fold(f64::INFINITY, f64::min),
            xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        );
        let (ya, yb) = (
            ys.iter().cloned().fold(f64::INFINITY, f64::min),
            ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        );
        let xpad = if xb > xa { 0.0 } else { 0.5 };
        let ypad = if yb > ya {
            (yb - ya) * 0.06
        } else {
            ya.abs().max(1.0) * 0.1
        };
        (xa - xpad, xb + xpad, ya - ypad, yb + ypad)
    };
    let plot_w = WIDTH - MARGIN_L - MARGIN_R;
    let plot_h = HEIGHT - MARGIN_T - MARGIN_B;
    let sx = |x: f64| MARGIN_L + (x - x0) / (x1 - x0) * plot_w;
    let sy = |y: f64| MARGIN_T + plot_h - (y - y0) / (y1 - y0) * plot_h;

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    svg.push_str(&format!(
        "<text x=\"{:.1}\" y=\"26\" font-size=\"17\" text-anchor=\"middle\">{title}</text>\n",
        MARGIN_L + plot_w / 2.0
    ));

    // Grid and ticks.
    for i in 0..=5 {
        let f = i as f64 / 5.0;
        let x = x0 + f * (x1 - x0);
        let y = y0 + f * (y1 - y0);
        let px = sx(x);
        let py = sy(y);
        svg.push_str(&format!(
            "<line x1=\"{px:.1}\" y1=\"{:.1}\" x2=\"{px:.1}\" y2=\"{:.1}\" stroke=\"#dddddd\"/>\n",
            MARGIN_T,
            MARGIN_T + plot_h
        ));
        svg.push_str(&format!(
            "<line x1=\"{:.1}\" y1=\"{py:.1}\" x2=\"{:.1}\" y2=\"{py:.1}\" stroke=\"#dddddd\"/>\n",
            MARGIN_L,
            MARGIN_L + plot_w
        ));
        svg.push_str(&format!(
            "<text x=\"{px:.1}\" y=\"{:.1}\" font-size=\"12\" text-anchor=\"middle\">{}</text>\n",
            MARGIN_T + plot_h + 18.0,
            fmt(x)
        ));
        svg.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"12\" text-anchor=\"end\">{}</text>\n",
            MARGIN_L - 8.0,
            py + 4.0,
            fmt(y)
        ));
    }
    svg.push_str(&format!(
        "<rect x=\"{MARGIN_L}\" y=\"{MARGIN_T}\" width=\"{plot_w}\" height=\"{plot_h}\" \
         fill=\"none\" stroke=\"#333333\"/>\n"
    ));
    svg.push_str(&format!(
        "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"14\" text-anchor=\"middle\">{x_label}</text>\n",
        MARGIN_L + plot_w / 2.0,
        HEIGHT - 18.0
    ));
    svg.push_str(&format!(
        "<text x=\"22\" y=\"{:.1}\" font-size=\"14\" text-anchor=\"middle\" \
         transform=\"rotate(-90 22 {:.1})\">{y_label}</text>\n",
        MARGIN_T + plot_h / 2.0,
        MARGIN_T + plot_h / 2.0
    ));

    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<(f64, f64)> = s
            .points
            .iter()
            .copied()
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .collect();
        if pts.len() > 1 {
            let path: Vec<String> = pts
                .iter()
                .map(|(x, y)| format!("{:.2},{:.2}", sx(*x), sy(*y)))
                .collect();
            svg.push_str(&format!(
                "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.8\"/>\n",
                path.join(" ")
            ));
        }
        for (x, y) in &pts {
            svg.push_str(&format!(
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2.6\" fill=\"{color}\"/>\n",
                sx(*x),
                sy(*y)
            ));
        }
        let ly = MARGIN_T + 16.0 + i as f64 * 18.0;
        let lx = WIDTH - MARGIN_R + 16.0;
        svg.push_str(&format!(
            "<line x1=\"{lx:.1}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"{color}\" \
             stroke-width=\"2.5\"/>\n",
            ly - 4.0,
            lx + 22.0,
            ly - 4.0
        ));
        svg.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{ly:.1}\" font-size=\"12\">{}</text>\n",
            lx + 28.0,
            s.name
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

/// Plottable metrics of the sweep CSV: (column name, axis label).
pub const METRICS: [(&str, &str); 3] = [
    ("peak_aoi_s", "average peak AoI [s]"),
    ("per_packet_aoi_s", "average per-packet AoI [s]"),
    ("avg_power_w", "average power consumption [W]"),
];

/// Parse sweep CSV text and render one SVG per metric, keyed by metric
/// column name.
pub fn plots_from_csv(csv_text: &str, axis: SweepAxis) -> Result<Vec<(String, String)>> {
    let mut lines = csv_text.lines();
    let header = lines.next().context("empty CSV")?;
    let cols: Vec<&str> = header.split(',').collect();
    let col = |name: &str| -> Result<usize> {
        cols.iter()
            .position(|c| *c == name)
            .with_context(|| format!("CSV lacks column {name}"))
    };
    let x_col = match axis {
        SweepAxis::PacketLen => col("L")?,
        SweepAxis::LambdaMax => col("lambda_max")?,
        SweepAxis::NDevices => col("N")?,
        SweepAxis::None => bail!("cannot plot a sweep without an axis"),
    };
    let key_cols = [
        col("protocol")?,
        col("policy")?,
        col("solver")?,
        col("benchmark")?,
    ];

    let mut out = Vec::new();
    for (metric, y_label) in METRICS {
        let y_col = col(metric)?;
        // Series keyed by (protocol, policy, solver, benchmark), in first-seen
        // order (the CSV is already deterministically sorted).
        let mut series: Vec<Series> = Vec::new();
        for line in csv_text.lines().skip(1) {
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != cols.len() {
                bail!("malformed CSV row: {line}");
            }
            let mut name = format!(
                "{}-{}/{}",
                fields[key_cols[0]], fields[key_cols[1]], fields[key_cols[2]]
            );
            if fields[key_cols[3]] == "true" {
                name.push_str(" (bench)");
            }
            let x: f64 = match fields[x_col].parse() {
                Ok(v) => v,
                Err(_) => continue,
            };
            let y: f64 = match fields[y_col].parse() {
                Ok(v) => v,
                Err(_) => continue, // infeasible row: empty field
            };
            match series.iter_mut().find(|s| s.name == name) {
                Some(s) => s.points.push((x, y)),
                None => series.push(Series {
                    name,
                    points: vec![(x, y)],
                }),
            }
        }
        for s in &mut series {
            s.points.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        }
        let x_label = axis.as_str();
        let svg = render_svg(metric, x_label, y_label, &series);
        out.push((metric.to_string(), svg));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rendering_is_deterministic() {
        let series = [Series {
            name: "tdma-mv/exact".into(),
            points: vec![(1.0, 2.0), (2.0, 2.5), (3.0, 2.25)],
        }];
        let a = render_svg("t", "x", "y", &series);
        let b = render_svg("t", "x", "y", &series);
        assert_eq!(a, b);
        assert!(a.contains("<polyline"));
        assert!(a.contains("tdma-mv/exact"));
    }

    #[test]
    fn tick_format_is_stable() {
        assert_eq!(fmt(0.0), "0");
        assert_eq!(fmt(2.5), "2.5");
        assert_eq!(fmt(100.0), "100");
        assert_eq!(fmt(1.23456e-7), "1.235e-7");
    }
}
