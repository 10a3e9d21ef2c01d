//! Hand-rolled SVG line charts with log-scaled axes. A convenience view of
//! the CSV reports, not a contract: no plotting dependency, deterministic
//! output.

pub struct Series<'a> {
    pub label: &'a str,
    pub color: &'a str,
    pub points: Vec<(f64, f64)>,
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 440.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 50.0;

/// Renders the series on log-log axes. Points with nonpositive coordinates
/// must have been filtered out by the caller.
pub fn loglog_chart(title: &str, x_label: &str, series: &[Series]) -> String {
    let xs: Vec<f64> = series
        .iter()
        .flat_map(|s| s.points.iter().map(|p| p.0))
        .collect();
    let ys: Vec<f64> = series
        .iter()
        .flat_map(|s| s.points.iter().map(|p| p.1))
        .collect();
    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    out.push_str(&format!(
        "  <text x=\"{}\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\" \
         text-anchor=\"middle\">{}</text>\n",
        WIDTH / 2.0,
        escape(title)
    ));
    if xs.is_empty() {
        out.push_str(&format!(
            "  <text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"13\" \
             text-anchor=\"middle\">no positive data</text>\n",
            WIDTH / 2.0,
            HEIGHT / 2.0
        ));
        out.push_str("</svg>\n");
        return out;
    }

    let (x_min, x_max) = padded_range(&xs);
    let (y_min, y_max) = padded_range(&ys);
    let to_x = |x: f64| {
        MARGIN_L + (x.ln() - x_min) / (x_max - x_min) * (WIDTH - MARGIN_L - MARGIN_R)
    };
    let to_y = |y: f64| {
        HEIGHT - MARGIN_B - (y.ln() - y_min) / (y_max - y_min) * (HEIGHT - MARGIN_T - MARGIN_B)
    };

    // frame
    out.push_str(&format!(
        "  <rect x=\"{MARGIN_L}\" y=\"{MARGIN_T}\" width=\"{}\" height=\"{}\" fill=\"none\" \
         stroke=\"#444\"/>\n",
        WIDTH - MARGIN_L - MARGIN_R,
        HEIGHT - MARGIN_T - MARGIN_B
    ));

    // x ticks at each distinct data abscissa
    let mut x_ticks: Vec<f64> = xs.clone();
    x_ticks.sort_by(f64::total_cmp);
    x_ticks.dedup();
    for &t in &x_ticks {
        let px = to_x(t);
        out.push_str(&format!(
            "  <line x1=\"{px:.2}\" y1=\"{}\" x2=\"{px:.2}\" y2=\"{}\" stroke=\"#bbb\" \
             stroke-dasharray=\"3,4\"/>\n",
            MARGIN_T,
            HEIGHT - MARGIN_B
        ));
        out.push_str(&format!(
            "  <text x=\"{px:.2}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" \
             text-anchor=\"middle\">{}</text>\n",
            HEIGHT - MARGIN_B + 16.0,
            fmt_tick(t)
        ));
    }
    // y ticks at powers of ten spanning the range
    let lo = (y_min / std::f64::consts::LN_10).floor() as i32;
    let hi = (y_max / std::f64::consts::LN_10).ceil() as i32;
    for e in lo..=hi {
        let v = 10f64.powi(e);
        if v.ln() < y_min || v.ln() > y_max {
            continue;
        }
        let py = to_y(v);
        out.push_str(&format!(
            "  <line x1=\"{MARGIN_L}\" y1=\"{py:.2}\" x2=\"{}\" y2=\"{py:.2}\" stroke=\"#bbb\" \
             stroke-dasharray=\"3,4\"/>\n",
            WIDTH - MARGIN_R
        ));
        out.push_str(&format!(
            "  <text x=\"{}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"11\" \
             text-anchor=\"end\">1e{e}</text>\n",
            MARGIN_L - 6.0,
            py + 4.0
        ));
    }
    out.push_str(&format!(
        "  <text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"13\" \
         text-anchor=\"middle\">{}</text>\n",
        MARGIN_L + (WIDTH - MARGIN_L - MARGIN_R) / 2.0,
        HEIGHT - 12.0,
        escape(x_label)
    ));

    for (i, s) in series.iter().enumerate() {
        if s.points.is_empty() {
            continue;
        }
        let path: Vec<String> = s
            .points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", to_x(x), to_y(y)))
            .collect();
        out.push_str(&format!(
            "  <polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.8\" points=\"{}\"/>\n",
            s.color,
            path.join(" ")
        ));
        for &(x, y) in &s.points {
            out.push_str(&format!(
                "  <rect x=\"{:.2}\" y=\"{:.2}\" width=\"6\" height=\"6\" fill=\"{}\"/>\n",
                to_x(x) - 3.0,
                to_y(y) - 3.0,
                s.color
            ));
        }
        let ly = MARGIN_T + 16.0 + 18.0 * i as f64;
        out.push_str(&format!(
            "  <rect x=\"{}\" y=\"{:.2}\" width=\"12\" height=\"12\" fill=\"{}\"/>\n",
            MARGIN_L + 10.0,
            ly - 10.0,
            s.color
        ));
        out.push_str(&format!(
            "  <text x=\"{}\" y=\"{ly:.2}\" font-family=\"sans-serif\" font-size=\"12\">{}</text>\n",
            MARGIN_L + 28.0,
            escape(s.label)
        ));
    }
    out.push_str("</svg>\n");
    out
}

/// Log-space range with 5% padding; degenerate ranges get a unit of slack.
fn padded_range(values: &[f64]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in values {
        lo = lo.min(v.ln());
        hi = hi.max(v.ln());
    }
    if hi - lo < 1e-12 {
        return (lo - 1.0, hi + 1.0);
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

fn fmt_tick(v: f64) -> String {
    if v == v.round() && v.abs() < 1e9 {
        format!("{}", v as i64)
    } else {
        format!("{v:.3}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_valid_markup() {
        let chart = loglog_chart(
            "demo",
            "n",
            &[Series {
                label: "series",
                color: "#ff0000",
                points: vec![(128.0, 0.02), (256.0, 0.011), (512.0, 0.006)],
            }],
        );
        assert!(chart.starts_with("<svg"));
        assert!(chart.trim_end().ends_with("</svg>"));
        assert!(chart.contains("polyline"));
        assert!(chart.contains("128"));
    }

    #[test]
    fn empty_series_render_placeholder() {
        let chart = loglog_chart("demo", "n", &[]);
        assert!(chart.contains("no positive data"));
    }

    #[test]
    fn output_is_deterministic() {
        let mk = || {
            loglog_chart(
                "demo",
                "n",
                &[Series {
                    label: "s",
                    color: "#123456",
                    points: vec![(10.0, 1.0), (100.0, 0.1)],
                }],
            )
        };
        assert_eq!(mk(), mk());
    }
}
