//! Self-contained SVG line charts with error bars.
//!
//! Emits the figure families the command line produces: one series per
//! contender count against a swept parameter, values as lines with point
//! markers and optional 95 % confidence whiskers. No drawing dependency;
//! the output is a plain string of SVG elements with labeled axes and a
//! legend, deterministic for a given chart.

use std::fmt::Write as _;

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

/// One plotted series.
#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    /// (x, y) pairs in plot order.
    pub points: Vec<(f64, f64)>,
    /// Per-point error-bar half widths; empty for marker-only series.
    pub error_halfwidths: Vec<f64>,
    /// Connect the markers with a line.
    pub draw_line: bool,
}

/// Chart description rendered by [`render_svg`].
#[derive(Debug, Clone, Default)]
pub struct Chart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
}

struct Frame {
    x0: f64,
    y0: f64,
    w: f64,
    h: f64,
    xmin: f64,
    xmax: f64,
    ymin: f64,
    ymax: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        self.x0 + (x - self.xmin) / (self.xmax - self.xmin) * self.w
    }

    fn py(&self, y: f64) -> f64 {
        self.y0 + self.h - (y - self.ymin) / (self.ymax - self.ymin) * self.h
    }
}

/// Tick positions covering [lo, hi] at a 1/2/5 step.
fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = (hi - lo).max(f64::MIN_POSITIVE);
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let step = if norm < 1.5 {
        mag
    } else if norm < 3.5 {
        2.0 * mag
    } else if norm < 7.5 {
        5.0 * mag
    } else {
        10.0 * mag
    };
    let first = (lo / step).ceil() * step;
    let mut out = Vec::new();
    let mut t = first;
    while t <= hi + 1e-9 * span {
        out.push(t);
        t += step;
    }
    out
}

fn fmt_tick(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if v.abs() >= 1000.0 || v.fract().abs() < 1e-9 {
        format!("{}", v.round() as i64)
    } else {
        format!("{v:.2}")
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Render the chart as a complete SVG document.
pub fn render_svg(chart: &Chart, width: u32, height: u32) -> String {
    let (width, height) = (width as f64, height as f64);
    let margin_left = 78.0;
    let margin_right = 150.0;
    let margin_top = 42.0;
    let margin_bottom = 58.0;

    let mut xmin = f64::INFINITY;
    let mut xmax = f64::NEG_INFINITY;
    let mut ymin = f64::INFINITY;
    let mut ymax = f64::NEG_INFINITY;
    for s in &chart.series {
        for (i, &(x, y)) in s.points.iter().enumerate() {
            let e = s.error_halfwidths.get(i).copied().unwrap_or(0.0);
            xmin = xmin.min(x);
            xmax = xmax.max(x);
            ymin = ymin.min(y - e);
            ymax = ymax.max(y + e);
        }
    }
    if !xmin.is_finite() {
        xmin = 0.0;
        xmax = 1.0;
        ymin = 0.0;
        ymax = 1.0;
    }
    if xmax - xmin < 1e-12 {
        xmin -= 0.5;
        xmax += 0.5;
    }
    if ymax - ymin < 1e-12 {
        ymin -= 0.5;
        ymax += 0.5;
    }
    // Breathing room above and below the data.
    let pad = 0.05 * (ymax - ymin);
    ymin -= pad;
    ymax += pad;

    let frame = Frame {
        x0: margin_left,
        y0: margin_top,
        w: width - margin_left - margin_right,
        h: height - margin_top - margin_bottom,
        xmin,
        xmax,
        ymin,
        ymax,
    };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    let _ = writeln!(
        svg,
        r#"<rect width="{width}" height="{height}" fill="white"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="24" font-family="sans-serif" font-size="15" text-anchor="middle">{}</text>"#,
        margin_left + frame.w / 2.0,
        xml_escape(&chart.title)
    );

    // Gridlines and tick labels.
    for t in ticks(frame.ymin, frame.ymax) {
        let y = frame.py(t);
        let _ = writeln!(
            svg,
            r##"<line x1="{:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#dddddd" stroke-width="1"/>"##,
            frame.x0,
            frame.x0 + frame.w
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="11" text-anchor="end">{}</text>"#,
            frame.x0 - 6.0,
            y + 4.0,
            fmt_tick(t)
        );
    }
    for t in ticks(frame.xmin, frame.xmax) {
        let x = frame.px(t);
        let _ = writeln!(
            svg,
            r##"<line x1="{x:.1}" y1="{:.1}" x2="{x:.1}" y2="{:.1}" stroke="#dddddd" stroke-width="1"/>"##,
            frame.y0,
            frame.y0 + frame.h
        );
        let _ = writeln!(
            svg,
            r#"<text x="{x:.1}" y="{:.1}" font-family="sans-serif" font-size="11" text-anchor="middle">{}</text>"#,
            frame.y0 + frame.h + 16.0,
            fmt_tick(t)
        );
    }
    let _ = writeln!(
        svg,
        r##"<rect x="{:.1}" y="{:.1}" width="{:.1}" height="{:.1}" fill="none" stroke="#333333"/>"##,
        frame.x0, frame.y0, frame.w, frame.h
    );

    // Axis labels.
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="13" text-anchor="middle">{}</text>"#,
        frame.x0 + frame.w / 2.0,
        height - 14.0,
        xml_escape(&chart.x_label)
    );
    let _ = writeln!(
        svg,
        r#"<text x="18" y="{:.1}" font-family="sans-serif" font-size="13" text-anchor="middle" transform="rotate(-90 18 {:.1})">{}</text>"#,
        frame.y0 + frame.h / 2.0,
        frame.y0 + frame.h / 2.0,
        xml_escape(&chart.y_label)
    );

    // Series.
    for (si, s) in chart.series.iter().enumerate() {
        let color = PALETTE[si % PALETTE.len()];
        if s.draw_line && s.points.len() > 1 {
            let path: Vec<String> = s
                .points
                .iter()
                .map(|&(x, y)| format!("{:.1},{:.1}", frame.px(x), frame.py(y)))
                .collect();
            let _ = writeln!(
                svg,
                r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.6"/>"#,
                path.join(" ")
            );
        }
        for (i, &(x, y)) in s.points.iter().enumerate() {
            let (px, py) = (frame.px(x), frame.py(y));
            if let Some(&e) = s.error_halfwidths.get(i) {
                if e > 0.0 {
                    let (ylo, yhi) = (frame.py(y - e), frame.py(y + e));
                    let _ = writeln!(
                        svg,
                        r#"<line x1="{px:.1}" y1="{ylo:.1}" x2="{px:.1}" y2="{yhi:.1}" stroke="{color}" stroke-width="1"/>"#
                    );
                    for yy in [ylo, yhi] {
                        let _ = writeln!(
                            svg,
                            r#"<line x1="{:.1}" y1="{yy:.1}" x2="{:.1}" y2="{yy:.1}" stroke="{color}" stroke-width="1"/>"#,
                            px - 3.0,
                            px + 3.0
                        );
                    }
                }
            }
            let _ = writeln!(
                svg,
                r#"<circle cx="{px:.1}" cy="{py:.1}" r="2.6" fill="{color}"/>"#
            );
        }
    }

    // Legend.
    let lx = frame.x0 + frame.w + 12.0;
    for (si, s) in chart.series.iter().enumerate() {
        let color = PALETTE[si % PALETTE.len()];
        let ly = frame.y0 + 10.0 + si as f64 * 20.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="2"/>"#,
            lx + 22.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="12">{}</text>"#,
            lx + 28.0,
            ly + 4.0,
            xml_escape(&s.label)
        );
    }

    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_chart() -> Chart {
        Chart {
            title: "mean PSD vs B_P".into(),
            x_label: "backoff period [slots]".into(),
            y_label: "mean PSD [us]".into(),
            series: vec![
                Series {
                    label: "N_C = 1".into(),
                    points: (1..=20).map(|b| (b as f64, 500.0 * b as f64)).collect(),
                    error_halfwidths: (1..=20).map(|_| 120.0).collect(),
                    draw_line: true,
                },
                Series {
                    label: "N_C = 8".into(),
                    points: (1..=20).map(|b| (b as f64, 650.0 * b as f64)).collect(),
                    error_halfwidths: vec![],
                    draw_line: true,
                },
            ],
        }
    }

    /// Minimal well-formedness scan: every tag closes, every quote pairs.
    fn assert_well_formed(svg: &str) {
        let mut stack: Vec<String> = Vec::new();
        let mut rest = svg;
        while let Some(open) = rest.find('<') {
            let close = rest[open..].find('>').expect("unterminated tag") + open;
            let tag = &rest[open + 1..close];
            assert_eq!(
                tag.matches('"').count() % 2,
                0,
                "unbalanced quotes in {tag}"
            );
            if let Some(name) = tag.strip_prefix('/') {
                assert_eq!(stack.pop().as_deref(), Some(name), "mismatched close");
            } else if !tag.ends_with('/') && !tag.starts_with('?') && !tag.starts_with('!') {
                let name: String = tag.split_whitespace().next().unwrap().into();
                stack.push(name);
            }
            rest = &rest[close + 1..];
        }
        assert!(stack.is_empty(), "unclosed tags: {stack:?}");
    }

    #[test]
    fn svg_is_well_formed() {
        let svg = render_svg(&sample_chart(), 800, 500);
        assert!(svg.starts_with("<svg"));
        assert_well_formed(&svg);
        assert!(svg.contains("polyline"));
        assert!(svg.contains("N_C = 1"));
        assert!(svg.contains("backoff period"));
    }

    #[test]
    fn single_point_chart_renders() {
        let chart = Chart {
            title: "one run".into(),
            x_label: "x".into(),
            y_label: "y".into(),
            series: vec![Series {
                label: "only".into(),
                points: vec![(10.0, 8264.0)],
                error_halfwidths: vec![150.0],
                draw_line: true,
            }],
        };
        let svg = render_svg(&chart, 640, 480);
        assert_well_formed(&svg);
        assert!(svg.contains("circle"));
    }

    #[test]
    fn rendering_is_deterministic() {
        let chart = sample_chart();
        assert_eq!(render_svg(&chart, 800, 500), render_svg(&chart, 800, 500));
    }

    #[test]
    fn escapes_markup_in_labels() {
        let chart = Chart {
            title: "a < b & c".into(),
            x_label: "x".into(),
            y_label: "y".into(),
            series: vec![],
        };
        let svg = render_svg(&chart, 300, 200);
        assert!(svg.contains("a &lt; b &amp; c"));
        assert_well_formed(&svg);
    }
}
