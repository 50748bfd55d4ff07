use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::importance::{SweepAxis, SweepTable};

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 60.0;

const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf",
];

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}

/// Span of `values` padded so a constant series still gets a non-empty axis.
fn span(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    });
    if hi - lo > 0.0 {
        (lo, hi)
    } else {
        let pad = if lo == 0.0 { 1.0 } else { lo.abs() * 0.5 };
        (lo - pad, hi + pad)
    }
}

/// Render a sweep as an SVG line chart: one polyline per feature's mean
/// score plus a dashed G0 series. With `inverse_x` the x axis is
/// 1 / grid value (only meaningful for leaf-size sweeps).
pub fn sweep_svg(table: &SweepTable, inverse_x: bool) -> Result<String> {
    if table.rows.is_empty() {
        return Err(Error::Contract("cannot plot an empty sweep table".into()));
    }
    if inverse_x && table.axis != SweepAxis::MinLeaf {
        return Err(Error::Config(
            "inverse x axis needs a min-leaf sweep".into(),
        ));
    }
    let xs: Vec<f64> = table
        .rows
        .iter()
        .map(|r| {
            if inverse_x {
                1.0 / r.value as f64
            } else {
                r.value as f64
            }
        })
        .collect();
    let (x0, x1) = span(xs.iter().copied());
    let (y0, y1) = span(
        table
            .rows
            .iter()
            .flat_map(|r| r.mean.iter().copied().chain(std::iter::once(r.g0_mean)))
            .chain(std::iter::once(0.0)),
    );
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let px = |x: f64| LEFT + (x - x0) / (x1 - x0) * plot_w;
    let py = |y: f64| TOP + (1.0 - (y - y0) / (y1 - y0)) * plot_h;

    let x_label = match (table.axis, inverse_x) {
        (SweepAxis::MinLeaf, false) => "minimum leaf size",
        (SweepAxis::MinLeaf, true) => "1 / minimum leaf size",
        (SweepAxis::MaxDepth, _) => "maximum depth",
    };
    let mut s = String::new();
    // fmt::Write into a String cannot fail
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(
        s,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        s,
        r##"<g stroke="#333" stroke-width="1"><line x1="{LEFT}" y1="{b}" x2="{r}" y2="{b}"/><line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{b}"/></g>"##,
        b = TOP + plot_h,
        r = LEFT + plot_w
    );
    for i in 0..=4 {
        let f = i as f64 / 4.0;
        let (xv, yv) = (x0 + f * (x1 - x0), y0 + f * (y1 - y0));
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" font-size="11" text-anchor="middle">{}</text>"#,
            px(xv),
            TOP + plot_h + 16.0,
            tick(xv)
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" font-size="11" text-anchor="end">{}</text>"#,
            LEFT - 6.0,
            py(yv) + 4.0,
            tick(yv)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" font-size="13" text-anchor="middle">{}</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 18.0,
        x_label
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{:.1}" font-size="13" text-anchor="middle" transform="rotate(-90 18 {:.1})">{} importance</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0,
        escape(table.method.name())
    );

    let mut series: Vec<(String, Vec<f64>, &str, bool)> = table
        .feature_names
        .iter()
        .enumerate()
        .map(|(k, name)| {
            (
                name.clone(),
                table.rows.iter().map(|r| r.mean[k]).collect(),
                PALETTE[k % PALETTE.len()],
                false,
            )
        })
        .collect();
    series.push((
        "G0 (noisy total)".into(),
        table.rows.iter().map(|r| r.g0_mean).collect(),
        "#000000",
        true,
    ));
    for (i, (name, ys, color, dashed)) in series.iter().enumerate() {
        let points: Vec<String> = xs
            .iter()
            .zip(ys)
            .map(|(&x, &y)| format!("{:.2},{:.2}", px(x), py(y)))
            .collect();
        let dash = if *dashed {
            r#" stroke-dasharray="6 4""#
        } else {
            ""
        };
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.8"{dash} points="{}"><title>{}</title></polyline>"#,
            points.join(" "),
            escape(name)
        );
        for (&x, &y) in xs.iter().zip(ys) {
            let _ = writeln!(
                s,
                r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{color}"/>"#,
                px(x),
                py(y)
            );
        }
        let ly = TOP + 8.0 + 16.0 * i as f64;
        let lx = WIDTH - RIGHT + 14.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="2"{dash}/><text x="{:.1}" y="{:.1}" font-size="11">{}</text>"#,
            lx + 18.0,
            lx + 24.0,
            ly + 4.0,
            escape(name)
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

fn tick(v: f64) -> String {
    if v == 0.0 || (v.abs() >= 0.01 && v.abs() < 1e4) {
        let t = format!("{v:.3}");
        t.trim_end_matches('0').trim_end_matches('.').to_owned()
    } else {
        format!("{v:.2e}")
    }
}

pub fn render_sweep_svg(table: &SweepTable, path: &Path, inverse_x: bool) -> Result<()> {
    let svg = sweep_svg(table, inverse_x)?;
    std::fs::write(path, svg).map_err(|e| Error::io(path, e))
}
