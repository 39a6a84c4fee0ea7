//! Standalone SVG heatmaps of compatibility matrices.

use std::fmt::Write as _;

use readcompat_core::compat::{CompatMatrix, Metric};

const CELL_W: usize = 84;
const CELL_H: usize = 44;
/// Sequential scale endpoints (light to dark blue); value 1.0 is `HIGH`.
const LOW: (u8, u8, u8) = (0xf7, 0xfb, 0xff);
const HIGH: (u8, u8, u8) = (0x08, 0x30, 0x6b);

pub fn color(value: f64) -> String {
    let t = if value.is_finite() { value.clamp(0.0, 1.0) } else { 0.0 };
    let mix = |a: u8, b: u8| (f64::from(a) + (f64::from(b) - f64::from(a)) * t).round() as u8;
    format!(
        "#{:02x}{:02x}{:02x}",
        mix(LOW.0, HIGH.0),
        mix(LOW.1, HIGH.1),
        mix(LOW.2, HIGH.2)
    )
}

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

/// Rows are targets (y axis), columns sources (x axis).
pub fn render(title: &str, targets: &[String], sources: &[String], values: &[Vec<f64>]) -> String {
    let label_w = targets.iter().map(|t| t.chars().count()).max().unwrap_or(0) * 8 + 40;
    let top = 70;
    let grid_w = CELL_W * sources.len();
    let grid_h = CELL_H * targets.len();
    let legend_x = label_w + grid_w + 30;
    let width = legend_x + 70;
    let height = top + grid_h + 60;

    let mut s = String::new();
    writeln!(
        s,
        r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">"#
    )
    .unwrap();
    writeln!(s, r#"<title>{}</title>"#, escape(title)).unwrap();
    writeln!(
        s,
        r#"<text x="{}" y="22" font-size="15" text-anchor="middle" font-weight="bold">{}</text>"#,
        label_w + grid_w / 2,
        escape(title)
    )
    .unwrap();
    writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">source corpus</text>"#,
        label_w + grid_w / 2,
        top + grid_h + 40
    )
    .unwrap();
    writeln!(
        s,
        r#"<text x="14" y="{y}" text-anchor="middle" transform="rotate(-90 14 {y})">target corpus</text>"#,
        y = top + grid_h / 2
    )
    .unwrap();
    for (j, src) in sources.iter().enumerate() {
        writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            label_w + j * CELL_W + CELL_W / 2,
            top + grid_h + 18,
            escape(src)
        )
        .unwrap();
    }
    for (i, tgt) in targets.iter().enumerate() {
        let y = top + i * CELL_H;
        writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#,
            label_w - 8,
            y + CELL_H / 2 + 4,
            escape(tgt)
        )
        .unwrap();
        for (j, v) in values[i].iter().enumerate() {
            let x = label_w + j * CELL_W;
            let ink = if v.is_finite() && *v > 0.55 {
                "#ffffff"
            } else {
                "#000000"
            };
            writeln!(
                s,
                r#"<g class="cell"><rect x="{x}" y="{y}" width="{CELL_W}" height="{CELL_H}" fill="{}" stroke="white"/><text x="{}" y="{}" text-anchor="middle" fill="{ink}">{v:.3}</text></g>"#,
                color(*v),
                x + CELL_W / 2,
                y + CELL_H / 2 + 4,
            )
            .unwrap();
        }
    }
    // Legend: ten steps from 0 (bottom) to 1 (top).
    let step = grid_h.max(100) / 10;
    for k in 0..10 {
        let v = (9 - k) as f64 / 9.0;
        writeln!(
            s,
            r#"<rect x="{legend_x}" y="{}" width="16" height="{step}" fill="{}"/>"#,
            top + k * step,
            color(v)
        )
        .unwrap();
    }
    writeln!(s, r#"<text x="{}" y="{}">1.0</text>"#, legend_x + 22, top + 10).unwrap();
    writeln!(s, r#"<text x="{}" y="{}">0.0</text>"#, legend_x + 22, top + 10 * step).unwrap();
    s.push_str("</svg>\n");
    s
}

pub fn render_matrix(matrix: &CompatMatrix, metric: Metric) -> String {
    render(
        &format!("{} compatibility", metric.name()),
        &matrix.corpora,
        &matrix.corpora,
        &matrix.values(metric),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scale_endpoints() {
        assert_eq!(color(1.0), "#08306b");
        assert_eq!(color(0.0), "#f7fbff");
        assert_eq!(color(2.0), color(1.0));
    }

    #[test]
    fn escapes_labels() {
        let svg = render("a<b", &["x&y".into()], &["\"q\"".into()], &[vec![0.5]]);
        assert!(svg.contains("a&lt;b"));
        assert!(svg.contains("x&amp;y"));
        assert!(svg.contains("&quot;q&quot;"));
        assert!(!svg.contains("x&y"));
    }
}
