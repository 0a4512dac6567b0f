//! Minimal SVG rendering of boundary curves.

use std::fmt::Write;

use loewner_range::BoundaryCurve64;

const WIDTH: f64 = 800.0;

fn stroke(label: &str) -> &'static str {
    match label {
        "l1" => "#1f77b4",
        "l2" => "#d62728",
        "l3" | "l4" => "#2ca02c",
        "l5" | "l6" => "#9467bd",
        "l7" | "l8" => "#ff7f0e",
        "l9" | "l10" => "#8c564b",
        "unrestricted" => "#17becf",
        _ => "#7f7f7f",
    }
}

/// One polyline per curve in data coordinates (y pointing up), equal
/// aspect, 5% margin, with the `legend` lines in the top-left corner.
pub fn render(curves: &[BoundaryCurve64], legend: &[String]) -> String {
    let (mut x0, mut x1, mut y0, mut y1) = (
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
    );
    for p in curves.iter().flat_map(|c| &c.points) {
        x0 = x0.min(p.x);
        x1 = x1.max(p.x);
        y0 = y0.min(p.y);
        y1 = y1.max(p.y);
    }
    let (w, h) = ((x1 - x0).max(1e-12), (y1 - y0).max(1e-12));
    let (mx, my) = (0.05 * w, 0.05 * h);
    let (vx, vy, vw, vh) = (x0 - mx, -(y1 + my), w + 2.0 * mx, h + 2.0 * my);
    let height = WIDTH * vh / vw;
    let line = vw / 400.0;
    let font = vh / 30.0;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH:.0}" height="{height:.0}" viewBox="{vx:.7} {vy:.7} {vw:.7} {vh:.7}">"#
    );
    let _ = writeln!(
        s,
        r#"<g fill="none" stroke-width="{line:.7}" stroke-linejoin="round">"#
    );
    for cv in curves {
        let label = cv.id.label();
        let _ = write!(
            s,
            r#"<polyline class="{label}" stroke="{}" points=""#,
            stroke(label)
        );
        for (i, p) in cv.points.iter().enumerate() {
            let sep = if i == 0 { "" } else { " " };
            let _ = write!(s, "{sep}{:.7},{:.7}", p.x, -p.y);
        }
        let _ = writeln!(s, r#""/>"#);
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, r#"<g font-family="monospace" font-size="{font:.7}">"#);
    let mut row = 1.0;
    for text in legend {
        let _ = writeln!(
            s,
            r#"<text x="{:.7}" y="{:.7}">{text}</text>"#,
            vx + font,
            vy + row * font * 1.2
        );
        row += 1.0;
    }
    let mut seen: Vec<&str> = Vec::new();
    for cv in curves {
        let label = cv.id.label();
        if seen.contains(&label) {
            continue;
        }
        seen.push(label);
        let _ = writeln!(
            s,
            r#"<text x="{:.7}" y="{:.7}" fill="{}">{label}</text>"#,
            vx + font,
            vy + row * font * 1.2,
            stroke(label)
        );
        row += 1.0;
    }
    let _ = writeln!(s, "</g>");
    s.push_str("</svg>\n");
    s
}
