use std::fmt::Write;

use super::model::{BiplotModel, Point, PointKind};

const SIZE: f64 = 720.0;
const MARGIN: f64 = 70.0;

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

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.x0) / (self.x1 - self.x0) * (SIZE - 2.0 * MARGIN)
    }

    fn py(&self, y: f64) -> f64 {
        SIZE - MARGIN - (y - self.y0) / (self.y1 - self.y0) * (SIZE - 2.0 * MARGIN)
    }
}

fn pinned(model: &BiplotModel, p: &Point) -> (f64, f64) {
    let x = model.x_axis.cap.map_or(p.x, |c| p.x.min(c));
    let y = model.y_axis.cap.map_or(p.y, |c| p.y.min(c));
    (x, y)
}

fn padded(lo: f64, hi: f64) -> (f64, f64) {
    let span = hi - lo;
    if span <= 0.0 {
        return (lo - 1.0, hi + 1.0);
    }
    (lo - 0.08 * span, hi + 0.08 * span)
}

fn radius(kind: PointKind, size: f64, max: f64) -> f64 {
    let t = if max > 0.0 { (size / max).max(0.0).sqrt() } else { 0.0 };
    match kind {
        PointKind::Centroid => 5.0 + 15.0 * t,
        _ => 2.5 + 8.5 * t,
    }
}

/// Rays are correlations; stretch them so the longest reaches 90% of the
/// farthest point from the origin.
fn ray_scale(model: &BiplotModel) -> f64 {
    let reach = model
        .points
        .iter()
        .map(|p| {
            let (x, y) = pinned(model, p);
            x.hypot(y)
        })
        .fold(0.0, f64::max);
    let longest = model.rays.iter().map(|r| r.x.hypot(r.y)).fold(0.0, f64::max);
    if reach > 0.0 && longest > 0.0 {
        0.9 * reach / longest
    } else {
        1.0
    }
}

/// SVG 1.1 document. Identical models give identical bytes.
pub fn render_svg(model: &BiplotModel) -> String {
    let scale = ray_scale(model);
    let (mut x0, mut x1, mut y0, mut y1) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut extend = |x: f64, y: f64| {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    };
    for p in &model.points {
        let (x, y) = pinned(model, p);
        extend(x, y);
    }
    for r in &model.rays {
        extend(scale * r.x, scale * r.y);
        if model.back_extension {
            extend(-scale * r.x, -scale * r.y);
        }
    }
    let (x0, x1) = padded(x0, x1);
    let (y0, y1) = padded(y0, y1);
    let f = Frame { x0, x1, y0, y1 };
    let (ox, oy) = (f.px(0.0), f.py(0.0));

    let mut s = String::new();
    s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{SIZE}\" height=\"{SIZE}\" viewBox=\"0 0 {SIZE} {SIZE}\" font-family=\"sans-serif\" font-size=\"11\">"
    );
    let _ =
        writeln!(s, "<rect class=\"background\" x=\"0\" y=\"0\" width=\"{SIZE}\" height=\"{SIZE}\" fill=\"white\"/>");

    s.push_str("<g class=\"axes\" stroke=\"#888888\" stroke-width=\"1\">\n");
    let (left, right, top, bottom) = (MARGIN, SIZE - MARGIN, MARGIN, SIZE - MARGIN);
    let _ = writeln!(s, "<line class=\"axis\" x1=\"{left:.2}\" y1=\"{oy:.2}\" x2=\"{right:.2}\" y2=\"{oy:.2}\"/>");
    let _ = writeln!(s, "<line class=\"axis\" x1=\"{ox:.2}\" y1=\"{top:.2}\" x2=\"{ox:.2}\" y2=\"{bottom:.2}\"/>");
    if let Some(c) = model.x_axis.cap {
        let x = f.px(c);
        let _ = writeln!(
            s,
            "<line class=\"cap\" x1=\"{x:.2}\" y1=\"{top:.2}\" x2=\"{x:.2}\" y2=\"{bottom:.2}\" stroke-dasharray=\"2,3\"/>"
        );
    }
    if let Some(c) = model.y_axis.cap {
        let y = f.py(c);
        let _ = writeln!(
            s,
            "<line class=\"cap\" x1=\"{left:.2}\" y1=\"{y:.2}\" x2=\"{right:.2}\" y2=\"{y:.2}\" stroke-dasharray=\"2,3\"/>"
        );
    }
    s.push_str("</g>\n");
    let _ = writeln!(
        s,
        "<text class=\"axis-label\" x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\" font-size=\"14\">{}</text>",
        SIZE / 2.0,
        SIZE - MARGIN / 3.0,
        escape(&model.x_axis.label)
    );
    let _ = writeln!(
        s,
        "<text class=\"axis-label\" x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 {:.2} {:.2})\">{}</text>",
        MARGIN / 3.0,
        SIZE / 2.0,
        MARGIN / 3.0,
        SIZE / 2.0,
        escape(&model.y_axis.label)
    );

    let max_size = |kind: PointKind| model.points.iter().filter(|p| p.kind == kind).map(|p| p.size).fold(0.0, f64::max);
    let groups = [
        ("products", PointKind::Product, "#9e9e9e", "0.5"),
        ("centroids", PointKind::Centroid, "#ff9800", "0.7"),
        ("countries", PointKind::Country, "#3f51b5", "0.6"),
    ];
    for (name, kind, fill, opacity) in groups {
        let max = max_size(kind);
        let _ = writeln!(
            s,
            "<g class=\"{name}\" fill=\"{fill}\" fill-opacity=\"{opacity}\" stroke=\"#333333\" stroke-width=\"0.5\">"
        );
        for p in model.points.iter().filter(|p| p.kind == kind) {
            let (x, y) = pinned(model, p);
            let _ = write!(
                s,
                "<circle class=\"{}\" cx=\"{:.2}\" cy=\"{:.2}\" r=\"{:.2}\" data-label=\"{}\"",
                kind.as_str(),
                f.px(x),
                f.py(y),
                radius(kind, p.size, max),
                escape(&p.label)
            );
            if p.clipped {
                s.push_str(" data-clipped=\"true\"");
            }
            s.push_str("/>\n");
        }
        s.push_str("</g>\n");
    }

    let _ = writeln!(s, "<g class=\"rays\" stroke-width=\"2\" data-scale=\"{scale:.6}\">");
    for r in &model.rays {
        let (ex, ey) = (f.px(scale * r.x), f.py(scale * r.y));
        if model.back_extension {
            let _ = writeln!(
                s,
                "<line class=\"ray-back\" x1=\"{ox:.2}\" y1=\"{oy:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"{}\" stroke-dasharray=\"6,4\"/>",
                f.px(-scale * r.x),
                f.py(-scale * r.y),
                r.color
            );
        }
        let _ = writeln!(
            s,
            "<line class=\"ray\" x1=\"{ox:.2}\" y1=\"{oy:.2}\" x2=\"{ex:.2}\" y2=\"{ey:.2}\" stroke=\"{}\"/>",
            r.color
        );
        let _ = writeln!(
            s,
            "<text class=\"ray-label\" x=\"{:.2}\" y=\"{:.2}\" fill=\"{}\">{}</text>",
            ex + 4.0,
            ey - 4.0,
            r.color,
            escape(&r.variable)
        );
    }
    s.push_str("</g>\n");

    s.push_str("<g class=\"labels\" fill=\"#222222\">\n");
    for p in model.points.iter().filter(|p| p.labeled) {
        let (x, y) = pinned(model, p);
        let _ = writeln!(
            s,
            "<text class=\"label\" x=\"{:.2}\" y=\"{:.2}\">{}</text>",
            f.px(x) + 5.0,
            f.py(y) - 5.0,
            escape(&p.label)
        );
    }
    s.push_str("</g>\n</svg>\n");
    s
}
