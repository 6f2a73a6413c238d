//! SVG export. Coordinates are projected to decimals with a fixed number of
//! digits, so the same input always gives the same bytes.

use flipdist::{PointSet, Triangulation};
use std::fmt::Write as _;

const DIGITS: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub enum Element {
    Point { x: f64, y: f64, index: usize },
    Segment { a: (f64, f64), b: (f64, f64), dashed: bool },
    Label { x: f64, y: f64, text: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvgScene {
    pub width: f64,
    pub height: f64,
    pub elements: Vec<Element>,
}

#[derive(Debug, Clone)]
pub struct RenderOptions {
    pub width: f64,
    pub margin: f64,
    pub point_radius: f64,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions {
            width: 800.0,
            margin: 24.0,
            point_radius: 3.0,
        }
    }
}

/// Affine fit of the bounding box into `width` (minus margins), y axis up.
struct Fit {
    x0: f64,
    y1: f64,
    scale: f64,
    margin: f64,
}

impl Fit {
    fn new(pts: &[(f64, f64)], opts: &RenderOptions) -> (Fit, f64) {
        let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
        for &(x, y) in pts {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        let inner = opts.width - 2.0 * opts.margin;
        let span = (x1 - x0).max(y1 - y0);
        let scale = if span > 0.0 { inner / span } else { 1.0 };
        let height = (y1 - y0) * scale + 2.0 * opts.margin;
        (
            Fit {
                x0,
                y1,
                scale,
                margin: opts.margin,
            },
            height,
        )
    }

    fn map(&self, (x, y): (f64, f64)) -> (f64, f64) {
        (
            self.margin + (x - self.x0) * self.scale,
            self.margin + (self.y1 - y) * self.scale,
        )
    }
}

/// Points as circles, `solid` edges drawn solid, `dashed` edges dashed
/// (edges in both are drawn once, solid), and `labels` at triangle centroids.
pub fn render_svg(
    ps: &PointSet,
    solid: Option<&Triangulation>,
    dashed: Option<&Triangulation>,
    labels: &[([usize; 3], String)],
    opts: &RenderOptions,
) -> SvgScene {
    let raw: Vec<(f64, f64)> = ps.points().iter().map(|p| p.to_f64()).collect();
    let (fit, height) = Fit::new(&raw, opts);
    let xy: Vec<(f64, f64)> = raw.iter().map(|&p| fit.map(p)).collect();
    let mut elements = Vec::new();
    if let Some(t) = solid {
        for e in t.edges_sorted() {
            elements.push(Element::Segment {
                a: xy[e.a],
                b: xy[e.b],
                dashed: false,
            });
        }
    }
    if let Some(t) = dashed {
        for e in t.edges_sorted() {
            if solid.is_some_and(|s| s.contains(e)) {
                continue;
            }
            elements.push(Element::Segment {
                a: xy[e.a],
                b: xy[e.b],
                dashed: true,
            });
        }
    }
    for (tri, text) in labels {
        let (x, y) = tri.iter().fold((0.0, 0.0), |acc, &i| (acc.0 + xy[i].0, acc.1 + xy[i].1));
        elements.push(Element::Label {
            x: x / 3.0,
            y: y / 3.0,
            text: text.clone(),
        });
    }
    for (index, &(x, y)) in xy.iter().enumerate() {
        elements.push(Element::Point { x, y, index });
    }
    SvgScene {
        width: opts.width,
        height,
        elements,
    }
}

fn f(x: f64) -> String {
    format!("{x:.DIGITS$}")
}

impl SvgScene {
    pub fn to_svg(&self, point_radius: f64) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
            w = f(self.width),
            h = f(self.height)
        );
        let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
        for el in &self.elements {
            let _ = match el {
                Element::Segment { a, b, dashed } => writeln!(
                    s,
                    r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{}" stroke-width="1"{}/>"#,
                    f(a.0),
                    f(a.1),
                    f(b.0),
                    f(b.1),
                    if *dashed { "#c0392b" } else { "black" },
                    if *dashed { r#" stroke-dasharray="4 3""# } else { "" }
                ),
                Element::Label { x, y, text } => writeln!(
                    s,
                    r#"<text class="label" x="{}" y="{}" font-size="12" text-anchor="middle" dominant-baseline="middle">{}</text>"#,
                    f(*x),
                    f(*y),
                    text
                ),
                Element::Point { x, y, index } => writeln!(
                    s,
                    r#"<circle id="p{index}" cx="{}" cy="{}" r="{}" fill="black"/>"#,
                    f(*x),
                    f(*y),
                    f(point_radius)
                ),
            };
        }
        s.push_str("</svg>\n");
        s
    }
}
