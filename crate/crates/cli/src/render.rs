//! Deterministic SVG pictures of planar fields.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use mvfield::dynamics::{gradient_part, MorseReport};
use mvfield::mvf::MultivectorField;
use mvfield::{Error, SimplexId, SimplicialComplex, VectorAssignment};

const SIZE: f64 = 800.0;
const MARGIN: f64 = 30.0;
const PALETTE: &[&str] =
    &["#8dd3c7", "#ffffb3", "#bebada", "#80b1d3", "#fdb462", "#b3de69", "#fccde5", "#bc80bd", "#ccebc5", "#ffed6f"];
const MORSE_COLORS: &[&str] = &["#1b9e77", "#7570b3", "#e7298a", "#66a61e", "#e6ab02", "#a6761d"];
const CRITICAL: &str = "#e41a1c";
const GRAY: &str = "#d9d9d9";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum View {
    /// Complex with an arrow from `b(sigma)` to `b(tau)` per selected pair.
    Matching,
    /// Parts colored, critical parts red.
    Field,
    /// Only the parts outside every Morse set.
    Gradient,
    /// Morse sets colored, everything else gray.
    Morse,
}

impl View {
    pub const ALL: [View; 4] = [View::Matching, View::Field, View::Gradient, View::Morse];

    pub fn file_name(self) -> &'static str {
        match self {
            View::Matching => "matching.svg",
            View::Field => "field.svg",
            View::Gradient => "gradient.svg",
            View::Morse => "morse.svg",
        }
    }

    pub fn parse(name: &str) -> Option<View> {
        match name {
            "matching" => Some(View::Matching),
            "field" => Some(View::Field),
            "gradient" => Some(View::Gradient),
            "morse" => Some(View::Morse),
            _ => None,
        }
    }
}

struct Frame {
    min: [f64; 2],
    scale: f64,
}

impl Frame {
    fn new(points: impl Iterator<Item = [f64; 2]>) -> Self {
        let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        for p in points {
            for c in 0..2 {
                lo[c] = lo[c].min(p[c]);
                hi[c] = hi[c].max(p[c]);
            }
        }
        if !lo[0].is_finite() {
            return Frame { min: [0.0; 2], scale: 1.0 };
        }
        let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-12);
        Frame { min: lo, scale: (SIZE - 2.0 * MARGIN) / span }
    }

    /// SVG coordinates (y grows downwards).
    fn map(&self, p: &[f64]) -> (f64, f64) {
        (MARGIN + (p[0] - self.min[0]) * self.scale, SIZE - MARGIN - (p[1] - self.min[1]) * self.scale)
    }
}

fn fill_for(view: View, part: usize, critical: bool, morse_of: &[Option<usize>]) -> &'static str {
    match view {
        View::Matching => "#f7f7f7",
        View::Field if critical => CRITICAL,
        View::Field => PALETTE[part % PALETTE.len()],
        View::Gradient => match morse_of[part] {
            Some(_) => "none",
            None if critical => CRITICAL,
            None => PALETTE[part % PALETTE.len()],
        },
        View::Morse => match morse_of[part] {
            Some(m) => MORSE_COLORS[m % MORSE_COLORS.len()],
            None => GRAY,
        },
    }
}

/// Renders one view of a planar field. Three-dimensional input is rejected.
pub fn render_svg(
    k: &SimplicialComplex,
    assignment: &VectorAssignment,
    field: &MultivectorField,
    matching: &[(SimplexId, SimplexId)],
    morse: &MorseReport,
    view: View,
) -> Result<String, Error> {
    if !k.is_empty() && assignment.dim() != 2 {
        return Err(Error::Parameter(format!("SVG needs planar data, got dimension {}", assignment.dim())));
    }
    let frame = Frame::new(k.ids().filter(|&s| k.dim_of(s) == 0).map(|s| {
        let b = assignment.barycenter(s);
        [b[0], b[1]]
    }));
    let mut morse_of = vec![None; field.len()];
    for (m, set) in morse.morse_sets.iter().enumerate() {
        for &p in &set.parts {
            morse_of[p] = Some(m);
        }
    }
    let shown: Option<BTreeSet<SimplexId>> = (view == View::Gradient).then(|| gradient_part(field, morse));
    let critical = |p: usize| morse.critical.get(p).copied().unwrap_or(false);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SIZE}\" height=\"{SIZE}\" viewBox=\"0 0 {SIZE} {SIZE}\">"
    );
    svg.push_str("<defs><marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"9\" refY=\"5\" markerWidth=\"5\" markerHeight=\"5\" orient=\"auto\"><path d=\"M0,0 L10,5 L0,10 z\" fill=\"#222\"/></marker></defs>\n");
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");

    for dim in [2usize, 1, 0] {
        for s in k.ids().filter(|&s| k.dim_of(s) == dim) {
            let part = field.part_of(s).unwrap_or(0);
            let visible = shown.as_ref().is_none_or(|g| g.contains(&s));
            let fill = if visible { fill_for(view, part, critical(part), &morse_of) } else { "none" };
            let pts: Vec<(f64, f64)> = k
                .vertices(s)
                .iter()
                .map(|&v| frame.map(assignment.barycenter(k.id_of(&[v]).expect("vertex in complex"))))
                .collect();
            match dim {
                2 => {
                    let path: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
                    let _ = writeln!(svg, "<polygon points=\"{}\" fill=\"{fill}\" stroke=\"none\"/>", path.join(" "));
                }
                1 => {
                    let stroke = if fill == "none" { "#bbbbbb" } else { fill };
                    let _ = writeln!(
                        svg,
                        "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#666\" stroke-width=\"0.6\"/>",
                        pts[0].0, pts[0].1, pts[1].0, pts[1].1
                    );
                    if view != View::Matching && fill != "none" {
                        let _ = writeln!(
                            svg,
                            "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"{stroke}\" stroke-width=\"3\" stroke-opacity=\"0.8\"/>",
                            pts[0].0, pts[0].1, pts[1].0, pts[1].1
                        );
                    }
                }
                _ => {
                    let r = if view != View::Matching && fill != "none" { 4.0 } else { 2.0 };
                    let c = if view == View::Matching || fill == "none" { "#444" } else { fill };
                    let _ = writeln!(
                        svg,
                        "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"{r}\" fill=\"{c}\" stroke=\"#444\" stroke-width=\"0.5\"/>",
                        pts[0].0, pts[0].1
                    );
                }
            }
        }
    }
    if matches!(view, View::Matching | View::Field) {
        for &(s, t) in matching {
            let (x1, y1) = frame.map(assignment.barycenter(s));
            let (x2, y2) = frame.map(assignment.barycenter(t));
            let _ = writeln!(
                svg,
                "<line x1=\"{x1:.2}\" y1=\"{y1:.2}\" x2=\"{x2:.2}\" y2=\"{y2:.2}\" stroke=\"#222\" stroke-width=\"1\" marker-end=\"url(#arrow)\"/>"
            );
        }
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}
