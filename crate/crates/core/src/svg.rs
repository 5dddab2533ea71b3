//! SVG overlay of one clustered energy field on the model wireframe.

use std::fmt::Write as _;
use std::io;
use std::path::Path;

use crate::model::Model;
use crate::scalar::Scalar;
use crate::stability::{EnergyField, EnergyKind};

pub const WIREFRAME_COLOR: &str = "#808080";
pub const SUSPECT_COLOR: &str = "#d62728";

/// Layout constants, as fractions of the larger bounding-box side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvgStyle {
    pub margin: f64,
    pub max_radius: f64,
    pub stroke_width: f64,
    /// Rendered width in pixels; height follows the aspect ratio.
    pub width_px: f64,
}

impl Default for SvgStyle {
    fn default() -> Self {
        Self {
            margin: 0.05,
            max_radius: 0.06,
            stroke_width: 0.006,
            width_px: 800.0,
        }
    }
}

/// Render `field` over `model`: gray members, and one red circle per suspect
/// element at its midpoint with radius `r_max·√(normalized energy)`. Sound
/// elements display as zero energy and get no circle.
pub fn render_svg<T: Scalar>(model: &Model, field: &EnergyField<T>, style: &SvgStyle) -> String {
    let (mut min_x, mut min_y) = (f64::INFINITY, f64::INFINITY);
    let (mut max_x, mut max_y) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for n in model.nodes() {
        min_x = min_x.min(n.x);
        max_x = max_x.max(n.x);
        min_y = min_y.min(n.y);
        max_y = max_y.max(n.y);
    }
    let extent = (max_x - min_x).max(max_y - min_y);
    let extent = if extent > 0.0 { extent } else { 1.0 };
    let margin = style.margin * extent;
    let vb_x = min_x - margin;
    let vb_y = -max_y - margin;
    let vb_w = (max_x - min_x) + 2.0 * margin;
    let vb_h = (max_y - min_y) + 2.0 * margin;
    let height_px = style.width_px * vb_h / vb_w;
    let r_max = style.max_radius * extent;
    let stroke = style.stroke_width * extent;
    let kind = match field.kind {
        EnergyKind::V => "v",
        EnergyKind::S => "s",
    };

    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{}" height="{}" viewBox="{} {} {} {}">"#,
        num(style.width_px),
        num(height_px),
        num(vb_x),
        num(vb_y),
        num(vb_w),
        num(vb_h)
    );
    let _ = writeln!(
        out,
        "<title>eigenvector {} ({kind} energy), eigenvalue {:.16e}</title>",
        field.eigen_index,
        field.eigenvalue.as_f64()
    );
    let _ = writeln!(
        out,
        r#"<g id="wireframe" stroke="{WIREFRAME_COLOR}" stroke-width="{}" stroke-linecap="round" fill="none">"#,
        num(stroke)
    );
    for e in model.elements() {
        let (a, b) = model.element_ends(e);
        let _ = writeln!(
            out,
            r#"<line data-element="{}" x1="{}" y1="{}" x2="{}" y2="{}"/>"#,
            e.id,
            num(a.x),
            num(-a.y),
            num(b.x),
            num(-b.y)
        );
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(
        out,
        r#"<g id="energy" fill="{SUSPECT_COLOR}" fill-opacity="0.6" stroke="{SUSPECT_COLOR}" stroke-width="{}">"#,
        num(stroke / 2.0)
    );
    if !field.degenerate {
        for (i, e) in model.elements().iter().enumerate() {
            let value = field.display_value(i).as_f64();
            if !(value > 0.0) {
                continue;
            }
            let (a, b) = model.element_ends(e);
            let _ = writeln!(
                out,
                r#"<circle data-element="{}" cx="{}" cy="{}" r="{}"/>"#,
                e.id,
                num(0.5 * (a.x + b.x)),
                num(-0.5 * (a.y + b.y)),
                num(r_max * value.sqrt())
            );
        }
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(out, "</svg>");
    out
}

/// Render and write to `path`.
pub fn emit_svg<T: Scalar>(
    model: &Model,
    field: &EnergyField<T>,
    style: &SvgStyle,
    path: &Path,
) -> io::Result<()> {
    std::fs::write(path, render_svg(model, field, style))
}

/// File name used for a field: `eig0001_v.svg`.
pub fn file_name<T>(field: &EnergyField<T>) -> String {
    let kind = match field.kind {
        EnergyKind::V => "v",
        EnergyKind::S => "s",
    };
    format!("eig{:04}_{kind}.svg", field.eigen_index)
}

fn num(x: f64) -> String {
    let s = format!("{x:.6}");
    // avoid "-0.000000"
    if s.trim_start_matches('-')
        .chars()
        .all(|c| c == '0' || c == '.')
    {
        "0.000000".to_string()
    } else {
        s
    }
}
