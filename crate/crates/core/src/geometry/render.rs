use std::fmt::Write;

use crate::field::{Field, Port, Primitive};

fn glyph(p: Primitive) -> char {
    match p {
        Primitive::Empty => '.',
        Primitive::WireH => '-',
        Primitive::WireV => '|',
        Primitive::BendNE => 'L',
        Primitive::BendNW => 'J',
        Primitive::BendSE => 'r',
        Primitive::BendSW => '7',
        Primitive::Cross => '+',
        Primitive::Cnot => '@',
    }
}

/// One character per cell, one line per row.
pub fn render_ascii(f: &Field) -> String {
    let mut s = String::with_capacity((f.cols() + 1) * f.rows());
    for r in 0..f.rows() {
        s.extend((0..f.cols()).map(|c| glyph(f.cell(r, c).prim())));
        s.push('\n');
    }
    s
}

const CELL: usize = 24;

/// Schematic SVG: strands as lines through cell centres, CNOTs as a control
/// dot on the vertical strand and a target ⊕ on the horizontal one.
pub fn render_svg(f: &Field) -> String {
    let (w, h) = (f.cols() * CELL, f.rows() * CELL);
    let half = CELL / 2;
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#);
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(s, r#"<g stroke="black" stroke-width="2" fill="none">"#);
    for r in 0..f.rows() {
        for c in 0..f.cols() {
            let cell = f.cell(r, c);
            let (x, y) = (c * CELL, r * CELL);
            let (cx, cy) = (x + half, y + half);
            let end = |p: Port| match p {
                Port::N => (cx, y),
                Port::S => (cx, y + CELL),
                Port::W => (x, cy),
                Port::E => (x + CELL, cy),
            };
            let mut line = |a: (usize, usize), b: (usize, usize), extra: &str| {
                let _ = writeln!(s, r#"<line x1="{}" y1="{}" x2="{}" y2="{}"{extra}/>"#, a.0, a.1, b.0, b.1);
            };
            match cell.prim() {
                Primitive::Empty => {}
                Primitive::WireH => line(end(Port::W), end(Port::E), ""),
                Primitive::WireV => line(end(Port::N), end(Port::S), ""),
                Primitive::Cross => {
                    line(end(Port::W), end(Port::E), "");
                    // The vertical strand is drawn broken where it passes underneath.
                    line(end(Port::N), (cx, cy - 5), "");
                    line((cx, cy + 5), end(Port::S), "");
                }
                Primitive::Cnot => {
                    line(end(Port::W), end(Port::E), "");
                    line(end(Port::N), end(Port::S), "");
                    let _ = writeln!(s, r#"<circle cx="{}" cy="{cy}" r="3" fill="black"/>"#, cx - 6);
                    let _ = writeln!(s, r#"<circle cx="{}" cy="{cy}" r="5"/>"#, cx + 5);
                }
                bend => {
                    let hp = if bend.has_port(Port::E) { Port::E } else { Port::W };
                    let vp = if bend.has_port(Port::N) { Port::N } else { Port::S };
                    let (a, b) = (end(hp), end(vp));
                    let _ = writeln!(s, r#"<path d="M {} {} Q {cx} {cy} {} {}"/>"#, a.0, a.1, b.0, b.1);
                }
            }
        }
    }
    s.push_str("</g>\n</svg>\n");
    s
}
