//! Three-dimensional defect geometry and resource estimates for a field.
//!
//! Cell `(r, c)` covers `x ∈ [c·d, (c+1)·d]`, `y ∈ [r·d, (r+1)·d]` for pitch
//! `d`. Every strand becomes two parallel defects stacked in depth.
//! Horizontal strands run at `z = 0` (defect A) and `z = d` (defect B),
//! vertical strands at `z = d/2` and `z = 3d/2`, so strands of a CROSS pass
//! each other half a pitch apart. A bend climbs from the horizontal to the
//! vertical level at the cell centre.

mod render;

use std::fmt;

use thiserror::Error;

pub use render::{render_ascii, render_svg};

use crate::circuit::QubitId;
use crate::extract::{control_segments, ExtractError};
use crate::field::{Field, Port, Primitive};

/// Physical qubits in one lattice unit cell.
pub const QUBITS_PER_UNIT_CELL: u64 = 18;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DefectRole {
    A,
    B,
}

pub type Point = [f64; 3];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DefectSegment {
    pub qubit: QubitId,
    pub role: DefectRole,
    pub from: Point,
    pub to: Point,
    /// Field cell the segment belongs to.
    pub cell: (usize, usize),
}

impl DefectSegment {
    pub fn length(&self) -> f64 {
        (0..3).map(|i| (self.to[i] - self.from[i]).abs()).sum()
    }

    /// Euclidean distance between two axis-aligned segments.
    pub fn distance(&self, o: &DefectSegment) -> f64 {
        let mut sum = 0.0;
        for i in 0..3 {
            let (a0, a1) = (self.from[i].min(self.to[i]), self.from[i].max(self.to[i]));
            let (b0, b1) = (o.from[i].min(o.to[i]), o.from[i].max(o.to[i]));
            let gap = (b0 - a1).max(a0 - b1).max(0.0);
            sum += gap * gap;
        }
        sum.sqrt()
    }
}

/// A CNOT cell where control and target defects join.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Junction {
    pub at: Point,
    pub cell: (usize, usize),
    /// Index of the gate in extraction order.
    pub gate: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Geometry {
    pub pitch: u64,
    pub segments: Vec<DefectSegment>,
    pub junctions: Vec<Junction>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GeometryError {
    #[error("pitch must be at least 2, got {0}")]
    PitchTooSmall(u64),
    #[error("field has {0} rule violations")]
    InvalidField(usize),
    #[error(transparent)]
    Extract(#[from] ExtractError),
}

fn fmt_point(p: &Point) -> String {
    format!("({},{},{})", p[0], p[1], p[2])
}

impl fmt::Display for Geometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.segments {
            let role = match s.role {
                DefectRole::A => "A",
                DefectRole::B => "B",
            };
            writeln!(f, "segment qubit={} role={role} from={} to={}", s.qubit, fmt_point(&s.from), fmt_point(&s.to))?;
        }
        for j in &self.junctions {
            writeln!(f, "junction at={} gate={}", fmt_point(&j.at), j.gate)?;
        }
        Ok(())
    }
}

pub fn field_to_geometry(f: &Field, pitch: u64) -> Result<Geometry, GeometryError> {
    if pitch < 2 {
        return Err(GeometryError::PitchTooSmall(pitch));
    }
    let v = f.validate();
    if !v.is_empty() {
        return Err(GeometryError::InvalidField(v.len()));
    }
    let d = pitch as f64;
    let mut junctions = Vec::new();
    for (k, seg) in control_segments(f)?.iter().enumerate() {
        for &(r, c) in &seg.cnot_cells {
            let at = [(c as f64 + 0.5) * d, (r as f64 + 0.5) * d, d / 2.0];
            junctions.push(Junction { at, cell: (r, c), gate: k });
        }
    }
    junctions.sort_by_key(|j| (j.cell, j.gate));

    let mut segments = Vec::new();
    for r in 0..f.rows() {
        for c in 0..f.cols() {
            cell_segments(f, r, c, d, &mut segments);
        }
    }
    Ok(Geometry { pitch, segments, junctions })
}

fn cell_segments(f: &Field, r: usize, c: usize, d: f64, out: &mut Vec<DefectSegment>) {
    let cell = f.cell(r, c);
    let (x0, y0) = (c as f64 * d, r as f64 * d);
    let (cx, cy) = (x0 + d / 2.0, y0 + d / 2.0);
    let edge = |p: Port| -> (f64, f64) {
        match p {
            Port::N => (cx, y0),
            Port::S => (cx, y0 + d),
            Port::W => (x0, cy),
            Port::E => (x0 + d, cy),
        }
    };
    let levels = |vertical: bool| if vertical { [d / 2.0, 1.5 * d] } else { [0.0, d] };
    let roles = [DefectRole::A, DefectRole::B];
    let mut push = |q: QubitId, from: Point, to: Point, role: DefectRole| {
        out.push(DefectSegment { qubit: q, role, from, to, cell: (r, c) });
    };

    let straight = |p: Port, q: QubitId, push: &mut dyn FnMut(QubitId, Point, Point, DefectRole)| {
        let (a, b) = (edge(p), edge(p.opposite()));
        for (z, role) in levels(p.is_vertical()).into_iter().zip(roles) {
            push(q, [a.0, a.1, z], [b.0, b.1, z], role);
        }
    };

    match cell.prim() {
        Primitive::Empty => {}
        Primitive::WireH => straight(Port::W, cell.h().unwrap(), &mut push),
        Primitive::WireV => straight(Port::N, cell.v().unwrap(), &mut push),
        Primitive::Cross | Primitive::Cnot => {
            straight(Port::W, cell.h().unwrap(), &mut push);
            straight(Port::N, cell.v().unwrap(), &mut push);
        }
        bend => {
            let q = cell.h().unwrap();
            let hp = [Port::E, Port::W].into_iter().find(|&p| bend.has_port(p)).unwrap();
            let vp = [Port::N, Port::S].into_iter().find(|&p| bend.has_port(p)).unwrap();
            let (h, v) = (edge(hp), edge(vp));
            for ((zh, zv), role) in levels(false).into_iter().zip(levels(true)).zip(roles) {
                push(q, [h.0, h.1, zh], [cx, cy, zh], role);
                push(q, [cx, cy, zh], [cx, cy, zv], role);
                push(q, [cx, cy, zv], [v.0, v.1, zv], role);
            }
        }
    }
}

/// Closest approach between defects of different qubits, ignoring pairs that
/// meet inside a junction cell. `None` when no such pair exists.
pub fn min_separation(g: &Geometry) -> Option<f64> {
    let junction_cells: std::collections::HashSet<(usize, usize)> = g.junctions.iter().map(|j| j.cell).collect();
    let mut best: Option<f64> = None;
    for (i, a) in g.segments.iter().enumerate() {
        for b in &g.segments[i + 1..] {
            if a.qubit == b.qubit || (a.cell == b.cell && junction_cells.contains(&a.cell)) {
                continue;
            }
            let dist = a.distance(b);
            best = Some(best.map_or(dist, |m: f64| m.min(dist)));
        }
    }
    best
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ResourceEstimate {
    pub pitch: u64,
    pub depth: u64,
    /// `(x, y, z)` in unit cells.
    pub extent: (u64, u64, u64),
    pub unit_cells: u64,
    /// Upper bound: qubits removed to carve the defects are not subtracted.
    pub physical_qubits: u64,
}

pub fn estimate_resources(f: &Field, pitch: u64, depth: u64) -> ResourceEstimate {
    let extent = (f.cols() as u64 * pitch, f.rows() as u64 * pitch, depth * pitch);
    let unit_cells = extent.0 * extent.1 * extent.2;
    ResourceEstimate { pitch, depth, extent, unit_cells, physical_qubits: QUBITS_PER_UNIT_CELL * unit_cells }
}
