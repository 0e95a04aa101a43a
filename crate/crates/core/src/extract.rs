//! Reads the gate list back out of a field.
//!
//! A qubit's path is cut into pieces: maximal runs of consecutive cells
//! where the path uses a N or S port. A run also ends where the path hops
//! sideways from one bend straight into another, unless that hop turns the
//! path around on the field's top or bottom row (the turnaround of a
//! control weaving through a buffer row). A piece that crosses at least one
//! CNOT on its vertical strand is a control segment and yields one gate.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::circuit::{Circuit, CnotGate, QubitId};
use crate::field::{Field, Port, Primitive, Step, TraceError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ControlSegment {
    pub qubit: QubitId,
    pub first_col: usize,
    pub last_col: usize,
    /// In path order.
    pub cnot_cells: Vec<(usize, usize)>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExtractError {
    #[error("control segments of qubits {a} and {b} share columns {first}..={last}; gate order is undefined")]
    AmbiguousOrder { a: QubitId, b: QubitId, first: usize, last: usize },
    #[error("gate order contradicts the path of qubit {0}")]
    InconsistentOrder(QubitId),
    #[error("malformed field at ({row}, {col}): {msg}")]
    MalformedField { row: usize, col: usize, msg: &'static str },
    #[error(transparent)]
    Trace(#[from] TraceError),
}

/// Splits one path into control segments.
fn segments_of(f: &Field, q: QubitId, steps: &[Step]) -> Vec<ControlSegment> {
    let last_row = f.rows() - 1;
    let mut out = Vec::new();
    let mut cur: Option<ControlSegment> = None;
    let close = |cur: &mut Option<ControlSegment>, out: &mut Vec<ControlSegment>| {
        if let Some(s) = cur.take() {
            if !s.cnot_cells.is_empty() {
                out.push(s);
            }
        }
    };

    for (i, s) in steps.iter().enumerate() {
        if !s.is_vertical_visit() {
            close(&mut cur, &mut out);
            continue;
        }
        if i > 0 && cur.is_some() {
            let p = steps[i - 1];
            let hop = !p.port_out.is_vertical() && !s.port_in.is_vertical();
            let u_turn = p.port_in == s.port_out
                && ((p.port_in == Port::N && s.row == last_row) || (p.port_in == Port::S && s.row == 0));
            if hop && !u_turn {
                close(&mut cur, &mut out);
            }
        }
        let seg = cur.get_or_insert(ControlSegment { qubit: q, first_col: s.col, last_col: s.col, cnot_cells: vec![] });
        seg.first_col = seg.first_col.min(s.col);
        seg.last_col = seg.last_col.max(s.col);
        if f.cell(s.row, s.col).prim() == Primitive::Cnot && s.port_in.is_vertical() {
            seg.cnot_cells.push((s.row, s.col));
        }
    }
    close(&mut cur, &mut out);
    out
}

/// Control segments of every qubit, sorted by first column.
pub fn control_segments(f: &Field) -> Result<Vec<ControlSegment>, ExtractError> {
    let mut segs = Vec::new();
    for q in entry_qubits(f) {
        let steps = f.trace(q)?;
        segs.extend(segments_of(f, q, &steps));
    }
    segs.sort_by_key(|s| (s.first_col, s.last_col, s.qubit));
    Ok(segs)
}

fn entry_qubits(f: &Field) -> BTreeSet<QubitId> {
    f.entries().into_iter().map(|(q, _)| q).collect()
}

/// The circuit a field implements. Expects a field that validates cleanly.
/// The qubit count is one more than the largest qubit id present.
pub fn extract(f: &Field) -> Result<Circuit, ExtractError> {
    let qubits = entry_qubits(f);
    let mut traces = Vec::with_capacity(qubits.len());
    let mut segs = Vec::new();
    for &q in &qubits {
        let steps = f.trace(q)?;
        segs.extend(segments_of(f, q, &steps));
        traces.push((q, steps));
    }
    segs.sort_by_key(|s| (s.first_col, s.last_col, s.qubit));

    let mut reach: Option<(usize, QubitId)> = None;
    for s in &segs {
        if let Some((last, owner)) = reach {
            if s.first_col <= last {
                return Err(ExtractError::AmbiguousOrder { a: owner, b: s.qubit, first: s.first_col, last });
            }
        }
        reach = Some(match reach {
            Some((last, owner)) if last >= s.last_col => (last, owner),
            _ => (s.last_col, s.qubit),
        });
    }

    let mut gate_of: HashMap<(usize, usize), usize> = HashMap::new();
    let mut gates = Vec::with_capacity(segs.len());
    for (k, s) in segs.iter().enumerate() {
        let mut targets = Vec::with_capacity(s.cnot_cells.len());
        let mut seen = BTreeSet::new();
        for &(row, col) in &s.cnot_cells {
            let t = f.cell(row, col).h().ok_or(ExtractError::MalformedField { row, col, msg: "CNOT without target" })?;
            if !seen.insert(t) {
                return Err(ExtractError::MalformedField { row, col, msg: "target crossed twice by one control segment" });
            }
            targets.push(t);
            gate_of.insert((row, col), k);
        }
        let (row, col) = s.cnot_cells[0];
        let gate = CnotGate::new(s.qubit, targets)
            .map_err(|_| ExtractError::MalformedField { row, col, msg: "control is its own target" })?;
        gates.push(gate);
    }

    for row in 0..f.rows() {
        for col in 0..f.cols() {
            if f.cell(row, col).prim() == Primitive::Cnot && !gate_of.contains_key(&(row, col)) {
                return Err(ExtractError::MalformedField { row, col, msg: "CNOT not on any control segment" });
            }
        }
    }

    // Gates met along one path must appear in left-to-right order.
    for (q, steps) in &traces {
        let mut last = 0usize;
        for s in steps {
            if let Some(&k) = gate_of.get(&(s.row, s.col)) {
                if k < last {
                    return Err(ExtractError::InconsistentOrder(*q));
                }
                last = k;
            }
        }
    }

    let n = f.qubits().last().map_or(1, |q| q.index() + 1);
    Ok(Circuit::new(n, gates).expect("gate qubits come from the field"))
}

/// [`extract`] widened to at least `qubit_count` qubits, for comparison
/// against a source circuit whose highest qubits may be idle.
pub fn extract_with_width(f: &Field, qubit_count: usize) -> Result<Circuit, ExtractError> {
    let c = extract(f)?;
    if c.qubit_count() >= qubit_count {
        return Ok(c);
    }
    Ok(Circuit::new(qubit_count, c.gates().to_vec()).expect("widening keeps qubits in range"))
}
