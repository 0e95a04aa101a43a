//! Growable grid used while synthesizing, frozen into a [`Field`] at the end.

use crate::circuit::QubitId;
use crate::field::{Cell, Field, Port, Primitive};

#[derive(Default)]
pub(crate) struct Canvas {
    rows: Vec<Vec<Cell>>,
}

impl Canvas {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, r: usize, c: usize) -> Cell {
        self.rows.get(r).and_then(|row| row.get(c)).copied().unwrap_or(Cell::EMPTY)
    }

    fn slot(&mut self, r: usize, c: usize) -> &mut Cell {
        if self.rows.len() <= r {
            self.rows.resize_with(r + 1, Vec::new);
        }
        let row = &mut self.rows[r];
        if row.len() <= c {
            row.resize(c + 1, Cell::EMPTY);
        }
        &mut row[c]
    }

    /// Horizontal strand of `q`; a vertical wire already there becomes a crossing.
    pub fn put_h(&mut self, r: usize, c: usize, q: QubitId) {
        let cell = self.slot(r, c);
        *cell = match cell.prim() {
            Primitive::Empty => Cell::wire_h(q),
            Primitive::WireV => Cell::cross(q, cell.v().unwrap()),
            other => panic!("horizontal strand of {q} collides with {other} at ({r}, {c})"),
        };
    }

    /// Vertical strand of `q`; a horizontal wire already there becomes a crossing.
    pub fn put_v(&mut self, r: usize, c: usize, q: QubitId) {
        let cell = self.slot(r, c);
        *cell = match cell.prim() {
            Primitive::Empty => Cell::wire_v(q),
            Primitive::WireH => Cell::cross(cell.h().unwrap(), q),
            other => panic!("vertical strand of {q} collides with {other} at ({r}, {c})"),
        };
    }

    pub fn put_bend(&mut self, r: usize, c: usize, a: Port, b: Port, q: QubitId) {
        let prim = Primitive::bend(a, b).expect("bend ports");
        let cell = self.slot(r, c);
        assert!(cell.is_empty(), "bend of {q} collides with {cell:?} at ({r}, {c})");
        *cell = Cell::bend(prim, q);
    }

    /// Control `control` passes vertically through the target row of `target`.
    pub fn put_cnot(&mut self, r: usize, c: usize, target: QubitId, control: QubitId) {
        let cell = self.slot(r, c);
        assert!(cell.is_empty(), "CNOT collides with {cell:?} at ({r}, {c})");
        *cell = Cell::cnot(target, control);
    }

    /// Vertical strand of `q` through `rows` of column `c`, with a CNOT
    /// wherever `cnot_on(row)` names a target.
    pub fn vertical(&mut self, c: usize, rows: impl Iterator<Item = usize>, q: QubitId, mut cnot_on: impl FnMut(usize) -> Option<QubitId>) {
        for r in rows {
            match cnot_on(r) {
                Some(t) => self.put_cnot(r, c, t, q),
                None => self.put_v(r, c, q),
            }
        }
    }

    pub fn into_field(self, rows: usize, cols: usize) -> Field {
        let mut f = Field::new(rows, cols).expect("canvas is never empty");
        for (r, row) in self.rows.into_iter().enumerate() {
            for (c, cell) in row.into_iter().enumerate() {
                if !cell.is_empty() {
                    f.set(r, c, cell);
                }
            }
        }
        f
    }

    /// Like [`Canvas::into_field`] but skipping the first `skip` rows.
    pub fn into_field_from(mut self, skip: usize, rows: usize, cols: usize) -> Field {
        self.rows.drain(..skip.min(self.rows.len()));
        self.into_field(rows, cols)
    }
}
