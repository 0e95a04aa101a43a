//! Unbounded synthesis: the field grows by fresh rows and columns per gate.
//!
//! Every qubit sits on a row, entering at the left edge. For each gate the
//! control bends down its own column, hits each target row with a CNOT and
//! turns east into a fresh bottom row. Targets lying above the control are
//! first moved down to fresh rows, one column each. When that would move
//! every other qubit, the control instead climbs to the reserved top row,
//! hops one column and descends through all rows into a fresh bottom row.
//! Row 0 is that reserved row; it is cropped when never used.

use crate::canvas::Canvas;
use crate::circuit::{Circuit, QubitId};
use crate::field::{Field, Port};

struct UnboundedState {
    canvas: Canvas,
    /// Current row of each qubit.
    row_of: Vec<Option<usize>>,
    /// First column of the current row not yet drawn for each qubit.
    frontier: Vec<usize>,
    next_row: usize,
    next_col: usize,
    used_top: bool,
}

impl UnboundedState {
    fn new(n: usize) -> Self {
        UnboundedState {
            canvas: Canvas::new(),
            row_of: vec![None; n],
            frontier: vec![0; n],
            next_row: 1,
            next_col: 0,
            used_top: false,
        }
    }

    fn fresh_row(&mut self) -> usize {
        self.next_row += 1;
        self.next_row - 1
    }

    fn fresh_col(&mut self) -> usize {
        self.next_col += 1;
        self.next_col - 1
    }

    fn attach(&mut self, q: QubitId) {
        if self.row_of[q.index()].is_none() {
            self.row_of[q.index()] = Some(self.fresh_row());
        }
    }

    fn row(&self, q: QubitId) -> usize {
        self.row_of[q.index()].expect("attached")
    }

    /// Draws the row of `q` up to (excluding) column `upto`.
    fn extend(&mut self, q: QubitId, upto: usize) {
        let r = self.row(q);
        for c in self.frontier[q.index()]..upto {
            self.canvas.put_h(r, c, q);
        }
        self.frontier[q.index()] = self.frontier[q.index()].max(upto);
    }

    /// Places a CNOT of `control` on the row of `target` at column `c`.
    fn hit(&mut self, target: QubitId, c: usize, control: QubitId) {
        self.extend(target, c);
        let r = self.row(target);
        self.canvas.put_cnot(r, c, target, control);
        self.frontier[target.index()] = c + 1;
    }

    /// Moves `q` from its row down to a fresh bottom row through a new column.
    fn move_down(&mut self, q: QubitId) {
        let x = self.fresh_col();
        let from = self.row(q);
        self.extend(q, x);
        self.canvas.put_bend(from, x, Port::W, Port::S, q);
        let to = self.fresh_row();
        self.canvas.vertical(x, from + 1..to, q, |_| None);
        self.canvas.put_bend(to, x, Port::N, Port::E, q);
        self.row_of[q.index()] = Some(to);
        self.frontier[q.index()] = x + 1;
    }

    fn gate(&mut self, control: QubitId, targets: &[QubitId]) {
        let n = self.row_of.len();
        self.attach(control);
        for &t in targets {
            self.attach(t);
        }
        let rc = self.row(control);
        let mut above: Vec<QubitId> = targets.iter().copied().filter(|&t| self.row(t) < rc).collect();
        above.sort_by_key(|&t| self.row(t));

        if above.len() + 2 <= n {
            for t in above {
                self.move_down(t);
            }
            let x = self.fresh_col();
            self.extend(control, x);
            self.canvas.put_bend(rc, x, Port::W, Port::S, control);
            let to = self.fresh_row();
            self.descend(control, targets, x, rc + 1..to);
            self.canvas.put_bend(to, x, Port::N, Port::E, control);
            self.row_of[control.index()] = Some(to);
            self.frontier[control.index()] = x + 1;
        } else {
            let x = self.fresh_col();
            let y = self.fresh_col();
            self.extend(control, x);
            self.canvas.put_bend(rc, x, Port::W, Port::N, control);
            let up: Vec<usize> = (1..rc).rev().collect();
            self.descend(control, targets, x, up.into_iter());
            self.canvas.put_bend(0, x, Port::S, Port::E, control);
            self.canvas.put_bend(0, y, Port::W, Port::S, control);
            let to = self.fresh_row();
            let below: Vec<QubitId> = targets.iter().copied().filter(|&t| self.row(t) > rc).collect();
            self.descend(control, &below, y, 1..to);
            self.canvas.put_bend(to, y, Port::N, Port::E, control);
            self.row_of[control.index()] = Some(to);
            self.frontier[control.index()] = y + 1;
            self.used_top = true;
        }
    }

    /// Runs `control` vertically through `rows` of column `x`, with a CNOT on
    /// each row of `targets`.
    fn descend(&mut self, control: QubitId, targets: &[QubitId], x: usize, rows: impl Iterator<Item = usize>) {
        for r in rows {
            match targets.iter().copied().find(|&t| self.row(t) == r) {
                Some(t) => self.hit(t, x, control),
                None => self.canvas.put_v(r, x, control),
            }
        }
    }

    fn finish(mut self) -> Field {
        let n = self.row_of.len();
        for i in 0..n {
            self.attach(QubitId::from(i));
        }
        let cols = self.next_col.max(1);
        for i in 0..n {
            self.extend(QubitId::from(i), cols);
        }
        let skip = usize::from(!self.used_top);
        self.canvas.into_field_from(skip, self.next_row - skip, cols)
    }
}

pub fn synth_unbounded(c: &Circuit) -> Field {
    let mut st = UnboundedState::new(c.qubit_count());
    for g in c.gates() {
        st.gate(g.control(), g.targets());
    }
    st.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extract::extract_with_width;
    use crate::field::Primitive;
    use crate::gf2::equivalent;

    fn check(c: &Circuit) -> Field {
        let f = synth_unbounded(c);
        assert_eq!(f.validate(), vec![], "\n{f}");
        let back = extract_with_width(&f, c.qubit_count()).unwrap();
        assert!(equivalent(&back, c).unwrap(), "{c}\n{f}\n{back}");
        f
    }

    fn a1w(q: u64, g: u64) -> u64 {
        g * g * (q - 1) * q
    }

    #[test]
    fn sample() {
        let c = Circuit::parse("qubits 4\ncnot 3: 0 1\ncnot 0: 3\ncnot 2: 1\n").unwrap();
        let f = check(&c);
        assert!(f.area() <= a1w(4, 3));
    }

    #[test]
    fn empty_circuit_is_parallel_wires() {
        let f = check(&Circuit::empty(5).unwrap());
        assert_eq!((f.rows(), f.cols()), (5, 1));
        for r in 0..5 {
            assert_eq!(f.cell(r, 0).prim(), Primitive::WireH);
        }
    }

    #[test]
    fn over_the_top_when_all_targets_above() {
        // After the first gate control 2 sits below both of its targets.
        let c = Circuit::parse("qubits 3\ncnot 2: 0 1\ncnot 2: 0 1\n").unwrap();
        let f = check(&c);
        assert!(f.area() <= a1w(3, 2));
        assert!((0..f.cols()).any(|c| f.cell(0, c).prim() == Primitive::BendSE));
    }

    #[test]
    fn growth_is_monotone_in_prefix() {
        let c = Circuit::parse(
            "qubits 5\ncnot 0: 1 2\ncnot 3: 0\ncnot 4: 0 1 2 3\ncnot 2: 4\ncnot 1: 0 3\ncnot 0: 4\n",
        )
        .unwrap();
        let mut last = (0, 0);
        for k in 0..=c.gates().len() {
            let prefix = Circuit::new(5, c.gates()[..k].to_vec()).unwrap();
            let f = check(&prefix);
            assert!(f.rows() >= last.0 && f.cols() >= last.1);
            last = (f.rows(), f.cols());
        }
    }

    #[test]
    fn deterministic() {
        let c = Circuit::parse("qubits 4\ncnot 1: 0 3\ncnot 2: 1\n").unwrap();
        assert_eq!(synth_unbounded(&c), synth_unbounded(&c));
    }
}
