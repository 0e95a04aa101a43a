//! Fixed-height synthesis by weaving controls through two buffer rows.
//!
//! Qubit `i` lives on row `i + 1`; rows 0 and `|Q| + 1` are buffers where
//! controls turn around. Each gate gets fresh columns: a full weave goes
//! down to the bottom buffer, up to the top buffer and back down to its
//! home row (3 columns). With the heuristic enabled, a gate whose targets
//! all lie on one side of the control only sweeps that side (2 columns).

use crate::canvas::Canvas;
use crate::circuit::{Circuit, CnotGate, QubitId};
use crate::field::{Field, Port, Primitive};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    FullWeave,
    UpOnly,
    DownOnly,
}

impl Direction {
    pub fn cols_used(self) -> usize {
        match self {
            Direction::FullWeave => 3,
            Direction::UpOnly | Direction::DownOnly => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeavePlan {
    pub gate: CnotGate,
    pub direction: Direction,
    pub start_col: usize,
    pub cols_used: usize,
}

/// Row holding qubit `q`.
pub fn home_row(q: QubitId) -> usize {
    q.index() + 1
}

pub fn plan_bounded(c: &Circuit, heuristic: bool) -> Vec<WeavePlan> {
    let mut col = 0;
    c.gates()
        .iter()
        .map(|g| {
            let ctl = g.control();
            let direction = if !heuristic {
                Direction::FullWeave
            } else if g.targets().iter().all(|&t| t < ctl) {
                Direction::UpOnly
            } else if g.targets().iter().all(|&t| t > ctl) {
                Direction::DownOnly
            } else {
                Direction::FullWeave
            };
            let plan = WeavePlan { gate: g.clone(), direction, start_col: col, cols_used: direction.cols_used() };
            col += plan.cols_used;
            plan
        })
        .collect()
}

pub fn synth_bounded(c: &Circuit, heuristic: bool) -> Field {
    let n = c.qubit_count();
    let rows = n + 2;
    let plans = plan_bounded(c, heuristic);
    let cols = plans.last().map_or(1, |p| p.start_col + p.cols_used);

    let mut cv = Canvas::new();
    for p in &plans {
        weave(&mut cv, p, n);
    }
    // Every qubit row carries its horizontal strand, except where the qubit
    // itself has left the row as a control.
    for i in 0..n {
        let q = QubitId::from(i);
        let r = home_row(q);
        for col in 0..cols {
            let cell = cv.get(r, col);
            let free = match cell.prim() {
                Primitive::Empty => true,
                Primitive::WireV => cell.v() != Some(q),
                _ => false,
            };
            if free {
                cv.put_h(r, col, q);
            }
        }
    }
    cv.into_field(rows, cols)
}

fn weave(cv: &mut Canvas, p: &WeavePlan, n: usize) {
    let q = p.gate.control();
    let h = home_row(q);
    let j = p.start_col;
    let bottom = n + 1;
    let targets: Vec<usize> = p.gate.targets().iter().map(|&t| home_row(t)).collect();
    let target_at = |r: usize| targets.iter().position(|&t| t == r).map(|i| p.gate.targets()[i]);
    let none = |_| None;

    match p.direction {
        Direction::FullWeave => {
            cv.put_bend(h, j, Port::W, Port::S, q);
            cv.vertical(j, h + 1..bottom, q, target_at);
            cv.put_bend(bottom, j, Port::N, Port::E, q);
            cv.put_bend(bottom, j + 1, Port::W, Port::N, q);
            cv.vertical(j + 1, (1..bottom).rev(), q, |r| if r < h { target_at(r) } else { None });
            cv.put_bend(0, j + 1, Port::S, Port::E, q);
            cv.put_bend(0, j + 2, Port::W, Port::S, q);
            cv.vertical(j + 2, 1..h, q, none);
            cv.put_bend(h, j + 2, Port::N, Port::E, q);
        }
        Direction::DownOnly => {
            cv.put_bend(h, j, Port::W, Port::S, q);
            cv.vertical(j, h + 1..bottom, q, target_at);
            cv.put_bend(bottom, j, Port::N, Port::E, q);
            cv.put_bend(bottom, j + 1, Port::W, Port::N, q);
            cv.vertical(j + 1, (h + 1..bottom).rev(), q, none);
            cv.put_bend(h, j + 1, Port::S, Port::E, q);
        }
        Direction::UpOnly => {
            cv.put_bend(h, j, Port::W, Port::N, q);
            cv.vertical(j, (1..h).rev(), q, target_at);
            cv.put_bend(0, j, Port::S, Port::E, q);
            cv.put_bend(0, j + 1, Port::W, Port::S, q);
            cv.vertical(j + 1, 1..h, q, none);
            cv.put_bend(h, j + 1, Port::N, Port::E, q);
        }
    }
}
