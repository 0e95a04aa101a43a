//! Rectangular fields of primitives, their validation and strand tracing.
//!
//! Each cell carries up to two strands. The horizontal one (touching W/E) is
//! owned by `h`, the vertical one (touching N/S) by `v`. A bend has a single
//! strand touching one horizontal and one vertical port, so both owners are
//! set and equal.
//!
//! Text format, one record per line:
//!
//! ```text
//! field 3 3
//! cell 0 0 CNOT h=0 v=3
//! cell 0 1 BEND_SW h=0 v=0
//! entry 0 0 N
//! exit 2 1 S
//! ```
//!
//! Only non-empty cells are written. W ports on the left edge are implicit
//! inputs and E ports on the right edge implicit outputs; every other
//! dangling port must be flagged by an `entry` or `exit` record.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::circuit::QubitId;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Port {
    N,
    E,
    S,
    W,
}

impl Port {
    pub const ALL: [Port; 4] = [Port::N, Port::E, Port::S, Port::W];

    pub fn opposite(self) -> Port {
        match self {
            Port::N => Port::S,
            Port::S => Port::N,
            Port::E => Port::W,
            Port::W => Port::E,
        }
    }

    pub fn is_vertical(self) -> bool {
        matches!(self, Port::N | Port::S)
    }

    pub fn name(self) -> &'static str {
        match self {
            Port::N => "N",
            Port::E => "E",
            Port::S => "S",
            Port::W => "W",
        }
    }

    pub fn from_name(s: &str) -> Option<Port> {
        Port::ALL.into_iter().find(|p| p.name() == s)
    }
}

impl fmt::Display for Port {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Primitive {
    Empty,
    WireH,
    WireV,
    BendNE,
    BendNW,
    BendSE,
    BendSW,
    Cross,
    Cnot,
}

impl Primitive {
    pub const ALL: [Primitive; 9] = [
        Primitive::Empty,
        Primitive::WireH,
        Primitive::WireV,
        Primitive::BendNE,
        Primitive::BendNW,
        Primitive::BendSE,
        Primitive::BendSW,
        Primitive::Cross,
        Primitive::Cnot,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Primitive::Empty => "EMPTY",
            Primitive::WireH => "WIRE_H",
            Primitive::WireV => "WIRE_V",
            Primitive::BendNE => "BEND_NE",
            Primitive::BendNW => "BEND_NW",
            Primitive::BendSE => "BEND_SE",
            Primitive::BendSW => "BEND_SW",
            Primitive::Cross => "CROSS",
            Primitive::Cnot => "CNOT",
        }
    }

    pub fn from_name(s: &str) -> Option<Primitive> {
        Primitive::ALL.into_iter().find(|p| p.name() == s)
    }

    /// The bend joining ports `a` and `b`, in either order.
    pub fn bend(a: Port, b: Port) -> Option<Primitive> {
        let (v, h) = if a.is_vertical() { (a, b) } else { (b, a) };
        match (v, h) {
            (Port::N, Port::E) => Some(Primitive::BendNE),
            (Port::N, Port::W) => Some(Primitive::BendNW),
            (Port::S, Port::E) => Some(Primitive::BendSE),
            (Port::S, Port::W) => Some(Primitive::BendSW),
            _ => None,
        }
    }

    pub fn is_bend(self) -> bool {
        matches!(self, Primitive::BendNE | Primitive::BendNW | Primitive::BendSE | Primitive::BendSW)
    }

    /// Cells with two independent strands.
    pub fn is_double(self) -> bool {
        matches!(self, Primitive::Cross | Primitive::Cnot)
    }

    /// The port at the other end of the strand that uses `p`.
    pub fn partner(self, p: Port) -> Option<Port> {
        use Port::*;
        use Primitive::*;
        match (self, p) {
            (WireH | Cross | Cnot, W) => Some(E),
            (WireH | Cross | Cnot, E) => Some(W),
            (WireV | Cross | Cnot, N) => Some(S),
            (WireV | Cross | Cnot, S) => Some(N),
            (BendNE, N) => Some(E),
            (BendNE, E) => Some(N),
            (BendNW, N) => Some(W),
            (BendNW, W) => Some(N),
            (BendSE, S) => Some(E),
            (BendSE, E) => Some(S),
            (BendSW, S) => Some(W),
            (BendSW, W) => Some(S),
            _ => None,
        }
    }

    pub fn has_port(self, p: Port) -> bool {
        self.partner(p).is_some()
    }

    fn touches_horizontal(self) -> bool {
        self.has_port(Port::W) || self.has_port(Port::E)
    }

    fn touches_vertical(self) -> bool {
        self.has_port(Port::N) || self.has_port(Port::S)
    }

    fn strand_count(self) -> usize {
        match self {
            Primitive::Empty => 0,
            Primitive::Cross | Primitive::Cnot => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for Primitive {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

const NONE: u32 = u32::MAX;

/// One grid position. Stored compactly since synthesized fields reach
/// tens of millions of cells.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Cell {
    prim: Primitive,
    h: u32,
    v: u32,
}

fn pack(q: Option<QubitId>) -> u32 {
    match q {
        Some(q) => {
            assert!(q.0 != NONE, "qubit id {} is reserved", q.0);
            q.0
        }
        None => NONE,
    }
}

fn unpack(x: u32) -> Option<QubitId> {
    (x != NONE).then_some(QubitId(x))
}

impl Cell {
    pub const EMPTY: Cell = Cell { prim: Primitive::Empty, h: NONE, v: NONE };

    /// Unchecked constructor; [`Field::validate`] reports inconsistent cells.
    pub fn new(prim: Primitive, h: Option<QubitId>, v: Option<QubitId>) -> Cell {
        Cell { prim, h: pack(h), v: pack(v) }
    }

    pub fn wire_h(q: QubitId) -> Cell {
        Cell::new(Primitive::WireH, Some(q), None)
    }

    pub fn wire_v(q: QubitId) -> Cell {
        Cell::new(Primitive::WireV, None, Some(q))
    }

    pub fn bend(prim: Primitive, q: QubitId) -> Cell {
        debug_assert!(prim.is_bend());
        Cell::new(prim, Some(q), Some(q))
    }

    pub fn cross(h: QubitId, v: QubitId) -> Cell {
        Cell::new(Primitive::Cross, Some(h), Some(v))
    }

    /// `control` runs vertically, `target` horizontally.
    pub fn cnot(target: QubitId, control: QubitId) -> Cell {
        Cell::new(Primitive::Cnot, Some(target), Some(control))
    }

    pub fn prim(&self) -> Primitive {
        self.prim
    }

    pub fn h(&self) -> Option<QubitId> {
        unpack(self.h)
    }

    pub fn v(&self) -> Option<QubitId> {
        unpack(self.v)
    }

    pub fn is_empty(&self) -> bool {
        self.prim == Primitive::Empty
    }

    /// Owner of the strand using port `p`, if the port is occupied.
    pub fn owner(&self, p: Port) -> Option<QubitId> {
        if !self.prim.has_port(p) {
            return None;
        }
        if p.is_vertical() {
            self.v()
        } else {
            self.h()
        }
    }

    fn check(&self) -> Result<(), &'static str> {
        let (h, v) = (self.h(), self.v());
        let p = self.prim;
        if h.is_some() != p.touches_horizontal() {
            return Err(if h.is_some() { "h owner set on a cell without a W/E strand" } else { "missing h owner" });
        }
        if v.is_some() != p.touches_vertical() {
            return Err(if v.is_some() { "v owner set on a cell without a N/S strand" } else { "missing v owner" });
        }
        if p.is_bend() && h != v {
            return Err("bend owners differ");
        }
        if p.is_double() && h == v {
            return Err("crossing strands share an owner");
        }
        Ok(())
    }
}

impl fmt::Debug for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let q = |x: Option<QubitId>| x.map_or("-".to_string(), |q| q.to_string());
        write!(f, "{} h={} v={}", self.prim, q(self.h()), q(self.v()))
    }
}

impl Default for Cell {
    fn default() -> Self {
        Cell::EMPTY
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TerminusKind {
    /// Initialization: a strand begins here.
    Entry,
    /// Measurement: a strand ends here.
    Exit,
}

impl TerminusKind {
    fn name(self) -> &'static str {
        match self {
            TerminusKind::Entry => "entry",
            TerminusKind::Exit => "exit",
        }
    }
}

/// A position where a strand starts or ends, either flagged explicitly or
/// implied by the left/right field edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Terminus {
    pub row: usize,
    pub col: usize,
    pub port: Port,
}

/// One cell visited by a strand.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Step {
    pub row: usize,
    pub col: usize,
    pub port_in: Port,
    pub port_out: Port,
}

impl Step {
    pub fn is_vertical_visit(&self) -> bool {
        self.port_in.is_vertical() || self.port_out.is_vertical()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rule {
    InvalidCell(&'static str),
    /// The port is occupied but its neighbour is not (or vice versa).
    Continuity(Port),
    OwnerMismatch(Port),
    /// An occupied boundary port that is neither an implicit edge nor flagged.
    UnflaggedTerminus(Port),
    /// A flagged terminus on a port that cannot terminate a strand.
    BadTerminus(Port),
    TerminusCount { qubit: QubitId, entries: usize, exits: usize },
    /// The strand starting at this position does not cover the qubit's cells.
    Disconnected { qubit: QubitId },
    BrokenPath { qubit: QubitId },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub row: usize,
    pub col: usize,
    pub rule: Rule,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}): ", self.row, self.col)?;
        match &self.rule {
            Rule::InvalidCell(m) => write!(f, "invalid cell: {m}"),
            Rule::Continuity(p) => write!(f, "port {p} does not connect to its neighbour"),
            Rule::OwnerMismatch(p) => write!(f, "port {p} joins strands of different qubits"),
            Rule::UnflaggedTerminus(p) => write!(f, "port {p} dangles without an entry/exit flag"),
            Rule::BadTerminus(p) => write!(f, "terminus flag on port {p} does not mark a dangling strand end"),
            Rule::TerminusCount { qubit, entries, exits } => {
                write!(f, "qubit {qubit} has {entries} entries and {exits} exits (expected one each)")
            }
            Rule::Disconnected { qubit } => write!(f, "qubit {qubit} owns strands not on its path"),
            Rule::BrokenPath { qubit } => write!(f, "path of qubit {qubit} breaks off"),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FieldError {
    #[error("field dimensions must be positive, got {rows}x{cols}")]
    ZeroSize { rows: usize, cols: usize },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TraceError {
    #[error("qubit {0} does not appear in the field")]
    QubitAbsent(QubitId),
    #[error("qubit {0} has no entry terminus")]
    NoEntry(QubitId),
    #[error("qubit {qubit} has {count} entry termini")]
    AmbiguousEntry { qubit: QubitId, count: usize },
    #[error("path of qubit {qubit} breaks at ({row}, {col})")]
    Broken { qubit: QubitId, row: usize, col: usize },
    #[error("path of qubit {0} does not terminate")]
    Cyclic(QubitId),
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: {msg}")]
pub struct FieldParseError {
    pub line: usize,
    pub msg: String,
}

#[derive(Clone, PartialEq, Eq)]
pub struct Field {
    rows: usize,
    cols: usize,
    cells: Vec<Cell>,
    termini: BTreeMap<Terminus, TerminusKind>,
}

impl Field {
    pub fn new(rows: usize, cols: usize) -> Result<Field, FieldError> {
        if rows == 0 || cols == 0 {
            return Err(FieldError::ZeroSize { rows, cols });
        }
        Ok(Field { rows, cols, cells: vec![Cell::EMPTY; rows * cols], termini: BTreeMap::new() })
    }

    /// Builds a field from row-major cells.
    pub fn from_cells(rows: usize, cols: usize, cells: Vec<Cell>) -> Result<Field, FieldError> {
        if rows == 0 || cols == 0 {
            return Err(FieldError::ZeroSize { rows, cols });
        }
        assert_eq!(cells.len(), rows * cols, "cell count does not match dimensions");
        Ok(Field { rows, cols, cells, termini: BTreeMap::new() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn area(&self) -> u64 {
        self.rows as u64 * self.cols as u64
    }

    pub fn get(&self, row: usize, col: usize) -> Option<Cell> {
        (row < self.rows && col < self.cols).then(|| self.cells[row * self.cols + col])
    }

    /// Panics when out of bounds.
    pub fn cell(&self, row: usize, col: usize) -> Cell {
        assert!(row < self.rows && col < self.cols, "({row}, {col}) outside {}x{}", self.rows, self.cols);
        self.cells[row * self.cols + col]
    }

    /// Panics when out of bounds.
    pub fn set(&mut self, row: usize, col: usize, cell: Cell) {
        assert!(row < self.rows && col < self.cols, "({row}, {col}) outside {}x{}", self.rows, self.cols);
        self.cells[row * self.cols + col] = cell;
    }

    pub fn add_terminus(&mut self, t: Terminus, kind: TerminusKind) {
        self.termini.insert(t, kind);
    }

    /// Explicitly flagged termini.
    pub fn termini(&self) -> impl Iterator<Item = (Terminus, TerminusKind)> + '_ {
        self.termini.iter().map(|(&t, &k)| (t, k))
    }

    /// All qubits owning at least one strand.
    pub fn qubits(&self) -> BTreeSet<QubitId> {
        let mut out = BTreeSet::new();
        for c in &self.cells {
            out.extend(c.h());
            out.extend(c.v());
        }
        out
    }

    fn neighbour(&self, row: usize, col: usize, p: Port) -> Option<(usize, usize)> {
        match p {
            Port::N => row.checked_sub(1).map(|r| (r, col)),
            Port::S => (row + 1 < self.rows).then_some((row + 1, col)),
            Port::W => col.checked_sub(1).map(|c| (row, c)),
            Port::E => (col + 1 < self.cols).then_some((row, col + 1)),
        }
    }

    fn is_implicit(&self, t: Terminus) -> Option<TerminusKind> {
        match t.port {
            Port::W if t.col == 0 => Some(TerminusKind::Entry),
            Port::E if t.col + 1 == self.cols => Some(TerminusKind::Exit),
            _ => None,
        }
    }

    /// Occupied and not connected to an occupied neighbour port.
    fn dangles(&self, row: usize, col: usize, p: Port) -> bool {
        if !self.cell(row, col).prim.has_port(p) {
            return false;
        }
        match self.neighbour(row, col, p) {
            None => true,
            Some((r, c)) => !self.cell(r, c).prim.has_port(p.opposite()),
        }
    }

    /// Kind of terminus at a dangling occupied port, if it is a legal one.
    fn terminus_kind(&self, t: Terminus) -> Option<TerminusKind> {
        self.is_implicit(t).or_else(|| self.termini.get(&t).copied())
    }

    /// Every entry terminus with its owner: implicit left-edge inputs first
    /// (top to bottom), then flagged entries.
    pub fn entries(&self) -> Vec<(QubitId, Terminus)> {
        let mut out = Vec::new();
        for row in 0..self.rows {
            if let Some(q) = self.cell(row, 0).owner(Port::W) {
                out.push((q, Terminus { row, col: 0, port: Port::W }));
            }
        }
        for (t, k) in self.termini() {
            if k == TerminusKind::Entry && self.is_implicit(t).is_none() && t.row < self.rows && t.col < self.cols {
                if let Some(q) = self.cell(t.row, t.col).owner(t.port) {
                    out.push((q, t));
                }
            }
        }
        out
    }

    fn exits(&self) -> Vec<(QubitId, Terminus)> {
        let mut out = Vec::new();
        let last = self.cols - 1;
        for row in 0..self.rows {
            if let Some(q) = self.cell(row, last).owner(Port::E) {
                out.push((q, Terminus { row, col: last, port: Port::E }));
            }
        }
        for (t, k) in self.termini() {
            if k == TerminusKind::Exit && self.is_implicit(t).is_none() && t.row < self.rows && t.col < self.cols {
                if let Some(q) = self.cell(t.row, t.col).owner(t.port) {
                    out.push((q, t));
                }
            }
        }
        out
    }

    /// Follows the strand of `q` that starts at `start`, calling `visit` on
    /// each cell. Gives up after `limit` steps.
    fn walk(
        &self,
        q: QubitId,
        start: Terminus,
        limit: usize,
        mut visit: impl FnMut(Step),
    ) -> Result<Terminus, TraceError> {
        let (mut row, mut col, mut port_in) = (start.row, start.col, start.port);
        for _ in 0..limit {
            let cell = self.cell(row, col);
            if cell.owner(port_in) != Some(q) {
                return Err(TraceError::Broken { qubit: q, row, col });
            }
            let port_out = cell.prim.partner(port_in).expect("occupied port has a partner");
            visit(Step { row, col, port_in, port_out });
            if self.dangles(row, col, port_out) {
                let end = Terminus { row, col, port: port_out };
                return match self.terminus_kind(end) {
                    Some(TerminusKind::Exit) => Ok(end),
                    _ => Err(TraceError::Broken { qubit: q, row, col }),
                };
            }
            let (r, c) = self.neighbour(row, col, port_out).expect("non-dangling port has a neighbour");
            (row, col, port_in) = (r, c, port_out.opposite());
        }
        Err(TraceError::Cyclic(q))
    }

    /// Path of `q` from its entry terminus to its exit terminus.
    pub fn trace(&self, q: QubitId) -> Result<Vec<Step>, TraceError> {
        let starts: Vec<Terminus> = self.entries().into_iter().filter(|&(o, _)| o == q).map(|(_, t)| t).collect();
        let start = match starts.as_slice() {
            [t] => *t,
            [] => {
                return Err(if self.qubits().contains(&q) { TraceError::NoEntry(q) } else { TraceError::QubitAbsent(q) })
            }
            many => return Err(TraceError::AmbiguousEntry { qubit: q, count: many.len() }),
        };
        let mut steps = Vec::new();
        self.walk(q, start, 2 * self.cells.len() + 1, |s| steps.push(s))?;
        Ok(steps)
    }

    /// Every rule violation; empty iff the field is well formed.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let at = |row, col, rule| Violation { row, col, rule };

        for row in 0..self.rows {
            for col in 0..self.cols {
                let cell = self.cell(row, col);
                if let Err(m) = cell.check() {
                    out.push(at(row, col, Rule::InvalidCell(m)));
                }
                for p in Port::ALL {
                    let here = cell.owner(p);
                    match self.neighbour(row, col, p) {
                        Some((r, c)) => {
                            // Each shared edge is judged once, from its W/N side,
                            // unless a flagged terminus explains the dangling end.
                            if matches!(p, Port::W | Port::N) {
                                continue;
                            }
                            let there = self.cell(r, c).owner(p.opposite());
                            match (here, there) {
                                (Some(a), Some(b)) if a != b => out.push(at(row, col, Rule::OwnerMismatch(p))),
                                (Some(_), None) => {
                                    if !self.termini.contains_key(&Terminus { row, col, port: p }) {
                                        out.push(at(row, col, Rule::Continuity(p)));
                                    }
                                }
                                (None, Some(_)) => {
                                    let q = p.opposite();
                                    if !self.termini.contains_key(&Terminus { row: r, col: c, port: q }) {
                                        out.push(at(r, c, Rule::Continuity(q)));
                                    }
                                }
                                _ => {}
                            }
                        }
                        None => {
                            let t = Terminus { row, col, port: p };
                            if here.is_some() && self.is_implicit(t).is_none() && !self.termini.contains_key(&t) {
                                out.push(at(row, col, Rule::UnflaggedTerminus(p)));
                            }
                        }
                    }
                }
            }
        }

        for (t, _) in self.termini() {
            let ok = t.row < self.rows
                && t.col < self.cols
                && self.is_implicit(t).is_none()
                && self.dangles(t.row, t.col, t.port);
            if !ok {
                out.push(at(t.row, t.col, Rule::BadTerminus(t.port)));
            }
        }
        if !out.is_empty() {
            return out;
        }

        self.check_paths(&mut out);
        out
    }

    fn check_paths(&self, out: &mut Vec<Violation>) {
        let mut strands = StrandCounter::new(self);
        for c in &self.cells {
            match c.prim.strand_count() {
                0 => {}
                1 => strands.add(c.h().or(c.v()).unwrap()),
                _ => {
                    strands.add(c.h().unwrap());
                    strands.add(c.v().unwrap());
                }
            }
        }

        let mut ends: BTreeMap<QubitId, (Vec<Terminus>, Vec<Terminus>)> = BTreeMap::new();
        for (q, t) in self.entries() {
            ends.entry(q).or_default().0.push(t);
        }
        for (q, t) in self.exits() {
            ends.entry(q).or_default().1.push(t);
        }
        for q in strands.qubits() {
            ends.entry(q).or_default();
        }

        for (q, (entries, exits)) in ends {
            if entries.len() != 1 || exits.len() != 1 {
                let (row, col) = entries.first().or(exits.first()).map_or((0, 0), |t| (t.row, t.col));
                out.push(Violation {
                    row,
                    col,
                    rule: Rule::TerminusCount { qubit: q, entries: entries.len(), exits: exits.len() },
                });
                continue;
            }
            let owned = strands.get(q);
            let mut visited = 0usize;
            match self.walk(q, entries[0], owned, |_| visited += 1) {
                Ok(end) if end == exits[0] && visited == owned => {}
                Ok(_) | Err(TraceError::Cyclic(_)) => {
                    out.push(Violation { row: entries[0].row, col: entries[0].col, rule: Rule::Disconnected { qubit: q } })
                }
                Err(TraceError::Broken { row, col, .. }) => {
                    out.push(Violation { row, col, rule: Rule::BrokenPath { qubit: q } })
                }
                Err(e) => unreachable!("{e}"),
            }
        }
    }

    /// Parses the text format.
    pub fn parse(text: &str) -> Result<Field, FieldParseError> {
        let mut field: Option<Field> = None;
        let mut seen = BTreeSet::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let err = |msg: String| FieldParseError { line, msg };
            let words: Vec<&str> = content.split_whitespace().collect();
            let num = |s: &str| s.parse::<usize>().map_err(|_| err(format!("expected a number, found `{s}`")));

            match (words[0], field.as_mut()) {
                ("field", None) => {
                    if words.len() != 3 {
                        return Err(err("expected `field <rows> <cols>`".into()));
                    }
                    let f = Field::new(num(words[1])?, num(words[2])?).map_err(|e| err(e.to_string()))?;
                    field = Some(f);
                }
                ("field", Some(_)) => return Err(err("duplicate `field` header".into())),
                (_, None) => return Err(err("expected `field <rows> <cols>` header first".into())),
                ("cell", Some(f)) => {
                    if words.len() != 6 {
                        return Err(err("expected `cell <r> <c> <PRIMITIVE> h=<q|-> v=<q|->`".into()));
                    }
                    let (r, c) = (num(words[1])?, num(words[2])?);
                    if r >= f.rows || c >= f.cols {
                        return Err(err(format!("cell ({r}, {c}) outside {}x{}", f.rows, f.cols)));
                    }
                    let prim = Primitive::from_name(words[3])
                        .ok_or_else(|| err(format!("unknown primitive `{}`", words[3])))?;
                    let h = parse_owner(words[4], "h=").map_err(err)?;
                    let v = parse_owner(words[5], "v=").map_err(err)?;
                    if !seen.insert((r, c)) {
                        return Err(err(format!("cell ({r}, {c}) given twice")));
                    }
                    f.set(r, c, Cell::new(prim, h, v));
                }
                (kind @ ("entry" | "exit"), Some(f)) => {
                    if words.len() != 4 {
                        return Err(err(format!("expected `{kind} <r> <c> <N|E|S|W>`")));
                    }
                    let (row, col) = (num(words[1])?, num(words[2])?);
                    let port = Port::from_name(words[3]).ok_or_else(|| err(format!("unknown port `{}`", words[3])))?;
                    let k = if kind == "entry" { TerminusKind::Entry } else { TerminusKind::Exit };
                    if f.termini.insert(Terminus { row, col, port }, k).is_some() {
                        return Err(err("terminus given twice".into()));
                    }
                }
                (other, Some(_)) => return Err(err(format!("unknown record `{other}`"))),
            }
        }
        field.ok_or(FieldParseError { line: 0, msg: "missing `field` header".into() })
    }

    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

fn parse_owner(word: &str, prefix: &str) -> Result<Option<QubitId>, String> {
    let rest = word.strip_prefix(prefix).ok_or_else(|| format!("expected `{prefix}<qubit|->`, found `{word}`"))?;
    if rest == "-" {
        return Ok(None);
    }
    match rest.parse::<u32>() {
        Ok(q) if q != NONE => Ok(Some(QubitId(q))),
        _ => Err(format!("invalid qubit `{rest}`")),
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "field {} {}", self.rows, self.cols)?;
        let q = |x: Option<QubitId>| x.map_or("-".to_string(), |q| q.to_string());
        for r in 0..self.rows {
            for c in 0..self.cols {
                let cell = self.cell(r, c);
                if cell != Cell::EMPTY {
                    writeln!(f, "cell {r} {c} {} h={} v={}", cell.prim, q(cell.h()), q(cell.v()))?;
                }
            }
        }
        for (t, k) in self.termini() {
            writeln!(f, "{} {} {} {}", k.name(), t.row, t.col, t.port)?;
        }
        Ok(())
    }
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Per-qubit strand counts, dense when ids are small.
enum StrandCounter {
    Dense(Vec<usize>),
    Sparse(HashMap<QubitId, usize>),
}

impl StrandCounter {
    fn new(f: &Field) -> Self {
        let max = f.cells.iter().flat_map(|c| [c.h, c.v]).filter(|&x| x != NONE).max();
        match max {
            Some(m) if (m as usize) <= 2 * f.cells.len() + 16 => StrandCounter::Dense(vec![0; m as usize + 1]),
            Some(_) => StrandCounter::Sparse(HashMap::new()),
            None => StrandCounter::Dense(Vec::new()),
        }
    }

    fn add(&mut self, q: QubitId) {
        match self {
            StrandCounter::Dense(v) => v[q.index()] += 1,
            StrandCounter::Sparse(m) => *m.entry(q).or_default() += 1,
        }
    }

    fn get(&self, q: QubitId) -> usize {
        match self {
            StrandCounter::Dense(v) => v.get(q.index()).copied().unwrap_or(0),
            StrandCounter::Sparse(m) => m.get(&q).copied().unwrap_or(0),
        }
    }

    fn qubits(&self) -> Vec<QubitId> {
        match self {
            StrandCounter::Dense(v) => (0..v.len()).filter(|&i| v[i] > 0).map(QubitId::from).collect(),
            StrandCounter::Sparse(m) => m.keys().copied().collect(),
        }
    }
}
