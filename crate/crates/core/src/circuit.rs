//! Multi-target CNOT circuits and the line-oriented netlist format.
//!
//! ```text
//! # comment
//! qubits 4
//! cnot 3: 0 1
//! cnot 0: 3
//! ```

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

/// Index of a qubit in the circuit's numbered qubit set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QubitId(pub u32);

impl QubitId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for QubitId {
    fn from(i: usize) -> Self {
        QubitId(i as u32)
    }
}

impl fmt::Display for QubitId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CircuitError {
    #[error("gate has no targets")]
    EmptyTargets,
    #[error("control {0} is also a target")]
    ControlIsTarget(QubitId),
    #[error("duplicate target {0}")]
    DuplicateTarget(QubitId),
    #[error("qubit {qubit} out of range for a {count}-qubit circuit")]
    QubitOutOfRange { qubit: QubitId, count: usize },
    #[error("a circuit needs at least one qubit")]
    NoQubits,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: {source}")]
    Semantic {
        line: usize,
        #[source]
        source: CircuitError,
    },
    #[error("missing `qubits <N>` header")]
    MissingHeader,
}

/// A CNOT with one control and a non-empty set of targets.
///
/// Targets keep the order they were given in, but two gates compare equal
/// only if their target lists are identical; use [`CnotGate::target_set`]
/// for order-insensitive comparison.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CnotGate {
    control: QubitId,
    targets: Vec<QubitId>,
}

impl CnotGate {
    pub fn new(control: QubitId, targets: Vec<QubitId>) -> Result<Self, CircuitError> {
        if targets.is_empty() {
            return Err(CircuitError::EmptyTargets);
        }
        let mut seen = BTreeSet::new();
        for &t in &targets {
            if t == control {
                return Err(CircuitError::ControlIsTarget(t));
            }
            if !seen.insert(t) {
                return Err(CircuitError::DuplicateTarget(t));
            }
        }
        Ok(CnotGate { control, targets })
    }

    pub fn control(&self) -> QubitId {
        self.control
    }

    pub fn targets(&self) -> &[QubitId] {
        &self.targets
    }

    pub fn target_set(&self) -> BTreeSet<QubitId> {
        self.targets.iter().copied().collect()
    }

    fn max_qubit(&self) -> QubitId {
        self.targets.iter().copied().fold(self.control, QubitId::max)
    }
}

/// An ordered list of multi-target CNOTs over `qubit_count` qubits, applied
/// left to right.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Circuit {
    qubit_count: usize,
    gates: Vec<CnotGate>,
}

impl Circuit {
    pub fn new(qubit_count: usize, gates: Vec<CnotGate>) -> Result<Self, CircuitError> {
        if qubit_count == 0 {
            return Err(CircuitError::NoQubits);
        }
        for g in &gates {
            let q = g.max_qubit();
            if q.index() >= qubit_count {
                return Err(CircuitError::QubitOutOfRange { qubit: q, count: qubit_count });
            }
        }
        Ok(Circuit { qubit_count, gates })
    }

    pub fn empty(qubit_count: usize) -> Result<Self, CircuitError> {
        Self::new(qubit_count, Vec::new())
    }

    pub fn qubit_count(&self) -> usize {
        self.qubit_count
    }

    pub fn gates(&self) -> &[CnotGate] {
        &self.gates
    }

    pub fn push(&mut self, gate: CnotGate) -> Result<(), CircuitError> {
        let q = gate.max_qubit();
        if q.index() >= self.qubit_count {
            return Err(CircuitError::QubitOutOfRange { qubit: q, count: self.qubit_count });
        }
        self.gates.push(gate);
        Ok(())
    }

    /// `self` followed by `other`. Both must have the same qubit count.
    pub fn concat(&self, other: &Circuit) -> Circuit {
        assert_eq!(self.qubit_count, other.qubit_count);
        let mut gates = self.gates.clone();
        gates.extend(other.gates.iter().cloned());
        Circuit { qubit_count: self.qubit_count, gates }
    }

    /// Qubits referenced by at least one gate.
    pub fn used_qubits(&self) -> BTreeSet<QubitId> {
        let mut used = BTreeSet::new();
        for g in &self.gates {
            used.insert(g.control);
            used.extend(g.targets.iter().copied());
        }
        used
    }

    /// Parses the netlist format.
    pub fn parse(text: &str) -> Result<Circuit, ParseError> {
        let mut qubit_count: Option<usize> = None;
        let mut gates = Vec::new();

        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let syntax = |msg: &str| ParseError::Syntax { line: line_no, msg: msg.to_string() };
            let (keyword, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));

            match (keyword, qubit_count) {
                ("qubits", None) => {
                    let n: usize = rest
                        .trim()
                        .parse()
                        .map_err(|_| syntax("expected `qubits <N>` with a non-negative integer"))?;
                    if n == 0 {
                        return Err(ParseError::Semantic { line: line_no, source: CircuitError::NoQubits });
                    }
                    qubit_count = Some(n);
                }
                ("qubits", Some(_)) => return Err(syntax("duplicate `qubits` header")),
                (_, None) => return Err(syntax("expected `qubits <N>` before any gate")),
                ("cnot", Some(n)) => {
                    let (ctl, tgts) =
                        rest.split_once(':').ok_or_else(|| syntax("expected `cnot <control>: <targets>`"))?;
                    let control = parse_qubit(ctl.trim()).ok_or_else(|| syntax("invalid control index"))?;
                    let targets = tgts
                        .split_whitespace()
                        .map(|t| parse_qubit(t).ok_or_else(|| syntax(&format!("invalid target index `{t}`"))))
                        .collect::<Result<Vec<_>, _>>()?;
                    let semantic = |source| ParseError::Semantic { line: line_no, source };
                    let gate = CnotGate::new(control, targets).map_err(semantic)?;
                    let q = gate.max_qubit();
                    if q.index() >= n {
                        return Err(semantic(CircuitError::QubitOutOfRange { qubit: q, count: n }));
                    }
                    gates.push(gate);
                }
                (other, Some(_)) => return Err(syntax(&format!("unknown directive `{other}`"))),
            }
        }

        let qubit_count = qubit_count.ok_or(ParseError::MissingHeader)?;
        Ok(Circuit { qubit_count, gates })
    }

    /// Canonical netlist text; `Circuit::parse` inverts it exactly.
    pub fn to_netlist(&self) -> String {
        self.to_string()
    }
}

fn parse_qubit(s: &str) -> Option<QubitId> {
    s.parse::<u32>().ok().map(QubitId)
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "qubits {}", self.qubit_count)?;
        for g in &self.gates {
            write!(f, "cnot {}:", g.control)?;
            for t in &g.targets {
                write!(f, " {t}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(i: u32) -> QubitId {
        QubitId(i)
    }

    #[test]
    fn parses_sample_netlist() {
        let c = Circuit::parse("qubits 4\ncnot 3: 0 1\ncnot 0: 3\ncnot 2: 1\n").unwrap();
        assert_eq!(c.qubit_count(), 4);
        let gates: Vec<_> = c.gates().iter().map(|g| (g.control(), g.targets().to_vec())).collect();
        assert_eq!(
            gates,
            vec![(q(3), vec![q(0), q(1)]), (q(0), vec![q(3)]), (q(2), vec![q(1)])]
        );
    }

    #[test]
    fn empty_circuit() {
        let c = Circuit::parse("qubits 1\n").unwrap();
        assert_eq!(c.qubit_count(), 1);
        assert!(c.gates().is_empty());
    }

    #[test]
    fn comments_and_blank_lines() {
        let c = Circuit::parse("# header\n\nqubits 3 # three\n  cnot 0 : 1 2  \n").unwrap();
        assert_eq!(c.gates().len(), 1);
        assert_eq!(c.gates()[0].targets(), &[q(1), q(2)]);
    }

    #[test]
    fn rejects_control_as_target() {
        let err = Circuit::parse("qubits 2\ncnot 0: 0\n").unwrap_err();
        assert_eq!(err, ParseError::Semantic { line: 2, source: CircuitError::ControlIsTarget(q(0)) });
    }

    #[test]
    fn rejects_bad_inputs_with_line_numbers() {
        let cases = [
            ("qubits 2\ncnot 0: 1 1\n", 2),
            ("qubits 2\ncnot 0: 2\n", 2),
            ("qubits 2\n\ncnot 0:\n", 3),
            ("cnot 0: 1\n", 1),
            ("qubits 2\nqubits 3\n", 2),
            ("qubits x\n", 1),
            ("qubits 2\ntoffoli 0: 1\n", 2),
            ("qubits 2\ncnot 0 1\n", 2),
            ("qubits 2\ncnot a: 1\n", 2),
            ("qubits 0\n", 1),
        ];
        for (text, line) in cases {
            match Circuit::parse(text) {
                Err(ParseError::Syntax { line: l, .. }) | Err(ParseError::Semantic { line: l, .. }) => {
                    assert_eq!(l, line, "{text:?}")
                }
                other => panic!("{text:?} gave {other:?}"),
            }
        }
        assert_eq!(Circuit::parse("# nothing\n"), Err(ParseError::MissingHeader));
    }

    #[test]
    fn canonical_serialization() {
        let c = Circuit::new(2, vec![CnotGate::new(q(0), vec![q(1)]).unwrap()]).unwrap();
        assert_eq!(c.to_netlist(), "qubits 2\ncnot 0: 1\n");
        assert_eq!(Circuit::empty(3).unwrap().to_netlist(), "qubits 3\n");
    }

    #[test]
    fn sample_round_trip() {
        let text = "qubits 4\ncnot 3: 0 1\ncnot 0: 3\ncnot 2: 1\n";
        let c = Circuit::parse(text).unwrap();
        assert_eq!(c.to_netlist(), text);
        assert_eq!(Circuit::parse(&c.to_netlist()).unwrap(), c);
    }

    fn arb_circuit() -> impl Strategy<Value = Circuit> {
        (2usize..12).prop_flat_map(|n| {
            let gate = (0..n, proptest::sample::subsequence((0..n).collect::<Vec<_>>(), 1..n))
                .prop_filter_map("control among targets", move |(c, ts)| {
                    let ts: Vec<_> = ts.into_iter().filter(|&t| t != c).map(QubitId::from).collect();
                    CnotGate::new(QubitId::from(c), ts).ok()
                });
            proptest::collection::vec(gate, 0..20).prop_map(move |gates| Circuit::new(n, gates).unwrap())
        })
    }

    proptest! {
        #[test]
        fn parse_inverts_serialize(c in arb_circuit()) {
            prop_assert_eq!(Circuit::parse(&c.to_netlist()).unwrap(), c);
        }

        #[test]
        fn parser_never_panics(s in "[a-z0-9:# \n]{0,60}") {
            let _ = Circuit::parse(&s);
        }
    }
}
