//! Dense state vectors over at most five qubits, used to check the
//! teleportation and junction identities behind the topological CNOT.
//!
//! Qubit 0 is the most significant bit of a basis index.

use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use thiserror::Error;

pub const MAX_QUBITS: usize = 5;
pub const TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("at most {MAX_QUBITS} qubits are supported, got {0}")]
    TooManyQubits(usize),
    #[error("{got} amplitudes do not describe a state on {n} qubits")]
    BadLength { n: usize, got: usize },
    #[error("state norm is {0}, expected 1")]
    NotNormalized(f64),
    #[error("qubit {qubit} out of range for {n} qubits")]
    QubitOutOfRange { qubit: usize, n: usize },
    #[error("control and target are both qubit {0}")]
    SameQubit(usize),
    #[error("forced outcome has probability {0:e}")]
    ZeroProbability(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Basis {
    X,
    Z,
}

/// Eigenvalue of the measured observable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Outcome {
    Plus,
    Minus,
}

impl Outcome {
    pub const BOTH: [Outcome; 2] = [Outcome::Plus, Outcome::Minus];
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            Outcome::Plus => "+1",
            Outcome::Minus => "-1",
        })
    }
}

/// Amplitudes of the outcome eigenstate in the computational basis.
fn eigenstate(basis: Basis, outcome: Outcome) -> [f64; 2] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    match (basis, outcome) {
        (Basis::Z, Outcome::Plus) => [1.0, 0.0],
        (Basis::Z, Outcome::Minus) => [0.0, 1.0],
        (Basis::X, Outcome::Plus) => [s, s],
        (Basis::X, Outcome::Minus) => [s, -s],
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementRecord {
    pub qubit: usize,
    pub basis: Basis,
    pub outcome: Outcome,
    pub probability: f64,
    pub post_state: StateVector,
}

impl StateVector {
    pub fn new(n: usize, amps: Vec<Complex64>) -> Result<Self, SimError> {
        if n > MAX_QUBITS {
            return Err(SimError::TooManyQubits(n));
        }
        if amps.len() != 1 << n {
            return Err(SimError::BadLength { n, got: amps.len() });
        }
        let s = StateVector { n, amps };
        let norm = s.norm_sqr();
        if (norm - 1.0).abs() > TOLERANCE {
            return Err(SimError::NotNormalized(norm));
        }
        Ok(s)
    }

    /// Scales `amps` to unit norm.
    pub fn normalized(n: usize, amps: Vec<Complex64>) -> Result<Self, SimError> {
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm < TOLERANCE {
            return Err(SimError::NotNormalized(norm));
        }
        Self::new(n, amps.into_iter().map(|a| a / norm).collect())
    }

    pub fn basis(n: usize, index: usize) -> Result<Self, SimError> {
        if n > MAX_QUBITS {
            return Err(SimError::TooManyQubits(n));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        let len = amps.len();
        *amps.get_mut(index).ok_or(SimError::BadLength { n, got: len })? = Complex64::new(1.0, 0.0);
        Ok(StateVector { n, amps })
    }

    /// Random state with independent uniform real and imaginary parts, normalized.
    pub fn random(n: usize, rng: &mut impl Rng) -> Result<Self, SimError> {
        if n > MAX_QUBITS {
            return Err(SimError::TooManyQubits(n));
        }
        let amps = (0..1 << n).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        Self::normalized(n, amps)
    }

    pub fn qubits(&self) -> usize {
        self.n
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `self ⊗ other`, with `self` on the low-numbered qubits.
    pub fn tensor(&self, other: &StateVector) -> Result<StateVector, SimError> {
        let n = self.n + other.n;
        if n > MAX_QUBITS {
            return Err(SimError::TooManyQubits(n));
        }
        let amps = self.amps.iter().flat_map(|&a| other.amps.iter().map(move |&b| a * b)).collect();
        Ok(StateVector { n, amps })
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        assert_eq!(self.n, other.n);
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn fidelity(&self, other: &StateVector) -> f64 {
        self.inner(other).norm_sqr()
    }

    fn bit(&self, q: usize) -> usize {
        1 << (self.n - 1 - q)
    }

    fn check_qubit(&self, q: usize) -> Result<(), SimError> {
        if q >= self.n {
            return Err(SimError::QubitOutOfRange { qubit: q, n: self.n });
        }
        Ok(())
    }

    pub fn apply_cnot(&self, control: usize, target: usize) -> Result<StateVector, SimError> {
        self.check_qubit(control)?;
        self.check_qubit(target)?;
        if control == target {
            return Err(SimError::SameQubit(control));
        }
        let (cb, tb) = (self.bit(control), self.bit(target));
        let mut out = self.clone();
        for i in 0..self.amps.len() {
            if i & cb != 0 && i & tb == 0 {
                out.amps.swap(i, i | tb);
            }
        }
        Ok(out)
    }

    pub fn apply_pauli(&self, q: usize, p: Pauli) -> Result<StateVector, SimError> {
        self.check_qubit(q)?;
        let b = self.bit(q);
        let mut out = self.clone();
        if matches!(p, Pauli::Z | Pauli::XZ) {
            for (i, a) in out.amps.iter_mut().enumerate() {
                if i & b != 0 {
                    *a = -*a;
                }
            }
        }
        if matches!(p, Pauli::X | Pauli::XZ) {
            for i in 0..out.amps.len() {
                if i & b == 0 {
                    out.amps.swap(i, i | b);
                }
            }
        }
        Ok(out)
    }

    /// Overlaps of the outcome eigenstate with qubit `q`, indexed by the
    /// remaining qubits, and the outcome probability.
    fn project(&self, q: usize, basis: Basis, outcome: Outcome) -> (Vec<Complex64>, f64) {
        let e = eigenstate(basis, outcome);
        let b = self.bit(q);
        let mut rest = Vec::with_capacity(self.amps.len() / 2);
        for i in 0..self.amps.len() {
            if i & b == 0 {
                rest.push(self.amps[i] * e[0] + self.amps[i | b] * e[1]);
            }
        }
        let p = rest.iter().map(|a| a.norm_sqr()).sum();
        (rest, p)
    }

    fn probability(&self, q: usize, basis: Basis, outcome: Outcome) -> f64 {
        self.project(q, basis, outcome).1
    }

    /// Projects onto `outcome` and renormalizes; the qubit stays in the register.
    pub fn measure_forced(&self, q: usize, basis: Basis, outcome: Outcome) -> Result<MeasurementRecord, SimError> {
        self.check_qubit(q)?;
        let (rest, p) = self.project(q, basis, outcome);
        if p < TOLERANCE {
            return Err(SimError::ZeroProbability(p));
        }
        let e = eigenstate(basis, outcome);
        let b = self.bit(q);
        let scale = p.sqrt();
        let mut amps = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        let mut k = 0;
        for i in 0..self.amps.len() {
            if i & b == 0 {
                amps[i] = rest[k] * e[0] / scale;
                amps[i | b] = rest[k] * e[1] / scale;
                k += 1;
            }
        }
        Ok(MeasurementRecord {
            qubit: q,
            basis,
            outcome,
            probability: p,
            post_state: StateVector { n: self.n, amps },
        })
    }

    /// Samples an outcome from the Born rule.
    pub fn measure_sampled(&self, q: usize, basis: Basis, rng: &mut impl Rng) -> Result<MeasurementRecord, SimError> {
        self.check_qubit(q)?;
        let p_plus = self.probability(q, basis, Outcome::Plus);
        let outcome = if rng.random::<f64>() < p_plus { Outcome::Plus } else { Outcome::Minus };
        self.measure_forced(q, basis, outcome)
    }

    /// Measures `q` with a forced outcome and drops it from the register.
    pub fn measure_and_discard(&self, q: usize, basis: Basis, outcome: Outcome) -> Result<StateVector, SimError> {
        self.check_qubit(q)?;
        let (rest, p) = self.project(q, basis, outcome);
        if p < TOLERANCE {
            return Err(SimError::ZeroProbability(p));
        }
        let scale = p.sqrt();
        Ok(StateVector { n: self.n - 1, amps: rest.into_iter().map(|a| a / scale).collect() })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Z,
    /// Z followed by X.
    XZ,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Z, Pauli::XZ];
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            Pauli::I => "I",
            Pauli::X => "X",
            Pauli::Z => "Z",
            Pauli::XZ => "XZ",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Teleport {
    /// Upper qubit starts in |0⟩, the lower qubit controls a CNOT onto it and
    /// is then measured in the X basis.
    XMeasured,
    /// Upper qubit starts in |+⟩ and controls a CNOT onto the lower qubit,
    /// which is then measured in the Z basis.
    ZMeasured,
}

/// State of the upper qubit after teleporting `input` from the lower one,
/// before any correction.
pub fn teleport_branch(variant: Teleport, input: &StateVector, outcome: Outcome) -> Result<StateVector, SimError> {
    if input.qubits() != 1 {
        return Err(SimError::BadLength { n: 1, got: input.amps.len() });
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let (upper, ctl, tgt, basis) = match variant {
        Teleport::XMeasured => (vec![1.0, 0.0], 1, 0, Basis::X),
        Teleport::ZMeasured => (vec![s, s], 0, 1, Basis::Z),
    };
    let upper = StateVector::new(1, upper.into_iter().map(|x| Complex64::new(x, 0.0)).collect())?;
    upper.tensor(input)?.apply_cnot(ctl, tgt)?.measure_and_discard(1, basis, outcome)
}

/// Control, ancilla in |0⟩, target: CNOT(control, ancilla), CNOT(ancilla,
/// target), then the ancilla is measured in the X basis. Returns the
/// control/target state before correction.
pub fn junction_branch(input: &StateVector, outcome: Outcome) -> Result<StateVector, SimError> {
    if input.qubits() != 2 {
        return Err(SimError::BadLength { n: 2, got: input.amps.len() });
    }
    let zero = Complex64::new(0.0, 0.0);
    let mut amps = vec![zero; 8];
    // Insert the ancilla as the middle qubit.
    for (i, &a) in input.amps.iter().enumerate() {
        let (c, t) = (i >> 1, i & 1);
        amps[c << 2 | t] = a;
    }
    let s = StateVector::new(3, amps)?;
    s.apply_cnot(0, 1)?.apply_cnot(1, 2)?.measure_and_discard(1, Basis::X, outcome)
}

fn correct(s: &StateVector, ps: &[Pauli]) -> StateVector {
    ps.iter().enumerate().fold(s.clone(), |acc, (q, &p)| acc.apply_pauli(q, p).expect("qubit in range"))
}

/// Fixed probes: computational and X/Y eigenstates plus two generic states.
fn probes(n: usize) -> Vec<StateVector> {
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let single = vec![
        vec![c(1.0, 0.0), c(0.0, 0.0)],
        vec![c(0.0, 0.0), c(1.0, 0.0)],
        vec![c(1.0, 0.0), c(1.0, 0.0)],
        vec![c(1.0, 0.0), c(0.0, 1.0)],
        vec![c(0.6, 0.0), c(0.0, 0.8)],
        vec![c(0.3, -0.2), c(0.5, 0.7)],
    ];
    let single: Vec<StateVector> =
        single.into_iter().map(|a| StateVector::normalized(1, a).expect("probe")).collect();
    if n == 1 {
        return single;
    }
    let mut out = Vec::new();
    for a in &single {
        for b in &single {
            out.push(a.tensor(b).expect("two qubits"));
        }
    }
    // An entangled probe.
    out.push(StateVector::normalized(2, vec![c(0.5, 0.1), c(-0.2, 0.4), c(0.1, -0.6), c(0.3, 0.3)]).unwrap());
    out
}

/// First Pauli string (per surviving qubit) that restores `expect(probe)`
/// from `branch(probe)` on every probe state.
fn derive(
    n: usize,
    branch: impl Fn(&StateVector) -> StateVector,
    expect: impl Fn(&StateVector) -> StateVector,
) -> Option<Vec<Pauli>> {
    let probes = probes(n);
    let candidates: Vec<Vec<Pauli>> = match n {
        1 => Pauli::ALL.iter().map(|&p| vec![p]).collect(),
        _ => Pauli::ALL.iter().flat_map(|&a| Pauli::ALL.iter().map(move |&b| vec![a, b])).collect(),
    };
    candidates.into_iter().find(|ps| {
        probes.iter().all(|s| correct(&branch(s), ps).fidelity(&expect(s)) >= 1.0 - TOLERANCE)
    })
}

/// Correction for each measurement outcome of a teleportation circuit.
pub fn teleport_corrections(variant: Teleport) -> [(Outcome, Pauli); 2] {
    Outcome::BOTH.map(|o| {
        let ps = derive(1, |s| teleport_branch(variant, s, o).unwrap(), |s| s.clone())
            .expect("a Pauli correction exists");
        (o, ps[0])
    })
}

/// Corrections on (control, target) for each ancilla outcome of the junction.
pub fn junction_corrections() -> [(Outcome, [Pauli; 2]); 2] {
    Outcome::BOTH.map(|o| {
        let ps = derive(2, |s| junction_branch(s, o).unwrap(), |s| s.apply_cnot(0, 1).unwrap())
            .expect("a Pauli correction exists");
        (o, [ps[0], ps[1]])
    })
}

/// True iff both outcomes reproduce `input` after the derived correction.
pub fn check_teleport(variant: Teleport, input: &StateVector) -> bool {
    teleport_corrections(variant).iter().all(|&(o, p)| match teleport_branch(variant, input, o) {
        Ok(out) => correct(&out, &[p]).fidelity(input) >= 1.0 - TOLERANCE,
        Err(_) => false,
    })
}

/// True iff both ancilla outcomes give CNOT(input) after the derived correction.
pub fn check_junction_cnot(input: &StateVector) -> bool {
    let Ok(want) = input.apply_cnot(0, 1) else { return false };
    junction_corrections().iter().all(|(o, ps)| match junction_branch(input, *o) {
        Ok(out) => correct(&out, ps).fidelity(&want) >= 1.0 - TOLERANCE,
        Err(_) => false,
    })
}

/// Human-readable table of the derived corrections.
pub fn correction_table() -> String {
    let mut s = String::from("circuit        measured      outcome  correction\n");
    for (name, v, m) in [("teleport (a)", Teleport::XMeasured, "lower X"), ("teleport (b)", Teleport::ZMeasured, "lower Z")] {
        for (o, p) in teleport_corrections(v) {
            s += &format!("{name:<14} {m:<13} {o:<8} {p} on upper\n");
        }
    }
    for (o, [pc, pt]) in junction_corrections() {
        s += &format!("{:<14} {:<13} {o:<8} {pc} on control, {pt} on target\n", "junction CNOT", "ancilla X");
    }
    s
}
