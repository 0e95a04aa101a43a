//! Random CNOT circuits, worst-case area formulas and the benchmark harness.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::bounded::synth_bounded;
use crate::circuit::{Circuit, CnotGate, QubitId};
use crate::extract::extract_with_width;
use crate::field::Field;
use crate::gf2::equivalent;
use crate::unbounded::synth_unbounded;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BenchParams {
    pub qubits: usize,
    pub gates: usize,
    pub max_targets: usize,
    pub trials: usize,
    pub seed: u64,
    /// Directional weaving in the bounded synthesizer.
    pub heuristic: bool,
}

impl BenchParams {
    pub fn new(qubits: usize, gates: usize, max_targets: usize, trials: usize, seed: u64) -> Self {
        BenchParams { qubits, gates, max_targets, trials, seed, heuristic: true }
    }

    pub fn check(&self) -> Result<(), BenchError> {
        if self.qubits < 2 {
            return Err(BenchError::InvalidParams(format!("need at least 2 qubits, got {}", self.qubits)));
        }
        if self.max_targets < 1 || self.max_targets > self.qubits - 1 {
            return Err(BenchError::InvalidParams(format!(
                "max targets must be in 1..={}, got {}",
                self.qubits - 1,
                self.max_targets
            )));
        }
        if self.trials < 1 {
            return Err(BenchError::InvalidParams("need at least one trial".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BenchError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("{algo} synthesis failed verification on trial {trial} (seed {seed}): {msg}")]
    Verification { algo: &'static str, trial: usize, seed: u64, msg: String },
}

/// Circuit number `trial` of the ensemble described by `p`. Each trial draws
/// from its own ChaCha stream, so circuits do not depend on evaluation order.
pub fn random_circuit(p: &BenchParams, trial: usize) -> Result<Circuit, BenchError> {
    p.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    rng.set_stream(trial as u64);
    let n = p.qubits;
    let mut gates = Vec::with_capacity(p.gates);
    for _ in 0..p.gates {
        let control = rng.random_range(0..n);
        let k = rng.random_range(1..=p.max_targets);
        let mut targets: Vec<usize> =
            sample(&mut rng, n - 1, k).into_iter().map(|i| if i >= control { i + 1 } else { i }).collect();
        targets.sort_unstable();
        let gate = CnotGate::new(QubitId::from(control), targets.into_iter().map(QubitId::from).collect())
            .expect("sampled targets are distinct and exclude the control");
        gates.push(gate);
    }
    Ok(Circuit::new(n, gates).expect("sampled qubits are in range"))
}

/// `(A1w, A2w)`: `|G|^2 (|Q|-1) |Q|` and `3 (|Q|+2) |G|`.
pub fn worst_case_areas(qubits: u64, gates: u64) -> (u64, u64) {
    (gates * gates * qubits.saturating_sub(1) * qubits, 3 * (qubits + 2) * gates)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct AlgoStats {
    pub mean_rows: f64,
    pub mean_cols: f64,
    pub mean_area: f64,
    pub max_area: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchReport {
    pub params: BenchParams,
    pub unbounded: AlgoStats,
    pub bounded: AlgoStats,
    /// Mean unbounded area over mean bounded area.
    pub red: f64,
    pub a1w: u64,
    pub a2w: u64,
    /// Trials whose unbounded area exceeded A1w.
    pub a1w_violations: usize,
    /// Trials whose bounded area exceeded A2w plus one column of slack.
    pub a2w_violations: usize,
    /// Trials whose bounded field did not have exactly |Q|+2 rows.
    pub bounded_row_violations: usize,
}

#[derive(Clone, Copy, Debug, Default)]
struct Sums {
    rows: u64,
    cols: u64,
    area: u128,
    max_area: u64,
}

impl Sums {
    fn add(&mut self, f: &Field) {
        self.rows += f.rows() as u64;
        self.cols += f.cols() as u64;
        self.area += f.area() as u128;
        self.max_area = self.max_area.max(f.area());
    }

    fn merge(mut self, o: Sums) -> Sums {
        self.rows += o.rows;
        self.cols += o.cols;
        self.area += o.area;
        self.max_area = self.max_area.max(o.max_area);
        self
    }

    fn stats(&self, trials: usize) -> AlgoStats {
        let t = trials as f64;
        AlgoStats {
            mean_rows: self.rows as f64 / t,
            mean_cols: self.cols as f64 / t,
            mean_area: self.area as f64 / t,
            max_area: self.max_area,
        }
    }
}

#[derive(Clone, Copy, Debug, Default)]
struct Tally {
    unbounded: Sums,
    bounded: Sums,
    a1w_violations: usize,
    a2w_violations: usize,
    row_violations: usize,
}

impl Tally {
    fn merge(self, o: Tally) -> Tally {
        Tally {
            unbounded: self.unbounded.merge(o.unbounded),
            bounded: self.bounded.merge(o.bounded),
            a1w_violations: self.a1w_violations + o.a1w_violations,
            a2w_violations: self.a2w_violations + o.a2w_violations,
            row_violations: self.row_violations + o.row_violations,
        }
    }
}

/// Validates `f` and checks that it extracts to a circuit equivalent to `c`.
pub fn verify_field(c: &Circuit, f: &Field) -> Result<(), String> {
    let v = f.validate();
    if let Some(first) = v.first() {
        return Err(format!("{} violations, first: {first}", v.len()));
    }
    let back = extract_with_width(f, c.qubit_count()).map_err(|e| e.to_string())?;
    match equivalent(&back, c) {
        Ok(true) => Ok(()),
        Ok(false) => Err("extracted circuit is not equivalent".into()),
        Err(e) => Err(e.to_string()),
    }
}

fn run_trial(p: &BenchParams, trial: usize) -> Result<Tally, BenchError> {
    let c = random_circuit(p, trial)?;
    let (a1w, a2w) = worst_case_areas(p.qubits as u64, p.gates as u64);
    let fail = |algo, msg| BenchError::Verification { algo, trial, seed: p.seed, msg };

    let mut t = Tally::default();
    let u = synth_unbounded(&c);
    verify_field(&c, &u).map_err(|m| fail("unbounded", m))?;
    t.unbounded.add(&u);
    t.a1w_violations = usize::from(u.area() > a1w);
    drop(u);

    let b = synth_bounded(&c, p.heuristic);
    verify_field(&c, &b).map_err(|m| fail("bounded", m))?;
    t.bounded.add(&b);
    t.a2w_violations = usize::from(b.area() > a2w + p.qubits as u64 + 2);
    t.row_violations = usize::from(b.rows() != p.qubits + 2);
    Ok(t)
}

/// Runs every trial (in parallel on the current rayon pool) and aggregates
/// exact integer sums, so the report does not depend on scheduling. The
/// first failing trial by index aborts the run.
pub fn run_bench(p: &BenchParams) -> Result<BenchReport, BenchError> {
    p.check()?;
    let results: Vec<Result<Tally, BenchError>> = (0..p.trials).into_par_iter().map(|i| run_trial(p, i)).collect();
    let mut total = Tally::default();
    for r in results {
        total = total.merge(r?);
    }
    let unbounded = total.unbounded.stats(p.trials);
    let bounded = total.bounded.stats(p.trials);
    let (a1w, a2w) = worst_case_areas(p.qubits as u64, p.gates as u64);
    Ok(BenchReport {
        params: *p,
        unbounded,
        bounded,
        red: unbounded.mean_area / bounded.mean_area,
        a1w,
        a2w,
        a1w_violations: total.a1w_violations,
        a2w_violations: total.a2w_violations,
        bounded_row_violations: total.row_violations,
    })
}

/// `2.7e+02`
pub fn sci(x: f64) -> String {
    let s = format!("{x:.1e}");
    match s.split_once('e') {
        Some((m, e)) => {
            let (sign, digits) = e.strip_prefix('-').map_or(("+", e), |d| ("-", d));
            format!("{m}e{sign}{digits:0>2}")
        }
        None => s,
    }
}

/// Aligned plain-text table, one row per report.
pub fn render_table(reports: &[BenchReport]) -> String {
    let mut s = String::new();
    s += &format!(
        "{:>5} {:>6} {:>4} | {:>9} {:>9} {:>8} | {:>5} {:>8} {:>8} | {:>8}\n",
        "|Q|", "|G|", "MT", "U.Rows", "U.Cols", "U.Area", "B.Rows", "B.Cols", "B.Area", "Red"
    );
    for r in reports {
        s += &format!(
            "{:>5} {:>6} {:>4} | {:>9.1} {:>9.1} {:>8} | {:>6.0} {:>8.1} {:>8} | {:>8}\n",
            r.params.qubits,
            r.params.gates,
            r.params.max_targets,
            r.unbounded.mean_rows,
            r.unbounded.mean_cols,
            sci(r.unbounded.mean_area),
            r.bounded.mean_rows,
            r.bounded.mean_cols,
            sci(r.bounded.mean_area),
            format!("{:.3}", r.red),
        );
    }
    s
}

/// One JSON object per line.
pub fn render_json(reports: &[BenchReport]) -> String {
    reports.iter().map(|r| serde_json::to_string(r).expect("report serializes") + "\n").collect()
}
