//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Runs without the libtest harness so the lines always show up.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use topoloom::bench::{random_circuit, render_json, render_table, run_bench, BenchParams};
use topoloom::extract::extract_with_width;
use topoloom::field::Field;
use topoloom::geometry::{estimate_resources, QUBITS_PER_UNIT_CELL};
use topoloom::gf2::{equivalent, simulate_basis};
use topoloom::junction::{
    check_junction_cnot, check_teleport, correction_table, junction_branch, junction_corrections,
    teleport_branch, teleport_corrections, Outcome, Pauli, StateVector, Teleport, TOLERANCE,
};
use topoloom::{synth_bounded, synth_unbounded, Circuit};

const SAMPLE: &str = include_str!("fixtures/sample.cnot");
const COMPACT: &str = include_str!("fixtures/compact.fld");
const PADDED: &str = include_str!("fixtures/padded.fld");

/// Bit-level reference simulator, independent of the transfer matrices.
fn naive(c: &Circuit, input: &[bool]) -> Vec<bool> {
    let mut s = input.to_vec();
    for g in c.gates() {
        let ctl = s[g.control().index()];
        for t in g.targets() {
            s[t.index()] ^= ctl;
        }
    }
    s
}

fn bits(x: usize, n: usize) -> Vec<bool> {
    (0..n).map(|i| x >> i & 1 == 1).collect()
}

fn assert_implements(c: &Circuit, f: &Field, what: &str) {
    let v = f.validate();
    assert!(v.is_empty(), "{what}: {} violations, first {}", v.len(), v[0]);
    let back = extract_with_width(f, c.qubit_count()).unwrap_or_else(|e| panic!("{what}: {e}"));
    assert!(equivalent(&back, c).unwrap(), "{what}: not equivalent");
    let n = c.qubit_count();
    for x in 0..1usize << n {
        let input = bits(x, n);
        assert_eq!(simulate_basis(&back, &input).unwrap(), naive(c, &input), "{what}: input {x:b}");
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<String, String> {
    if elapsed <= limit {
        Ok(format!("{:.2}s", elapsed.as_secs_f64()))
    } else {
        Err(format!("took {:.2}s, limit {:.0}s", elapsed.as_secs_f64(), limit.as_secs_f64()))
    }
}

fn small_fields() -> Result<String, String> {
    let start = Instant::now();
    let sample = Circuit::parse(SAMPLE).unwrap();
    let compact = Field::parse(COMPACT).unwrap();
    assert_eq!(compact.area(), 9);
    assert_implements(&sample, &compact, "3x3 field");
    let padded = Field::parse(PADDED).unwrap();
    assert_eq!((padded.rows(), padded.cols()), (6, 8));
    assert_eq!(padded.area(), 48);
    assert_implements(&sample, &padded, "6x8 field");
    within(start.elapsed(), Duration::from_secs(1))
}

struct Trial {
    circuit: Circuit,
    unbounded: Field,
    bounded: Field,
}

fn soundness_trials() -> Vec<Trial> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    (0..500)
        .map(|i| {
            let q = rng.random_range(3..=8);
            let g = rng.random_range(1..=40);
            let mt = rng.random_range(1..q);
            let circuit = random_circuit(&BenchParams::new(q, g, mt, 1, i), 0).unwrap();
            let unbounded = synth_unbounded(&circuit);
            let bounded = synth_bounded(&circuit, true);
            Trial { circuit, unbounded, bounded }
        })
        .collect()
}

fn soundness(trials: &[Trial], start: Instant) -> Result<String, String> {
    for (i, t) in trials.iter().enumerate() {
        assert_implements(&t.circuit, &t.unbounded, &format!("trial {i} unbounded"));
        assert_implements(&t.circuit, &t.bounded, &format!("trial {i} bounded"));
    }
    within(start.elapsed(), Duration::from_secs(30)).map(|s| format!("500 circuits, {s}"))
}

fn area_bounds(trials: &[Trial]) -> Result<String, String> {
    let mut bad = Vec::new();
    for (i, t) in trials.iter().enumerate() {
        let q = t.circuit.qubit_count() as u64;
        let g = t.circuit.gates().len() as u64;
        if t.bounded.rows() as u64 != q + 2 {
            bad.push(format!("trial {i}: bounded rows {}", t.bounded.rows()));
        }
        if t.bounded.area() > 3 * (q + 2) * g + (q + 2) {
            bad.push(format!("trial {i}: bounded area {}", t.bounded.area()));
        }
        if t.unbounded.area() > g * g * (q - 1) * q {
            bad.push(format!("trial {i}: unbounded area {} (|Q|={q} |G|={g})", t.unbounded.area()));
        }
    }
    if bad.is_empty() {
        Ok("0 violations".into())
    } else {
        Err(format!("{} violations: {}", bad.len(), bad.join("; ")))
    }
}

/// Exact CNOT with qubit 0 (the most significant bit) as control.
fn reference_cnot(s: &StateVector) -> StateVector {
    let a = s.amps();
    StateVector::new(2, vec![a[0], a[1], a[3], a[2]]).unwrap()
}

fn reference_z_on_control(s: &StateVector) -> StateVector {
    let a = s.amps();
    StateVector::new(2, vec![a[0], a[1], -a[2], -a[3]]).unwrap()
}

fn junctions() -> Result<String, String> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut one: Vec<StateVector> = (0..2).map(|i| StateVector::basis(1, i).unwrap()).collect();
    let mut two: Vec<StateVector> = (0..4).map(|i| StateVector::basis(2, i).unwrap()).collect();
    for _ in 0..100 {
        one.push(StateVector::random(1, &mut rng).unwrap());
        two.push(StateVector::random(2, &mut rng).unwrap());
    }

    // Hand-derived corrections.
    assert_eq!(teleport_corrections(Teleport::XMeasured), [(Outcome::Plus, Pauli::I), (Outcome::Minus, Pauli::Z)]);
    assert_eq!(teleport_corrections(Teleport::ZMeasured), [(Outcome::Plus, Pauli::I), (Outcome::Minus, Pauli::X)]);
    assert_eq!(
        junction_corrections(),
        [(Outcome::Plus, [Pauli::I, Pauli::I]), (Outcome::Minus, [Pauli::Z, Pauli::I])]
    );

    for s in &one {
        for v in [Teleport::XMeasured, Teleport::ZMeasured] {
            assert!(check_teleport(v, s), "teleport {v:?} failed on {s:?}");
            for o in Outcome::BOTH {
                let out = teleport_branch(v, s, o).unwrap();
                assert!((out.norm_sqr() - 1.0).abs() < TOLERANCE);
            }
        }
    }
    for s in &two {
        assert!(check_junction_cnot(s), "junction failed on {s:?}");
        let want = reference_cnot(s);
        let plus = junction_branch(s, Outcome::Plus).unwrap();
        assert!((plus.fidelity(&want) - 1.0).abs() <= TOLERANCE);
        let minus = reference_z_on_control(&junction_branch(s, Outcome::Minus).unwrap());
        assert!((minus.fidelity(&want) - 1.0).abs() <= TOLERANCE);
    }
    let zero = Complex64::new(0.0, 0.0);
    assert!(StateVector::new(2, vec![zero; 4]).is_err());

    let table = correction_table();
    for line in table.lines() {
        println!("    {line}");
    }
    within(start.elapsed(), Duration::from_secs(1)).map(|s| format!("{} + {} states, {s}", one.len(), two.len()))
}

/// Reference values for |Q| = 10: (|G|, MT, bounded area, Red).
const REFERENCE: [(usize, usize, f64, f64); 9] = [
    (10, 2, 1.9e2, 1.42),
    (10, 5, 2.1e2, 2.95),
    (10, 9, 2.2e2, 7.73),
    (100, 2, 1.9e3, 18.9),
    (100, 5, 2.1e3, 42.9),
    (100, 9, 2.2e3, 90.9),
    (1000, 2, 1.9e4, 200.0),
    (1000, 5, 2.1e4, 443.0),
    (1000, 9, 2.1e4, 952.0),
];

fn benchmark_table() -> Result<String, String> {
    let start = Instant::now();
    let mut reports = Vec::new();
    let mut problems = Vec::new();
    for &(g, mt, area, red) in &REFERENCE {
        let r = run_bench(&BenchParams::new(10, g, mt, 100, 1)).map_err(|e| e.to_string())?;
        let a = r.bounded.mean_area / area;
        if !(0.5..=2.0).contains(&a) {
            problems.push(format!("|G|={g} MT={mt}: bounded area {:.0} vs {area:.0}", r.bounded.mean_area));
        }
        let q = r.red / red;
        if !(1.0 / 3.0..=3.0).contains(&q) {
            problems.push(format!("|G|={g} MT={mt}: Red {:.2} vs {red}", r.red));
        }
        reports.push(r);
    }
    for mt in [2, 5, 9] {
        let reds: Vec<f64> = reports.iter().filter(|r| r.params.max_targets == mt).map(|r| r.red).collect();
        if !reds.windows(2).all(|w| w[0] < w[1]) {
            problems.push(format!("MT={mt}: Red not increasing in |G|: {reds:?}"));
        }
    }
    for line in render_table(&reports).lines() {
        println!("    {line}");
    }
    if !problems.is_empty() {
        return Err(problems.join("; "));
    }
    within(start.elapsed(), Duration::from_secs(300))
}

fn resource_linearity() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(18);
    let (pitch, depth) = (4, 3);
    let per_area = QUBITS_PER_UNIT_CELL * pitch * pitch * pitch * depth;
    for i in 0..20 {
        let q = rng.random_range(2..=12);
        let p = BenchParams::new(q, rng.random_range(1..=30), rng.random_range(1..q), 1, i);
        let c = random_circuit(&p, 0).unwrap();
        let f = if i % 2 == 0 { synth_bounded(&c, true) } else { synth_unbounded(&c) };
        let r = estimate_resources(&f, pitch, depth);
        assert_eq!(r.physical_qubits, QUBITS_PER_UNIT_CELL * r.unit_cells);
        assert_eq!(r.physical_qubits, per_area * f.area());
    }
    Ok(format!("20 fields, {per_area} qubits per cell"))
}

fn determinism() -> Result<String, String> {
    let params = [BenchParams::new(10, 100, 5, 40, 3), BenchParams::new(6, 20, 3, 60, 99)];
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let reports: Vec<_> = params.iter().map(|p| run_bench(p).unwrap()).collect();
            (render_table(&reports), render_json(&reports))
        })
    };
    let first = run(1);
    for threads in [1, 4] {
        let again = run(threads);
        assert_eq!(first.0, again.0, "table differs with {threads} threads");
        assert_eq!(first.1, again.1, "json differs with {threads} threads");
    }
    Ok("identical on 1 and 4 threads".into())
}

fn report(n: usize, name: &str, f: impl FnOnce() -> Result<String, String>) -> bool {
    let outcome = match catch_unwind(AssertUnwindSafe(f)) {
        Ok(r) => r,
        Err(e) => Err(e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panic".into())),
    };
    match outcome {
        Ok(detail) => {
            println!("criterion {n} ({name}): PASS [{detail}]");
            true
        }
        Err(why) => {
            println!("criterion {n} ({name}): FAIL [{why}]");
            false
        }
    }
}

fn main() {
    let mut ok = true;
    ok &= report(1, "fixture fields", small_fields);
    let start = Instant::now();
    let trials = soundness_trials();
    ok &= report(2, "end-to-end soundness", || soundness(&trials, start));
    ok &= report(3, "area bounds", || area_bounds(&trials));
    drop(trials);
    ok &= report(4, "junction identities", junctions);
    ok &= report(5, "benchmark table", benchmark_table);
    ok &= report(6, "resource linearity", resource_linearity);
    ok &= report(7, "determinism", determinism);
    if !ok {
        std::process::exit(1);
    }
}
