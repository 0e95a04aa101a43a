//! Compiles multi-target CNOT circuits into two-dimensional fields of
//! topological primitives and checks the result.
//!
//! * [`circuit`]: circuits and the netlist format
//! * [`gf2`]: circuits as linear maps over GF(2)
//! * [`field`]: fields, validation, tracing and the field file format
//! * [`extract`]: reading circuits back out of fields
//! * [`unbounded`], [`bounded`]: the two synthesizers
//! * [`junction`]: state-vector checks of the junction identities
//! * [`bench`]: random circuits and the area benchmark
//! * [`geometry`]: defect geometry, resource estimates and rendering

mod canvas;

pub mod bench;
pub mod bounded;
pub mod circuit;
pub mod cli;
pub mod extract;
pub mod field;
pub mod geometry;
pub mod gf2;
pub mod junction;
pub mod unbounded;

pub use bounded::synth_bounded;
pub use circuit::{Circuit, CnotGate, QubitId};
pub use extract::extract;
pub use field::Field;
pub use unbounded::synth_unbounded;
