//! CNOT circuits as linear maps over GF(2).
//!
//! Convention: row `i` of a [`TransferMatrix`] describes output bit `i`,
//! i.e. `out[i] = XOR_j M[i][j] & in[j]`. Applying circuit `b` after `a`
//! therefore gives `M_b * M_a`.

use std::fmt;

use thiserror::Error;

use crate::circuit::Circuit;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum Gf2Error {
    #[error("input has {got} bits but the circuit has {expected} qubits")]
    LengthMismatch { expected: usize, got: usize },
    #[error("circuits act on {0} and {1} qubits")]
    QubitCountMismatch(usize, usize),
    #[error("matrix dimensions {0} and {1} differ")]
    DimensionMismatch(usize, usize),
}

/// Square binary matrix with bit-packed rows.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TransferMatrix {
    n: usize,
    words: usize,
    bits: Vec<u64>,
}

impl TransferMatrix {
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    fn zero(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        TransferMatrix { n, words, bits: vec![0; n * words] }
    }

    pub fn from_rows(rows: &[Vec<u8>]) -> Self {
        let n = rows.len();
        let mut m = Self::zero(n);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), n, "matrix must be square");
            for (j, &b) in row.iter().enumerate() {
                m.set(i, j, b & 1 == 1);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    fn set(&mut self, i: usize, j: usize, v: bool) {
        let w = &mut self.bits[i * self.words + j / 64];
        let mask = 1u64 << (j % 64);
        if v {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    fn row(&self, i: usize) -> &[u64] {
        &self.bits[i * self.words..(i + 1) * self.words]
    }

    /// `row[dst] ^= row[src]`
    fn xor_row_into(&mut self, src: usize, dst: usize) {
        debug_assert_ne!(src, dst);
        for w in 0..self.words {
            let s = self.bits[src * self.words + w];
            self.bits[dst * self.words + w] ^= s;
        }
    }

    pub fn to_rows(&self) -> Vec<Vec<u8>> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.get(i, j) as u8).collect()).collect()
    }

    /// Matrix product `self * rhs` over GF(2).
    pub fn mul(&self, rhs: &TransferMatrix) -> Result<TransferMatrix, Gf2Error> {
        if self.n != rhs.n {
            return Err(Gf2Error::DimensionMismatch(self.n, rhs.n));
        }
        let mut out = Self::zero(self.n);
        for i in 0..self.n {
            for k in 0..self.n {
                if self.get(i, k) {
                    for w in 0..self.words {
                        out.bits[i * self.words + w] ^= rhs.bits[k * self.words + w];
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, input: &[bool]) -> Result<Vec<bool>, Gf2Error> {
        if input.len() != self.n {
            return Err(Gf2Error::LengthMismatch { expected: self.n, got: input.len() });
        }
        Ok((0..self.n)
            .map(|i| (0..self.n).filter(|&j| self.get(i, j) && input[j]).count() % 2 == 1)
            .collect())
    }

    /// Rank by Gaussian elimination.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let mut rank = 0;
        for col in 0..self.n {
            let Some(p) = (rank..self.n).find(|&r| m.get(r, col)) else {
                continue;
            };
            if p != rank {
                for w in 0..m.words {
                    m.bits.swap(p * m.words + w, rank * m.words + w);
                }
            }
            for r in 0..self.n {
                if r != rank && m.get(r, col) {
                    m.xor_row_into(rank, r);
                }
            }
            rank += 1;
        }
        rank
    }

    pub fn is_invertible(&self) -> bool {
        self.rank() == self.n
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.n)
    }
}

impl fmt::Debug for TransferMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "TransferMatrix({})", self.n)?;
        for i in 0..self.n {
            let row: String = (0..self.n).map(|j| if self.get(i, j) { '1' } else { '0' }).collect();
            writeln!(f, "  {row}")?;
        }
        Ok(())
    }
}

/// Composes the elementary matrices of `c` in gate order.
pub fn transfer_matrix(c: &Circuit) -> TransferMatrix {
    let mut m = TransferMatrix::identity(c.qubit_count());
    for g in c.gates() {
        let ctl = g.control().index();
        for t in g.targets() {
            m.xor_row_into(ctl, t.index());
        }
    }
    debug_assert!(m.row(0).len() == m.words);
    m
}

/// Pushes one computational basis state through the circuit gate by gate.
pub fn simulate_basis(c: &Circuit, input: &[bool]) -> Result<Vec<bool>, Gf2Error> {
    if input.len() != c.qubit_count() {
        return Err(Gf2Error::LengthMismatch { expected: c.qubit_count(), got: input.len() });
    }
    let mut state = input.to_vec();
    for g in c.gates() {
        if state[g.control().index()] {
            for t in g.targets() {
                state[t.index()] ^= true;
            }
        }
    }
    Ok(state)
}

pub fn equivalent(a: &Circuit, b: &Circuit) -> Result<bool, Gf2Error> {
    if a.qubit_count() != b.qubit_count() {
        return Err(Gf2Error::QubitCountMismatch(a.qubit_count(), b.qubit_count()));
    }
    Ok(transfer_matrix(a) == transfer_matrix(b))
}

/// Bitstring helpers, qubit 0 first.
pub fn bits_from_str(s: &str) -> Vec<bool> {
    s.chars().map(|c| c == '1').collect()
}

pub fn bits_to_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}
