//! Small-qubit circuit model over {Hadamard, Toffoli, CNOT} and an exact
//! statevector simulator. Qubit 0 is the most significant bit of a basis
//! index, so the "first qubit" of a state is the top bit of its index.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A gate on named qubits. Serialized forms: `{"h":q}`, `{"toffoli":[a,b,c]}`,
/// `{"cnot":[c,t]}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gate {
    H(usize),
    Toffoli(usize, usize, usize),
    Cnot(usize, usize),
}

impl Gate {
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::H(q) => vec![q],
            Gate::Toffoli(a, b, c) => vec![a, b, c],
            Gate::Cnot(c, t) => vec![c, t],
        }
    }

    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        let qs = self.qubits();
        for (k, &q) in qs.iter().enumerate() {
            if q >= n_qubits {
                return Err(Error::BadGate);
            }
            if qs[k + 1..].contains(&q) {
                return Err(Error::BadGate);
            }
        }
        Ok(())
    }

    /// Same gate with every qubit index shifted up by `offset`.
    pub fn shifted(&self, offset: usize) -> Gate {
        match *self {
            Gate::H(q) => Gate::H(q + offset),
            Gate::Toffoli(a, b, c) => Gate::Toffoli(a + offset, b + offset, c + offset),
            Gate::Cnot(c, t) => Gate::Cnot(c + offset, t + offset),
        }
    }
}

/// An ordered gate list on `r` qubits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Circuit {
    pub qubits: usize,
    pub gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(qubits: usize, gates: Vec<Gate>) -> Result<Self> {
        if gates.is_empty() {
            return Err(Error::InvalidParam("circuit needs at least one gate".into()));
        }
        for g in &gates {
            g.validate(qubits)?;
        }
        Ok(Circuit { qubits, gates })
    }

    pub fn gate_count(&self) -> usize {
        self.gates.len()
    }
}

#[inline]
fn bit_of(index: usize, qubit: usize, n_qubits: usize) -> usize {
    (index >> (n_qubits - 1 - qubit)) & 1
}

#[inline]
fn flip(index: usize, qubit: usize, n_qubits: usize) -> usize {
    index ^ (1 << (n_qubits - 1 - qubit))
}

/// Applies one gate to a full statevector in place.
pub fn apply_gate(state: &mut [Complex64], gate: &Gate, n_qubits: usize) {
    let dim = 1usize << n_qubits;
    debug_assert_eq!(state.len(), dim);
    match *gate {
        Gate::H(q) => {
            let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
            for i in 0..dim {
                if bit_of(i, q, n_qubits) == 0 {
                    let j = flip(i, q, n_qubits);
                    let a = state[i];
                    let b = state[j];
                    state[i] = (a + b) * inv_sqrt2;
                    state[j] = (a - b) * inv_sqrt2;
                }
            }
        }
        Gate::Cnot(c, t) => {
            for i in 0..dim {
                if bit_of(i, c, n_qubits) == 1 && bit_of(i, t, n_qubits) == 0 {
                    let j = flip(i, t, n_qubits);
                    state.swap(i, j);
                }
            }
        }
        Gate::Toffoli(a, b, t) => {
            for i in 0..dim {
                if bit_of(i, a, n_qubits) == 1
                    && bit_of(i, b, n_qubits) == 1
                    && bit_of(i, t, n_qubits) == 0
                {
                    let j = flip(i, t, n_qubits);
                    state.swap(i, j);
                }
            }
        }
    }
}

/// Exact amplitudes of `C|input>` for a basis-state input.
pub fn statevector(circuit: &Circuit, input: usize, qubit_cap: u32) -> Result<Vec<Complex64>> {
    if circuit.qubits as u32 > qubit_cap {
        return Err(Error::CapExceeded {
            what: "statevector qubits",
            have: circuit.qubits as u64,
            cap: qubit_cap as u64,
        });
    }
    let dim = 1usize << circuit.qubits;
    if input >= dim {
        return Err(Error::IndexOutOfRange { index: input, dim });
    }
    let mut state = vec![Complex64::new(0.0, 0.0); dim];
    state[input] = Complex64::new(1.0, 0.0);
    for g in &circuit.gates {
        apply_gate(&mut state, g, circuit.qubits);
    }
    Ok(state)
}

/// Acceptance probability `|α_{x,1}|²`: total weight on states whose first
/// qubit reads 1.
pub fn acceptance_probability(circuit: &Circuit, input: usize, qubit_cap: u32) -> Result<f64> {
    let state = statevector(circuit, input, qubit_cap)?;
    let dim = state.len();
    Ok(state
        .iter()
        .enumerate()
        .filter(|(i, _)| *i >= dim / 2)
        .map(|(_, a)| a.norm_sqr())
        .sum())
}
