//! Idling clock construction for the inverse function: the answer-copied
//! circuit, an idle band, and the uncomputation cycle a clock of length
//! 3T', and `A = 1 - U·e^{-1/T'}` resolves into the geometric series
//! `A⁻¹ = Σ_k U^k e^{-k/T'}` whose weight inside the idle window carries
//! the acceptance probability. The emitted matrix is the Hermitian
//! symmetrization `A' = [[0, A],[A†, 0]]` on a doubled index.

use std::f64::consts::E;

use num_complex::Complex64;

use crate::access::{AccessForm, Instance, InstanceMeta};
use crate::circuit::{Circuit, Gate};
use crate::error::Result;
use crate::estimate::Target;
use crate::poly::FunctionSpec;
use crate::Caps;

use super::{acceptance, shifted_gates, ClockInstance, Encoding, EntryAccum, FamilyTag, VGate};

/// Idling gate sequence `G_1..G_{3T'}`: answer-copied circuit, T' idles,
/// reversed circuit.
fn idling_gate_sequence(circuit: &Circuit) -> Vec<VGate> {
    let mut gates = shifted_gates(circuit);
    gates.push(VGate::Std(Gate::Cnot(1, 0)));
    let t_prime = gates.len();
    gates.extend(std::iter::repeat(VGate::Id).take(t_prime));
    let mut reversed: Vec<VGate> = Vec::with_capacity(t_prime);
    reversed.extend(shifted_gates(circuit).into_iter().rev());
    gates.push(VGate::Std(Gate::Cnot(1, 0)));
    gates.extend(reversed);
    gates
}

/// Geometric sums over the cycle: the idle-window weight
/// `Σ_{l=T'}^{2T'} e^{-2l/T'}` and the full-cycle weight
/// `Σ_{l=0}^{3T'-1} e^{-2l/T'}`.
fn cycle_weights(t_prime: usize) -> (f64, f64) {
    let q2 = (-2.0 / t_prime as f64).exp();
    let window: f64 = (t_prime..=2 * t_prime).map(|l| q2.powi(l as i32)).sum();
    let total: f64 = (0..3 * t_prime).map(|l| q2.powi(l as i32)).sum();
    (window, total)
}

/// Emits the symmetrized idling-clock instance targeting the normalized
/// local measurement at the ancilla-1 start state.
pub fn hhl_inverse_instance(circuit: &Circuit, caps: &Caps) -> Result<ClockInstance> {
    let r_data = circuit.qubits + 1;
    let gates = idling_gate_sequence(circuit);
    let t_prime = circuit.gate_count() + 1;
    let cycle = 3 * t_prime;
    debug_assert_eq!(gates.len(), cycle);
    let accept = acceptance(circuit, caps.qubit_cap)?;
    let q = (-1.0 / t_prime as f64).exp();
    let data_dim = 1usize << r_data;
    // doubled index: y·(2·cycle) + b·cycle + l
    let idx = |y: usize, b: usize, l: usize| y * 2 * cycle + b * cycle + l;
    let dim = data_dim * 2 * cycle;

    let mut accum = EntryAccum::new();
    // A = 1 - q·U. Block (b=0 row, b=1 col) holds A; the transpose-conjugate
    // block holds A†.
    for y in 0..data_dim {
        for l in 0..cycle {
            accum.add(idx(y, 0, l), idx(y, 1, l), Complex64::new(1.0, 0.0));
            accum.add(idx(y, 1, l), idx(y, 0, l), Complex64::new(1.0, 0.0));
            // U: step l -> l+1 applying gate G_{l+1}
            let l_next = (l + 1) % cycle;
            for (y_new, amp) in gates[l].apply_basis(y, r_data) {
                let v = Complex64::new(-q * amp, 0.0);
                accum.add(idx(y_new, 0, l_next), idx(y, 1, l), v);
                accum.add(idx(y, 1, l), idx(y_new, 0, l_next), v.conj());
            }
        }
    }
    let m = accum.into_supersparse(dim)?;
    let kappa_bound = (1.0 + q) / (1.0 - q);
    let meta = InstanceMeta {
        s: Some(m.max_row_col_occupancy()),
        one_norm: Some(m.induced_one_norm()),
        op_norm: Some(1.0 + q),
        kappa: Some(kappa_bound),
        pauli_norm: None,
    };

    let (window, total) = cycle_weights(t_prime);
    let gamma = E.powi(3) / (E.powi(3) - 1.0);
    let normalized = accept * window / total;
    let unnormalized = gamma * gamma * accept * window;
    let solution_norm = gamma * total.sqrt();

    // start: ancilla 1, circuit register 0, block 0, clock 0
    let y_start = 1usize << (r_data - 1);
    let start = idx(y_start, 0, 0);

    Ok(ClockInstance {
        family: FamilyTag::Hhl,
        circuit: circuit.clone(),
        encoding: Encoding::Compact,
        scale: 1.0,
        instance: Instance::new(AccessForm::Super(m), meta),
        target: Target::Nlm { i: start },
        function: FunctionSpec::Inverse {
            kappa: kappa_bound,
            eps: None,
        },
        predicted: Complex64::new(unnormalized, 0.0),
        predicted_tag: "geometric clock series: the idle-window weight of A⁻¹ applied to the \
                        ancilla-flagged start state, windows summed over clock values T'..2T' \
                        inclusive"
            .into(),
        normalized_predicted: Some(normalized),
        threshold: None,
        acceptance_probability: accept,
        solution_norm: Some(solution_norm),
    })
}
