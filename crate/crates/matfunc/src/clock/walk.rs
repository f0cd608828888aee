//! Diffusive clock construction for the local measurement problem: the
//! circuit, an answer-copying CNOT, an idle band, the undoing CNOT, and the
//! uncomputation are laid around a cycle of M = 3(T+1) clock values, and
//! powers of the walk operator spread the start state over the cycle.
//!
//! The emitted operator is the half-lazy affine form `(1 + A_cycle)/2`:
//! the plain cycle walk is periodic whenever M is even (amplitudes alternate
//! parity classes and never mix), while the lazy chain is aperiodic for
//! every M and obeys the quoted `½·exp(-π²m/(2M²))` bound for all m ≥ M².
//! Predictions use exact powering of that chain either way, so nothing is
//! approximated.

use num_complex::Complex64;

use crate::access::{AccessForm, Instance, InstanceMeta, PauliAccess};
use crate::circuit::{Circuit, Gate};
use crate::error::Result;
use crate::estimate::Target;
use crate::poly::FunctionSpec;
use crate::Caps;

use super::{
    acceptance, build_compact_hermitized, build_unary_hermitized, shifted_gates, unary_step_index,
    ClockInstance, Encoding, FamilyTag, Transition, VGate,
};

/// Distribution of the lazy cycle walk `P = ½I + ¼(S + S†)` after `steps`
/// steps from position 0, by exact vector powering.
pub fn lazy_chain_distribution(m_states: usize, steps: usize) -> Vec<f64> {
    let mut p = vec![0.0f64; m_states];
    p[0] = 1.0;
    let mut next = vec![0.0f64; m_states];
    for _ in 0..steps {
        for l in 0..m_states {
            let left = p[(l + m_states - 1) % m_states];
            let right = p[(l + 1) % m_states];
            next[l] = 0.5 * p[l] + 0.25 * (left + right);
        }
        std::mem::swap(&mut p, &mut next);
    }
    p
}

/// The quoted diffusive mixing bound `½·exp(-π² m / (2M²))`.
pub fn mixing_bound(m_states: usize, steps: usize) -> f64 {
    0.5 * (-std::f64::consts::PI.powi(2) * steps as f64 / (2.0 * (m_states * m_states) as f64))
        .exp()
}

/// Clock gate sequence `V_1..V_M`: the shifted circuit, an answer-copying
/// CNOT onto the ancilla, T+1 idles, the undoing CNOT, and the reversed
/// circuit.
pub(crate) fn walk_gate_sequence(circuit: &Circuit) -> Vec<VGate> {
    let t = circuit.gate_count();
    let mut vseq = shifted_gates(circuit);
    vseq.push(VGate::Std(Gate::Cnot(1, 0)));
    vseq.extend(std::iter::repeat(VGate::Id).take(t + 1));
    vseq.push(VGate::Std(Gate::Cnot(1, 0)));
    vseq.extend(circuit.gates.iter().rev().map(|g| VGate::Std(g.shifted(1))));
    debug_assert_eq!(vseq.len(), 3 * (t + 1));
    vseq
}

/// Emits the lazy walk instance with power `m = M²`, the predicted local
/// measurement `|α_1|²·Σ_{T+1≤l≤2T+2} p_m(l)²`, and the normalized ratio.
pub fn monomial_walk_lm_instance(
    circuit: &Circuit,
    encoding: Encoding,
    caps: &Caps,
) -> Result<ClockInstance> {
    let t = circuit.gate_count();
    let m_states = 3 * (t + 1);
    let r_data = circuit.qubits + 1; // ancilla is data qubit 0
    let accept = acceptance(circuit, caps.qubit_cap)?;
    let vseq = walk_gate_sequence(circuit);
    // A = ½·1 + ¼ Σ (T_l ⊗ V_{l+1} + h.c.)
    let transitions: Vec<Transition> = vseq
        .iter()
        .enumerate()
        .map(|(l, &gate)| Transition {
            from: l,
            to: (l + 1) % m_states,
            gate,
            coeff: 0.25,
        })
        .collect();

    // power chosen so the mixing bound is already ≤ 1e-2 (it is, at m = M²)
    let power = m_states * m_states;
    debug_assert!(mixing_bound(m_states, power) <= 1e-2);
    let p = lazy_chain_distribution(m_states, power);
    let window_sum: f64 = (t + 1..=2 * t + 2).map(|l| p[l] * p[l]).sum();
    let total_sum: f64 = p.iter().map(|x| x * x).sum();
    let predicted = accept * window_sum;
    let normalized = accept * window_sum / total_sum;

    let (access, meta, start_index) = match encoding {
        Encoding::Compact => {
            let m = build_compact_hermitized(m_states, r_data, &transitions, 0.5)?;
            let meta = InstanceMeta {
                s: Some(5),
                one_norm: Some(m.induced_one_norm()),
                op_norm: Some(1.0),
                kappa: None,
                pauli_norm: None,
            };
            // start state: ancilla 1, circuit register 0, clock step_0
            let y = 1usize << (r_data - 1);
            (AccessForm::Super(m), meta, y * m_states)
        }
        Encoding::Unary => {
            let op = build_unary_hermitized(
                m_states as u32,
                r_data as u32,
                &transitions,
                0.5,
                caps.qubit_cap,
            )?;
            let acc = PauliAccess::new(op)?;
            let meta = InstanceMeta {
                s: Some(acc.to_sparse_oracle().sparsity()),
                one_norm: None,
                op_norm: None,
                kappa: None,
                pauli_norm: Some(acc.pauli_norm()),
            };
            let y = 1usize << (r_data - 1);
            let idx = (y << m_states) | unary_step_index(m_states as u32, 0);
            (AccessForm::Pauli(acc), meta, idx)
        }
    };

    Ok(ClockInstance {
        family: FamilyTag::WalkLm,
        circuit: circuit.clone(),
        encoding,
        scale: 1.0,
        instance: Instance::new(access, meta),
        target: Target::Lm { i: start_index },
        function: FunctionSpec::Monomial { m: power },
        predicted: Complex64::new(predicted, 0.0),
        predicted_tag: "local measurement as acceptance probability times the squared window \
                        mass of the exactly powered lazy clock chain"
            .into(),
        normalized_predicted: Some(normalized),
        threshold: None,
        acceptance_probability: accept,
        solution_norm: None,
    })
}
