//! Ballistic clock construction: with M = 2T+2 clock values and the gate
//! sequence [circuit, CNOT, CNOT, reversed circuit], the walk operator
//! `A = (W + W†)/2` satisfies `T_{T+1}(A) = (W^{T+1} + W^{-(T+1)})/2`, and
//! both branches land on the same state — the answer-copied circuit output
//! at clock T+1. The transformed start state is normalized, so the local
//! measurement is exactly the acceptance probability.

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

/// Clock gate sequence `V_1..V_{2T+2}`: shifted circuit, two answer-copying
/// CNOTs back to back, reversed circuit.
pub(crate) fn ballistic_gate_sequence(circuit: &Circuit) -> Vec<VGate> {
    let t = circuit.gate_count();
    let mut vseq = shifted_gates(circuit);
    vseq.push(VGate::Std(Gate::Cnot(1, 0)));
    vseq.push(VGate::Std(Gate::Cnot(1, 0)));
    vseq.extend(circuit.gates.iter().rev().map(|g| VGate::Std(g.shifted(1))));
    debug_assert_eq!(vseq.len(), 2 * t + 2);
    vseq
}

/// Emits the ballistic instance: function `T_{T+1}`, local measurement at
/// the ancilla-1 start state, predicted value exactly `|α_1|²`.
pub fn chebyshev_ballistic_instance(
    circuit: &Circuit,
    encoding: Encoding,
    caps: &Caps,
) -> Result<ClockInstance> {
    let t = circuit.gate_count();
    let m_states = 2 * t + 2;
    let r_data = circuit.qubits + 1;
    let accept = acceptance(circuit, caps.qubit_cap)?;
    let vseq = ballistic_gate_sequence(circuit);
    let transitions: Vec<Transition> = vseq
        .iter()
        .enumerate()
        .map(|(l, &gate)| Transition {
            from: l,
            to: (l + 1) % m_states,
            gate,
            coeff: 0.5,
        })
        .collect();

    let (access, meta, start_index) = match encoding {
        Encoding::Compact => {
            let m = build_compact_hermitized(m_states, r_data, &transitions, 0.0)?;
            let meta = InstanceMeta {
                s: Some(4),
                one_norm: Some(m.induced_one_norm()),
                op_norm: Some(1.0),
                kappa: None,
                pauli_norm: None,
            };
            let y = 1usize << (r_data - 1);
            (AccessForm::Super(m), meta, y * m_states)
        }
        Encoding::Unary => {
            let op = build_unary_hermitized(
                m_states as u32,
                r_data as u32,
                &transitions,
                0.0,
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
        family: FamilyTag::ChebyBallistic,
        circuit: circuit.clone(),
        encoding,
        scale: 1.0,
        instance: Instance::new(access, meta),
        target: Target::Lm { i: start_index },
        function: FunctionSpec::Chebyshev { m: t + 1 },
        predicted: Complex64::new(accept, 0.0),
        predicted_tag: "ballistic identity sends the start state to the answer-copied circuit \
                        output, a normalized state whose ancilla measurement is the acceptance \
                        probability"
            .into(),
        normalized_predicted: Some(accept),
        threshold: None,
        acceptance_probability: accept,
        solution_norm: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense;
    use crate::poly;

    #[test]
    fn identity_equivalent_circuit_gives_zero() {
        let caps = Caps::default();
        let c = Circuit::new(2, vec![Gate::Cnot(1, 0), Gate::Cnot(1, 0)]).unwrap();
        let inst = chebyshev_ballistic_instance(&c, Encoding::Compact, &caps).unwrap();
        assert_eq!(inst.predicted, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn h_circuit_gives_exactly_half_densely() {
        let caps = Caps::default();
        let c = Circuit::new(1, vec![Gate::H(0)]).unwrap();
        let inst = chebyshev_ballistic_instance(&c, Encoding::Compact, &caps).unwrap();
        assert!((inst.predicted.re - 0.5).abs() < 1e-15);
        let d = match &inst.instance.access {
            AccessForm::Super(s) => s.to_dense(4096).unwrap(),
            _ => unreachable!(),
        };
        let i = match inst.target {
            Target::Lm { i } => i,
            _ => unreachable!(),
        };
        let deg = match inst.function {
            FunctionSpec::Chebyshev { m } => m,
            _ => unreachable!(),
        };
        let got =
            dense::exact_lm(&d, |x| Complex64::new(poly::chebyshev_eval(deg, x), 0.0), i).unwrap();
        assert!((got - 0.5).abs() < 1e-10, "{got}");
        // the transformed state is normalized, so normalized and plain
        // values coincide
        let norm =
            dense::exact_state_norm_sqr(&d, |x| Complex64::new(poly::chebyshev_eval(deg, x), 0.0), i)
                .unwrap();
        assert!((norm - 1.0).abs() < 1e-10);
    }

    #[test]
    fn toffoli_circuit_prediction_matches_dense() {
        let caps = Caps::default();
        let c = Circuit::new(3, vec![Gate::H(1), Gate::Toffoli(1, 2, 0)]).unwrap();
        let inst = chebyshev_ballistic_instance(&c, Encoding::Compact, &caps).unwrap();
        let d = match &inst.instance.access {
            AccessForm::Super(s) => s.to_dense(4096).unwrap(),
            _ => unreachable!(),
        };
        let i = match inst.target {
            Target::Lm { i } => i,
            _ => unreachable!(),
        };
        let deg = match inst.function {
            FunctionSpec::Chebyshev { m } => m,
            _ => unreachable!(),
        };
        let got =
            dense::exact_lm(&d, |x| Complex64::new(poly::chebyshev_eval(deg, x), 0.0), i).unwrap();
        assert!(
            (got - inst.acceptance_probability).abs() < 1e-10,
            "{got} vs {}",
            inst.acceptance_probability
        );
    }

    #[test]
    fn unary_pauli_closure_evaluation_matches_prediction() {
        use crate::estimators::supersparse::{pauli_rep_lm, pauli_supersparse_apply};
        let caps = Caps::default();
        let c = Circuit::new(1, vec![Gate::H(0)]).unwrap();
        let inst = chebyshev_ballistic_instance(&c, Encoding::Unary, &caps).unwrap();
        let p = match &inst.instance.access {
            AccessForm::Pauli(p) => p,
            _ => unreachable!(),
        };
        let deg = match inst.function {
            FunctionSpec::Chebyshev { m } => m,
            _ => unreachable!(),
        };
        let rep = pauli_supersparse_apply(p, &poly::chebyshev_poly(deg), &caps).unwrap();
        let i = match inst.target {
            Target::Lm { i } => i,
            _ => unreachable!(),
        };
        let got = pauli_rep_lm(&rep, i).unwrap();
        assert!((got - 0.5).abs() < 1e-10, "{got}");
    }
}
