//! Rotation clock construction for time evolution: with τ = 2T+1 clock
//! transitions weighted by `√(j(τ+1-j))/(4τ)`, the operator restricted to
//! any computation orbit is the spin-(τ/2) x-generator over 2τ, so the
//! evolution for time t rotates the clock by angle t/(2τ). At t = 2πτ the
//! rotation is exactly π: the start state maps (up to the phase `(-i)^τ`)
//! onto the fully computed state at clock τ.

use num_complex::Complex64;

use crate::access::{AccessForm, Instance, InstanceMeta, PauliAccess};
use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::estimate::Target;
use crate::poly::FunctionSpec;
use crate::Caps;

use super::{
    acceptance, build_compact_hermitized, build_unary_hermitized, shifted_gates, unary_step_index,
    ClockInstance, Encoding, FamilyTag, Transition, VGate,
};

/// Closed-form clock amplitude `c_j(t)` of the rotation generator:
/// `C(τ,j)^{1/2} cos(t/4τ)^{τ-j} (-i·sin(t/4τ))^j` for `e^{-itA}` started
/// at clock 0.
pub fn peres_clock_amplitude(tau: usize, j: usize, t: f64) -> Complex64 {
    let theta = t / (4.0 * tau as f64);
    let mut binom = 1.0f64;
    for i in 1..=j {
        binom *= (tau - i + 1) as f64 / i as f64;
    }
    let c = theta.cos();
    let s = theta.sin();
    let rot = Complex64::new(0.0, -s);
    binom.sqrt() * Complex64::new(c, 0.0).powu((tau - j) as u32) * rot.powu(j as u32)
}

/// Clock gate sequence `V_1..V_τ`: shifted circuit, answer-copying CNOT,
/// reversed circuit.
pub(crate) fn peres_gate_sequence(circuit: &Circuit) -> Vec<VGate> {
    let t = circuit.gate_count();
    let mut vseq = shifted_gates(circuit);
    vseq.push(VGate::Std(Gate::Cnot(1, 0)));
    vseq.extend(circuit.gates.iter().rev().map(|g| VGate::Std(g.shifted(1))));
    debug_assert_eq!(vseq.len(), 2 * t + 1);
    vseq
}

/// Emits `scale·A` with evolution time `t = -2πτ/scale`, targeting the
/// transition amplitude from the start state to the computed state.
pub fn peres_timeevo_instance(
    circuit: &Circuit,
    scale: f64,
    encoding: Encoding,
    caps: &Caps,
) -> Result<ClockInstance> {
    if !(scale > 0.0 && scale <= 1.0) {
        return Err(Error::InvalidParam("scale must lie in (0, 1]".into()));
    }
    let t_gates = circuit.gate_count();
    let tau = 2 * t_gates + 1;
    let n_clock = tau + 1; // line of clock values 0..τ
    let r_data = circuit.qubits + 1;
    let accept = acceptance(circuit, caps.qubit_cap)?;
    let vseq = peres_gate_sequence(circuit);
    let transitions: Vec<Transition> = vseq
        .iter()
        .enumerate()
        .map(|(idx, &gate)| {
            let j = idx + 1; // transitions are 1-indexed: step_{j-1} -> step_j
            Transition {
                from: j - 1,
                to: j,
                gate,
                coeff: scale * (j as f64 * (tau + 1 - j) as f64).sqrt() / (4.0 * tau as f64),
            }
        })
        .collect();

    let evolution_time = -2.0 * std::f64::consts::PI * tau as f64 / scale;
    let (access, meta, j_index, k_index) = match encoding {
        Encoding::Compact => {
            let m = build_compact_hermitized(n_clock, r_data, &transitions, 0.0)?;
            let meta = InstanceMeta {
                s: Some(8),
                one_norm: Some(m.induced_one_norm()),
                op_norm: Some(0.25 * scale),
                kappa: None,
                pauli_norm: None,
            };
            let y_accept = 1usize << (r_data - 1);
            (
                AccessForm::Super(m),
                meta,
                0usize,
                y_accept * n_clock + tau,
            )
        }
        Encoding::Unary => {
            let op = build_unary_hermitized(
                n_clock as u32,
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
            let y_accept = 1usize << (r_data - 1);
            let j = unary_step_index(n_clock as u32, 0);
            let k = (y_accept << n_clock) | unary_step_index(n_clock as u32, tau);
            (AccessForm::Pauli(acc), meta, j, k)
        }
    };

    // e^{-i2πτA}|start> = (-i)^τ |step_τ> ⊗ C'|start data>, and the single
    // matrix entry at the accept index picks the squared acceptance
    // amplitude <1,x|C'|0,x> = |α_1|².
    let phase = Complex64::new(0.0, -1.0).powu(tau as u32);
    let predicted = phase * accept;

    Ok(ClockInstance {
        family: FamilyTag::Peres,
        circuit: circuit.clone(),
        encoding,
        scale,
        instance: Instance::new(access, meta),
        target: Target::Entry {
            i: k_index,
            j: j_index,
        },
        function: FunctionSpec::TimeEvolution {
            t: evolution_time,
            eps: None,
        },
        predicted,
        predicted_tag: "full π-rotation of the clock line maps the start state onto the \
                        answer-copied output with phase (-i)^τ; the targeted entry equals \
                        that phase times the squared acceptance amplitude"
            .into(),
        normalized_predicted: None,
        threshold: Some((0.5, 1.0 / 12.0)),
        acceptance_probability: accept,
        solution_norm: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense;

    fn dense_of(inst: &ClockInstance) -> crate::dense::DenseMatrix {
        match &inst.instance.access {
            AccessForm::Super(s) => s.to_dense(4096).unwrap(),
            AccessForm::Pauli(p) => p.operator().to_dense(12).unwrap(),
            _ => unreachable!(),
        }
    }

    #[test]
    fn closed_form_amplitudes_match_dense_exponential() {
        let caps = Caps::default();
        let c = Circuit::new(1, vec![Gate::H(0)]).unwrap();
        let inst = peres_timeevo_instance(&c, 1.0, Encoding::Compact, &caps).unwrap();
        let d = dense_of(&inst);
        let tau = 3usize;
        let n_clock = tau + 1;
        for t in [1.7, 6.0, 2.0 * std::f64::consts::PI * tau as f64] {
            let u = dense::apply_function(&d, |x| Complex64::new(0.0, -x * t).exp()).unwrap();
            // c_0(t): amplitude of staying at (y=0, clock 0)
            let c0 = u.get(0, 0);
            let expect0 = peres_clock_amplitude(tau, 0, t);
            assert!((c0 - expect0).norm() < 1e-9, "t={t}: {c0} vs {expect0}");
            // |c_τ(t)|: total weight on the clock-τ block
            let mut block: f64 = 0.0;
            for y in 0..(1usize << 2) {
                block += u.get(y * n_clock + tau, 0).norm_sqr();
            }
            let expect_tau = peres_clock_amplitude(tau, tau, t).norm();
            assert!(
                (block.sqrt() - expect_tau).abs() < 1e-9,
                "t={t}: {} vs {expect_tau}",
                block.sqrt()
            );
        }
        // at t = 2πτ the clock has fully rotated: |c_τ| = 1
        let t_full = 2.0 * std::f64::consts::PI * tau as f64;
        assert!((peres_clock_amplitude(tau, tau, t_full).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn transition_entry_is_squared_acceptance_amplitude() {
        let caps = Caps::default();
        let c = Circuit::new(1, vec![Gate::H(0)]).unwrap();
        let inst = peres_timeevo_instance(&c, 1.0, Encoding::Compact, &caps).unwrap();
        let d = dense_of(&inst);
        let (k, j) = match inst.target {
            Target::Entry { i, j } => (i, j),
            _ => unreachable!(),
        };
        let t = match inst.function {
            FunctionSpec::TimeEvolution { t, .. } => t,
            _ => unreachable!(),
        };
        let got = dense::exact_entry(&d, |x| Complex64::new(0.0, x * t).exp(), k, j).unwrap();
        // the dense value equals the instance's own prediction...
        assert!((got - inst.predicted).norm() < 1e-9, "{got} vs {}", inst.predicted);
        // ...whose magnitude is |α_1|², the squared acceptance amplitude
        assert!((got.norm() - inst.acceptance_probability).abs() < 1e-9);
        assert!((got.norm() - 0.5).abs() < 1e-9);
    }

    #[test]
    fn identity_like_circuit_puts_amplitude_on_the_rest_state() {
        // |α_1|² = 0: the target entry vanishes and the non-flipped data
        // index at clock τ carries everything
        let caps = Caps::default();
        let c = Circuit::new(2, vec![Gate::Cnot(1, 0), Gate::Cnot(1, 0)]).unwrap();
        let inst = peres_timeevo_instance(&c, 1.0, Encoding::Compact, &caps).unwrap();
        let d = dense_of(&inst);
        let (k, j) = match inst.target {
            Target::Entry { i, j } => (i, j),
            _ => unreachable!(),
        };
        let t = match inst.function {
            FunctionSpec::TimeEvolution { t, .. } => t,
            _ => unreachable!(),
        };
        let got = dense::exact_entry(&d, |x| Complex64::new(0.0, x * t).exp(), k, j).unwrap();
        assert!(got.norm() < 1e-9);
        let tau = 2 * c.gate_count() + 1;
        let rest = dense::exact_entry(&d, |x| Complex64::new(0.0, x * t).exp(), tau, j).unwrap();
        assert!((rest.norm() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn scaled_variant_preserves_the_prediction() {
        let caps = Caps::default();
        let c = Circuit::new(1, vec![Gate::H(0)]).unwrap();
        let inst = peres_timeevo_instance(&c, 0.25, Encoding::Compact, &caps).unwrap();
        let d = dense_of(&inst);
        let (k, j) = match inst.target {
            Target::Entry { i, j } => (i, j),
            _ => unreachable!(),
        };
        let t = match inst.function {
            FunctionSpec::TimeEvolution { t, .. } => t,
            _ => unreachable!(),
        };
        let got = dense::exact_entry(&d, |x| Complex64::new(0.0, x * t).exp(), k, j).unwrap();
        assert!((got - inst.predicted).norm() < 1e-9);
        // one-norm shrinks with the scale
        let m = match &inst.instance.access {
            AccessForm::Super(s) => s,
            _ => unreachable!(),
        };
        assert!(m.induced_one_norm() <= 0.25 + 1e-12);
    }

    #[test]
    fn one_norm_at_most_one_and_quarter_operator_norm() {
        let caps = Caps::default();
        for c in [
            Circuit::new(1, vec![Gate::H(0)]).unwrap(),
            Circuit::new(3, vec![Gate::H(2), Gate::Toffoli(0, 2, 1), Gate::H(0)]).unwrap(),
        ] {
            let inst = peres_timeevo_instance(&c, 1.0, Encoding::Compact, &caps).unwrap();
            let m = match &inst.instance.access {
                AccessForm::Super(s) => s,
                _ => unreachable!(),
            };
            assert!(m.induced_one_norm() <= 1.0 + 1e-12);
            assert!(m.max_row_col_occupancy() <= 8);
            let d = m.to_dense(4096).unwrap();
            let onorm = crate::access::operator_norm(&d).unwrap();
            assert!((onorm - 0.25).abs() < 1e-9, "{onorm}");
        }
    }

    #[test]
    fn unary_form_matches_compact_entry() {
        let caps = Caps::default();
        let c = Circuit::new(1, vec![Gate::H(0)]).unwrap();
        let compact = peres_timeevo_instance(&c, 1.0, Encoding::Compact, &caps).unwrap();
        let unary = peres_timeevo_instance(&c, 1.0, Encoding::Unary, &caps).unwrap();
        let t = match compact.function {
            FunctionSpec::TimeEvolution { t, .. } => t,
            _ => unreachable!(),
        };
        let dc = dense_of(&compact);
        let du = dense_of(&unary);
        let (kc, jc) = match compact.target {
            Target::Entry { i, j } => (i, j),
            _ => unreachable!(),
        };
        let (ku, ju) = match unary.target {
            Target::Entry { i, j } => (i, j),
            _ => unreachable!(),
        };
        let a = dense::exact_entry(&dc, |x| Complex64::new(0.0, x * t).exp(), kc, jc).unwrap();
        let b = dense::exact_entry(&du, |x| Complex64::new(0.0, x * t).exp(), ku, ju).unwrap();
        assert!((a - b).norm() < 1e-9, "{a} vs {b}");
    }
}
