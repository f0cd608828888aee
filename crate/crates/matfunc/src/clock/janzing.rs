//! Cyclic clock construction for diagonal matrix elements: the circuit, a
//! phase flip on the answer qubit, and the uncomputation are laid around an
//! M-cycle (M = 2T+1), and the walk operator `A = (W + W†)/2` has the two
//! cosine eigenvalue grids whose overlaps with the start state are uniform.
//! A diagonal entry of `f(A)` then splits into circuit-independent spectral
//! sums weighted by the acceptance probability.

use num_complex::Complex64;

use crate::access::{AccessForm, Instance, InstanceMeta, PauliAccess};
use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::estimate::Target;
use crate::poly::{FunctionSpec, PolynomialSpec};
use crate::Caps;

use super::{
    acceptance, build_compact_hermitized, build_unary_hermitized, unary_step_index,
    ClockInstance, Encoding, FamilyTag, Transition, VGate,
};

/// The two eigenvalue families: `cos(2πl/M)` and `cos(π(2l+1)/M)`,
/// each over `l = 0..M-1`.
pub(crate) fn spectrum_grids(m_states: usize) -> (Vec<f64>, Vec<f64>) {
    let m = m_states as f64;
    let plus = (0..m_states)
        .map(|l| (2.0 * std::f64::consts::PI * l as f64 / m).cos())
        .collect();
    let minus = (0..m_states)
        .map(|l| (std::f64::consts::PI * (2 * l + 1) as f64 / m).cos())
        .collect();
    (plus, minus)
}

/// `[f(scale·A)]_{jj} = (|α_0|²/M) Σ_l f(s·θ_l⁺) + (|α_1|²/M) Σ_l f(s·θ_l⁻)`.
pub(crate) fn predicted_diagonal(
    f: &FunctionSpec,
    m_states: usize,
    scale: f64,
    accept: f64,
) -> Complex64 {
    let (plus, minus) = spectrum_grids(m_states);
    let sum_plus: Complex64 = plus.iter().map(|&t| f.eval_scalar(scale * t)).sum();
    let sum_minus: Complex64 = minus.iter().map(|&t| f.eval_scalar(scale * t)).sum();
    (sum_plus * (1.0 - accept) + sum_minus * accept) / m_states as f64
}

/// The circuit-independent spectral sum `E_0 = (1/M)(1 + 2Σ (θ_l⁺)^m)`.
pub fn e0_spectral_sum(m_states: usize, power: usize) -> f64 {
    let (plus, _) = spectrum_grids(m_states);
    plus.iter().map(|&t| t.powi(power as i32)).sum::<f64>() / m_states as f64
}

/// Hardness criterion value `(1/M)|f^o(1) + 2 Σ_{l=1}^{(M-1)/2} f^o(θ_l⁺)|`
/// for the odd part of an explicit polynomial.
pub fn hardness_criterion(p: &PolynomialSpec, m_states: usize) -> Result<f64> {
    if m_states < 3 || m_states % 2 == 0 {
        return Err(Error::InvalidParam("clock size must be odd and ≥ 3".into()));
    }
    let odd = p.odd_part();
    let mut acc = odd.eval(Complex64::new(1.0, 0.0));
    for l in 1..=(m_states - 1) / 2 {
        let theta = (2.0 * std::f64::consts::PI * l as f64 / m_states as f64).cos();
        acc += 2.0 * odd.eval(Complex64::new(theta, 0.0));
    }
    Ok(acc.norm() / m_states as f64)
}

/// Criterion value for a Chebyshev polynomial `T_m`, exact when every node
/// lands on an integer multiple of the full angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CriterionValue {
    /// Exact rational `num/den` (integer arithmetic throughout).
    Exact { num: i64, den: i64 },
    Approx(f64),
}

impl CriterionValue {
    pub fn as_f64(&self) -> f64 {
        match *self {
            CriterionValue::Exact { num, den } => num as f64 / den as f64,
            CriterionValue::Approx(v) => v,
        }
    }
}

/// `T_m(cos(2πl/M)) = cos(2πlm/M)` reduces every node to a residue
/// `lm mod M`; when all residues vanish the criterion is the exact integer
/// sum `(1 + 2·(M-1)/2)/M = 1`.
pub fn hardness_criterion_chebyshev(m: usize, m_states: usize) -> Result<CriterionValue> {
    if m_states < 3 || m_states % 2 == 0 {
        return Err(Error::InvalidParam("clock size must be odd and ≥ 3".into()));
    }
    if m % 2 == 0 {
        // even Chebyshev polynomials have zero odd part
        return Ok(CriterionValue::Exact { num: 0, den: 1 });
    }
    let all_zero = (1..=(m_states - 1) / 2).all(|l| (l * m) % m_states == 0);
    if all_zero {
        // every term is exactly 1: (1 + 2·(M-1)/2)/M
        let num = 1 + 2 * ((m_states as i64 - 1) / 2);
        return Ok(CriterionValue::Exact {
            num: num / m_states as i64,
            den: 1,
        });
    }
    let mut acc = 1.0f64; // T_m(1) = 1
    for l in 1..=(m_states - 1) / 2 {
        let residue = (l * m) % m_states;
        acc += 2.0 * (2.0 * std::f64::consts::PI * residue as f64 / m_states as f64).cos();
    }
    Ok(CriterionValue::Approx(acc.abs() / m_states as f64))
}

/// Smallest-magnitude eigenvalue over both cosine grids (for the condition
/// number of the emitted matrix).
fn min_abs_eigenvalue(m_states: usize) -> f64 {
    let (plus, minus) = spectrum_grids(m_states);
    plus.iter()
        .chain(minus.iter())
        .map(|t| t.abs())
        .fold(f64::MAX, f64::min)
}

/// Emits `scale·A` for the cyclic entry construction, with the predicted
/// diagonal value of the requested function at the start index.
pub fn janzing_entry_instance(
    circuit: &Circuit,
    function: &FunctionSpec,
    scale: f64,
    encoding: Encoding,
    caps: &Caps,
) -> Result<ClockInstance> {
    if !(scale > 0.0 && scale <= 1.0) {
        return Err(Error::InvalidParam("scale must lie in (0, 1]".into()));
    }
    function.validate()?;
    let t_gates = circuit.gate_count();
    let m_states = 2 * t_gates + 1;
    let r = circuit.qubits;
    let accept = acceptance(circuit, caps.qubit_cap)?;

    // V_0..V_{T-1} = circuit gates, V_T = phase flip on the answer qubit,
    // V_{T+1}..V_{2T} = the gates reversed (each is self-inverse).
    let mut vseq: Vec<VGate> = circuit.gates.iter().map(|g| VGate::Std(*g)).collect();
    vseq.push(VGate::ZData(0));
    vseq.extend(circuit.gates.iter().rev().map(|g| VGate::Std(*g)));
    debug_assert_eq!(vseq.len(), m_states);

    let transitions: Vec<Transition> = vseq
        .iter()
        .enumerate()
        .map(|(l, &gate)| Transition {
            from: l,
            to: (l + 1) % m_states,
            gate,
            coeff: 0.5 * scale,
        })
        .collect();

    let kappa = scale / (scale * min_abs_eigenvalue(m_states));
    let (access, meta, target_index) = match encoding {
        Encoding::Compact => {
            let m = build_compact_hermitized(m_states, r, &transitions, 0.0)?;
            let meta = InstanceMeta {
                s: Some(4),
                one_norm: Some(m.induced_one_norm()),
                op_norm: Some(scale),
                kappa: Some(kappa),
                pauli_norm: None,
            };
            // start state |y=0>|step_0> sits at index 0 in data-major order
            (AccessForm::Super(m), meta, 0usize)
        }
        Encoding::Unary => {
            let op = build_unary_hermitized(
                m_states as u32,
                r as u32,
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
            let j = unary_step_index(m_states as u32, 0);
            (AccessForm::Pauli(acc), meta, j)
        }
    };

    let predicted = predicted_diagonal(function, m_states, scale, accept);
    let threshold = match function {
        FunctionSpec::Monomial { .. } => Some((0.0, 1.0 / (4.0 * m_states as f64))),
        _ => None,
    };
    Ok(ClockInstance {
        family: FamilyTag::Janzing,
        circuit: circuit.clone(),
        encoding,
        scale,
        instance: Instance::new(access, meta),
        target: Target::Entry {
            i: target_index,
            j: target_index,
        },
        function: *function,
        predicted,
        predicted_tag: "diagonal entry as overlap-weighted sums of f over the two cosine \
                        eigenvalue grids (uniform overlaps |α_0|²/M and |α_1|²/M)"
            .into(),
        normalized_predicted: None,
        threshold,
        acceptance_probability: accept,
        solution_norm: None,
    })
}
