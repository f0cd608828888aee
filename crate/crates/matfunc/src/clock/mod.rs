//! Circuit model and the five circuit-to-matrix constructions, each emitted
//! as an instance carrying an analytically predicted answer.
//!
//! Every construction couples a clock register to the data register so that
//! a matrix-function value of the coupled operator reveals the circuit's
//! acceptance probability. Two encodings exist: `Compact` keeps the clock
//! as a plain C-level register (dimension `C · 2^r`, indexed data-major as
//! `y·C + ℓ` so the top bit of an index is the first data qubit), and
//! `Unary` spends one qubit per clock value so the operator can be emitted
//! in the Pauli basis.

mod ballistic;
mod hhl;
mod janzing;
mod peres;
mod walk;

pub use ballistic::chebyshev_ballistic_instance;
pub use hhl::hhl_inverse_instance;
pub use janzing::{
    e0_spectral_sum, hardness_criterion, hardness_criterion_chebyshev, janzing_entry_instance,
    CriterionValue,
};
pub use peres::{peres_clock_amplitude, peres_timeevo_instance};
pub use walk::{lazy_chain_distribution, mixing_bound, monomial_walk_lm_instance};

use std::collections::HashMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::access::Instance;
use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::estimate::Target;
use crate::pauli::{decompose_gate, PauliOperator, PauliString};
use crate::poly::FunctionSpec;

/// Generator families exposed through the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FamilyTag {
    #[serde(rename = "janzing")]
    Janzing,
    #[serde(rename = "walk-lm")]
    WalkLm,
    #[serde(rename = "cheby-ballistic")]
    ChebyBallistic,
    #[serde(rename = "peres")]
    Peres,
    #[serde(rename = "hhl")]
    Hhl,
}

impl FamilyTag {
    pub fn parse(text: &str) -> Option<FamilyTag> {
        Some(match text {
            "janzing" => FamilyTag::Janzing,
            "walk-lm" => FamilyTag::WalkLm,
            "cheby-ballistic" => FamilyTag::ChebyBallistic,
            "peres" => FamilyTag::Peres,
            "hhl" => FamilyTag::Hhl,
            _ => return None,
        })
    }

    pub fn tag(&self) -> &'static str {
        match self {
            FamilyTag::Janzing => "janzing",
            FamilyTag::WalkLm => "walk-lm",
            FamilyTag::ChebyBallistic => "cheby-ballistic",
            FamilyTag::Peres => "peres",
            FamilyTag::Hhl => "hhl",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Encoding {
    Compact,
    Unary,
}

/// A generated instance: the matrix in its chosen encoding, the target and
/// function to evaluate on it, and the analytically predicted answer with a
/// provenance tag naming the formula that produced it.
#[derive(Debug, Clone)]
pub struct ClockInstance {
    pub family: FamilyTag,
    pub circuit: Circuit,
    pub encoding: Encoding,
    pub scale: f64,
    pub instance: Instance,
    pub target: Target,
    pub function: FunctionSpec,
    pub predicted: Complex64,
    pub predicted_tag: String,
    /// Predicted value of the normalized local measurement, when the family
    /// defines one.
    pub normalized_predicted: Option<f64>,
    /// Decision thresholds (g, ε) when the family's promise problem fixes
    /// them.
    pub threshold: Option<(f64, f64)>,
    /// `|α_{x,1}|²` from the exact statevector; metadata, never an estimate.
    pub acceptance_probability: f64,
    /// `||A⁻¹|start>||` closed form, where the family provides one.
    pub solution_norm: Option<f64>,
}

/// Gate alphabet inside clock transition sequences: a circuit gate, a Z on
/// a data qubit, or an explicit idle step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VGate {
    Std(Gate),
    ZData(usize),
    Id,
}

impl VGate {
    /// `V|y>` as a list of `(y', amplitude)` with `amplitude = <y'|V|y>`.
    /// All gates here are real and self-adjoint.
    pub fn apply_basis(&self, y: usize, n_qubits: usize) -> Vec<(usize, f64)> {
        let bit_of = |v: usize, q: usize| (v >> (n_qubits - 1 - q)) & 1;
        let mask = |q: usize| 1usize << (n_qubits - 1 - q);
        match *self {
            VGate::Id => vec![(y, 1.0)],
            VGate::ZData(q) => vec![(y, if bit_of(y, q) == 1 { -1.0 } else { 1.0 })],
            VGate::Std(Gate::H(q)) => {
                let b = bit_of(y, q);
                let lo = y & !mask(q);
                let hi = y | mask(q);
                let inv = std::f64::consts::FRAC_1_SQRT_2;
                vec![(lo, inv), (hi, if b == 1 { -inv } else { inv })]
            }
            VGate::Std(Gate::Cnot(c, t)) => {
                if bit_of(y, c) == 1 {
                    vec![(y ^ mask(t), 1.0)]
                } else {
                    vec![(y, 1.0)]
                }
            }
            VGate::Std(Gate::Toffoli(a, b, t)) => {
                if bit_of(y, a) == 1 && bit_of(y, b) == 1 {
                    vec![(y ^ mask(t), 1.0)]
                } else {
                    vec![(y, 1.0)]
                }
            }
        }
    }

    /// Pauli expansion of the gate embedded on `n` data qubits.
    pub fn to_pauli(&self, n: u32) -> Result<PauliOperator> {
        match *self {
            VGate::Id => Ok(PauliOperator::identity(n)),
            VGate::ZData(q) => {
                let mut word = vec!['I'; n as usize];
                word[q] = 'Z';
                Ok(PauliOperator::new(
                    n,
                    vec![(
                        Complex64::new(1.0, 0.0),
                        PauliString::from_word(&word.iter().collect::<String>())?,
                    )],
                ))
            }
            VGate::Std(g) => decompose_gate(&g, n),
        }
    }
}

/// Accumulates (i, j, value) triples with merging, then freezes into a
/// super-sparse matrix.
#[derive(Default)]
pub(crate) struct EntryAccum {
    map: HashMap<(usize, usize), Complex64>,
}

impl EntryAccum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, i: usize, j: usize, v: Complex64) {
        if v.norm_sqr() > 0.0 {
            *self.map.entry((i, j)).or_insert(Complex64::new(0.0, 0.0)) += v;
        }
    }

    pub fn into_supersparse(self, dim: usize) -> Result<crate::access::SuperSparseMatrix> {
        let entries: Vec<(usize, usize, Complex64)> = self
            .map
            .into_iter()
            .filter(|(_, v)| v.norm() > 1e-15)
            .map(|((i, j), v)| (i, j, v))
            .collect();
        crate::access::SuperSparseMatrix::new(dim, entries)
    }
}

/// One clock transition: from clock value, to clock value, the data gate it
/// applies, and its coefficient inside the walk sum.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Transition {
    pub from: usize,
    pub to: usize,
    pub gate: VGate,
    pub coeff: f64,
}

/// Data-major compact index: `y·C + ℓ`.
#[inline]
pub(crate) fn compact_index(y: usize, clock: usize, n_clock: usize) -> usize {
    y * n_clock + clock
}

/// Builds `Σ coeff (T ⊗ V) + h.c.` over a compact clock of `n_clock`
/// values, plus an optional multiple of the identity.
pub(crate) fn build_compact_hermitized(
    n_clock: usize,
    data_qubits: usize,
    transitions: &[Transition],
    identity_coeff: f64,
) -> Result<crate::access::SuperSparseMatrix> {
    let data_dim = 1usize << data_qubits;
    let dim = data_dim * n_clock;
    let mut acc = EntryAccum::new();
    if identity_coeff != 0.0 {
        for idx in 0..dim {
            acc.add(idx, idx, Complex64::new(identity_coeff, 0.0));
        }
    }
    for tr in transitions {
        for y in 0..data_dim {
            for (y_new, amp) in tr.gate.apply_basis(y, data_qubits) {
                let row = compact_index(y_new, tr.to, n_clock);
                let col = compact_index(y, tr.from, n_clock);
                let v = Complex64::new(tr.coeff * amp, 0.0);
                // T ⊗ V and its adjoint (all gates are real symmetric, so
                // the adjoint entry is the plain transpose)
                acc.add(row, col, v);
                acc.add(col, row, v);
            }
        }
    }
    acc.into_supersparse(dim)
}

/// `|new_bit><old_bit|` on one qubit as (coefficient, has_x, has_z) pairs.
fn ketbra1(new_bit: bool, old_bit: bool) -> [(Complex64, bool, bool); 2] {
    match (new_bit, old_bit) {
        (false, false) => [
            (Complex64::new(0.5, 0.0), false, false),
            (Complex64::new(0.5, 0.0), false, true),
        ],
        (true, true) => [
            (Complex64::new(0.5, 0.0), false, false),
            (Complex64::new(-0.5, 0.0), false, true),
        ],
        (false, true) => [
            (Complex64::new(0.5, 0.0), true, false),
            (Complex64::new(0.0, 0.5), true, true),
        ],
        (true, false) => [
            (Complex64::new(0.5, 0.0), true, false),
            (Complex64::new(0.0, -0.5), true, true),
        ],
    }
}

/// Unary clock hop `|step_to><step_from|` restricted to the two qubits that
/// change: a 4-term Pauli operator of norm 1 on `n_clock` qubits.
pub(crate) fn clock_hop(n_clock: u32, from: usize, to: usize) -> Result<PauliOperator> {
    // step_k has qubit k set (and every other clock qubit 0); the hop flips
    // qubit `from` 1->0 and qubit `to` 0->1.
    let fa = ketbra1(false, true); // at qubit `from`
    let fb = ketbra1(true, false); // at qubit `to`
    let mut terms = Vec::with_capacity(4);
    for (ca, xa, za) in &fa {
        for (cb, xb, zb) in &fb {
            let mut x = 0u64;
            let mut z = 0u64;
            let pos = |q: usize| 1u64 << (n_clock as usize - 1 - q);
            if *xa {
                x |= pos(from);
            }
            if *za {
                z |= pos(from);
            }
            if *xb {
                x |= pos(to);
            }
            if *zb {
                z |= pos(to);
            }
            terms.push((ca * cb, PauliString::from_masks(n_clock, x, z)?));
        }
    }
    Ok(PauliOperator::new(n_clock, terms))
}

/// Builds the unary-encoded `Σ coeff (V ⊗ T) + h.c.` (data qubits leading)
/// plus an optional identity part, as a Pauli operator on
/// `data_qubits + n_clock` qubits.
pub(crate) fn build_unary_hermitized(
    n_clock: u32,
    data_qubits: u32,
    transitions: &[Transition],
    identity_coeff: f64,
    qubit_cap: u32,
) -> Result<PauliOperator> {
    let total = data_qubits + n_clock;
    if total > qubit_cap {
        return Err(Error::CapExceeded {
            what: "unary encoding qubits",
            have: total as u64,
            cap: qubit_cap as u64,
        });
    }
    let mut op = PauliOperator::zero(total);
    if identity_coeff != 0.0 {
        op = op.add(&PauliOperator::identity(total).scale(Complex64::new(identity_coeff, 0.0)))?;
    }
    for tr in transitions {
        let data_op = tr.gate.to_pauli(data_qubits)?;
        let hop = clock_hop(n_clock, tr.from, tr.to)?;
        let w_part = data_op
            .tensor(&hop)?
            .scale(Complex64::new(tr.coeff, 0.0));
        op = op.add(&w_part)?.add(&w_part.adjoint())?;
    }
    Ok(op)
}

/// Basis index of the unary clock state `step_k` (bit k set, counted from
/// the most significant clock qubit).
pub(crate) fn unary_step_index(n_clock: u32, k: usize) -> usize {
    1usize << (n_clock as usize - 1 - k)
}

/// Shift a user circuit's gates up by one data qubit (the generated
/// constructions prepend an ancilla as data qubit 0).
pub(crate) fn shifted_gates(circuit: &Circuit) -> Vec<VGate> {
    circuit
        .gates
        .iter()
        .map(|g| VGate::Std(g.shifted(1)))
        .collect()
}

/// `|α_{x,1}|²` of the folded circuit on input zero.
pub(crate) fn acceptance(circuit: &Circuit, qubit_cap: u32) -> Result<f64> {
    crate::circuit::acceptance_probability(circuit, 0, qubit_cap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Gate;

    #[test]
    fn clock_hop_reconstructs_projector() {
        // |step_1><step_0| on 3 clock qubits: maps 100 -> 010
        let hop = clock_hop(3, 0, 1).unwrap();
        assert_eq!(hop.term_count(), 4);
        assert!((hop.pauli_norm() - 1.0).abs() < 1e-12);
        let d = hop.to_dense(12).unwrap();
        let from = unary_step_index(3, 0); // 100 = 4
        let to = unary_step_index(3, 1); // 010 = 2
        for i in 0..8 {
            for j in 0..8 {
                // the embedded operator acts as |01><10| on qubits (0,1)
                // and identity on qubit 2
                let expect = if (i, j) == (to, from) || (i, j) == (to | 1, from | 1) {
                    1.0
                } else {
                    0.0
                };
                assert!(
                    (d.get(i, j) - Complex64::new(expect, 0.0)).norm() < 1e-12,
                    "({i},{j})"
                );
            }
        }
    }

    #[test]
    fn vgate_apply_matches_pauli_form() {
        for (g, n) in [
            (VGate::Std(Gate::H(0)), 2usize),
            (VGate::Std(Gate::Cnot(1, 0)), 2),
            (VGate::ZData(1), 2),
            (VGate::Id, 2),
            (VGate::Std(Gate::Toffoli(0, 1, 2)), 3),
        ] {
            let d = g.to_pauli(n as u32).unwrap().to_dense(12).unwrap();
            let dim = 1usize << n;
            for y in 0..dim {
                let cols = g.apply_basis(y, n);
                for y2 in 0..dim {
                    let expect: f64 = cols
                        .iter()
                        .filter(|(t, _)| *t == y2)
                        .map(|(_, a)| *a)
                        .sum();
                    assert!(
                        (d.get(y2, y) - Complex64::new(expect, 0.0)).norm() < 1e-12,
                        "{g:?} ({y2},{y})"
                    );
                }
            }
        }
    }

    #[test]
    fn cyclic_shift_spectral_decomposition() {
        // The M-cycle S has eigenvalues e^{i2πk/M} with uniform-overlap
        // eigenvectors, and |0> decomposes uniformly over them; the
        // phase-flipped variant S' shifts every eigenvalue by half a step.
        use crate::dense::DenseMatrix;
        let m = 7usize;
        let mut s = DenseMatrix::zeros(m);
        let mut s_flip = DenseMatrix::zeros(m);
        for l in 0..m {
            s.set((l + 1) % m, l, Complex64::new(1.0, 0.0));
            let sign = if l == m - 1 { -1.0 } else { 1.0 };
            s_flip.set((l + 1) % m, l, Complex64::new(sign, 0.0));
        }
        let mut sum_plus = vec![Complex64::new(0.0, 0.0); m];
        let mut sum_minus = vec![Complex64::new(0.0, 0.0); m];
        for k in 0..m {
            let psi_plus: Vec<Complex64> = (0..m)
                .map(|l| {
                    (Complex64::new(0.0, -2.0 * std::f64::consts::PI * (k * l) as f64 / m as f64))
                        .exp()
                        / (m as f64).sqrt()
                })
                .collect();
            let eig_plus =
                Complex64::new(0.0, 2.0 * std::f64::consts::PI * k as f64 / m as f64).exp();
            let image = s.apply_vec(&psi_plus);
            for l in 0..m {
                assert!((image[l] - eig_plus * psi_plus[l]).norm() < 1e-12);
                sum_plus[l] += psi_plus[l] / (m as f64).sqrt();
            }
            let psi_minus: Vec<Complex64> = (0..m)
                .map(|l| {
                    (Complex64::new(
                        0.0,
                        -std::f64::consts::PI * ((2 * k + 1) * l) as f64 / m as f64,
                    ))
                    .exp()
                        / (m as f64).sqrt()
                })
                .collect();
            let eig_minus =
                Complex64::new(0.0, std::f64::consts::PI * (2 * k + 1) as f64 / m as f64).exp();
            let image = s_flip.apply_vec(&psi_minus);
            for l in 0..m {
                assert!((image[l] - eig_minus * psi_minus[l]).norm() < 1e-12);
                sum_minus[l] += psi_minus[l] / (m as f64).sqrt();
            }
        }
        // |0> = (1/√M) Σ_k ψ_k for both families
        for l in 0..m {
            let expect = if l == 0 { 1.0 } else { 0.0 };
            assert!((sum_plus[l] - Complex64::new(expect, 0.0)).norm() < 1e-12);
            assert!((sum_minus[l] - Complex64::new(expect, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn compact_builder_is_hermitian() {
        let transitions = vec![
            Transition {
                from: 0,
                to: 1,
                gate: VGate::Std(Gate::H(0)),
                coeff: 0.5,
            },
            Transition {
                from: 1,
                to: 2,
                gate: VGate::Id,
                coeff: 0.5,
            },
            Transition {
                from: 2,
                to: 0,
                gate: VGate::ZData(0),
                coeff: 0.5,
            },
        ];
        let m = build_compact_hermitized(3, 1, &transitions, 0.25).unwrap();
        let d = m.to_dense(64).unwrap();
        assert!(d.hermiticity_deviation() < 1e-14);
        assert!((d.get(0, 0).re - 0.25).abs() < 1e-14);
    }
}
