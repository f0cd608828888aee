//! Exact polynomial evaluation for matrices with explicitly listed
//! support: computational-basis entry lists (the powers stay inside the
//! k² projector set spanned by the listed rows and columns) and Pauli
//! coefficient lists (the powers stay inside the phase-free closure of the
//! term strings, at most `2^L` words).

use std::collections::HashMap;

use num_complex::Complex64;

use crate::access::{PauliAccess, SuperSparseMatrix};
use crate::dense::in_projector;
use crate::error::{Error, Result};
use crate::pauli::{subgroup_closure, PauliOperator, PauliString};
use crate::poly::PolynomialSpec;
use crate::Caps;

type EntryMap = HashMap<(usize, usize), Complex64>;

/// Accumulated representation of `p(A) = α_0·I + B` where `B` collects all
/// positive powers; `B` is supported on the k² projectors of the listed
/// entries.
struct SuperSparsePoly {
    alpha0: Complex64,
    b: EntryMap,
}

fn apply_poly_cb(ssm: &SuperSparseMatrix, p: &PolynomialSpec, caps: &Caps) -> Result<SuperSparsePoly> {
    let k = ssm.nnz();
    if k * k > caps.closure_terms * 16 {
        return Err(Error::CapExceeded {
            what: "super-sparse projector set k²",
            have: (k * k) as u64,
            cap: (caps.closure_terms * 16) as u64,
        });
    }
    // column index of A: a_col[c] = list of (row a, value v) with A[a,c]=v
    let mut a_col: HashMap<usize, Vec<(usize, Complex64)>> = HashMap::new();
    for &(i, j, v) in ssm.entries() {
        a_col.entry(j).or_default().push((i, v));
    }
    let mut b: EntryMap = HashMap::new();
    // cur = A^d, starting at d = 1
    let mut cur: EntryMap = ssm
        .entries()
        .iter()
        .map(|&(i, j, v)| ((i, j), v))
        .collect();
    for d in 1..=p.degree() {
        let alpha = p.coeff(d);
        if alpha.norm_sqr() > 0.0 {
            for (&key, &w) in &cur {
                *b.entry(key).or_insert(Complex64::new(0.0, 0.0)) += alpha * w;
            }
        }
        if d == p.degree() {
            break;
        }
        // next = A · cur
        let mut next: EntryMap = HashMap::new();
        for (&(c, col), &w) in &cur {
            if let Some(rows) = a_col.get(&c) {
                for &(a, v) in rows {
                    *next.entry((a, col)).or_insert(Complex64::new(0.0, 0.0)) += v * w;
                }
            }
        }
        cur = next;
    }
    Ok(SuperSparsePoly {
        alpha0: p.coeff(0),
        b,
    })
}

/// Exact `<i|p(A)|j>` for an explicitly listed matrix.
pub fn supersparse_entry(
    ssm: &SuperSparseMatrix,
    p: &PolynomialSpec,
    i: usize,
    j: usize,
    caps: &Caps,
) -> Result<Complex64> {
    let dim = ssm.dim();
    if i >= dim || j >= dim {
        return Err(Error::IndexOutOfRange {
            index: i.max(j),
            dim,
        });
    }
    let rep = apply_poly_cb(ssm, p, caps)?;
    let mut acc = rep.b.get(&(i, j)).copied().unwrap_or(Complex64::new(0.0, 0.0));
    if i == j {
        acc += rep.alpha0;
    }
    Ok(acc)
}

/// Exact `<i|p(A)† π p(A)|i>` for an explicitly listed matrix.
pub fn supersparse_lm(
    ssm: &SuperSparseMatrix,
    p: &PolynomialSpec,
    i: usize,
    caps: &Caps,
) -> Result<f64> {
    let dim = ssm.dim();
    if i >= dim {
        return Err(Error::IndexOutOfRange { index: i, dim });
    }
    if dim % 2 != 0 {
        return Err(Error::InvalidParam(
            "local measurement needs an even dimension".into(),
        ));
    }
    let rep = apply_poly_cb(ssm, p, caps)?;
    // p(A)|i> = α_0|i> + Σ_a B[a,i]|a>
    let mut column: HashMap<usize, Complex64> = HashMap::new();
    for (&(a, col), &w) in &rep.b {
        if col == i {
            *column.entry(a).or_insert(Complex64::new(0.0, 0.0)) += w;
        }
    }
    *column.entry(i).or_insert(Complex64::new(0.0, 0.0)) += rep.alpha0;
    Ok(column
        .iter()
        .filter(|(&a, _)| in_projector(a, dim))
        .map(|(_, v)| v.norm_sqr())
        .sum())
}

/// Exact `||p(A)|i>||²` for an explicitly listed matrix.
pub fn supersparse_state_norm_sqr(
    ssm: &SuperSparseMatrix,
    p: &PolynomialSpec,
    i: usize,
    caps: &Caps,
) -> Result<f64> {
    let rep = apply_poly_cb(ssm, p, caps)?;
    let mut column: HashMap<usize, Complex64> = HashMap::new();
    for (&(a, col), &w) in &rep.b {
        if col == i {
            *column.entry(a).or_insert(Complex64::new(0.0, 0.0)) += w;
        }
    }
    *column.entry(i).or_insert(Complex64::new(0.0, 0.0)) += rep.alpha0;
    Ok(column.values().map(|v| v.norm_sqr()).sum())
}

/// Exact Pauli representation of `p(A)` by folding repeated products into
/// the phase-free closure basis of the term strings. Errors when the
/// closure would exceed the configured cap.
pub fn pauli_supersparse_apply(
    acc: &PauliAccess,
    p: &PolynomialSpec,
    caps: &Caps,
) -> Result<PauliOperator> {
    let op = acc.operator();
    let n = op.n_qubits();
    let strings: Vec<PauliString> = op.terms().iter().map(|(_, s)| *s).collect();
    let closure = subgroup_closure(n, &strings)?;
    if closure.len() > caps.closure_terms {
        return Err(Error::CapExceeded {
            what: "Pauli closure size",
            have: closure.len() as u64,
            cap: caps.closure_terms as u64,
        });
    }
    let mut result: HashMap<PauliString, Complex64> = HashMap::new();
    let mut cur: HashMap<PauliString, Complex64> = HashMap::new();
    cur.insert(PauliString::identity(n), Complex64::new(1.0, 0.0));
    let alpha0 = p.coeff(0);
    if alpha0.norm_sqr() > 0.0 {
        result.insert(PauliString::identity(n), alpha0);
    }
    for d in 1..=p.degree() {
        let mut next: HashMap<PauliString, Complex64> = HashMap::with_capacity(cur.len() * 2);
        for (coeff, s) in op.terms() {
            for (q, w) in &cur {
                let (phase, r) = s.multiply(q)?;
                *next.entry(r).or_insert(Complex64::new(0.0, 0.0)) += coeff * w * phase;
            }
        }
        cur = next;
        debug_assert!(cur.len() <= closure.len());
        let alpha = p.coeff(d);
        if alpha.norm_sqr() > 0.0 {
            for (s, w) in &cur {
                *result.entry(*s).or_insert(Complex64::new(0.0, 0.0)) += alpha * w;
            }
        }
    }
    Ok(PauliOperator::new(
        n,
        result.into_iter().map(|(s, c)| (c, s)).collect(),
    ))
}

/// Entry of an explicitly represented operator.
pub fn pauli_rep_entry(rep: &PauliOperator, i: usize, j: usize) -> Result<Complex64> {
    rep.entry(i, j)
}

/// `<i|R† π R|i>` for an explicit Pauli representation `R`, evaluated as
/// the double sum over term pairs sandwiching `π = (1 + Z_first)/2`.
/// Pairs only contribute when the X masks of the two words coincide.
pub fn pauli_rep_lm(rep: &PauliOperator, i: usize) -> Result<f64> {
    let n = rep.n_qubits();
    let dim = rep.dim();
    if i >= dim {
        return Err(Error::IndexOutOfRange { index: i, dim });
    }
    let z_first = PauliString::from_masks(n, 0, 1u64 << (n - 1))?;
    let mut groups: HashMap<u64, Vec<(Complex64, PauliString)>> = HashMap::new();
    for (c, s) in rep.terms() {
        groups.entry(s.x_bits()).or_default().push((*c, *s));
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for terms in groups.values() {
        for (c1, s1) in terms {
            for (c2, s2) in terms {
                // <i| s1† (1 + Z_first)/2 s2 |i>
                let (ph_a, prod) = s1.multiply(s2)?;
                let direct = ph_a * prod.entry(i, i)?;
                let (ph_b, mid) = s1.multiply(&z_first)?;
                let (ph_c, prod_z) = mid.multiply(s2)?;
                let with_z = ph_b * ph_c * prod_z.entry(i, i)?;
                acc += c1.conj() * c2 * (direct + with_z) * 0.5;
            }
        }
    }
    Ok(acc.re)
}

/// `||R|i>||²` for an explicit Pauli representation.
pub fn pauli_rep_state_norm_sqr(rep: &PauliOperator, i: usize) -> Result<f64> {
    // R|i> = Σ_q c_q · entry_q · |i ^ x_q>; group amplitudes by target index
    let mut amps: HashMap<usize, Complex64> = HashMap::new();
    for (c, s) in rep.terms() {
        let target = i ^ s.x_bits() as usize;
        *amps.entry(target).or_insert(Complex64::new(0.0, 0.0)) += c * s.entry(target, i)?;
    }
    Ok(amps.values().map(|v| v.norm_sqr()).sum())
}
