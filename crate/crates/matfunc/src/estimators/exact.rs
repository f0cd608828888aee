//! Exact sparse-path evaluation: the `O(s^m)` neighbor recursion for
//! `[A^m]_{ij}`, its projector-sandwiched form, and polynomial sums over
//! both.

use std::collections::HashMap;

use num_complex::Complex64;

use crate::access::SparseOracle;
use crate::dense::in_projector;
use crate::error::{Error, Result};
use crate::poly::PolynomialSpec;
use crate::Caps;

/// The recursion visits at most `s^m` leaves, but distinct subproblems are
/// capped by `dim·(m+1)`, so memoized evaluation costs
/// `min(s^m, dim·(m+1)·s)` operations. Either bound under the cap admits
/// the call.
fn check_work(m: usize, sparsity: usize, dim: usize, caps: &Caps) -> Result<()> {
    let log_s = (sparsity.max(1) as f64).log2();
    let raw = m as f64 * log_s;
    let memo = (dim as f64 * (m + 1) as f64 * sparsity.max(1) as f64).log2();
    if raw.min(memo) > caps.path_work_log2 {
        return Err(Error::CapExceeded {
            what: "exact path work",
            have: raw.min(memo).ceil() as u64,
            cap: caps.path_work_log2 as u64,
        });
    }
    Ok(())
}

fn entry_rec(
    o: &SparseOracle,
    i: usize,
    j: usize,
    m: usize,
    memo: &mut HashMap<(usize, usize), Complex64>,
) -> Complex64 {
    if m == 0 {
        return if i == j {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        };
    }
    if let Some(&v) = memo.get(&(i, m)) {
        return v;
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for (k, v) in o.row_entries(i) {
        acc += v * entry_rec(o, k, j, m - 1, memo);
    }
    memo.insert((i, m), acc);
    acc
}

/// Exact `[A^m]_{ij}` by the recursive row expansion (memoized on shared
/// subproblems).
pub fn exact_entry_path(
    o: &SparseOracle,
    i: usize,
    j: usize,
    m: usize,
    caps: &Caps,
) -> Result<Complex64> {
    let dim = o.dim();
    if i >= dim || j >= dim {
        return Err(Error::IndexOutOfRange {
            index: i.max(j),
            dim,
        });
    }
    check_work(m, o.sparsity(), dim, caps)?;
    let mut memo = HashMap::new();
    Ok(entry_rec(o, i, j, m, &mut memo))
}

type LmMemo = HashMap<(usize, usize, usize, usize), Complex64>;

fn lm_rec(o: &SparseOracle, i: usize, j: usize, m1: usize, m2: usize, memo: &mut LmMemo) -> Complex64 {
    if let Some(&v) = memo.get(&(i, j, m1, m2)) {
        return v;
    }
    let out = if m2 > 0 {
        // peel A off the right: Σ_t [A^{m1} π A^{m2-1}]_{i,t} A_{t,j}
        let mut acc = Complex64::new(0.0, 0.0);
        for (t, v) in o.col_entries(j) {
            acc += lm_rec(o, i, t, m1, m2 - 1, memo) * v;
        }
        acc
    } else if m1 > 0 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, v) in o.row_entries(i) {
            acc += v * lm_rec(o, k, j, m1 - 1, 0, memo);
        }
        acc
    } else if i == j && in_projector(i, o.dim()) {
        Complex64::new(1.0, 0.0)
    } else {
        Complex64::new(0.0, 0.0)
    };
    memo.insert((i, j, m1, m2), out);
    out
}

/// Exact `<i|A^{m1} π A^{m2}|j>` with `π` the top-half projector.
pub fn exact_lm_path(
    o: &SparseOracle,
    i: usize,
    j: usize,
    m1: usize,
    m2: usize,
    caps: &Caps,
) -> Result<Complex64> {
    let dim = o.dim();
    if i >= dim || j >= dim {
        return Err(Error::IndexOutOfRange {
            index: i.max(j),
            dim,
        });
    }
    if dim % 2 != 0 {
        return Err(Error::InvalidParam(
            "local measurement needs an even dimension".into(),
        ));
    }
    check_work(m1 + m2, o.sparsity(), dim * dim, caps)?;
    let mut memo = HashMap::new();
    Ok(lm_rec(o, i, j, m1, m2, &mut memo))
}

/// Exact `<i|p(A)|j>` as the coefficient-weighted sum of monomial entries.
pub fn exact_entry_poly(
    o: &SparseOracle,
    p: &PolynomialSpec,
    i: usize,
    j: usize,
    caps: &Caps,
) -> Result<Complex64> {
    check_work(p.degree(), o.sparsity(), o.dim(), caps)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for (k, &alpha) in p.coeffs().iter().enumerate() {
        if alpha.norm_sqr() == 0.0 {
            continue;
        }
        acc += alpha * exact_entry_path(o, i, j, k, caps)?;
    }
    Ok(acc)
}

/// Exact `<i|p(A)† π p(A)|i>` as the double sum over monomial pairs.
pub fn exact_lm_poly(
    o: &SparseOracle,
    p: &PolynomialSpec,
    i: usize,
    caps: &Caps,
) -> Result<Complex64> {
    check_work(2 * p.degree(), o.sparsity(), o.dim() * o.dim(), caps)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for (r, &a) in p.coeffs().iter().enumerate() {
        if a.norm_sqr() == 0.0 {
            continue;
        }
        for (s, &b) in p.coeffs().iter().enumerate() {
            if b.norm_sqr() == 0.0 {
                continue;
            }
            acc += a.conj() * b * exact_lm_path(o, i, i, r, s, caps)?;
        }
    }
    Ok(acc)
}
