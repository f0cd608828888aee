//! The three matrix access forms the estimators are parameterized over —
//! callable sparse oracles, explicit Pauli coefficient lists with an
//! l1 sampler, and explicit super-sparse entry lists — plus norm
//! computation and conversions between them.
//!
//! Oracles carry declared metadata (sparsity and norm bounds) that the
//! algorithms trust; [`SparseOracle::audit`] re-derives everything
//! exhaustively at small dimension for verification runs.

use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dense::{self, DenseMatrix};
use crate::error::{Error, Result};
use crate::pauli::{PauliOperator, PauliString};
use crate::rngutil;

type RowFn = dyn Fn(usize, usize) -> Option<usize> + Send + Sync;
type EntryFn = dyn Fn(usize, usize) -> Complex64 + Send + Sync;

/// Callable sparse access: neighbor lists by slot for rows and columns and
/// an entry function, with declared row/column sparsity.
#[derive(Clone)]
pub struct SparseOracle {
    dim: usize,
    sparsity: usize,
    row_fn: Arc<RowFn>,
    col_fn: Arc<RowFn>,
    entry_fn: Arc<EntryFn>,
}

impl std::fmt::Debug for SparseOracle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SparseOracle")
            .field("dim", &self.dim)
            .field("sparsity", &self.sparsity)
            .finish()
    }
}

impl SparseOracle {
    pub fn new(
        dim: usize,
        sparsity: usize,
        row_fn: Arc<RowFn>,
        col_fn: Arc<RowFn>,
        entry_fn: Arc<EntryFn>,
    ) -> Self {
        SparseOracle {
            dim,
            sparsity,
            row_fn,
            col_fn,
            entry_fn,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn sparsity(&self) -> usize {
        self.sparsity
    }

    /// Column index of the k-th stored entry of row `i`.
    pub fn row_neighbor(&self, i: usize, k: usize) -> Option<usize> {
        (self.row_fn)(i, k)
    }

    /// Row index of the l-th stored entry of column `j`.
    pub fn col_neighbor(&self, j: usize, l: usize) -> Option<usize> {
        (self.col_fn)(j, l)
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        (self.entry_fn)(i, j)
    }

    pub fn row_entries(&self, i: usize) -> Vec<(usize, Complex64)> {
        let mut out = Vec::with_capacity(self.sparsity);
        for k in 0..self.sparsity {
            if let Some(j) = self.row_neighbor(i, k) {
                let v = self.entry(i, j);
                if v.norm_sqr() > 0.0 {
                    out.push((j, v));
                }
            }
        }
        out
    }

    pub fn col_entries(&self, j: usize) -> Vec<(usize, Complex64)> {
        let mut out = Vec::with_capacity(self.sparsity);
        for l in 0..self.sparsity {
            if let Some(i) = self.col_neighbor(j, l) {
                let v = self.entry(i, j);
                if v.norm_sqr() > 0.0 {
                    out.push((i, v));
                }
            }
        }
        out
    }

    /// `Σ_i |A_{ij}|` over the stored column entries.
    pub fn column_abs_sum(&self, j: usize) -> f64 {
        self.col_entries(j).iter().map(|(_, v)| v.norm()).sum()
    }

    /// Max column absolute sum by exhaustive scan; capped because it walks
    /// the whole index range.
    pub fn induced_one_norm(&self, dense_cap: usize) -> Result<f64> {
        if self.dim > dense_cap {
            return Err(Error::CapExceeded {
                what: "columns scanned for the induced 1-norm",
                have: self.dim as u64,
                cap: dense_cap as u64,
            });
        }
        Ok((0..self.dim)
            .map(|j| self.column_abs_sum(j))
            .fold(0.0, f64::max))
    }

    pub fn to_dense(&self, dense_cap: usize) -> Result<DenseMatrix> {
        if self.dim > dense_cap {
            return Err(Error::CapExceeded {
                what: "sparse oracle densification",
                have: self.dim as u64,
                cap: dense_cap as u64,
            });
        }
        let mut m = DenseMatrix::zeros(self.dim);
        for i in 0..self.dim {
            for (j, v) in self.row_entries(i) {
                m.set(i, j, v);
            }
        }
        Ok(m)
    }

    /// Spot audit: Hermiticity on sampled pairs (min(N², 10^4) of them) and
    /// declared sparsity on sampled rows/columns.
    pub fn audit(&self, seed: u64) -> Result<()> {
        let mut rng = rngutil::substream(seed, 0);
        let pairs = (self.dim * self.dim).min(10_000);
        for _ in 0..pairs {
            let i = rng.gen_range(0..self.dim);
            let j = rng.gen_range(0..self.dim);
            let dev = (self.entry(i, j) - self.entry(j, i).conj()).norm();
            if dev > 1e-10 {
                return Err(Error::NonHermitian(dev));
            }
        }
        let rows = self.dim.min(1_000);
        for _ in 0..rows {
            let i = rng.gen_range(0..self.dim);
            if self.row_entries(i).len() > self.sparsity {
                return Err(Error::InvalidParam(format!(
                    "row {i} exceeds declared sparsity {}",
                    self.sparsity
                )));
            }
            if self.col_entries(i).len() > self.sparsity {
                return Err(Error::InvalidParam(format!(
                    "column {i} exceeds declared sparsity {}",
                    self.sparsity
                )));
            }
        }
        Ok(())
    }
}

/// Explicit list of non-zero computational-basis entries.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperSparseMatrix {
    dim: usize,
    entries: Vec<(usize, usize, Complex64)>,
}

impl SuperSparseMatrix {
    /// Requires Hermitian closure: for every stored `(i,j,v)` the matching
    /// `(j,i,conj v)` must be present (the diagonal must be real), and no
    /// duplicate positions.
    pub fn new(dim: usize, entries: Vec<(usize, usize, Complex64)>) -> Result<Self> {
        let mut seen: HashMap<(usize, usize), Complex64> = HashMap::new();
        for &(i, j, v) in &entries {
            if i >= dim || j >= dim {
                return Err(Error::IndexOutOfRange {
                    index: i.max(j),
                    dim,
                });
            }
            if seen.insert((i, j), v).is_some() {
                return Err(Error::InvalidParam(format!("duplicate entry ({i},{j})")));
            }
        }
        for (&(i, j), &v) in &seen {
            let partner = seen.get(&(j, i)).copied().unwrap_or(Complex64::new(0.0, 0.0));
            if (partner - v.conj()).norm() > 1e-10 {
                return Err(Error::NonHermitian((partner - v.conj()).norm()));
            }
        }
        Ok(SuperSparseMatrix { dim, entries })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[(usize, usize, Complex64)] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn scale(&self, c: f64) -> SuperSparseMatrix {
        SuperSparseMatrix {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .map(|&(i, j, v)| (i, j, v * c))
                .collect(),
        }
    }

    pub fn max_row_col_occupancy(&self) -> usize {
        let mut rows: HashMap<usize, usize> = HashMap::new();
        let mut cols: HashMap<usize, usize> = HashMap::new();
        for &(i, j, _) in &self.entries {
            *rows.entry(i).or_insert(0) += 1;
            *cols.entry(j).or_insert(0) += 1;
        }
        rows.values()
            .chain(cols.values())
            .copied()
            .max()
            .unwrap_or(0)
    }

    /// Max column absolute sum (exact; the entry list is complete).
    pub fn induced_one_norm(&self) -> f64 {
        let mut sums: HashMap<usize, f64> = HashMap::new();
        for &(_, j, v) in &self.entries {
            *sums.entry(j).or_insert(0.0) += v.norm();
        }
        sums.values().copied().fold(0.0, f64::max)
    }

    pub fn to_dense(&self, dense_cap: usize) -> Result<DenseMatrix> {
        if self.dim > dense_cap {
            return Err(Error::CapExceeded {
                what: "super-sparse densification",
                have: self.dim as u64,
                cap: dense_cap as u64,
            });
        }
        let mut m = DenseMatrix::zeros(self.dim);
        for &(i, j, v) in &self.entries {
            m.set(i, j, v);
        }
        Ok(m)
    }

    /// Sparse-oracle view with per-row/column neighbor tables.
    pub fn to_oracle(&self) -> SparseOracle {
        let mut rows: HashMap<usize, Vec<usize>> = HashMap::new();
        let mut cols: HashMap<usize, Vec<usize>> = HashMap::new();
        let mut values: HashMap<(usize, usize), Complex64> = HashMap::new();
        for &(i, j, v) in &self.entries {
            rows.entry(i).or_default().push(j);
            cols.entry(j).or_default().push(i);
            values.insert((i, j), v);
        }
        for v in rows.values_mut() {
            v.sort_unstable();
        }
        for v in cols.values_mut() {
            v.sort_unstable();
        }
        let sparsity = self.max_row_col_occupancy().max(1);
        let rows = Arc::new(rows);
        let cols = Arc::new(cols);
        let values = Arc::new(values);
        let r = rows.clone();
        let c = cols.clone();
        let v1 = values.clone();
        SparseOracle::new(
            self.dim,
            sparsity,
            Arc::new(move |i, k| r.get(&i).and_then(|list| list.get(k)).copied()),
            Arc::new(move |j, l| c.get(&j).and_then(|list| list.get(l)).copied()),
            Arc::new(move |i, j| {
                v1.get(&(i, j))
                    .copied()
                    .unwrap_or(Complex64::new(0.0, 0.0))
            }),
        )
    }
}

/// Pauli access: an explicit Hermitian Pauli decomposition together with the
/// prefix sums of `|a_l|/λ` used for l1 sampling.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliAccess {
    operator: PauliOperator,
    cumulative: Vec<f64>,
}

impl PauliAccess {
    /// Hermiticity here means real coefficients on the canonical (Y-phased)
    /// words; imaginary dust below `1e-10·λ` is zeroed, anything larger is
    /// rejected.
    pub fn new(operator: PauliOperator) -> Result<Self> {
        let lambda = operator.pauli_norm();
        let mut clean = Vec::with_capacity(operator.term_count());
        for (c, s) in operator.terms() {
            if c.im.abs() > 1e-10 * lambda.max(1e-300) {
                return Err(Error::NonHermitian(c.im.abs()));
            }
            clean.push((Complex64::new(c.re, 0.0), *s));
        }
        let operator = PauliOperator::new(operator.n_qubits(), clean);
        let lambda = operator.pauli_norm();
        let mut cumulative = Vec::with_capacity(operator.term_count());
        let mut acc = 0.0;
        for (c, _) in operator.terms() {
            acc += c.norm() / lambda;
            cumulative.push(acc);
        }
        if let Some(last) = cumulative.last_mut() {
            if (*last - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidParam(format!(
                    "cumulative weights end at {last}, not 1"
                )));
            }
            *last = 1.0;
        }
        Ok(PauliAccess {
            operator,
            cumulative,
        })
    }

    pub fn operator(&self) -> &PauliOperator {
        &self.operator
    }

    pub fn n_qubits(&self) -> u32 {
        self.operator.n_qubits()
    }

    pub fn dim(&self) -> usize {
        self.operator.dim()
    }

    pub fn pauli_norm(&self) -> f64 {
        self.operator.pauli_norm()
    }

    pub fn term_count(&self) -> usize {
        self.operator.term_count()
    }

    /// Draws a term index with probability `|a_l|/λ`, returning the index
    /// and the sign `a_l/|a_l|`.
    pub fn sample_term<R: Rng>(&self, rng: &mut R) -> Result<(usize, Complex64)> {
        if self.operator.term_count() == 0 || self.pauli_norm() == 0.0 {
            return Err(Error::ZeroOperator);
        }
        let u: f64 = rng.gen();
        let idx = rngutil::sample_cumulative(&self.cumulative, u);
        let (c, _) = self.operator.terms()[idx];
        Ok((idx, c / c.norm()))
    }

    /// Sparse-oracle view: row `i` has one candidate neighbor `i ^ x` per
    /// distinct X mask among the terms, and entries sum the matching words.
    pub fn to_sparse_oracle(&self) -> SparseOracle {
        let mut by_x: HashMap<u64, Vec<(Complex64, PauliString)>> = HashMap::new();
        for (c, s) in self.operator.terms() {
            by_x.entry(s.x_bits()).or_default().push((*c, *s));
        }
        let mut x_masks: Vec<u64> = by_x.keys().copied().collect();
        x_masks.sort_unstable();
        let dim = self.operator.dim();
        let sparsity = x_masks.len().max(1);
        let by_x = Arc::new(by_x);
        let masks_row = Arc::new(x_masks);
        let masks_col = masks_row.clone();
        let groups = by_x.clone();
        SparseOracle::new(
            dim,
            sparsity,
            Arc::new(move |i, k| {
                // neighbors are deduplicated by construction: XOR with
                // distinct masks yields distinct columns
                masks_row.get(k).map(|&x| i ^ x as usize)
            }),
            Arc::new(move |j, l| masks_col.get(l).map(|&x| j ^ x as usize)),
            Arc::new(move |i, j| {
                let x = (i ^ j) as u64;
                match groups.get(&x) {
                    None => Complex64::new(0.0, 0.0),
                    Some(terms) => terms
                        .iter()
                        .map(|(c, s)| c * s.entry(i, j).expect("index in range"))
                        .sum(),
                }
            }),
        )
    }
}

/// `max |eigenvalue|` from the dense eigendecomposition.
pub fn operator_norm(d: &DenseMatrix) -> Result<f64> {
    let eig = dense::eig_hermitian(d)?;
    Ok(eig
        .eigenvalues
        .iter()
        .fold(0.0f64, |m, &l| m.max(l.abs())))
}

/// `max|λ| / min|λ|`; errors when an eigenvalue sits below 1e-12 in
/// magnitude.
pub fn condition_number(d: &DenseMatrix) -> Result<f64> {
    let eig = dense::eig_hermitian(d)?;
    let hi = eig.eigenvalues.iter().fold(0.0f64, |m, &l| m.max(l.abs()));
    let lo = eig
        .eigenvalues
        .iter()
        .fold(f64::MAX, |m, &l| m.min(l.abs()));
    if lo < 1e-12 {
        return Err(Error::Singular(lo));
    }
    Ok(hi / lo)
}

/// Max column absolute sum of a dense matrix.
pub fn dense_induced_one_norm(d: &DenseMatrix) -> f64 {
    let n = d.dim();
    (0..n)
        .map(|j| (0..n).map(|i| d.get(i, j).norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Declared instance metadata: sparsity and norm bounds the algorithms may
/// rely on. Serialized inside the instance envelope.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct InstanceMeta {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub one_norm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pauli_norm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub op_norm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
}

impl InstanceMeta {
    /// Spectral-gap margin η with `||A|| ≤ 1-η`, when declared.
    pub fn eta(&self) -> Option<f64> {
        self.op_norm.and_then(|n| if n < 1.0 { Some(1.0 - n) } else { None })
    }
}

/// A matrix in one of the four access forms.
#[derive(Debug, Clone)]
pub enum AccessForm {
    Sparse(SparseOracle),
    Pauli(PauliAccess),
    Super(SuperSparseMatrix),
    Dense(DenseMatrix),
}

impl AccessForm {
    pub fn dim(&self) -> usize {
        match self {
            AccessForm::Sparse(o) => o.dim(),
            AccessForm::Pauli(p) => p.dim(),
            AccessForm::Super(s) => s.dim(),
            AccessForm::Dense(d) => d.dim(),
        }
    }

    pub fn model_name(&self) -> &'static str {
        match self {
            AccessForm::Sparse(_) => "sparse",
            AccessForm::Pauli(_) => "pauli",
            AccessForm::Super(_) => "supersparse",
            AccessForm::Dense(_) => "dense",
        }
    }

    pub fn to_dense(&self, dense_cap: usize) -> Result<DenseMatrix> {
        match self {
            AccessForm::Sparse(o) => o.to_dense(dense_cap),
            AccessForm::Pauli(p) => p.operator().to_dense(dense_cap.trailing_zeros().max(1)),
            AccessForm::Super(s) => s.to_dense(dense_cap),
            AccessForm::Dense(d) => Ok(d.clone()),
        }
    }
}

/// An access form with its declared metadata.
#[derive(Debug, Clone)]
pub struct Instance {
    pub access: AccessForm,
    pub meta: InstanceMeta,
}

impl Instance {
    pub fn new(access: AccessForm, meta: InstanceMeta) -> Self {
        Instance { access, meta }
    }

    pub fn dim(&self) -> usize {
        self.access.dim()
    }
}

/// Exhaustive desk-scale audit: every declared metadata field is checked
/// against the actual matrix content (densifying when the dimension allows)
/// and each violated declaration is reported. Algorithms trust
/// declarations; this is the verification-mode backstop.
pub fn audit_instance(inst: &Instance, dense_cap: usize, seed: u64) -> Result<Vec<String>> {
    let mut violations = Vec::new();
    let tol = 1e-9;
    let meta = &inst.meta;
    // structural checks per form
    match &inst.access {
        AccessForm::Sparse(o) => {
            if let Err(e) = o.audit(seed) {
                violations.push(format!("oracle audit: {e}"));
            }
        }
        AccessForm::Super(s) => {
            if let Some(decl) = meta.s {
                let occ = s.max_row_col_occupancy();
                if occ > decl {
                    violations.push(format!("occupancy {occ} exceeds declared s = {decl}"));
                }
            }
            if let Some(decl) = meta.one_norm {
                let actual = s.induced_one_norm();
                if actual > decl + tol {
                    violations.push(format!(
                        "induced 1-norm {actual:.6} exceeds declared {decl:.6}"
                    ));
                }
            }
        }
        AccessForm::Pauli(p) => {
            if let Some(decl) = meta.pauli_norm {
                let actual = p.pauli_norm();
                if (actual - decl).abs() > tol * decl.max(1.0) {
                    violations.push(format!(
                        "Pauli norm {actual:.6} differs from declared {decl:.6}"
                    ));
                }
            }
        }
        AccessForm::Dense(d) => {
            if !d.is_hermitian(1e-10) {
                violations.push("dense form is not Hermitian".into());
            }
        }
    }
    // spectral declarations need the dense form
    if meta.op_norm.is_some() || meta.kappa.is_some() {
        let dense = match &inst.access {
            AccessForm::Pauli(p) => {
                let n = p.n_qubits();
                if (1usize << n) <= dense_cap {
                    Some(p.operator().to_dense(n)?)
                } else {
                    None
                }
            }
            other => {
                if other.dim() <= dense_cap {
                    Some(other.to_dense(dense_cap)?)
                } else {
                    None
                }
            }
        };
        if let Some(d) = dense {
            if let Some(decl) = meta.op_norm {
                let actual = operator_norm(&d)?;
                if actual > decl + tol {
                    violations.push(format!(
                        "operator norm {actual:.9} exceeds declared {decl:.9}"
                    ));
                }
            }
            if let Some(decl) = meta.kappa {
                match condition_number(&d) {
                    Ok(actual) => {
                        if actual > decl + tol {
                            violations.push(format!(
                                "condition number {actual:.6} exceeds declared {decl:.6}"
                            ));
                        }
                    }
                    Err(_) => violations.push("declared condition number but the matrix is singular".into()),
                }
            }
        }
    }
    Ok(violations)
}
