//! Dense brute-force substrate: complex matrices, a cyclic Jacobi
//! eigensolver for Hermitian inputs, exact matrix functions, and the exact
//! entry / local-measurement targets. Correctness over speed; everything here
//! exists so the fast paths have something to be checked against.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pauli::{PauliOperator, PauliString};

pub const HERMITIAN_TOL: f64 = 1e-12;

/// Row-major complex square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl DenseMatrix {
    pub fn zeros(dim: usize) -> Self {
        DenseMatrix {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.dim + j] = v;
    }

    #[inline]
    pub fn add_to(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.dim + j] += v;
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn mul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut out = DenseMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                let orow = other.row(k);
                let out_row = &mut out.data[i * n..(i + 1) * n];
                for j in 0..n {
                    out_row[j] += a * orow[j];
                }
            }
        }
        out
    }

    pub fn add(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.dim, other.dim);
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a += b;
        }
        out
    }

    pub fn sub(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.dim, other.dim);
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a -= b;
        }
        out
    }

    pub fn scale(&self, c: Complex64) -> DenseMatrix {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a *= c;
        }
        out
    }

    pub fn adjoint(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.dim, |i, j| self.get(j, i).conj())
    }

    /// Integer power by repeated squaring.
    pub fn pow_int(&self, mut m: u64) -> DenseMatrix {
        let mut result = DenseMatrix::identity(self.dim);
        let mut base = self.clone();
        while m > 0 {
            if m & 1 == 1 {
                result = result.mul(&base);
            }
            m >>= 1;
            if m > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    pub fn apply_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim);
        (0..self.dim)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .map(|(a, x)| a * x)
                    .sum::<Complex64>()
            })
            .collect()
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for i in 0..self.dim {
            for j in i..self.dim {
                dev = dev.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_deviation() <= tol * self.frobenius_norm().max(1.0)
    }
}

/// Eigendecomposition of a Hermitian matrix: `A = V Λ V†` with `Λ` real
/// ascending and `V` unitary (columns are eigenvectors).
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub vectors: DenseMatrix,
}

impl EigenDecomposition {
    /// Reassembles `Σ_k f(λ_k) v_k v_k†`.
    pub fn assemble(&self, f: impl Fn(f64) -> Complex64) -> DenseMatrix {
        let n = self.eigenvalues.len();
        let v = &self.vectors;
        let mut out = DenseMatrix::zeros(n);
        for k in 0..n {
            let fv = f(self.eigenvalues[k]);
            if fv.norm_sqr() == 0.0 {
                continue;
            }
            for i in 0..n {
                let vik = v.get(i, k);
                if vik.norm_sqr() == 0.0 {
                    continue;
                }
                let c = fv * vik;
                for j in 0..n {
                    out.add_to(i, j, c * v.get(j, k).conj());
                }
            }
        }
        out
    }
}

/// Cyclic Jacobi diagonalization of a complex Hermitian matrix.
///
/// Each rotation removes one off-diagonal pair with a phased Givens rotation;
/// sweeps repeat until the off-diagonal Frobenius mass falls below
/// `1e-12 · ||A||_F`.
pub fn eig_hermitian(a: &DenseMatrix) -> Result<EigenDecomposition> {
    let n = a.dim();
    let dev = a.hermiticity_deviation();
    let scale = a.frobenius_norm().max(1.0);
    if dev > 1e-10 * scale {
        return Err(Error::NonHermitian(dev));
    }
    let mut m = a.clone();
    // Symmetrize exactly so roundoff dust cannot bias the sweeps.
    for i in 0..n {
        for j in 0..n {
            let s = (m.get(i, j) + m.get(j, i).conj()) * 0.5;
            m.set(i, j, s);
            m.set(j, i, s.conj());
        }
    }
    let mut vecs = DenseMatrix::identity(n);
    let target = 1e-12 * a.frobenius_norm();
    let max_sweeps = 80;

    for sweep in 0..max_sweeps {
        let mut off = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                off += 2.0 * m.get(i, j).norm_sqr();
            }
        }
        if off.sqrt() <= target {
            let mut pairs: Vec<(f64, usize)> = (0..n).map(|k| (m.get(k, k).re, k)).collect();
            pairs.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
            let eigenvalues: Vec<f64> = pairs.iter().map(|p| p.0).collect();
            let vectors = DenseMatrix::from_fn(n, |i, k| vecs.get(i, pairs[k].1));
            return Ok(EigenDecomposition {
                eigenvalues,
                vectors,
            });
        }
        let threshold = if sweep < 3 {
            0.2 * off / (n * n) as f64
        } else {
            0.0
        };
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m.get(p, q);
                let mag = apq.norm();
                if mag * mag <= threshold || mag == 0.0 {
                    continue;
                }
                // Phase factor making the pivot real, then a real rotation.
                let w = apq.conj() / mag;
                let app = m.get(p, p).re;
                let aqq = m.get(q, q).re;
                let tau = (aqq - app) / (2.0 * mag);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // G[p,p]=c, G[p,q]=s, G[q,p]=-s*w, G[q,q]=c*w; apply A <- G† A G.
                for i in 0..n {
                    let aip = m.get(i, p);
                    let aiq = m.get(i, q);
                    m.set(i, p, aip * c - aiq * (w * s));
                    m.set(i, q, aip * s + aiq * (w * c));
                }
                for j in 0..n {
                    let apj = m.get(p, j);
                    let aqj = m.get(q, j);
                    m.set(p, j, apj * c - aqj * (w.conj() * s));
                    m.set(q, j, apj * s + aqj * (w.conj() * c));
                }
                for i in 0..n {
                    let vip = vecs.get(i, p);
                    let viq = vecs.get(i, q);
                    vecs.set(i, p, vip * c - viq * (w * s));
                    vecs.set(i, q, vip * s + viq * (w * c));
                }
                // Keep the pivot pair numerically clean.
                let fixed = (m.get(p, q) + m.get(q, p).conj()) * 0.5;
                m.set(p, q, fixed);
                m.set(q, p, fixed.conj());
            }
        }
    }
    Err(Error::NoConvergence(max_sweeps))
}

/// `f(A) = V f(Λ) V†` through the eigendecomposition.
pub fn apply_function(a: &DenseMatrix, f: impl Fn(f64) -> Complex64) -> Result<DenseMatrix> {
    let eig = eig_hermitian(a)?;
    Ok(eig.assemble(f))
}

/// Column index is inside the half-space projector `|0><0| ⊗ 1_{N/2}`
/// exactly when it lies in the lower half of the index range.
#[inline]
pub fn in_projector(index: usize, dim: usize) -> bool {
    index < dim / 2
}

/// Exact `<i|f(A)|j>`.
pub fn exact_entry(
    a: &DenseMatrix,
    f: impl Fn(f64) -> Complex64,
    i: usize,
    j: usize,
) -> Result<Complex64> {
    let n = a.dim();
    if i >= n || j >= n {
        return Err(Error::IndexOutOfRange {
            index: i.max(j),
            dim: n,
        });
    }
    Ok(apply_function(a, f)?.get(i, j))
}

/// Exact `<i|f(A)† π f(A)|i>` with `π` the top-half projector.
pub fn exact_lm(a: &DenseMatrix, f: impl Fn(f64) -> Complex64, i: usize) -> Result<f64> {
    let n = a.dim();
    if i >= n {
        return Err(Error::IndexOutOfRange { index: i, dim: n });
    }
    if n % 2 != 0 {
        return Err(Error::InvalidParam(
            "local measurement needs an even dimension".into(),
        ));
    }
    let fa = apply_function(a, f)?;
    let mut acc = 0.0;
    for k in 0..n {
        if in_projector(k, n) {
            acc += fa.get(k, i).norm_sqr();
        }
    }
    Ok(acc)
}

/// Exact `||f(A)|i>||^2`.
pub fn exact_state_norm_sqr(
    a: &DenseMatrix,
    f: impl Fn(f64) -> Complex64,
    i: usize,
) -> Result<f64> {
    let fa = apply_function(a, f)?;
    let n = a.dim();
    Ok((0..n).map(|k| fa.get(k, i).norm_sqr()).sum())
}

/// Exact normalized local measurement; errors when the state norm collapses.
pub fn exact_normalized_lm(
    a: &DenseMatrix,
    f: impl Fn(f64) -> Complex64 + Copy,
    i: usize,
) -> Result<f64> {
    let num = exact_lm(a, f, i)?;
    let den = exact_state_norm_sqr(a, f, i)?;
    if den < 1e-12 {
        return Err(Error::Singular(den));
    }
    Ok(num / den)
}

/// Reconstructs `<i|A|j>` from diagonal expectation values only, via the
/// polarization identities
/// `2 Re<k|A|j> = (<k|+<j|)A(|k>+|j>) - <k|A|k> - <j|A|j>` and the analogous
/// imaginary form with a phase `i`.
pub fn offdiag_via_diag_check(a: &DenseMatrix, i: usize, j: usize) -> Result<Complex64> {
    let n = a.dim();
    if i >= n || j >= n {
        return Err(Error::IndexOutOfRange {
            index: i.max(j),
            dim: n,
        });
    }
    if i == j {
        return Ok(a.get(i, i));
    }
    let quad = |v: &[Complex64]| -> Complex64 {
        let av = a.apply_vec(v);
        v.iter().zip(&av).map(|(x, y)| x.conj() * y).sum()
    };
    let mut ek = vec![Complex64::new(0.0, 0.0); n];
    ek[i] = Complex64::new(1.0, 0.0);
    let mut ej = vec![Complex64::new(0.0, 0.0); n];
    ej[j] = Complex64::new(1.0, 0.0);

    let akk = quad(&ek);
    let ajj = quad(&ej);
    let mut plus = ek.clone();
    plus[j] += Complex64::new(1.0, 0.0);
    let re_part = (quad(&plus) - akk - ajj).re * 0.5;

    let mut phased = ek.clone();
    phased[j] -= Complex64::new(0.0, 1.0);
    // <(k - i j)|A|(k - i j)> = akk + ajj + 2 Im<k|A|j>
    let im_part = (quad(&phased) - akk - ajj).re * 0.5;
    Ok(Complex64::new(re_part, im_part))
}

/// Exact Pauli decomposition by trace inner products `a_w = Tr[A P_w]/2^n`.
pub fn dense_to_pauli(a: &DenseMatrix) -> Result<PauliOperator> {
    let dim = a.dim();
    if !dim.is_power_of_two() {
        return Err(Error::InvalidParam(
            "Pauli decomposition needs a power-of-two dimension".into(),
        ));
    }
    let n = dim.trailing_zeros();
    if n > 6 {
        return Err(Error::CapExceeded {
            what: "qubits for trace decomposition",
            have: n as u64,
            cap: 6,
        });
    }
    let mut terms = Vec::new();
    for z in 0..(1u64 << n) {
        for x in 0..(1u64 << n) {
            let p = PauliString::from_masks(n, x, z)?;
            // Tr[A P] = Σ_i A[i, i^x] P[i^x, i]
            let mut tr = Complex64::new(0.0, 0.0);
            for i in 0..dim {
                let j = i ^ (x as usize);
                tr += a.get(i, j) * p.entry(j, i)?;
            }
            let coeff = tr / dim as f64;
            if coeff.norm() > 0.0 {
                terms.push((coeff, p));
            }
        }
    }
    Ok(PauliOperator::new((n).max(1), terms))
}
