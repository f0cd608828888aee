//! Scalar function families and their polynomial-coefficient
//! representations with certified approximation error.
//!
//! Monomial-basis coefficient vectors drive the estimators (degree sampling
//! and l1 weights); the certification routines evaluate the same
//! polynomials through numerically stable routes (three-term recurrences or
//! closed forms), because a monomial-basis Horner sum is ill-conditioned
//! once coefficients reach `4^m`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Monomial-basis coefficient vector `α_0 … α_m`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialSpec {
    coeffs: Vec<Complex64>,
}

impl PolynomialSpec {
    /// Trailing zero coefficients are trimmed so `degree` is meaningful.
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.len() > 1 && coeffs.last().map(|c| c.norm()) == Some(0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(Complex64::new(0.0, 0.0));
        }
        PolynomialSpec { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn monomial(m: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); m + 1];
        coeffs[m] = Complex64::new(1.0, 0.0);
        PolynomialSpec { coeffs }
    }

    pub fn constant(c: Complex64) -> Self {
        PolynomialSpec { coeffs: vec![c] }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs
            .get(k)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// Horner evaluation at a complex point.
    pub fn eval(&self, x: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// `Σ_r |α_r| b^r`, the l1 weight after rescaling the argument by `b`.
    pub fn l1_rescaled_norm(&self, b: f64) -> f64 {
        let mut acc = 0.0;
        let mut p = 1.0;
        for c in &self.coeffs {
            acc += c.norm() * p;
            p *= b;
        }
        acc
    }

    /// Odd part `(f(x) - f(-x))/2`.
    pub fn odd_part(&self) -> PolynomialSpec {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, &c)| if k % 2 == 1 { c } else { Complex64::new(0.0, 0.0) })
            .collect();
        PolynomialSpec::new(coeffs)
    }

    /// Coefficients of `conj(f)(x)·f(x)` (the polynomial whose matrix value
    /// is `f(A)† f(A)` for Hermitian `A`).
    pub fn abs_square(&self) -> PolynomialSpec {
        let n = self.coeffs.len();
        let mut out = vec![Complex64::new(0.0, 0.0); 2 * n - 1];
        for (r, &a) in self.coeffs.iter().enumerate() {
            for (s, &b) in self.coeffs.iter().enumerate() {
                out[r + s] += a.conj() * b;
            }
        }
        PolynomialSpec::new(out)
    }

    /// Product of two polynomials (convolution of coefficients).
    pub fn mul(&self, other: &PolynomialSpec) -> PolynomialSpec {
        let mut out = vec![Complex64::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (r, &a) in self.coeffs.iter().enumerate() {
            for (s, &b) in other.coeffs.iter().enumerate() {
                out[r + s] += a * b;
            }
        }
        PolynomialSpec::new(out)
    }

    /// Largest coefficient magnitude.
    pub fn max_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Multiplies every coefficient by a constant.
    pub fn scale_coeffs(&self, c: Complex64) -> PolynomialSpec {
        PolynomialSpec::new(self.coeffs.iter().map(|&a| a * c).collect())
    }

    /// Rescales the argument: returns coefficients of `f(x/γ)` — i.e.
    /// `α_k / γ^k` — so a polynomial built for the normalized matrix `A/γ`
    /// can be applied to `A` itself.
    pub fn compose_scale_inv(&self, gamma: f64) -> PolynomialSpec {
        let mut p = 1.0;
        let coeffs = self
            .coeffs
            .iter()
            .map(|&c| {
                let out = c / p;
                p *= gamma;
                out
            })
            .collect();
        PolynomialSpec::new(coeffs)
    }
}

/// Chebyshev polynomial of the first kind, exact coefficients.
///
/// The recurrence `T_{k+1} = 2x T_k - T_{k-1}` runs in 128-bit integers up
/// to degree 60 (coefficients are bounded by `4^m` and stay exact there);
/// beyond that it continues in floating point, where coefficients above
/// `2^53` may round.
pub fn chebyshev_poly(m: usize) -> PolynomialSpec {
    if m <= 60 {
        let mut prev: Vec<i128> = vec![1];
        if m == 0 {
            return PolynomialSpec::from_real(&[1.0]);
        }
        let mut cur: Vec<i128> = vec![0, 1];
        for _ in 1..m {
            let mut next = vec![0i128; cur.len() + 1];
            for (k, &c) in cur.iter().enumerate() {
                next[k + 1] += 2 * c;
            }
            for (k, &c) in prev.iter().enumerate() {
                next[k] -= c;
            }
            prev = cur;
            cur = next;
        }
        PolynomialSpec::new(cur.iter().map(|&c| Complex64::new(c as f64, 0.0)).collect())
    } else {
        let mut prev: Vec<f64> = vec![1.0];
        let mut cur: Vec<f64> = vec![0.0, 1.0];
        for _ in 1..m {
            let mut next = vec![0.0; cur.len() + 1];
            for (k, &c) in cur.iter().enumerate() {
                next[k + 1] += 2.0 * c;
            }
            for (k, &c) in prev.iter().enumerate() {
                next[k] -= c;
            }
            prev = cur;
            cur = next;
        }
        PolynomialSpec::from_real(&cur)
    }
}

/// `T_m(x)` by the three-term recurrence (numerically stable on [-1,1]).
pub fn chebyshev_eval(m: usize, x: f64) -> f64 {
    if m == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut cur = x;
    for _ in 1..m {
        let next = 2.0 * x * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Result of the inverse-function expansion: the monomial coefficients of
/// `g(x) = (1-(1-x²)^b)/x` together with `b` and its certified error.
#[derive(Debug, Clone)]
pub struct InverseExpansion {
    pub poly: PolynomialSpec,
    pub b: usize,
    pub kappa: f64,
    pub eps: f64,
}

impl InverseExpansion {
    /// Evaluation through the closed form; this is the same polynomial as
    /// `poly` but avoids the catastrophic cancellation of the monomial sum
    /// near |x| = 1 when `b` is large.
    pub fn eval_stable(&self, x: f64) -> f64 {
        (1.0 - (1.0 - x * x).powi(self.b as i32)) / x
    }

    /// Max |g(x) - 1/x| on a grid over `[1/κ, 1]` (the domain is symmetric,
    /// and g is odd, so one side suffices).
    pub fn grid_error(&self, points: usize) -> f64 {
        let lo = 1.0 / self.kappa;
        let mut worst = 0.0f64;
        for k in 0..points {
            let x = lo + (1.0 - lo) * k as f64 / (points - 1) as f64;
            worst = worst.max((self.eval_stable(x) - 1.0 / x).abs());
        }
        worst
    }
}

/// Expansion of `1/x` on `[-1,-1/κ] ∪ [1/κ,1]` with `b = ceil(κ² ln(κ/ε))`:
/// an odd polynomial of degree `2b-1` whose coefficients are the binomial
/// terms `(-1)^{i+1} C(b,i)`. Error at most ε on the domain.
///
/// Lower-degree reductions of this expansion exist; only the raw form is
/// built here, so coefficient magnitudes reach `C(b, b/2)`.
pub fn inverse_poly(kappa: f64, eps: f64, coeff_cap: usize) -> Result<InverseExpansion> {
    if !(kappa > 1.0) {
        return Err(Error::InvalidParam(format!("kappa must exceed 1, got {kappa}")));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParam(format!("eps must be in (0,1), got {eps}")));
    }
    let b = (kappa * kappa * (kappa / eps).ln()).ceil() as usize;
    let b = b.max(1);
    if 2 * b > coeff_cap {
        return Err(Error::CapExceeded {
            what: "inverse expansion coefficients",
            have: (2 * b) as u64,
            cap: coeff_cap as u64,
        });
    }
    // g(x) = Σ_{i=1..b} (-1)^{i+1} C(b,i) x^{2i-1}
    let mut coeffs = vec![Complex64::new(0.0, 0.0); 2 * b];
    let mut binom = 1.0f64; // C(b, 0)
    for i in 1..=b {
        binom *= (b - i + 1) as f64 / i as f64;
        let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
        coeffs[2 * i - 1] = Complex64::new(sign * binom, 0.0);
    }
    Ok(InverseExpansion {
        poly: PolynomialSpec::new(coeffs),
        b,
        kappa,
        eps,
    })
}

/// Bessel function of the first kind `J_k(x)` by the alternating power
/// series with compensated summation. Intended for |x| ≤ 20, k ≤ 200; at
/// least 12 significant digits there.
pub fn bessel_j(k: u32, x: f64) -> f64 {
    let half = x / 2.0;
    // term_0 = (x/2)^k / k!
    let mut term = 1.0f64;
    for i in 1..=k {
        term *= half / i as f64;
    }
    let mut sum = 0.0f64;
    let mut comp = 0.0f64; // Kahan compensation
    let mut m = 0u32;
    loop {
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        m += 1;
        term *= -(half * half) / (m as f64 * (m + k) as f64);
        if term.abs() < 1e-18 * sum.abs().max(1e-30) || m > 600 {
            break;
        }
    }
    sum
}

/// Chebyshev-basis expansion of `e^{ixt}` with certified truncation error,
/// plus its monomial-basis conversion.
#[derive(Debug, Clone)]
pub struct AngerJacobiExpansion {
    pub poly: PolynomialSpec,
    /// Chebyshev-basis coefficients `c_k` with `p(x) = Σ c_k T_k(x)`.
    pub cheb_coeffs: Vec<Complex64>,
    pub truncation_order: usize,
    pub t: f64,
    pub eps: f64,
}

impl AngerJacobiExpansion {
    /// Stable evaluation through the Chebyshev recurrence.
    pub fn eval_stable(&self, x: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut t_prev = 1.0f64;
        let mut t_cur = x;
        for (k, &c) in self.cheb_coeffs.iter().enumerate() {
            let tk = match k {
                0 => 1.0,
                1 => x,
                _ => {
                    let next = 2.0 * x * t_cur - t_prev;
                    t_prev = t_cur;
                    t_cur = next;
                    next
                }
            };
            acc += c * tk;
        }
        acc
    }

    /// Max |e^{ixt} - p(x)| over a uniform grid on [-1,1].
    pub fn grid_error(&self, points: usize) -> f64 {
        let mut worst = 0.0f64;
        for k in 0..points {
            let x = -1.0 + 2.0 * k as f64 / (points - 1) as f64;
            let truth = Complex64::new(0.0, x * self.t).exp();
            worst = worst.max((self.eval_stable(x) - truth).norm());
        }
        worst
    }
}

/// `J_0(t) + 2 Σ_{k=1}^R i^k J_k(t) T_k(x)`, a `2ε`-approximation of
/// `e^{ixt}` on [-1,1]. The truncation order R grows until the explicit
/// tail bound `Σ_{k>R} 2|J_k(t)| ≤ 2ε` holds, using `|J_k(t)| ≤ (t/2)^k/k!`;
/// R scales linearly in |t| at fixed ε.
/// Smallest truncation order whose explicit tail bound
/// `Σ_{k>R} 2(t/2)^k/k!` falls at or below ε.
pub fn anger_jacobi_order(t: f64, eps: f64) -> Result<usize> {
    if t == 0.0 {
        return Err(Error::InvalidParam("time must be nonzero".into()));
    }
    if !(eps > 0.0 && eps < 1.0 / std::f64::consts::E) {
        return Err(Error::InvalidParam(format!(
            "eps must lie in (0, 1/e), got {eps}"
        )));
    }
    let ta = t.abs();
    let half = ta / 2.0;
    let mut r = ta.ceil() as usize + 1;
    loop {
        let mut term = 1.0f64;
        for i in 1..=(r + 1) {
            term *= half / i as f64;
        }
        let mut tail = 0.0f64;
        let mut k = r + 1;
        while term > 1e-22 && k < r + 400 {
            tail += 2.0 * term;
            k += 1;
            term *= half / k as f64;
        }
        if tail <= eps {
            return Ok(r);
        }
        r += 1;
        if r > 100_000 {
            return Err(Error::BudgetInfeasible(
                "Anger-Jacobi truncation did not close".into(),
            ));
        }
    }
}

pub fn anger_jacobi_poly(t: f64, eps: f64) -> Result<AngerJacobiExpansion> {
    let r = anger_jacobi_order(t, eps)?;
    let ta = t.abs();
    let i_unit = Complex64::new(0.0, 1.0);
    let mut cheb_coeffs = vec![Complex64::new(bessel_j(0, ta), 0.0)];
    for k in 1..=r {
        cheb_coeffs.push(2.0 * i_unit.powu(k as u32) * bessel_j(k as u32, ta));
    }
    // Negative time: e^{ixt} = conj over the real axis; J_k(t) with t<0 is
    // handled by conjugating odd terms, equivalently c_k -> conj(c_k) at
    // x real... e^{-ix|t|} = conj(e^{ix|t|}) for real x, so conjugate all.
    if t < 0.0 {
        for c in cheb_coeffs.iter_mut() {
            *c = c.conj();
        }
    }
    // Convert to monomial basis.
    let mut poly = PolynomialSpec::constant(Complex64::new(0.0, 0.0));
    for (k, &c) in cheb_coeffs.iter().enumerate() {
        let tk = chebyshev_poly(k);
        let scaled = PolynomialSpec::new(tk.coeffs().iter().map(|&a| a * c).collect());
        let mut merged = vec![Complex64::new(0.0, 0.0); poly.coeffs().len().max(scaled.coeffs().len())];
        for (idx, &a) in poly.coeffs().iter().enumerate() {
            merged[idx] += a;
        }
        for (idx, &a) in scaled.coeffs().iter().enumerate() {
            merged[idx] += a;
        }
        poly = PolynomialSpec::new(merged);
    }
    Ok(AngerJacobiExpansion {
        poly,
        cheb_coeffs,
        truncation_order: r,
        t,
        eps,
    })
}

/// Fragment count and Taylor truncation order for approximating `e^{ixt}`
/// as `(Σ_{k≤K} (ixt/r)^k/k!)^r` with total truncation error ≤ ε, given a
/// normalizer `γ` (a declared norm bound, so `t̂ = γ|t|`).
pub fn taylor_fragment_spec(t: f64, gamma: f64, eps: f64) -> Result<(usize, usize)> {
    if gamma < 0.0 || !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParam("bad fragment parameters".into()));
    }
    let t_hat = gamma * t.abs();
    let r = ((t_hat / std::f64::consts::LN_2).ceil() as usize).max(1);
    let step = t_hat / r as f64;
    // smallest K with r · step^{K+1}/(K+1)! · e^step ≤ ε
    let mut k = 0usize;
    let mut fact_term = step; // step^{K+1}/(K+1)! at K=0
    loop {
        let remainder = r as f64 * fact_term * step.exp();
        if remainder <= eps {
            return Ok((r, k));
        }
        k += 1;
        fact_term *= step / (k as f64 + 1.0);
        if k > 10_000 {
            return Err(Error::BudgetInfeasible("Taylor order did not close".into()));
        }
    }
}

/// Monomial coefficients (in the normalized variable `y = x/γ`) of the full
/// fragmented Taylor product `(Σ_{k≤K} (i t̂ s/r)^k y^k / k!)^r`, where
/// `s = sign(t)`; the l1 weight of the result is at most `e^{t̂}`.
pub fn taylor_combined_poly(t: f64, gamma: f64, eps: f64) -> Result<(PolynomialSpec, usize, usize)> {
    let (r, k) = taylor_fragment_spec(t, gamma, eps)?;
    let t_hat_signed = gamma * t;
    let step = Complex64::new(0.0, t_hat_signed / r as f64);
    let mut frag_coeffs = vec![Complex64::new(1.0, 0.0)];
    let mut term = Complex64::new(1.0, 0.0);
    for kk in 1..=k {
        term *= step / kk as f64;
        frag_coeffs.push(term);
    }
    let frag = PolynomialSpec::new(frag_coeffs);
    let mut acc = PolynomialSpec::constant(Complex64::new(1.0, 0.0));
    for _ in 0..r {
        acc = acc.mul(&frag);
    }
    Ok((acc, r, k))
}

/// The four studied scalar function families.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FunctionSpec {
    Monomial { m: usize },
    Chebyshev { m: usize },
    Inverse { kappa: f64, eps: Option<f64> },
    #[serde(rename = "timeevo")]
    TimeEvolution { t: f64, eps: Option<f64> },
}

impl FunctionSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            FunctionSpec::Monomial { .. } | FunctionSpec::Chebyshev { .. } => Ok(()),
            FunctionSpec::Inverse { kappa, eps } => {
                if !(kappa > 1.0) {
                    return Err(Error::InvalidParam("kappa must exceed 1".into()));
                }
                if let Some(e) = eps {
                    if !(e > 0.0 && e < 1.0) {
                        return Err(Error::InvalidParam("inverse eps must be in (0,1)".into()));
                    }
                }
                Ok(())
            }
            FunctionSpec::TimeEvolution { eps, .. } => {
                if let Some(e) = eps {
                    if !(e > 0.0 && e < 1.0 / std::f64::consts::E) {
                        return Err(Error::InvalidParam(
                            "time-evolution eps must be in (0, 1/e)".into(),
                        ));
                    }
                }
                Ok(())
            }
        }
    }

    /// Scalar evaluation of the *target* function (not an approximation):
    /// monomial/Chebyshev exactly, inverse as 1/x, time evolution as
    /// `e^{ixt}`.
    pub fn eval_scalar(&self, x: f64) -> Complex64 {
        match *self {
            FunctionSpec::Monomial { m } => Complex64::new(x.powi(m as i32), 0.0),
            FunctionSpec::Chebyshev { m } => Complex64::new(chebyshev_eval(m, x), 0.0),
            FunctionSpec::Inverse { .. } => Complex64::new(1.0 / x, 0.0),
            FunctionSpec::TimeEvolution { t, .. } => Complex64::new(0.0, x * t).exp(),
        }
    }

    /// True for the families that are already polynomials.
    pub fn is_polynomial(&self) -> bool {
        matches!(self, FunctionSpec::Monomial { .. } | FunctionSpec::Chebyshev { .. })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chebyshev_first_few() {
        assert_eq!(chebyshev_poly(0).coeffs(), &[Complex64::new(1.0, 0.0)]);
        assert_eq!(
            chebyshev_poly(1).coeffs(),
            &[Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]
        );
        // T_2 = 2x^2 - 1
        let t2 = chebyshev_poly(2);
        assert_eq!(t2.coeff(0).re, -1.0);
        assert_eq!(t2.coeff(1).re, 0.0);
        assert_eq!(t2.coeff(2).re, 2.0);
    }

    #[test]
    fn chebyshev_alternation_at_cos_nodes() {
        // T_5(cos(pi*3/5)) = (-1)^3 = -1
        let x = (std::f64::consts::PI * 3.0 / 5.0).cos();
        assert!((chebyshev_eval(5, x) + 1.0).abs() < 1e-12);
        let t5 = chebyshev_poly(5);
        assert!((t5.eval(Complex64::new(x, 0.0)).re + 1.0).abs() < 1e-12);
    }

    #[test]
    fn chebyshev_coefficients_bounded_by_4_pow_m() {
        for m in 0..=20 {
            let t = chebyshev_poly(m);
            assert!(
                t.max_coeff() <= 4.0f64.powi(m as i32),
                "degree {m}: {} > 4^{m}",
                t.max_coeff()
            );
        }
    }

    #[test]
    fn chebyshev_bounded_on_interval() {
        for m in [1usize, 3, 7, 12] {
            for k in 0..=400 {
                let x = -1.0 + 2.0 * k as f64 / 400.0;
                assert!(chebyshev_eval(m, x).abs() <= 1.0 + 1e-12);
            }
        }
    }

    #[test]
    fn chebyshev_coeff_eval_matches_recurrence() {
        let t7 = chebyshev_poly(7);
        let x = 0.3;
        assert!((t7.eval(Complex64::new(x, 0.0)).re - chebyshev_eval(7, x)).abs() < 1e-12);
    }

    #[test]
    fn chebyshev_equals_one_on_full_angle_nodes() {
        // T_M(cos(2πl/M)) = 1 for 0 ≤ l ≤ (M-1)/2, odd M
        for m in [3usize, 5, 7, 9, 15] {
            for l in 0..=(m - 1) / 2 {
                let x = (2.0 * std::f64::consts::PI * l as f64 / m as f64).cos();
                assert!((chebyshev_eval(m, x) - 1.0).abs() < 1e-10, "M={m}, l={l}");
            }
        }
    }

    #[test]
    fn ballistic_identity_on_unit_circle() {
        // T_m((x + 1/x)/2) = (x^m + x^-m)/2 for x = e^{iθ}
        for m in [2usize, 5, 9] {
            for k in 1..12 {
                let theta = 0.5 * k as f64;
                let lhs = chebyshev_eval(m, theta.cos());
                let rhs = (m as f64 * theta).cos();
                assert!((lhs - rhs).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn inverse_poly_exact_at_one() {
        // (1 - (1-x^2)^b)/x at x = ±1 is ±1 for any b
        let inv = inverse_poly(1.5, 0.3, 100_000).unwrap();
        assert!((inv.eval_stable(1.0) - 1.0).abs() < 1e-15);
        assert!((inv.eval_stable(-1.0) + 1.0).abs() < 1e-15);
    }

    #[test]
    fn inverse_poly_grid_certificate() {
        let inv = inverse_poly(2.0, 0.1, 100_000).unwrap();
        assert!(inv.grid_error(10_000) <= 0.1);
        // odd polynomial of degree 2b-1
        assert_eq!(inv.poly.degree(), 2 * inv.b - 1);
        for (k, c) in inv.poly.coeffs().iter().enumerate() {
            if k % 2 == 0 {
                assert_eq!(c.norm(), 0.0);
            }
        }
    }

    #[test]
    fn inverse_poly_coefficients_are_binomials() {
        let inv = inverse_poly(2.0, 0.1, 100_000).unwrap();
        // every |coefficient| = C(b, i) ≤ 2^b
        let bound = 2.0f64.powi(inv.b as i32);
        assert!(inv.poly.max_coeff() <= bound);
        // monomial evaluation agrees with the closed form where conditioning
        // allows (small x keeps the alternating sum tame)
        let x = 0.5;
        let via_coeffs = inv.poly.eval(Complex64::new(x, 0.0)).re;
        assert!((via_coeffs - inv.eval_stable(x)).abs() < 1e-9);
    }

    #[test]
    fn inverse_poly_close_to_kappa_at_domain_edge() {
        let inv = inverse_poly(2.0, 0.05, 100_000).unwrap();
        let at_edge = inv.eval_stable(0.5);
        assert!((at_edge - 2.0).abs() <= 0.05);
    }

    #[test]
    fn bessel_values() {
        assert!((bessel_j(0, 0.0) - 1.0).abs() < 1e-15);
        assert!(bessel_j(1, 0.0).abs() < 1e-15);
        // frozen reference from the alternating series summed in extended
        // precision elsewhere
        assert!((bessel_j(0, 1.0) - 0.7651976865579666).abs() < 1e-12);
        for k in 0..30 {
            for &x in &[0.3, 1.0, 5.0, 12.0, 20.0] {
                assert!(bessel_j(k, x).abs() <= 1.0 + 1e-12);
            }
        }
    }

    #[test]
    fn anger_jacobi_grid_certificate() {
        let exp = anger_jacobi_poly(1.0, 1e-3).unwrap();
        assert!(exp.grid_error(2_000) <= 2e-3);
        // p(0) ≈ 1
        assert!((exp.eval_stable(0.0) - Complex64::new(1.0, 0.0)).norm() <= 2e-3);
    }

    #[test]
    fn anger_jacobi_degree_linear_in_t() {
        let eps = 1e-4;
        let ts = [2.0f64, 4.0, 8.0, 16.0];
        let degrees: Vec<f64> = ts
            .iter()
            .map(|&t| anger_jacobi_poly(t, eps).unwrap().truncation_order as f64)
            .collect();
        // least-squares slope of R against t stays near 1
        let mt = ts.iter().sum::<f64>() / 4.0;
        let md = degrees.iter().sum::<f64>() / 4.0;
        let cov: f64 = ts.iter().zip(&degrees).map(|(t, d)| (t - mt) * (d - md)).sum();
        let var: f64 = ts.iter().map(|t| (t - mt) * (t - mt)).sum();
        let slope = cov / var;
        assert!((0.7..=2.2).contains(&slope), "slope {slope}");
        assert!(degrees.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn anger_jacobi_negative_time_conjugates() {
        let plus = anger_jacobi_poly(1.3, 1e-4).unwrap();
        let minus = anger_jacobi_poly(-1.3, 1e-4).unwrap();
        let x = 0.37;
        let a = plus.eval_stable(x);
        let b = minus.eval_stable(x);
        assert!((a.conj() - b).norm() < 1e-12);
        assert!(minus.grid_error(500) <= 2e-4);
    }

    #[test]
    fn taylor_fragment_edges() {
        // t̂ = ln 2 → one fragment
        let (r, _) = taylor_fragment_spec(std::f64::consts::LN_2, 1.0, 1e-6).unwrap();
        assert_eq!(r, 1);
        // remainder actually below eps at the returned K
        let (r, k) = taylor_fragment_spec(2.0, 1.0, 1e-4).unwrap();
        let step = 2.0 / r as f64;
        let mut fact = 1.0;
        for i in 1..=(k + 1) {
            fact *= step / i as f64;
        }
        assert!(r as f64 * fact * step.exp() <= 1e-4);
        // K monotone nonincreasing in eps
        let (_, k_loose) = taylor_fragment_spec(2.0, 1.0, 1e-2).unwrap();
        assert!(k_loose <= k);
    }

    #[test]
    fn taylor_combined_poly_matches_exponential_scalar() {
        let (p, _, _) = taylor_combined_poly(1.2, 1.0, 1e-8).unwrap();
        for &y in &[-1.0, -0.4, 0.0, 0.9] {
            let truth = Complex64::new(0.0, 1.2 * y).exp();
            assert!((p.eval(Complex64::new(y, 0.0)) - truth).norm() < 1e-7);
        }
        assert!(p.l1_rescaled_norm(1.0) <= 1.2f64.exp() + 1e-9);
    }

    #[test]
    fn l1_rescaled_norm_examples() {
        let mono = PolynomialSpec::monomial(5);
        assert!((mono.l1_rescaled_norm(2.0) - 32.0).abs() < 1e-12);
        let t6 = chebyshev_poly(6);
        assert!(t6.l1_rescaled_norm(1.0) <= 7.0 * 4.0f64.powi(6));
        // random polynomial against a direct sum
        let p = PolynomialSpec::from_real(&[0.5, -1.5, 0.0, 2.25]);
        let direct = 0.5 + 1.5 * 0.8 + 2.25 * 0.8f64.powi(3);
        assert!((p.l1_rescaled_norm(0.8) - direct).abs() < 1e-12);
    }

    #[test]
    fn eval_at_zero_gives_constant_coefficient() {
        let p = PolynomialSpec::from_real(&[3.25, 1.0, -2.0]);
        assert_eq!(p.eval(Complex64::new(0.0, 0.0)).re, 3.25);
    }

    #[test]
    fn function_spec_json_schema() {
        let f = FunctionSpec::Inverse {
            kappa: 2.0,
            eps: Some(0.01),
        };
        let j = serde_json::to_value(f).unwrap();
        assert_eq!(j["kind"], "inverse");
        assert_eq!(j["kappa"], 2.0);
        let te: FunctionSpec = serde_json::from_str(r#"{"kind":"timeevo","t":3.0}"#).unwrap();
        assert!(matches!(te, FunctionSpec::TimeEvolution { t, eps: None } if t == 3.0));
        let m: FunctionSpec = serde_json::from_str(r#"{"kind":"monomial","m":4}"#).unwrap();
        assert!(matches!(m, FunctionSpec::Monomial { m: 4 }));
    }
}
