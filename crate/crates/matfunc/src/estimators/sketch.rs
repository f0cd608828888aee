//! Importance-sampling sketch of a Pauli decomposition and the two-stage
//! sketch-then-evaluate estimator for bounded polynomials.

use num_complex::Complex64;
use rand::Rng;

use crate::access::PauliAccess;
use crate::error::{Error, Result};
use crate::estimate::{Algorithm, Estimate, Target};
use crate::pauli::PauliOperator;
use crate::poly::PolynomialSpec;
use crate::rngutil;
use crate::Caps;

use super::supersparse::{pauli_rep_entry, pauli_rep_lm, pauli_supersparse_apply};

/// Sample count guaranteeing `||sketch - A|| ≤ ε'` with probability
/// `1 - δ`: `m = ceil(8 λ²/ε'² ln(2N/δ))` (operator Bernstein).
pub fn sketch_samples(lambda: f64, eps_prime: f64, delta: f64, dim: usize) -> u64 {
    (8.0 * lambda * lambda / (eps_prime * eps_prime) * (2.0 * dim as f64 / delta).ln())
        .ceil()
        .max(1.0) as u64
}

/// Averages `m` i.i.d. draws of `X = sign(a_l)·λ·P_l`; unbiased for `A`,
/// with at most as many distinct terms as draws (and never more than the
/// original operator has).
pub fn sketch_pauli<R: Rng>(
    acc: &PauliAccess,
    m: u64,
    rng: &mut R,
) -> Result<PauliAccess> {
    let lambda = acc.pauli_norm();
    if lambda == 0.0 {
        return Err(Error::ZeroOperator);
    }
    let mut counts: Vec<i64> = vec![0; acc.term_count()];
    for _ in 0..m {
        let (idx, sign) = acc.sample_term(rng)?;
        counts[idx] += if sign.re >= 0.0 { 1 } else { -1 };
    }
    let terms = acc
        .operator()
        .terms()
        .iter()
        .zip(&counts)
        .filter(|(_, &cnt)| cnt != 0)
        .map(|((_, s), &cnt)| {
            (
                Complex64::new(lambda * cnt as f64 / m as f64, 0.0),
                *s,
            )
        })
        .collect();
    PauliAccess::new(PauliOperator::new(acc.n_qubits(), terms))
}

/// Sketch-then-evaluate: importance-sample the Pauli coefficients down to a
/// small explicit operator, then run the exact closure evaluation of the
/// polynomial on the sketch.
///
/// Preconditions: `|p| ≤ 1` on [-1,1] and a declared spectral margin
/// `λ_A ≤ 1 - η`. The operator-norm budget composes as
/// `ε = L_p · ε' · ln(rank)` with `L_p ≤ 2d²` the polynomial's Lipschitz
/// bound, which fixes the sketch precision `ε'` (also forced below η so the
/// sketch stays inside the unit spectral ball).
pub fn sketch_then_eval(
    acc: &PauliAccess,
    p: &PolynomialSpec,
    target: &Target,
    eps: f64,
    delta: f64,
    eta: f64,
    seed: u64,
    caps: &Caps,
) -> Result<Estimate> {
    let lambda = acc.pauli_norm();
    if lambda == 0.0 {
        return Err(Error::ZeroOperator);
    }
    if !(eta > 0.0) || lambda > 1.0 - eta + 1e-12 {
        return Err(Error::InvalidParam(format!(
            "sketch evaluation needs λ ≤ 1-η with η > 0 (λ = {lambda}, η = {eta})"
        )));
    }
    // bounded-polynomial precondition, checked on a grid
    for k in 0..=400 {
        let x = -1.0 + 2.0 * k as f64 / 400.0;
        if p.eval(Complex64::new(x, 0.0)).norm() > 1.0 + 1e-9 {
            return Err(Error::InvalidParam(
                "polynomial exceeds 1 in magnitude on [-1,1]".into(),
            ));
        }
    }
    let d = p.degree().max(1) as f64;
    let lipschitz = 2.0 * d * d;
    let log_rank = (acc.dim() as f64).ln().max(1.0);
    let eps_prime = (eps / (lipschitz * log_rank)).min(eta);
    let m = sketch_samples(lambda, eps_prime, delta, acc.dim());
    let mut rng = rngutil::substream(seed, 0);
    let sketch = sketch_pauli(acc, m, &mut rng)?;
    let rep = pauli_supersparse_apply(&sketch, p, caps).map_err(|e| match e {
        Error::CapExceeded { .. } => Error::BudgetInfeasible(format!(
            "sketch of {m} draws needs a Pauli closure beyond the cap"
        )),
        other => other,
    })?;
    let value = match *target {
        Target::Entry { i, j } => pauli_rep_entry(&rep, i, j)?,
        Target::Lm { i } => Complex64::new(pauli_rep_lm(&rep, i)?, 0.0),
        Target::Nlm { .. } => {
            return Err(Error::InvalidParam(
                "normalized target is handled by the dispatcher".into(),
            ))
        }
    };
    Ok(Estimate {
        value,
        half_width: eps,
        samples_used: m,
        algorithm: Algorithm::Sketch,
        wall_time: std::time::Duration::ZERO,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::access::operator_norm;
    use crate::pauli::PauliString;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn two_term_low_norm() -> PauliAccess {
        PauliAccess::new(PauliOperator::new(
            2,
            vec![
                (c(0.05, 0.0), PauliString::from_word("XZ").unwrap()),
                (c(0.04, 0.0), PauliString::from_word("ZI").unwrap()),
            ],
        ))
        .unwrap()
    }

    #[test]
    fn single_term_sketch_is_exact() {
        let acc = PauliAccess::new(PauliOperator::new(
            1,
            vec![(c(0.05, 0.0), PauliString::from_word("X").unwrap())],
        ))
        .unwrap();
        let mut rng = rngutil::substream(3, 0);
        for m in [1u64, 7, 100] {
            let sk = sketch_pauli(&acc, m, &mut rng).unwrap();
            assert_eq!(sk.term_count(), 1);
            assert!((sk.operator().terms()[0].0 - c(0.05, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn sketch_mean_converges_to_operator() {
        let acc = two_term_low_norm();
        let truth = acc.operator().to_dense(12).unwrap();
        let mut rng = rngutil::substream(5, 0);
        let mut mean = crate::dense::DenseMatrix::zeros(4);
        let reps = 2_000;
        for _ in 0..reps {
            let sk = sketch_pauli(&acc, 16, &mut rng).unwrap();
            mean = mean.add(&sk.operator().to_dense(12).unwrap());
        }
        mean = mean.scale(c(1.0 / reps as f64, 0.0));
        assert!(mean.sub(&truth).max_abs() < 0.01);
    }

    #[test]
    fn sketch_error_bound_holds_empirically() {
        let acc = two_term_low_norm();
        let lambda = acc.pauli_norm();
        let eps_prime = 0.05;
        let delta = 0.1;
        let m = sketch_samples(lambda, eps_prime, delta, acc.dim());
        let truth = acc.operator().to_dense(12).unwrap();
        let mut failures = 0;
        for trial in 0..200u64 {
            let mut rng = rngutil::substream(100 + trial, 0);
            let sk = sketch_pauli(&acc, m, &mut rng).unwrap();
            let dev = operator_norm(&sk.operator().to_dense(12).unwrap().sub(&truth)).unwrap();
            if dev > eps_prime {
                failures += 1;
            }
        }
        assert!(
            (failures as f64) / 200.0 <= delta,
            "{failures} failures out of 200"
        );
    }

    #[test]
    fn sketch_then_eval_near_exact_for_single_term() {
        let caps = Caps::default();
        let acc = PauliAccess::new(PauliOperator::new(
            2,
            vec![(c(0.05, 0.0), PauliString::from_word("ZI").unwrap())],
        ))
        .unwrap();
        let p = PolynomialSpec::monomial(3);
        let est = sketch_then_eval(
            &acc,
            &p,
            &Target::Entry { i: 0, j: 0 },
            0.1,
            0.05,
            0.9,
            7,
            &caps,
        )
        .unwrap();
        let truth = 0.05f64.powi(3);
        assert!((est.value - c(truth, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn eta_violation_is_rejected() {
        let caps = Caps::default();
        let acc = PauliAccess::new(PauliOperator::new(
            1,
            vec![(c(0.9, 0.0), PauliString::from_word("X").unwrap())],
        ))
        .unwrap();
        let p = PolynomialSpec::monomial(2);
        let r = sketch_then_eval(
            &acc,
            &p,
            &Target::Entry { i: 0, j: 0 },
            0.1,
            0.05,
            0.2,
            7,
            &caps,
        );
        assert!(matches!(r, Err(Error::InvalidParam(_))));
    }

    #[test]
    fn sketch_then_eval_within_eps_most_trials() {
        let caps = Caps::default();
        let acc = two_term_low_norm();
        let t3 = crate::poly::chebyshev_poly(3);
        let d = acc.operator().to_dense(12).unwrap();
        let truth = crate::dense::exact_entry(
            &d,
            |x| c(crate::poly::chebyshev_eval(3, x), 0.0),
            1,
            3,
        )
        .unwrap();
        let eps = 0.05;
        let mut ok = 0;
        for trial in 0..100u64 {
            let est = sketch_then_eval(
                &acc,
                &t3,
                &Target::Entry { i: 1, j: 3 },
                eps,
                0.05,
                1.0 - acc.pauli_norm(),
                trial,
                &caps,
            )
            .unwrap();
            if (est.value - truth).norm() <= eps {
                ok += 1;
            }
        }
        assert!(ok >= 95, "only {ok} of 100 within eps");
    }
}
