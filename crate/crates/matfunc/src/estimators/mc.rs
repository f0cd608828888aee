//! Randomized path-integral and Pauli-product estimators.
//!
//! Both samplers pick a monomial degree proportionally to `|α_r| b^r`
//! (with `b` the declared 1-norm or Pauli norm), then estimate the
//! normalized monomial entry by an importance-sampled walk (sparse access)
//! or an i.i.d. product of Pauli words (Pauli access). Every per-sample
//! value is bounded by `W = Σ_r |α_r| b^r` (entries) or `W²` (local
//! measurements), which fixes the Hoeffding sample count.
//!
//! Samples are accumulated in fixed-size chunks indexed by sample number;
//! worker count affects scheduling only, never the result.

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use crate::access::{PauliAccess, SparseOracle};
use crate::dense::in_projector;
use crate::error::{Error, Result};
use crate::estimate::{Algorithm, Estimate};
use crate::pauli::PauliString;
use crate::poly::PolynomialSpec;
use crate::rngutil;

const CHUNK: u64 = 4096;

/// Monte Carlo budget: requested additive precision, failure probability,
/// seed, and the sample cap beyond which the run refuses.
#[derive(Debug, Clone, Copy)]
pub struct McConfig {
    pub eps: f64,
    pub delta: f64,
    pub seed: u64,
    pub max_samples: u64,
}

/// Hoeffding count for a complex estimate split into real and imaginary
/// parts, each with budget `ε/√2` and failure `δ/2`:
/// `n = ceil(4 W² ln(4/δ) / ε²)`.
pub fn hoeffding_samples(w: f64, eps: f64, delta: f64) -> u64 {
    if w == 0.0 {
        return 1;
    }
    let n = 4.0 * w * w * (4.0 / delta).ln() / (eps * eps);
    n.ceil().max(1.0) as u64
}

/// Degree-sampling table: cumulative distribution over `|α_r| b^r` and the
/// total weight `W`.
struct DegreeSampler {
    cum: Vec<f64>,
    degrees: Vec<usize>,
    phases: Vec<Complex64>,
    total: f64,
}

impl DegreeSampler {
    fn new(p: &PolynomialSpec, b: f64) -> Self {
        let mut weights = Vec::new();
        let mut degrees = Vec::new();
        let mut phases = Vec::new();
        let mut power = 1.0f64;
        for (r, &a) in p.coeffs().iter().enumerate() {
            let w = a.norm() * power;
            if w > 0.0 {
                weights.push(w);
                degrees.push(r);
                phases.push(a / a.norm());
            }
            power *= b;
        }
        let total: f64 = weights.iter().sum();
        let mut cum = Vec::with_capacity(weights.len());
        let mut acc = 0.0;
        for w in &weights {
            acc += w / total;
            cum.push(acc);
        }
        if let Some(last) = cum.last_mut() {
            *last = 1.0;
        }
        DegreeSampler {
            cum,
            degrees,
            phases,
            total,
        }
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> (usize, Complex64) {
        let u: f64 = rng.gen();
        let k = rngutil::sample_cumulative(&self.cum, u);
        (self.degrees[k], self.phases[k])
    }
}

/// Runs `samples` independent evaluations of `one_sample` in deterministic
/// chunks and returns the mean. The reduction order is fixed by chunk
/// index, so results are identical for any worker count.
fn chunked_mean<F>(samples: u64, one_sample: F) -> Complex64
where
    F: Fn(u64) -> Complex64 + Sync,
{
    let chunks = samples.div_ceil(CHUNK);
    let partials: Vec<Complex64> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let lo = chunk * CHUNK;
            let hi = ((chunk + 1) * CHUNK).min(samples);
            let mut acc = Complex64::new(0.0, 0.0);
            for idx in lo..hi {
                acc += one_sample(idx);
            }
            acc
        })
        .collect();
    let mut total = Complex64::new(0.0, 0.0);
    for p in partials {
        total += p;
    }
    total / samples as f64
}

/// One importance-sampled walk of `steps` steps on the column-normalized
/// matrix `A/b`, starting at column `start`. Returns the endpoint and the
/// accumulated complex weight (of magnitude at most `max_col_sum/b` per
/// step; zero when the walk dies on an empty column).
fn walk<R: Rng>(
    o: &SparseOracle,
    b: f64,
    start: usize,
    steps: usize,
    rng: &mut R,
) -> (usize, Complex64) {
    let mut col = start;
    let mut weight = Complex64::new(1.0, 0.0);
    for _ in 0..steps {
        let entries = o.col_entries(col);
        let col_sum: f64 = entries.iter().map(|(_, v)| v.norm()).sum();
        if col_sum == 0.0 {
            return (col, Complex64::new(0.0, 0.0));
        }
        let mut u: f64 = rng.gen::<f64>() * col_sum;
        let mut chosen = entries.len() - 1;
        for (idx, (_, v)) in entries.iter().enumerate() {
            u -= v.norm();
            if u <= 0.0 {
                chosen = idx;
                break;
            }
        }
        let (row, v) = entries[chosen];
        weight *= (col_sum / b) * (v / v.norm());
        col = row;
    }
    (col, weight)
}

/// Unbiased estimate of `<i|p(A)|j>` from sparse access with declared
/// induced 1-norm `b`.
pub fn mc_entry_sparse(
    o: &SparseOracle,
    b: f64,
    p: &PolynomialSpec,
    i: usize,
    j: usize,
    cfg: &McConfig,
) -> Result<Estimate> {
    if !(b > 0.0) {
        return Err(Error::MissingMetadata("induced 1-norm"));
    }
    if p.degree() == 0 {
        let v = if i == j { p.coeff(0) } else { Complex64::new(0.0, 0.0) };
        return Ok(Estimate::exact(v, 0.0, Algorithm::McSparse));
    }
    let sampler = DegreeSampler::new(p, b);
    if sampler.total == 0.0 {
        return Ok(Estimate::exact(Complex64::new(0.0, 0.0), 0.0, Algorithm::McSparse));
    }
    let samples = hoeffding_samples(sampler.total, cfg.eps, cfg.delta);
    if samples > cfg.max_samples {
        return Err(Error::CapExceeded {
            what: "monte carlo samples",
            have: samples,
            cap: cfg.max_samples,
        });
    }
    let w_total = sampler.total;
    let mean = chunked_mean(samples, |idx| {
        let mut rng = rngutil::substream(cfg.seed, idx);
        let (r, phase) = sampler.sample(&mut rng);
        let (endpoint, weight) = walk(o, b, j, r, &mut rng);
        if endpoint == i {
            phase * weight * w_total
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    Ok(Estimate {
        value: mean,
        half_width: cfg.eps,
        samples_used: samples,
        algorithm: Algorithm::McSparse,
        wall_time: std::time::Duration::ZERO,
    })
}

/// Product of `r` sampled Pauli words; returns the accumulated sign/phase
/// and the resulting string.
fn sample_word_product<R: Rng>(
    acc: &PauliAccess,
    r: usize,
    rng: &mut R,
) -> Result<(Complex64, PauliString)> {
    let n = acc.n_qubits();
    let mut cur = PauliString::identity(n);
    let mut factor = Complex64::new(1.0, 0.0);
    for _ in 0..r {
        let (idx, sign) = acc.sample_term(rng)?;
        let s = acc.operator().terms()[idx].1;
        let (phase, next) = cur.multiply(&s)?;
        factor *= sign * phase;
        cur = next;
    }
    Ok((factor, cur))
}

/// Unbiased estimate of `<i|p(A)|j>` from Pauli l1-sampling access.
pub fn mc_entry_pauli(
    acc: &PauliAccess,
    p: &PolynomialSpec,
    i: usize,
    j: usize,
    cfg: &McConfig,
) -> Result<Estimate> {
    let lambda = acc.pauli_norm();
    if lambda == 0.0 {
        return Err(Error::ZeroOperator);
    }
    if p.degree() == 0 {
        let v = if i == j { p.coeff(0) } else { Complex64::new(0.0, 0.0) };
        return Ok(Estimate::exact(v, 0.0, Algorithm::McPauli));
    }
    let sampler = DegreeSampler::new(p, lambda);
    if sampler.total == 0.0 {
        return Ok(Estimate::exact(Complex64::new(0.0, 0.0), 0.0, Algorithm::McPauli));
    }
    let samples = hoeffding_samples(sampler.total, cfg.eps, cfg.delta);
    if samples > cfg.max_samples {
        return Err(Error::CapExceeded {
            what: "monte carlo samples",
            have: samples,
            cap: cfg.max_samples,
        });
    }
    let w_total = sampler.total;
    let mean = chunked_mean(samples, |idx| {
        let mut rng = rngutil::substream(cfg.seed, idx);
        let (r, phase) = sampler.sample(&mut rng);
        let (factor, word) = sample_word_product(acc, r, &mut rng).expect("nonzero operator");
        let entry = word.entry(i, j).expect("index in range");
        phase * factor * entry * w_total
    });
    Ok(Estimate {
        value: mean,
        half_width: cfg.eps,
        samples_used: samples,
        algorithm: Algorithm::McPauli,
        wall_time: std::time::Duration::ZERO,
    })
}

/// Unbiased estimate of `<i|p(A)† π p(A)|i>` from Pauli access: two-sided
/// degree and word sampling with `π` expanded as `(1 + Z_first)/2`. The
/// per-sample bound is `W²`, matching the fourth-power sample complexity.
pub fn mc_lm_pauli(
    acc: &PauliAccess,
    p: &PolynomialSpec,
    i: usize,
    cfg: &McConfig,
) -> Result<Estimate> {
    let lambda = acc.pauli_norm();
    if lambda == 0.0 {
        return Err(Error::ZeroOperator);
    }
    let n = acc.n_qubits();
    let z_first = PauliString::from_masks(n, 0, 1u64 << (n - 1))?;
    if p.degree() == 0 {
        // p(A) = α_0: value |α_0|² <i|π|i> exactly
        let v = p.coeff(0).norm_sqr()
            * if in_projector(i, acc.dim()) { 1.0 } else { 0.0 };
        return Ok(Estimate::exact(Complex64::new(v, 0.0), 0.0, Algorithm::McPauli));
    }
    let sampler = DegreeSampler::new(p, lambda);
    if sampler.total == 0.0 {
        return Ok(Estimate::exact(Complex64::new(0.0, 0.0), 0.0, Algorithm::McPauli));
    }
    let range = sampler.total * sampler.total;
    let samples = hoeffding_samples(range, cfg.eps, cfg.delta);
    if samples > cfg.max_samples {
        return Err(Error::CapExceeded {
            what: "monte carlo samples",
            have: samples,
            cap: cfg.max_samples,
        });
    }
    let mean = chunked_mean(samples, |idx| {
        let mut rng = rngutil::substream(cfg.seed, idx);
        let (r_left, phase_left) = sampler.sample(&mut rng);
        let (r_right, phase_right) = sampler.sample(&mut rng);
        let (f_left, w_left) = sample_word_product(acc, r_left, &mut rng).expect("nonzero");
        let (f_right, w_right) = sample_word_product(acc, r_right, &mut rng).expect("nonzero");
        // left factor enters through the adjoint: conjugate its phases
        let left_factor = (phase_left * f_left).conj();
        // π branch: identity or Z on the first qubit, probability ½ each,
        // coefficients ½ each — the two cancel.
        let use_z: bool = rng.gen();
        let (mid_phase, mid) = if use_z {
            w_left.multiply(&z_first).expect("dims")
        } else {
            (Complex64::new(1.0, 0.0), w_left)
        };
        let (prod_phase, word) = mid.multiply(&w_right).expect("dims");
        let entry = word.entry(i, i).expect("index in range");
        left_factor * phase_right * f_right * mid_phase * prod_phase * entry * range
    });
    Ok(Estimate {
        value: mean,
        half_width: cfg.eps,
        samples_used: samples,
        algorithm: Algorithm::McPauli,
        wall_time: std::time::Duration::ZERO,
    })
}

/// Unbiased estimate of `<i|p(A)† π p(A)|i>` from sparse access: two
/// independent sandwiched walks from column `i` meeting at the projector.
pub fn mc_lm_sparse(
    o: &SparseOracle,
    b: f64,
    p: &PolynomialSpec,
    i: usize,
    cfg: &McConfig,
) -> Result<Estimate> {
    if !(b > 0.0) {
        return Err(Error::MissingMetadata("induced 1-norm"));
    }
    if o.dim() % 2 != 0 {
        return Err(Error::InvalidParam(
            "local measurement needs an even dimension".into(),
        ));
    }
    if p.degree() == 0 {
        let v = p.coeff(0).norm_sqr() * if in_projector(i, o.dim()) { 1.0 } else { 0.0 };
        return Ok(Estimate::exact(Complex64::new(v, 0.0), 0.0, Algorithm::McSparse));
    }
    let sampler = DegreeSampler::new(p, b);
    if sampler.total == 0.0 {
        return Ok(Estimate::exact(Complex64::new(0.0, 0.0), 0.0, Algorithm::McSparse));
    }
    let range = sampler.total * sampler.total;
    let samples = hoeffding_samples(range, cfg.eps, cfg.delta);
    if samples > cfg.max_samples {
        return Err(Error::CapExceeded {
            what: "monte carlo samples",
            have: samples,
            cap: cfg.max_samples,
        });
    }
    let dim = o.dim();
    let mean = chunked_mean(samples, |idx| {
        let mut rng = rngutil::substream(cfg.seed, idx);
        let (r_left, phase_left) = sampler.sample(&mut rng);
        let (r_right, phase_right) = sampler.sample(&mut rng);
        let (k1, w1) = walk(o, b, i, r_left, &mut rng);
        let (k2, w2) = walk(o, b, i, r_right, &mut rng);
        if k1 == k2 && in_projector(k1, dim) {
            (phase_left.conj() * w1.conj()) * (phase_right * w2) * range
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    Ok(Estimate {
        value: mean,
        half_width: cfg.eps,
        samples_used: samples,
        algorithm: Algorithm::McSparse,
        wall_time: std::time::Duration::ZERO,
    })
}
