//! Every estimation algorithm, the regime router that picks one from
//! declared instance metadata, and the top-level dispatcher that turns a
//! function family into polynomial work with a split error budget.

pub mod exact;
pub mod mc;
pub mod sketch;
pub mod supersparse;

use num_complex::Complex64;

use crate::access::{AccessForm, Instance, SparseOracle, SuperSparseMatrix};
use crate::dense::in_projector;
use crate::error::{Error, Result};
use crate::estimate::{Algorithm, Estimate, EstimateRequest, Target};
use crate::pauli::closure_rank;
use crate::poly::{self, FunctionSpec, PolynomialSpec};
use crate::Caps;

pub use mc::McConfig;

/// A function family lowered to a polynomial with a split error budget:
/// `approx_err` is spent on the function approximation and `stat_eps`
/// remains for sampling noise. Deterministic algorithms have
/// `stat_eps = 0`.
#[derive(Debug, Clone)]
pub struct PolyPlan {
    pub poly: PolynomialSpec,
    pub approx_err: f64,
    pub stat_eps: f64,
}

fn is_deterministic(alg: Algorithm) -> bool {
    matches!(
        alg,
        Algorithm::ExactPath | Algorithm::SupersparseCb | Algorithm::SupersparsePauli
    )
}

/// Largest magnitude the target function takes on the admissible spectrum
/// (used for first-order error propagation of normalized ratios).
fn function_max(f: &FunctionSpec) -> f64 {
    match *f {
        FunctionSpec::Monomial { .. } | FunctionSpec::Chebyshev { .. } => 1.0,
        FunctionSpec::Inverse { kappa, .. } => kappa,
        FunctionSpec::TimeEvolution { .. } => 1.0,
    }
}

/// Any declared bound that also caps the operator norm.
fn declared_spectral_bound(inst: &Instance) -> Option<f64> {
    let meta = &inst.meta;
    let mut best: Option<f64> = meta.op_norm;
    if let AccessForm::Pauli(p) = &inst.access {
        let lam = p.pauli_norm();
        best = Some(best.map_or(lam, |b| b.min(lam)));
    }
    if let Some(one) = meta.one_norm {
        best = Some(best.map_or(one, |b| b.min(one)));
    }
    best
}

/// Lowers the requested function to monomial coefficients for a given
/// algorithm. `gamma` is the sampling normalizer (declared 1-norm or Pauli
/// norm) used by the randomized time-evolution route.
fn build_plan(
    inst: &Instance,
    req: &EstimateRequest,
    alg: Algorithm,
    gamma: Option<f64>,
    caps: &Caps,
) -> Result<PolyPlan> {
    let deterministic = is_deterministic(alg);
    match req.function {
        FunctionSpec::Monomial { m } => Ok(PolyPlan {
            poly: PolynomialSpec::monomial(m),
            approx_err: 0.0,
            stat_eps: if deterministic { 0.0 } else { req.eps },
        }),
        FunctionSpec::Chebyshev { m } => Ok(PolyPlan {
            poly: poly::chebyshev_poly(m),
            approx_err: 0.0,
            stat_eps: if deterministic { 0.0 } else { req.eps },
        }),
        FunctionSpec::Inverse { kappa, eps } => {
            if let Some(declared) = inst.meta.kappa {
                if declared > kappa + 1e-9 {
                    return Err(Error::InvalidParam(format!(
                        "declared condition number {declared} exceeds the requested κ {kappa}"
                    )));
                }
            }
            let approx = eps
                .unwrap_or(if deterministic { req.eps } else { req.eps / 2.0 })
                .min(req.eps);
            let stat = if deterministic { 0.0 } else { req.eps - approx };
            if !deterministic && stat <= 0.0 {
                return Err(Error::BudgetInfeasible(
                    "no statistical budget left after the inverse approximation".into(),
                ));
            }
            // The expansion approximates 1/x on [-1,-1/κ] ∪ [1/κ,1] only,
            // so normalize by a declared spectral bound σ and use
            // (1/σ)·p(x/σ); the error budget transfers as ε_p = σ·approx.
            let sigma = declared_spectral_bound(inst).ok_or(Error::MissingMetadata(
                "a declared norm bound fixing the inverse approximation domain",
            ))?;
            let eps_p = (approx * sigma).min(0.5);
            let expansion = poly::inverse_poly(kappa, eps_p, caps.inverse_coeff_cap)?;
            let poly = expansion
                .poly
                .compose_scale_inv(sigma)
                .scale_coeffs(Complex64::new(1.0 / sigma, 0.0));
            Ok(PolyPlan {
                poly,
                approx_err: eps_p / sigma,
                stat_eps: stat,
            })
        }
        FunctionSpec::TimeEvolution { t, eps } => {
            if t == 0.0 {
                return Ok(PolyPlan {
                    poly: PolynomialSpec::constant(Complex64::new(1.0, 0.0)),
                    approx_err: 0.0,
                    stat_eps: if deterministic { 0.0 } else { req.eps },
                });
            }
            let approx = eps
                .unwrap_or(if deterministic { req.eps } else { req.eps / 2.0 })
                .min(req.eps)
                .min(0.9 / std::f64::consts::E);
            let stat = if deterministic { 0.0 } else { req.eps - approx };
            if !deterministic && stat <= 0.0 {
                return Err(Error::BudgetInfeasible(
                    "no statistical budget left after the Taylor approximation".into(),
                ));
            }
            if deterministic {
                // Chebyshev-domain expansion: needs a declared bound ||A|| ≤ 1.
                match declared_spectral_bound(inst) {
                    Some(b) if b <= 1.0 + 1e-9 => {}
                    _ => {
                        return Err(Error::MissingMetadata(
                            "a declared norm bound ≤ 1 for the Chebyshev-domain expansion",
                        ))
                    }
                }
                let expansion = poly::anger_jacobi_poly(t, approx / 2.0)?;
                Ok(PolyPlan {
                    poly: expansion.poly,
                    approx_err: approx,
                    stat_eps: stat,
                })
            } else {
                let gamma = gamma.ok_or(Error::MissingMetadata(
                    "a sampling normalizer (1-norm or Pauli norm) for fragmented time evolution",
                ))?;
                let (in_normalized, _, _) = poly::taylor_combined_poly(t, gamma, approx)?;
                Ok(PolyPlan {
                    poly: in_normalized.compose_scale_inv(gamma),
                    approx_err: approx,
                    stat_eps: stat,
                })
            }
        }
    }
}

/// Effective polynomial degree the request induces, for routing decisions.
fn effective_degree(f: &FunctionSpec, eps: f64, _caps: &Caps) -> Result<usize> {
    Ok(match *f {
        FunctionSpec::Monomial { m } | FunctionSpec::Chebyshev { m } => m,
        FunctionSpec::Inverse { kappa, eps: fe } => {
            let e = fe.unwrap_or(eps / 2.0);
            let b = ((kappa * kappa * (kappa / e).ln()).ceil() as usize).max(1);
            2 * b - 1
        }
        FunctionSpec::TimeEvolution { t, eps: fe } => {
            if t == 0.0 {
                0
            } else {
                let e = fe.unwrap_or(eps / 2.0).min(0.9 / std::f64::consts::E);
                poly::anger_jacobi_order(t, e / 2.0)?
            }
        }
    })
}

fn hard_row(f: &FunctionSpec, access: &AccessForm) -> String {
    let family = match f {
        FunctionSpec::Monomial { .. } => "matrix power",
        FunctionSpec::Chebyshev { .. } => "Chebyshev polynomial",
        FunctionSpec::Inverse { .. } => "matrix inverse",
        FunctionSpec::TimeEvolution { .. } => "time evolution",
    };
    format!(
        "{family}, {} access, only ||A|| ≤ 1 available — no efficient classical \
         algorithm in the catalog covers this row (it stays complete for \
         polynomial-time quantum computation even at ||A||_1 ≤ 2, s = 4)",
        access.model_name()
    )
}

/// Deterministic regime selection from declared metadata, in fixed rule
/// order: explicit super-sparse forms go to the closure algorithms, bounded
/// l1 weight goes to Monte Carlo, a declared spectral margin sends matrix
/// powers to the norm-decay shortcut, small path work goes to the exact
/// recursion, and anything else is refused with the matching catalog row.
pub fn route(inst: &Instance, req: &EstimateRequest, caps: &Caps) -> Result<Algorithm> {
    let deg = effective_degree(&req.function, req.eps, caps)?;
    match &inst.access {
        AccessForm::Super(_) | AccessForm::Dense(_) => return Ok(Algorithm::SupersparseCb),
        AccessForm::Pauli(p) => {
            let rank = closure_rank(p.operator().terms().iter().map(|(_, s)| *s));
            if rank < 63 && (1u64 << rank) <= caps.closure_terms as u64 {
                return Ok(Algorithm::SupersparsePauli);
            }
            if p.pauli_norm() <= 1.0 + 1e-12 {
                return Ok(Algorithm::McPauli);
            }
            if inst.meta.eta().is_some() && matches!(req.function, FunctionSpec::Monomial { .. }) {
                return Ok(Algorithm::NormDecay);
            }
            let oracle_s = p.to_sparse_oracle().sparsity();
            if deg as f64 * (oracle_s.max(1) as f64).log2() <= caps.path_work_log2 {
                return Ok(Algorithm::ExactPath);
            }
        }
        AccessForm::Sparse(o) => {
            if inst.meta.one_norm.map_or(false, |b| b <= 1.0 + 1e-12) {
                return Ok(Algorithm::McSparse);
            }
            if inst.meta.eta().is_some() && matches!(req.function, FunctionSpec::Monomial { .. }) {
                return Ok(Algorithm::NormDecay);
            }
            let s = inst.meta.s.unwrap_or_else(|| o.sparsity());
            if deg as f64 * (s.max(1) as f64).log2() <= caps.path_work_log2 {
                return Ok(Algorithm::ExactPath);
            }
        }
    }
    Err(Error::HardRegime {
        row: hard_row(&req.function, &inst.access),
    })
}

fn as_oracle(access: &AccessForm, caps: &Caps) -> Result<SparseOracle> {
    match access {
        AccessForm::Sparse(o) => Ok(o.clone()),
        AccessForm::Super(s) => Ok(s.to_oracle()),
        AccessForm::Pauli(p) => Ok(p.to_sparse_oracle()),
        AccessForm::Dense(d) => Ok(dense_to_supersparse(d, caps)?.to_oracle()),
    }
}

fn dense_to_supersparse(d: &crate::dense::DenseMatrix, caps: &Caps) -> Result<SuperSparseMatrix> {
    if d.dim() > caps.dense_cap {
        return Err(Error::CapExceeded {
            what: "dense dimension",
            have: d.dim() as u64,
            cap: caps.dense_cap as u64,
        });
    }
    let mut entries = Vec::new();
    for i in 0..d.dim() {
        for j in 0..d.dim() {
            let v = d.get(i, j);
            if v.norm() > 0.0 {
                entries.push((i, j, v));
            }
        }
    }
    SuperSparseMatrix::new(d.dim(), entries)
}

fn mc_cfg(plan: &PolyPlan, req: &EstimateRequest, caps: &Caps) -> McConfig {
    McConfig {
        eps: plan.stat_eps,
        delta: req.delta,
        seed: req.seed,
        max_samples: caps.max_samples,
    }
}

/// The sampling normalizer for sparse Monte Carlo: the declared 1-norm, or
/// the exact scan when the form carries its entries explicitly.
fn sparse_one_norm(inst: &Instance) -> Result<f64> {
    if let Some(b) = inst.meta.one_norm {
        return Ok(b);
    }
    match &inst.access {
        AccessForm::Super(s) => Ok(s.induced_one_norm()),
        AccessForm::Dense(d) => Ok(crate::access::dense_induced_one_norm(d)),
        _ => Err(Error::MissingMetadata("induced 1-norm")),
    }
}

fn run_norm_decay(
    inst: &Instance,
    req: &EstimateRequest,
    target: Target,
    caps: &Caps,
) -> Result<Estimate> {
    let m = match req.function {
        FunctionSpec::Monomial { m } => m,
        _ => {
            return Err(Error::InvalidParam(
                "norm-decay shortcut applies to matrix powers only".into(),
            ))
        }
    };
    let eta = inst.meta.eta().ok_or(Error::MissingMetadata(
        "declared operator norm below 1 (spectral margin η)",
    ))?;
    let contraction = 1.0 - eta;
    match target {
        Target::Entry { .. } => {
            // 0 is an ε-approximation once (1-η)^m ≤ ε
            if m as f64 * contraction.ln() <= req.eps.ln() {
                return Ok(Estimate::exact(
                    Complex64::new(0.0, 0.0),
                    contraction.powi(m as i32),
                    Algorithm::NormDecay,
                ));
            }
        }
        Target::Lm { .. } => {
            if 2.0 * (m as f64) * contraction.ln() <= req.eps.ln() {
                return Ok(Estimate::exact(
                    Complex64::new(0.0, 0.0),
                    contraction.powi(2 * m as i32),
                    Algorithm::NormDecay,
                ));
            }
        }
        Target::Nlm { .. } => {
            return Err(Error::InvalidParam(
                "normalized target is handled by the dispatcher".into(),
            ))
        }
    }
    // below threshold: delegate to the Pauli sampler or the exact recursion
    let plan = PolyPlan {
        poly: PolynomialSpec::monomial(m),
        approx_err: 0.0,
        stat_eps: req.eps,
    };
    let mut est = match &inst.access {
        AccessForm::Pauli(p) => match target {
            Target::Entry { i, j } => {
                mc::mc_entry_pauli(p, &plan.poly, i, j, &mc_cfg(&plan, req, caps))?
            }
            Target::Lm { i } => mc::mc_lm_pauli(p, &plan.poly, i, &mc_cfg(&plan, req, caps))?,
            Target::Nlm { .. } => unreachable!(),
        },
        other => {
            let o = as_oracle(other, caps)?;
            match target {
                Target::Entry { i, j } => Estimate::exact(
                    exact::exact_entry_path(&o, i, j, m, caps)?,
                    0.0,
                    Algorithm::NormDecay,
                ),
                Target::Lm { i } => Estimate::exact(
                    exact::exact_lm_path(&o, i, i, m, m, caps)?,
                    0.0,
                    Algorithm::NormDecay,
                ),
                Target::Nlm { .. } => unreachable!(),
            }
        }
    };
    est.algorithm = Algorithm::NormDecay;
    Ok(est)
}

/// Runs a single (non-normalized) target under a fixed algorithm.
fn run_plain(
    inst: &Instance,
    req: &EstimateRequest,
    alg: Algorithm,
    target: Target,
    caps: &Caps,
) -> Result<Estimate> {
    match alg {
        Algorithm::Auto => unreachable!("resolved before dispatch"),
        Algorithm::NormDecay => run_norm_decay(inst, req, target, caps),
        Algorithm::ExactPath => {
            let plan = build_plan(inst, req, alg, None, caps)?;
            let o = as_oracle(&inst.access, caps)?;
            let value = match target {
                Target::Entry { i, j } => exact::exact_entry_poly(&o, &plan.poly, i, j, caps)?,
                Target::Lm { i } => exact::exact_lm_poly(&o, &plan.poly, i, caps)?,
                Target::Nlm { .. } => unreachable!(),
            };
            Ok(Estimate::exact(value, plan.approx_err, Algorithm::ExactPath))
        }
        Algorithm::SupersparseCb => {
            let plan = build_plan(inst, req, alg, None, caps)?;
            let ssm = match &inst.access {
                AccessForm::Super(s) => s.clone(),
                AccessForm::Dense(d) => dense_to_supersparse(d, caps)?,
                _ => {
                    return Err(Error::InvalidParam(
                        "explicit entry list required for the computational-basis closure".into(),
                    ))
                }
            };
            let value = match target {
                Target::Entry { i, j } => {
                    supersparse::supersparse_entry(&ssm, &plan.poly, i, j, caps)?
                }
                Target::Lm { i } => {
                    Complex64::new(supersparse::supersparse_lm(&ssm, &plan.poly, i, caps)?, 0.0)
                }
                Target::Nlm { .. } => unreachable!(),
            };
            Ok(Estimate::exact(value, plan.approx_err, Algorithm::SupersparseCb))
        }
        Algorithm::SupersparsePauli => {
            let plan = build_plan(inst, req, alg, None, caps)?;
            let p = match &inst.access {
                AccessForm::Pauli(p) => p,
                _ => return Err(Error::InvalidParam("Pauli access required".into())),
            };
            let rep = supersparse::pauli_supersparse_apply(p, &plan.poly, caps)?;
            let value = match target {
                Target::Entry { i, j } => supersparse::pauli_rep_entry(&rep, i, j)?,
                Target::Lm { i } => Complex64::new(supersparse::pauli_rep_lm(&rep, i)?, 0.0),
                Target::Nlm { .. } => unreachable!(),
            };
            Ok(Estimate::exact(
                value,
                plan.approx_err,
                Algorithm::SupersparsePauli,
            ))
        }
        Algorithm::McSparse => {
            let b = sparse_one_norm(inst)?;
            let plan = build_plan(inst, req, alg, Some(b), caps)?;
            let o = as_oracle(&inst.access, caps)?;
            let cfg = mc_cfg(&plan, req, caps);
            let mut est = match target {
                Target::Entry { i, j } => mc::mc_entry_sparse(&o, b, &plan.poly, i, j, &cfg)?,
                Target::Lm { i } => mc::mc_lm_sparse(&o, b, &plan.poly, i, &cfg)?,
                Target::Nlm { .. } => unreachable!(),
            };
            est.half_width += plan.approx_err;
            Ok(est)
        }
        Algorithm::McPauli => {
            let p = match &inst.access {
                AccessForm::Pauli(p) => p,
                _ => return Err(Error::InvalidParam("Pauli access required".into())),
            };
            let plan = build_plan(inst, req, alg, Some(p.pauli_norm()), caps)?;
            let cfg = mc_cfg(&plan, req, caps);
            let mut est = match target {
                Target::Entry { i, j } => mc::mc_entry_pauli(p, &plan.poly, i, j, &cfg)?,
                Target::Lm { i } => mc::mc_lm_pauli(p, &plan.poly, i, &cfg)?,
                Target::Nlm { .. } => unreachable!(),
            };
            est.half_width += plan.approx_err;
            Ok(est)
        }
        Algorithm::Sketch => {
            let p = match &inst.access {
                AccessForm::Pauli(p) => p,
                _ => return Err(Error::InvalidParam("Pauli access required".into())),
            };
            if !req.function.is_polynomial() {
                return Err(Error::InvalidParam(
                    "the sketch route handles bounded polynomial families only".into(),
                ));
            }
            let plan = build_plan(inst, req, alg, None, caps)?;
            let eta = 1.0 - p.pauli_norm();
            sketch::sketch_then_eval(
                p,
                &plan.poly,
                &target,
                req.eps,
                req.delta,
                eta,
                req.seed,
                caps,
            )
        }
    }
}

/// Denominator `||f(A)|i>||²` for the normalized local measurement, as an
/// estimate of the (i,i) entry of `f̄·f`.
fn run_denominator(
    inst: &Instance,
    req: &EstimateRequest,
    alg: Algorithm,
    i: usize,
    caps: &Caps,
) -> Result<Estimate> {
    let fmax = function_max(&req.function);
    match alg {
        Algorithm::SupersparsePauli => {
            let plan = build_plan(inst, req, alg, None, caps)?;
            let p = match &inst.access {
                AccessForm::Pauli(p) => p,
                _ => return Err(Error::InvalidParam("Pauli access required".into())),
            };
            let rep = supersparse::pauli_supersparse_apply(p, &plan.poly, caps)?;
            let v = supersparse::pauli_rep_state_norm_sqr(&rep, i)?;
            Ok(Estimate::exact(
                Complex64::new(v, 0.0),
                plan.approx_err * (2.0 * fmax + plan.approx_err),
                alg,
            ))
        }
        Algorithm::SupersparseCb => {
            let plan = build_plan(inst, req, alg, None, caps)?;
            let ssm = match &inst.access {
                AccessForm::Super(s) => s.clone(),
                AccessForm::Dense(d) => dense_to_supersparse(d, caps)?,
                _ => return Err(Error::InvalidParam("explicit entry list required".into())),
            };
            let v = supersparse::supersparse_state_norm_sqr(&ssm, &plan.poly, i, caps)?;
            Ok(Estimate::exact(
                Complex64::new(v, 0.0),
                plan.approx_err * (2.0 * fmax + plan.approx_err),
                alg,
            ))
        }
        _ => {
            // |f|² is itself a polynomial: estimate its (i,i) entry
            let gamma = sampling_gamma(inst, alg);
            let plan = build_plan(inst, req, alg, gamma, caps)?;
            let sq = plan.poly.abs_square();
            let approx_sq = plan.approx_err * (2.0 * fmax + plan.approx_err);
            let mut est = match (alg, &inst.access) {
                (Algorithm::McSparse, _) => {
                    let b = sparse_one_norm(inst)?;
                    let o = as_oracle(&inst.access, caps)?;
                    mc::mc_entry_sparse(&o, b, &sq, i, i, &mc_cfg(&plan, req, caps))?
                }
                (Algorithm::McPauli | Algorithm::Sketch | Algorithm::NormDecay, AccessForm::Pauli(p)) => {
                    mc::mc_entry_pauli(p, &sq, i, i, &mc_cfg(&plan, req, caps))?
                }
                _ => {
                    let o = as_oracle(&inst.access, caps)?;
                    Estimate::exact(exact::exact_entry_poly(&o, &sq, i, i, caps)?, 0.0, alg)
                }
            };
            est.half_width += approx_sq;
            Ok(est)
        }
    }
}

fn sampling_gamma(inst: &Instance, alg: Algorithm) -> Option<f64> {
    match alg {
        Algorithm::McPauli | Algorithm::Sketch => match &inst.access {
            AccessForm::Pauli(p) => Some(p.pauli_norm()),
            _ => None,
        },
        Algorithm::McSparse => sparse_one_norm(inst).ok(),
        _ => None,
    }
}

/// Top-level entry point: routes (or honors a forced algorithm), lowers the
/// function to polynomial work, runs the estimator, and handles the
/// normalized ratio with first-order error propagation and a positivity
/// guard on the denominator.
pub fn estimate(inst: &Instance, req: &EstimateRequest, caps: &Caps) -> Result<Estimate> {
    req.validate()?;
    let dim = inst.dim();
    match req.target {
        Target::Entry { i, j } => {
            if i >= dim || j >= dim {
                return Err(Error::IndexOutOfRange {
                    index: i.max(j),
                    dim,
                });
            }
        }
        Target::Lm { i } | Target::Nlm { i } => {
            if i >= dim {
                return Err(Error::IndexOutOfRange { index: i, dim });
            }
            if dim % 2 != 0 {
                return Err(Error::InvalidParam(
                    "local measurement needs an even dimension".into(),
                ));
            }
        }
    }
    let alg = match req.algorithm {
        Algorithm::Auto => route(inst, req, caps)?,
        forced => forced,
    };
    match req.target {
        Target::Entry { .. } | Target::Lm { .. } => run_plain(inst, req, alg, req.target, caps),
        Target::Nlm { i } => {
            let num = run_plain(inst, req, alg, Target::Lm { i }, caps)?;
            let den = run_denominator(inst, req, alg, i, caps)?;
            let d = den.value.re;
            if d - den.half_width <= 0.0 {
                return Err(Error::DenominatorNotPositive);
            }
            let value = num.value / d;
            let half = (num.half_width + value.norm() * den.half_width) / (d - den.half_width);
            Ok(Estimate {
                value,
                half_width: half,
                samples_used: num.samples_used + den.samples_used,
                algorithm: alg,
                wall_time: std::time::Duration::ZERO,
            })
        }
    }
}

/// Both sides of the tracial screen `<i|A^m π A^m|i> ≤ ||A^m|i>||²` on a
/// dense form.
pub fn holder_screen(d: &crate::dense::DenseMatrix, m: u64, i: usize) -> (f64, f64) {
    let am = d.pow_int(m);
    let n = d.dim();
    let mut lm = 0.0;
    let mut norm = 0.0;
    for k in 0..n {
        let a = am.get(k, i).norm_sqr();
        norm += a;
        if in_projector(k, n) {
            lm += a;
        }
    }
    (lm, norm)
}
