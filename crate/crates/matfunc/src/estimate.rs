//! Request and result types shared by every estimator, plus the
//! promise-problem decision helper.

use std::time::Duration;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::poly::FunctionSpec;

/// What to estimate: a matrix element, a local measurement
/// `<i|f(A)† π f(A)|i>` with `π` the top-half projector, or its normalized
/// form (divided by `||f(A)|i>||²`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Target {
    Entry { i: usize, j: usize },
    Lm { i: usize },
    Nlm { i: usize },
}

impl Target {
    pub fn parse(text: &str) -> Option<Target> {
        let (kind, rest) = text.split_once(':')?;
        match kind {
            "entry" => {
                let (a, b) = rest.split_once(',')?;
                Some(Target::Entry {
                    i: a.trim().parse().ok()?,
                    j: b.trim().parse().ok()?,
                })
            }
            "lm" => Some(Target::Lm {
                i: rest.trim().parse().ok()?,
            }),
            "nlm" => Some(Target::Nlm {
                i: rest.trim().parse().ok()?,
            }),
            _ => None,
        }
    }
}

impl std::fmt::Display for Target {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Target::Entry { i, j } => write!(f, "entry:{i},{j}"),
            Target::Lm { i } => write!(f, "lm:{i}"),
            Target::Nlm { i } => write!(f, "nlm:{i}"),
        }
    }
}

/// Algorithm selection: automatic routing or a forced estimator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Auto,
    ExactPath,
    McSparse,
    McPauli,
    SupersparseCb,
    SupersparsePauli,
    Sketch,
    NormDecay,
}

impl Algorithm {
    pub fn tag(&self) -> &'static str {
        match self {
            Algorithm::Auto => "auto",
            Algorithm::ExactPath => "exact_path",
            Algorithm::McSparse => "mc_sparse",
            Algorithm::McPauli => "mc_pauli",
            Algorithm::SupersparseCb => "supersparse_cb",
            Algorithm::SupersparsePauli => "supersparse_pauli",
            Algorithm::Sketch => "sketch",
            Algorithm::NormDecay => "norm_decay",
        }
    }

    pub fn parse(text: &str) -> Option<Algorithm> {
        Some(match text {
            "auto" => Algorithm::Auto,
            "exact_path" => Algorithm::ExactPath,
            "mc_sparse" => Algorithm::McSparse,
            "mc_pauli" => Algorithm::McPauli,
            "supersparse_cb" => Algorithm::SupersparseCb,
            "supersparse_pauli" => Algorithm::SupersparsePauli,
            "sketch" => Algorithm::Sketch,
            "norm_decay" => Algorithm::NormDecay,
            _ => return None,
        })
    }
}

/// A full estimation request.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EstimateRequest {
    pub target: Target,
    pub function: FunctionSpec,
    pub eps: f64,
    pub delta: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    pub seed: u64,
    pub algorithm: Algorithm,
}

impl EstimateRequest {
    pub fn validate(&self) -> crate::error::Result<()> {
        if !(self.eps > 0.0) {
            return Err(crate::error::Error::InvalidParam(
                "precision must be positive".into(),
            ));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(crate::error::Error::InvalidParam(
                "confidence delta must be in (0,1)".into(),
            ));
        }
        self.function.validate()
    }
}

/// An estimate with its claimed additive error bound. Deterministic
/// algorithms report `samples_used = 0` and an analytic `half_width`.
#[derive(Debug, Clone, PartialEq)]
pub struct Estimate {
    pub value: Complex64,
    pub half_width: f64,
    pub samples_used: u64,
    pub algorithm: Algorithm,
    pub wall_time: Duration,
}

impl Estimate {
    pub fn exact(value: Complex64, half_width: f64, algorithm: Algorithm) -> Self {
        Estimate {
            value,
            half_width,
            samples_used: 0,
            algorithm,
            wall_time: Duration::ZERO,
        }
    }

    /// JSON per the external schema; `wall_time` is intentionally not
    /// serialized so outputs are reproducible byte for byte.
    pub fn to_json(&self, decision: Option<Decision>) -> serde_json::Value {
        let mut v = serde_json::json!({
            "value": {"re": self.value.re, "im": self.value.im},
            "half_width": self.half_width,
            "samples": self.samples_used,
            "algorithm": self.algorithm.tag(),
        });
        if let Some(d) = decision {
            v["decision"] = serde_json::Value::String(d.tag().to_string());
        }
        v
    }
}

/// Promise-problem outcome. `Undecided` is a legal output: the promise may
/// be violated or the half width may straddle the threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Yes,
    No,
    Undecided,
}

impl Decision {
    pub fn tag(&self) -> &'static str {
        match self {
            Decision::Yes => "yes",
            Decision::No => "no",
            Decision::Undecided => "undecided",
        }
    }
}

/// YES when the estimate minus its half width clears the threshold, NO when
/// the estimate plus its half width stays below it.
pub fn decide(estimate: &Estimate, threshold: f64) -> Decision {
    let v = estimate.value.re;
    if v - estimate.half_width >= threshold {
        Decision::Yes
    } else if v + estimate.half_width <= threshold {
        Decision::No
    } else {
        Decision::Undecided
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decide_examples() {
        let eps = 0.1;
        let g = 1.0;
        let mk = |v: f64, hw: f64| Estimate::exact(Complex64::new(v, 0.0), hw, Algorithm::Auto);
        assert_eq!(decide(&mk(g + 2.0 * eps, eps / 2.0), g), Decision::Yes);
        assert_eq!(decide(&mk(g - 2.0 * eps, eps / 2.0), g), Decision::No);
        assert_eq!(decide(&mk(g, eps), g), Decision::Undecided);
    }

    #[test]
    fn target_parsing() {
        assert_eq!(Target::parse("entry:3,4"), Some(Target::Entry { i: 3, j: 4 }));
        assert_eq!(Target::parse("lm:0"), Some(Target::Lm { i: 0 }));
        assert_eq!(Target::parse("nlm:2"), Some(Target::Nlm { i: 2 }));
        assert_eq!(Target::parse("bogus:1"), None);
    }

    #[test]
    fn estimate_json_schema() {
        let e = Estimate::exact(Complex64::new(0.5, -0.25), 1e-9, Algorithm::SupersparseCb);
        let j = e.to_json(Some(Decision::No));
        assert_eq!(j["value"]["re"], 0.5);
        assert_eq!(j["algorithm"], "supersparse_cb");
        assert_eq!(j["decision"], "no");
        assert!(e.to_json(None).get("decision").is_none());
    }
}
