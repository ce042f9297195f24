//! Experiment configuration: a strict JSON schema (unknown fields rejected)
//! naming the problem, solver(s), iteration count, schedule and seeds.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProblemKind {
    Summarization,
    Movierec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverKind {
    ContinuousGreedy,
    MirrorProx,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScheduleKind {
    /// `γ_t = 1/(2√T)`.
    Fixed,
    /// `γ_t = 1/(2 t^{(1−σ)/2} Σβ)` from the objective's modulus.
    Theory,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub problem: ProblemKind,
    pub solver: SolverKind,
    #[serde(rename = "T")]
    pub iterations: usize,
    pub schedule: ScheduleKind,
    /// Wasserstein radius (movierec only).
    #[serde(default)]
    pub theta: Option<f64>,
    /// Inner regularization accuracy (movierec only).
    #[serde(default)]
    pub eps: Option<f64>,
    /// Inner gap target (movierec only).
    #[serde(default)]
    pub delta: Option<f64>,
    pub seed: u64,
    pub output_dir: String,
    /// Summarization item count (default 50).
    #[serde(default)]
    pub k: Option<usize>,
    /// Movierec sampled-user count N (default 10).
    #[serde(default)]
    pub n_samples: Option<usize>,
    /// Movierec most-rated-movie cap (default 50).
    #[serde(default)]
    pub m_cap: Option<usize>,
    /// Region budget: score mass (summarization, default 5) or picks
    /// (movierec, default 5).
    #[serde(default)]
    pub budget: Option<f64>,
    /// Path to a MovieLens ratings file; a seeded synthetic dataset is used
    /// when absent.
    #[serde(default)]
    pub ratings_path: Option<String>,
    /// Multilinear sampling batch for large movie grounds (default 10).
    #[serde(default)]
    pub sample_batch: Option<usize>,
}

impl ExperimentConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        let cfg: ExperimentConfig = serde_json::from_str(&text)
            .with_context(|| format!("config {} does not match the schema", path.display()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            bail!("field T: must be at least 1");
        }
        if self.output_dir.is_empty() {
            bail!("field output_dir: must be nonempty");
        }
        match self.problem {
            ProblemKind::Summarization => {
                if self.theta.is_some() || self.eps.is_some() || self.delta.is_some() {
                    bail!("fields theta/eps/delta: only meaningful for problem = movierec");
                }
                if let Some(k) = self.k {
                    let budget = self.budget.unwrap_or(5.0);
                    if !(budget > 0.0) || budget > k as f64 {
                        bail!("field budget: {budget} infeasible for k = {k}");
                    }
                }
            }
            ProblemKind::Movierec => {
                if self.k.is_some() {
                    bail!("field k: only meaningful for problem = summarization");
                }
                if self.iterations < 3 && self.solver != SolverKind::ContinuousGreedy {
                    bail!("field T: mirror-prox needs T >= 3");
                }
                for (name, v) in [("theta", self.theta), ("eps", self.eps), ("delta", self.delta)]
                {
                    if let Some(v) = v {
                        if !(v > 0.0) || !v.is_finite() {
                            bail!("field {name}: must be positive and finite, got {v}");
                        }
                    }
                }
                let m_cap = self.m_cap.unwrap_or(50);
                let budget = self.budget.unwrap_or(5.0);
                if budget.fract() != 0.0 || !(budget > 0.0) || budget > m_cap as f64 {
                    bail!("field budget: must be a positive integer at most m_cap = {m_cap}");
                }
            }
        }
        if self.problem == ProblemKind::Summarization && self.iterations < 3 {
            if self.solver != SolverKind::ContinuousGreedy {
                bail!("field T: mirror-prox needs T >= 3");
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base_json() -> serde_json::Value {
        serde_json::json!({
            "problem": "summarization",
            "solver": "both",
            "T": 50,
            "schedule": "fixed",
            "seed": 7,
            "output_dir": "out"
        })
    }

    #[test]
    fn accepts_minimal_config() {
        let cfg: ExperimentConfig = serde_json::from_value(base_json()).unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.problem, ProblemKind::Summarization);
        assert_eq!(cfg.iterations, 50);
    }

    #[test]
    fn rejects_unknown_fields() {
        let mut v = base_json();
        v["scheduel"] = serde_json::json!("fixed");
        let err = serde_json::from_value::<ExperimentConfig>(v).unwrap_err();
        assert!(err.to_string().contains("scheduel"), "{err}");
    }

    #[test]
    fn rejects_cross_problem_fields() {
        let mut v = base_json();
        v["theta"] = serde_json::json!(0.2);
        let cfg: ExperimentConfig = serde_json::from_value(v).unwrap();
        let err = cfg.validate().unwrap_err();
        assert!(err.to_string().contains("theta"), "{err}");
    }

    #[test]
    fn rejects_zero_iterations() {
        let mut v = base_json();
        v["T"] = serde_json::json!(0);
        let cfg: ExperimentConfig = serde_json::from_value(v).unwrap();
        assert!(cfg.validate().is_err());
    }
}
