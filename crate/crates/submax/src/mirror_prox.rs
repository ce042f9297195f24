//! Mirror-prox (extragradient) method for monotone up-concave objectives
//! whose up-super-gradients vary by at most `h(‖x − y‖)` in the dual norm.
//! Handles non-differentiable and non-smooth objectives (`σ = 0`).
//!
//! Each iteration takes two prox steps from the same base point and the
//! solver returns the best half-step iterate over the last two-thirds
//! candidate window.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::holder::HolderModulus;
use crate::mirror::MirrorMap;
use crate::objective::Objective;
use crate::region::FeasibleRegion;
use crate::report::{SolveReport, TrajectoryPoint};
use crate::scalar::{cast, Real};

/// Step-size rule `γ_t`.
#[derive(Debug, Clone)]
pub enum StepSchedule<T> {
    /// `γ_t = 1 / (2 t^{(1−σ)/2} Σβ_i)` with `σ = sigma_min` of the modulus.
    Theory(HolderModulus<T>),
    /// Constant `γ_t = γ` (e.g. `1/(2√T)`).
    Fixed(T),
}

impl<T: Real> StepSchedule<T> {
    pub fn step_size(&self, t: usize) -> T {
        debug_assert!(t >= 1);
        match self {
            StepSchedule::Theory(h) => {
                let sigma = h.sigma_min();
                let exponent = (T::one() - sigma) / cast::<T>(2.0);
                T::one() / (cast::<T>(2.0) * cast::<T>(t as f64).powf(exponent) * h.beta_sum())
            }
            StepSchedule::Fixed(gamma) => *gamma,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            StepSchedule::Theory(h) => format!(
                "theory(sigma={}, beta_sum={})",
                h.sigma_min(),
                h.beta_sum()
            ),
            StepSchedule::Fixed(g) => format!("fixed(gamma={g})"),
        }
    }

    fn validate(&self) -> Result<()> {
        if let StepSchedule::Fixed(g) = self {
            if !(*g > T::zero()) || !g.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "fixed step size must be positive, got {g}"
                )));
            }
        }
        Ok(())
    }
}

/// Candidate window `{T_0, …, T−1}` with `T_0 = ⌊(T−2)/3⌋ + 1`: the half-step
/// iterates `x_{t+1/2}` for `t` in this range compete for the returned point.
pub fn candidate_window(iterations: usize) -> Result<(usize, usize)> {
    if iterations < 3 {
        return Err(Error::InvalidParameter(format!(
            "mirror-prox needs T >= 3 so the candidate window is nonempty, got {iterations}"
        )));
    }
    Ok(((iterations - 2) / 3 + 1, iterations - 1))
}

#[derive(Debug, Clone)]
pub struct MirrorProxConfig<T> {
    pub iterations: usize,
    pub schedule: StepSchedule<T>,
    pub record_trajectory: bool,
}

impl<T: Real> MirrorProxConfig<T> {
    pub fn new(iterations: usize, schedule: StepSchedule<T>) -> Self {
        MirrorProxConfig {
            iterations,
            schedule,
            record_trajectory: false,
        }
    }
}

/// Runs mirror-prox and returns the half-step iterate with the best objective
/// value over the candidate window (lowest iteration index on exact ties).
///
/// Oracles with stochastic evaluation must make `value` deterministic (fixed
/// evaluation seed and batch) so the window argmax is reproducible; shipped
/// sampling oracles do this.
pub fn mirror_prox<T: Real>(
    objective: &dyn Objective<T>,
    region: &FeasibleRegion<T>,
    map: &dyn MirrorMap<T>,
    cfg: &MirrorProxConfig<T>,
) -> Result<SolveReport<T>> {
    let (win_first, win_last) = candidate_window(cfg.iterations)?;
    cfg.schedule.validate()?;
    if objective.dim() != region.dim() {
        return Err(Error::DimensionMismatch {
            expected: region.dim(),
            got: objective.dim(),
        });
    }

    let start = Instant::now();
    let mut x = map.phi_argmin(region)?;
    let mut best: Option<(usize, T, crate::vector::Vector<T>)> = None;
    let mut trajectory = Vec::new();

    for t in 1..cfg.iterations {
        if cfg.record_trajectory {
            trajectory.push(TrajectoryPoint {
                iteration: t,
                value: objective.value(&x),
                seconds: start.elapsed().as_secs_f64(),
            });
        }
        let gamma = cfg.schedule.step_size(t);

        let g = objective.supergradient(&x);
        let x_half = map.prox(region, &x, &g.scale(-gamma))?;
        let g_half = objective.supergradient(&x_half);
        let x_next = map.prox(region, &x, &g_half.scale(-gamma))?;

        if t >= win_first && t <= win_last {
            let value = objective.value(&x_half);
            let better = match &best {
                None => true,
                Some((_, best_value, _)) => value > *best_value,
            };
            if better {
                best = Some((t, value, x_half));
            }
        }
        x = x_next;
    }
    if cfg.record_trajectory {
        trajectory.push(TrajectoryPoint {
            iteration: cfg.iterations,
            value: objective.value(&x),
            seconds: start.elapsed().as_secs_f64(),
        });
    }

    let (best_t, value, solution) = best.expect("window nonempty for T >= 3");
    let mut report = SolveReport::new("mirror_prox", solution, value);
    report.trajectory = trajectory;
    report.config_echo = format!(
        "mirror_prox(T={}, schedule={}, window=[{},{}], best_half_step_t={}, tie_break=lowest_index, mirror_map=euclidean)",
        cfg.iterations,
        cfg.schedule.describe(),
        win_first,
        win_last,
        best_t,
    );
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mirror::EuclideanMap;
    use crate::norm::NormKind;
    use crate::objective::{ConstantObjective, LinearObjective};
    use crate::vector::Vector;

    #[test]
    fn step_sizes_match_formula() {
        let h = HolderModulus::<f64>::single(1.0, 0.0).unwrap();
        let sched = StepSchedule::Theory(h);
        assert!((sched.step_size(4) - 0.25).abs() < 1e-15);

        let smooth = StepSchedule::Theory(HolderModulus::<f64>::single(1.0, 1.0).unwrap());
        for t in [1, 7, 100] {
            assert!((smooth.step_size(t) - 0.5).abs() < 1e-15);
        }

        let fixed = StepSchedule::Fixed(0.1f64);
        assert_eq!(fixed.step_size(77), 0.1);
    }

    #[test]
    fn window_formula() {
        assert_eq!(candidate_window(50).unwrap(), (17, 49));
        assert_eq!(candidate_window(3).unwrap(), (1, 2));
        assert_eq!(candidate_window(5).unwrap(), (2, 4));
        assert!(candidate_window(2).is_err());
    }

    #[test]
    fn linear_on_unit_box_beats_half_opt() {
        let obj = LinearObjective::new(Vector::from_raw(vec![1.0, 2.0]), NormKind::L2);
        let region = FeasibleRegion::unit_box(2);
        let cfg = MirrorProxConfig::new(
            300,
            StepSchedule::Theory(HolderModulus::single(1.0, 0.0).unwrap()),
        );
        let report = mirror_prox(&obj, &region, &EuclideanMap, &cfg).unwrap();
        assert!(report.value >= 1.5, "below the 1/2-OPT floor: {}", report.value);
        assert!(report.value >= 2.9, "empirically weak: {}", report.value);
        assert!(region.contains(&report.solution, 1e-9));
    }

    #[test]
    fn constant_objective_returns_constant() {
        let obj = ConstantObjective { value: 7.0, dim: 2 };
        let region = FeasibleRegion::unit_box(2);
        let cfg = MirrorProxConfig::new(10, StepSchedule::Fixed(0.3));
        let report = mirror_prox(&obj, &region, &EuclideanMap, &cfg).unwrap();
        assert_eq!(report.value, 7.0);
        assert!(region.contains(&report.solution, 0.0));
    }

    #[test]
    fn trajectory_has_t_rows() {
        let obj = LinearObjective::new(Vector::from_raw(vec![1.0]), NormKind::L2);
        let region = FeasibleRegion::unit_box(1);
        let mut cfg = MirrorProxConfig::new(12, StepSchedule::Fixed(0.2));
        cfg.record_trajectory = true;
        let report = mirror_prox(&obj, &region, &EuclideanMap, &cfg).unwrap();
        assert_eq!(report.trajectory.len(), 12);
        assert_eq!(report.trajectory[0].iteration, 1);
        assert_eq!(report.trajectory[11].iteration, 12);
    }
}
