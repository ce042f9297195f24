//! Continuous greedy (conditional gradient) for differentiable, monotone,
//! up-concave objectives.
//!
//! Starting from the origin, each iteration takes a linear-maximization step
//! `v_t = argmax_{v ∈ X} ⟨g_t, v⟩` and averages `x_t = (1/t)(v_1 + … + v_t)`,
//! so every iterate is a convex combination of feasible points. Gradients may
//! be inexact; an error of dual norm at most `δ` costs at most `2δR` in the
//! final value.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::objective::Objective;
use crate::region::FeasibleRegion;
use crate::report::{SolveReport, TrajectoryPoint};
use crate::scalar::{cast, Real};
use crate::vector::Vector;

/// Where the gradient oracle is queried at iteration `t`.
///
/// The averaging analysis tracks the scaled path `y_t = (t/T)·x_t`; the two
/// natural discretizations differ only in the scale factor applied to the
/// latest iterate. Both are exposed because neither dominates empirically.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GradientPoint {
    /// Evaluate at `((t−1)/T)·x_{t−1}` — the point the averaging argument
    /// works with directly. Default.
    ScaledPrev,
    /// Evaluate at `(t/T)·x_{t−1}`, the current scale applied to the latest
    /// available iterate.
    ScaledCurrent,
}

#[derive(Debug, Clone)]
pub struct GreedyConfig {
    pub iterations: usize,
    pub gradient_point: GradientPoint,
    pub record_trajectory: bool,
}

impl GreedyConfig {
    pub fn new(iterations: usize) -> Self {
        GreedyConfig {
            iterations,
            gradient_point: GradientPoint::ScaledPrev,
            record_trajectory: false,
        }
    }
}

/// Runs the continuous greedy method and returns `x_T = (1/T)(v_1 + … + v_T)`.
pub fn continuous_greedy<T: Real>(
    objective: &dyn Objective<T>,
    region: &FeasibleRegion<T>,
    cfg: &GreedyConfig,
) -> Result<SolveReport<T>> {
    if cfg.iterations == 0 {
        return Err(Error::InvalidParameter(
            "continuous greedy needs at least one iteration".into(),
        ));
    }
    if objective.dim() != region.dim() {
        return Err(Error::DimensionMismatch {
            expected: region.dim(),
            got: objective.dim(),
        });
    }

    let t_total = cast::<T>(cfg.iterations as f64);
    let start = Instant::now();
    let dim = region.dim();

    // x_0 = 0 is only a gradient anchor; it may be infeasible for
    // equality-constrained regions. All iterates x_t, t >= 1, are feasible.
    let mut x = Vector::zeros(dim);
    let mut v_sum = Vector::zeros(dim);
    let mut trajectory = Vec::new();

    for t in 1..=cfg.iterations {
        let scale = match cfg.gradient_point {
            GradientPoint::ScaledPrev => cast::<T>((t - 1) as f64) / t_total,
            GradientPoint::ScaledCurrent => cast::<T>(t as f64) / t_total,
        };
        let anchor = x.scale(scale);
        let g = objective.supergradient(&anchor);
        let v = region.lmo(&g)?;
        v_sum = v_sum.add(&v);
        x = v_sum.scale(T::one() / cast::<T>(t as f64));
        if cfg.record_trajectory {
            trajectory.push(TrajectoryPoint {
                iteration: t,
                value: objective.value(&x),
                seconds: start.elapsed().as_secs_f64(),
            });
        }
    }

    let value = objective.value(&x);
    let mut report = SolveReport::new("continuous_greedy", x, value);
    report.trajectory = trajectory;
    report.config_echo = format!(
        "continuous_greedy(T={}, gradient_point={:?})",
        cfg.iterations, cfg.gradient_point
    );
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norm::NormKind;
    use crate::objective::{LinearObjective, QuadraticObjective};

    #[test]
    fn linear_on_capped_simplex_hits_vertex() {
        let c = Vector::from_raw(vec![3.0f64, 1.0, 2.0, 0.0]);
        let obj = LinearObjective::new(c, NormKind::L2);
        let region = FeasibleRegion::capped_simplex(4, 1.0, 2.0, true).unwrap();
        let report = continuous_greedy(&obj, &region, &GreedyConfig::new(10)).unwrap();
        assert_eq!(report.solution.as_slice(), &[1.0, 0.0, 1.0, 0.0]);
        assert!((report.value - 5.0).abs() < 1e-12);
    }

    #[test]
    fn one_dimensional_monotone() {
        let obj = LinearObjective::new(Vector::from_raw(vec![1.0]), NormKind::L2);
        let region = FeasibleRegion::unit_box(1);
        let report = continuous_greedy(&obj, &region, &GreedyConfig::new(5)).unwrap();
        assert_eq!(report.solution.as_slice(), &[1.0]);
        assert_eq!(report.value, 1.0);
    }

    #[test]
    fn quadratic_close_to_grid_optimum() {
        // F = -1/2 x'Ax + b'x, A = [[1,.5],[.5,1]], b = (2,2) on the unit box
        let obj = QuadraticObjective::new(
            vec![vec![-1.0, -0.5], vec![-0.5, -1.0]],
            Vector::from_raw(vec![2.0, 2.0]),
        )
        .unwrap();
        let region = FeasibleRegion::unit_box(2);
        let report = continuous_greedy(&obj, &region, &GreedyConfig::new(200)).unwrap();

        // grid search at resolution 0.01
        let mut best = f64::NEG_INFINITY;
        for i in 0..=100 {
            for j in 0..=100 {
                let x = Vector::from_raw(vec![i as f64 / 100.0, j as f64 / 100.0]);
                best = best.max(obj.value(&x));
            }
        }
        assert!(report.value >= best - 0.02, "{} vs {best}", report.value);
    }

    #[test]
    fn iterate_feasible_and_averaging_exact() {
        let obj = LinearObjective::new(Vector::from_raw(vec![1.0, -0.5, 0.25]), NormKind::L2);
        let region = FeasibleRegion::capped_simplex(3, 0.7, 1.2, true).unwrap();
        let mut cfg = GreedyConfig::new(40);
        cfg.record_trajectory = true;

        // replay the recursion x_t = (1 - 1/t) x_{t-1} + (1/t) v_t
        let mut x_prev: Option<Vector<f64>> = None;
        let mut v_sum = Vector::zeros(3);
        for t in 1..=40usize {
            let scale = (t - 1) as f64 / 40.0;
            let anchor = x_prev
                .clone()
                .unwrap_or_else(|| Vector::zeros(3))
                .scale(scale);
            let v = region.lmo(&obj.supergradient(&anchor)).unwrap();
            v_sum = v_sum.add(&v);
            let x_avg = v_sum.scale(1.0 / t as f64);
            if let Some(prev) = &x_prev {
                let x_rec = prev.scale(1.0 - 1.0 / t as f64).add(&v.scale(1.0 / t as f64));
                for i in 0..3 {
                    assert!((x_avg[i] - x_rec[i]).abs() < 1e-12);
                }
            }
            assert!(region.contains(&x_avg, 1e-9));
            x_prev = Some(x_avg);
        }

        let report = continuous_greedy(&obj, &region, &cfg).unwrap();
        assert_eq!(report.trajectory.len(), 40);
        assert_eq!(&report.solution, x_prev.as_ref().unwrap());
    }

    #[test]
    fn rejects_zero_iterations_and_dim_mismatch() {
        let obj = LinearObjective::new(Vector::from_raw(vec![1.0]), NormKind::L2);
        let region = FeasibleRegion::unit_box(1);
        assert!(continuous_greedy(&obj, &region, &GreedyConfig::new(0)).is_err());
        let region2 = FeasibleRegion::unit_box(2);
        assert!(continuous_greedy(&obj, &region2, &GreedyConfig::new(3)).is_err());
    }
}
