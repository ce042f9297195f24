//! Robust maximization `sup_x min_i F_i(x)` of finitely many differentiable,
//! monotone, up-concave member objectives.
//!
//! The pointwise minimum stays nonnegative, monotone and up-concave, and any
//! gradient of an active member is an up-super-gradient of the minimum, with
//! dual norm at most the members' shared Lipschitz constant `L`. Mirror-prox
//! therefore applies with the constant modulus `h = 2L`, i.e.
//! `γ_t = 1/(4L√t)`, and returns a single feasible point.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::holder::HolderModulus;
use crate::mirror::MirrorMap;
use crate::norm::{dual_norm, NormKind};
use crate::objective::Objective;
use crate::region::FeasibleRegion;
use crate::report::SolveReport;
use crate::scalar::{cast, Real};
use crate::vector::Vector;

/// Ties within this tolerance of the minimum count as active.
const ACTIVE_TOL: f64 = 1e-9;

/// Seed for the sampling-based Lipschitz estimate when `L` is not supplied.
const LIPSCHITZ_ESTIMATE_SEED: u64 = 0x5eed_11b5;
const LIPSCHITZ_ESTIMATE_SAMPLES: usize = 10_000;
const LIPSCHITZ_SAFETY_FACTOR: f64 = 1.1;

/// `F(x) = min_i F_i(x)` over member oracles sharing a dimension and norm.
pub struct RobustObjective<T> {
    members: Vec<Box<dyn Objective<T>>>,
    norm: NormKind,
    lipschitz: Option<T>,
}

impl<T: Real> RobustObjective<T> {
    /// `lipschitz`, when given, must bound every member's dual gradient norm.
    pub fn new(
        members: Vec<Box<dyn Objective<T>>>,
        norm: NormKind,
        lipschitz: Option<T>,
    ) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InvalidParameter(
                "robust objective needs at least one member".into(),
            ));
        }
        let dim = members[0].dim();
        if members.iter().any(|m| m.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: members.iter().map(|m| m.dim()).find(|&d| d != dim).unwrap(),
            });
        }
        if let Some(l) = lipschitz {
            if !(l > T::zero()) {
                return Err(Error::InvalidParameter(
                    "shared Lipschitz constant must be positive".into(),
                ));
            }
        }
        Ok(RobustObjective {
            members,
            norm,
            lipschitz,
        })
    }

    pub fn member_count(&self) -> usize {
        self.members.len()
    }

    /// `(min_i F_i(x), indices within tie tolerance of the minimum)`.
    pub fn robust_value(&self, x: &Vector<T>) -> (T, Vec<usize>) {
        let values: Vec<T> = self.members.iter().map(|m| m.value(x)).collect();
        let min = values
            .iter()
            .copied()
            .fold(T::infinity(), |m, v| m.min(v));
        let tol = cast::<T>(ACTIVE_TOL);
        let active = values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v - min <= tol)
            .map(|(i, _)| i)
            .collect();
        (min, active)
    }

    /// The gradient of the lowest-index active member — an up-super-gradient
    /// of the minimum with dual norm at most `L`.
    pub fn active_supergradient(&self, x: &Vector<T>) -> Vector<T> {
        let (_, active) = self.robust_value(x);
        self.members[active[0]].supergradient(x)
    }

    /// Samples feasible points and returns `1.1 · max_i sup ‖∇F_i‖_*` over
    /// the sample as a Lipschitz estimate.
    pub fn estimate_lipschitz(&self, region: &FeasibleRegion<T>) -> T {
        let mut rng = ChaCha8Rng::seed_from_u64(LIPSCHITZ_ESTIMATE_SEED);
        let mut sup = T::zero();
        for _ in 0..LIPSCHITZ_ESTIMATE_SAMPLES {
            let x = region.sample_point(&mut rng);
            for m in &self.members {
                sup = sup.max(dual_norm(self.norm, &m.supergradient(&x)));
            }
        }
        sup * cast::<T>(LIPSCHITZ_SAFETY_FACTOR)
    }
}

impl<T: Real> Objective<T> for RobustObjective<T> {
    fn dim(&self) -> usize {
        self.members[0].dim()
    }
    fn value(&self, x: &Vector<T>) -> T {
        self.robust_value(x).0
    }
    fn supergradient(&self, x: &Vector<T>) -> Vector<T> {
        self.active_supergradient(x)
    }
    fn norm(&self) -> NormKind {
        self.norm
    }
    fn modulus(&self) -> Option<HolderModulus<T>> {
        self.lipschitz
            .and_then(|l| HolderModulus::constant(cast::<T>(2.0) * l).ok())
    }
    fn lipschitz(&self) -> Option<T> {
        self.lipschitz
    }
}

/// Mirror-prox specialized to the robust objective: active-member gradients
/// and the schedule `γ_t = 1/(4L√t)` from the constant modulus `2L`. When no
/// Lipschitz constant was supplied one is estimated by sampling and flagged
/// in the report.
pub fn robust_mirror_prox<T: Real>(
    objective: &RobustObjective<T>,
    region: &FeasibleRegion<T>,
    iterations: usize,
    map: &dyn MirrorMap<T>,
) -> Result<SolveReport<T>> {
    let (lipschitz, estimated) = match objective.lipschitz {
        Some(l) => (l, false),
        None => (objective.estimate_lipschitz(region), true),
    };
    let schedule = crate::mirror_prox::StepSchedule::Theory(HolderModulus::constant(
        cast::<T>(2.0) * lipschitz,
    )?);
    let mut cfg = crate::mirror_prox::MirrorProxConfig::new(iterations, schedule);
    cfg.record_trajectory = true;
    let mut report = crate::mirror_prox::mirror_prox(objective, region, map, &cfg)?;
    report.solver = "robust_mirror_prox".into();
    report.config_echo = format!(
        "robust_mirror_prox(n_members={}, L={lipschitz}{}, {})",
        objective.member_count(),
        if estimated { " estimated" } else { "" },
        report.config_echo,
    );
    if estimated {
        report.estimated_lipschitz = Some(lipschitz);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mirror::EuclideanMap;
    use crate::objective::LinearObjective;

    fn two_linear() -> RobustObjective<f64> {
        // F1 = x1 + 2 x2, F2 = 2 x1 + x2
        RobustObjective::new(
            vec![
                Box::new(LinearObjective::new(
                    Vector::from_raw(vec![1.0, 2.0]),
                    NormKind::L2,
                )),
                Box::new(LinearObjective::new(
                    Vector::from_raw(vec![2.0, 1.0]),
                    NormKind::L2,
                )),
            ],
            NormKind::L2,
            Some(5.0f64.sqrt()),
        )
        .unwrap()
    }

    #[test]
    fn value_and_active_set() {
        let one_d = RobustObjective::new(
            vec![
                Box::new(LinearObjective::new(
                    Vector::from_raw(vec![1.0]),
                    NormKind::L2,
                )),
                Box::new(LinearObjective::new(
                    Vector::from_raw(vec![2.0]),
                    NormKind::L2,
                )),
            ],
            NormKind::L2,
            Some(2.0),
        )
        .unwrap();
        let (v, active) = one_d.robust_value(&Vector::from_raw(vec![0.5]));
        assert_eq!(v, 0.5);
        assert_eq!(active, vec![0]);

        let (v0, active0) = one_d.robust_value(&Vector::from_raw(vec![0.0]));
        assert_eq!(v0, 0.0);
        assert_eq!(active0, vec![0, 1]);

        assert_eq!(
            one_d
                .active_supergradient(&Vector::from_raw(vec![0.5]))
                .as_slice(),
            &[1.0]
        );
        // tie at origin -> lowest index member
        assert_eq!(
            one_d
                .active_supergradient(&Vector::from_raw(vec![0.0]))
                .as_slice(),
            &[1.0]
        );
    }

    #[test]
    fn symmetric_tie() {
        let obj = two_linear();
        let (v, active) = obj.robust_value(&Vector::from_raw(vec![0.5, 0.5]));
        assert!((v - 1.5).abs() < 1e-12);
        assert_eq!(active, vec![0, 1]);
        // at (0.2, 0.2) both members evaluate to 0.6: tie -> member 0
        let g = obj.active_supergradient(&Vector::from_raw(vec![0.2, 0.2]));
        assert_eq!(g.as_slice(), &[1.0, 2.0]);
    }

    #[test]
    fn solves_min_of_two_linear() {
        let obj = two_linear();
        let region = FeasibleRegion::capped_simplex(2, 1.0, 1.0, true).unwrap();
        let report = robust_mirror_prox(&obj, &region, 900, &EuclideanMap).unwrap();
        // OPT = 1.5 at (0.5, 0.5)
        assert!(report.value >= 1.3, "weak robust value: {}", report.value);
        assert!(region.contains(&report.solution, 1e-9));
        assert!(report.estimated_lipschitz.is_none());
    }

    #[test]
    fn single_member_matches_plain_mirror_prox() {
        let c = Vector::from_raw(vec![1.0, 2.0]);
        let single = RobustObjective::new(
            vec![Box::new(LinearObjective::new(c.clone(), NormKind::L2))],
            NormKind::L2,
            Some(5.0f64.sqrt()),
        )
        .unwrap();
        let region = FeasibleRegion::unit_box(2);
        let robust = robust_mirror_prox(&single, &region, 60, &EuclideanMap).unwrap();

        let plain_obj = LinearObjective::new(c, NormKind::L2);
        let schedule = crate::mirror_prox::StepSchedule::Theory(
            HolderModulus::constant(2.0 * 5.0f64.sqrt()).unwrap(),
        );
        let cfg = crate::mirror_prox::MirrorProxConfig::new(60, schedule);
        let plain = crate::mirror_prox::mirror_prox(&plain_obj, &region, &EuclideanMap, &cfg)
            .unwrap();
        assert_eq!(robust.solution.as_slice(), plain.solution.as_slice());
        assert_eq!(robust.value, plain.value);
    }

    #[test]
    fn duplicate_members_match_single() {
        let c = Vector::from_raw(vec![1.0, 2.0]);
        let region = FeasibleRegion::unit_box(2);
        let run = |n: usize| {
            let members: Vec<Box<dyn Objective<f64>>> = (0..n)
                .map(|_| {
                    Box::new(LinearObjective::new(c.clone(), NormKind::L2))
                        as Box<dyn Objective<f64>>
                })
                .collect();
            let obj = RobustObjective::new(members, NormKind::L2, Some(5.0f64.sqrt())).unwrap();
            robust_mirror_prox(&obj, &region, 45, &EuclideanMap).unwrap()
        };
        let one = run(1);
        let two = run(2);
        assert_eq!(one.solution.as_slice(), two.solution.as_slice());
        assert_eq!(one.value, two.value);
    }

    #[test]
    fn estimates_lipschitz_when_missing() {
        let obj = RobustObjective::<f64>::new(
            vec![Box::new(LinearObjective::new(
                Vector::from_raw(vec![3.0, 4.0]),
                NormKind::L2,
            ))],
            NormKind::L2,
            None,
        )
        .unwrap();
        let region = FeasibleRegion::unit_box(2);
        let report = robust_mirror_prox(&obj, &region, 30, &EuclideanMap).unwrap();
        let est = report.estimated_lipschitz.expect("flagged estimate");
        // true dual norm is 5; the estimate carries a 1.1 safety factor
        assert!((est - 5.5).abs() < 1e-9, "estimate {est}");
    }
}
