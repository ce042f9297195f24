//! Convex feasible regions with the two oracles the solvers need: a linear
//! maximization oracle (LMO) and Euclidean projection.
//!
//! Three families ship: axis-aligned boxes, capped simplices
//! `{0 ≤ x_i ≤ cap, Σ x_i = budget}` (or `≤ budget`), and budget polytopes
//! `{x ≥ 0, Σ x_i ≤ budget}`. All are bounded; budget polytopes and
//! inequality-mode capped simplices are down-closed and contain the origin.

use rand::Rng;

use crate::error::{Error, Result};
use crate::norm::NormKind;
use crate::scalar::{cast, Real};
use crate::vector::Vector;

const BISECTION_BRACKET: f64 = 1e-12;
const BISECTION_CAP: usize = 200;

#[derive(Debug, Clone, PartialEq)]
enum Variant<T> {
    Box {
        lower: Vector<T>,
        upper: Vector<T>,
    },
    CappedSimplex {
        cap: T,
        budget: T,
        equality: bool,
    },
    BudgetPolytope {
        budget: T,
    },
}

/// A bounded convex constraint set.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibleRegion<T> {
    variant: Variant<T>,
    dim: usize,
}

/// Geometry of a region, for callers that enumerate it (grid oracles).
#[derive(Debug, Clone, PartialEq)]
pub enum RegionShape<T> {
    Box {
        lower: Vector<T>,
        upper: Vector<T>,
    },
    CappedSimplex {
        cap: T,
        budget: T,
        equality: bool,
    },
    BudgetPolytope {
        budget: T,
    },
}

impl<T: Real> FeasibleRegion<T> {
    /// `{lower ≤ x ≤ upper}` with `0 ≤ lower ≤ upper`.
    pub fn new_box(lower: Vector<T>, upper: Vector<T>) -> Result<Self> {
        if lower.dim() != upper.dim() {
            return Err(Error::DimensionMismatch {
                expected: lower.dim(),
                got: upper.dim(),
            });
        }
        for i in 0..lower.dim() {
            if lower[i] < T::zero() {
                return Err(Error::InfeasibleRegion(format!(
                    "box lower bound negative at coordinate {i}"
                )));
            }
            if lower[i] > upper[i] {
                return Err(Error::InfeasibleRegion(format!(
                    "box lower bound exceeds upper bound at coordinate {i}"
                )));
            }
        }
        let dim = lower.dim();
        Ok(FeasibleRegion {
            variant: Variant::Box { lower, upper },
            dim,
        })
    }

    /// The unit box `[0, 1]^dim`.
    pub fn unit_box(dim: usize) -> Self {
        FeasibleRegion {
            variant: Variant::Box {
                lower: Vector::zeros(dim),
                upper: Vector::from_fn(dim, |_| T::one()),
            },
            dim,
        }
    }

    /// `{0 ≤ x_i ≤ cap, Σ x_i = budget}` when `equality`, else `Σ x_i ≤ budget`.
    pub fn capped_simplex(dim: usize, cap: T, budget: T, equality: bool) -> Result<Self> {
        if !(cap > T::zero()) || !(budget > T::zero()) {
            return Err(Error::InfeasibleRegion(
                "cap and budget must be positive".into(),
            ));
        }
        if budget > cap * cast::<T>(dim as f64) {
            return Err(Error::InfeasibleRegion(format!(
                "budget {budget} exceeds cap * dim = {}",
                cap * cast::<T>(dim as f64)
            )));
        }
        Ok(FeasibleRegion {
            variant: Variant::CappedSimplex {
                cap,
                budget,
                equality,
            },
            dim,
        })
    }

    /// `{x ≥ 0, Σ x_i ≤ budget}`.
    pub fn budget_polytope(dim: usize, budget: T) -> Result<Self> {
        if !(budget > T::zero()) {
            return Err(Error::InfeasibleRegion("budget must be positive".into()));
        }
        Ok(FeasibleRegion {
            variant: Variant::BudgetPolytope { budget },
            dim,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn shape(&self) -> RegionShape<T> {
        match &self.variant {
            Variant::Box { lower, upper } => RegionShape::Box {
                lower: lower.clone(),
                upper: upper.clone(),
            },
            Variant::CappedSimplex {
                cap,
                budget,
                equality,
            } => RegionShape::CappedSimplex {
                cap: *cap,
                budget: *budget,
                equality: *equality,
            },
            Variant::BudgetPolytope { budget } => RegionShape::BudgetPolytope { budget: *budget },
        }
    }

    /// Membership test with additive tolerance `tol` per constraint.
    pub fn contains(&self, x: &Vector<T>, tol: T) -> bool {
        if x.dim() != self.dim {
            return false;
        }
        match &self.variant {
            Variant::Box { lower, upper } => (0..self.dim)
                .all(|i| x[i] >= lower[i] - tol && x[i] <= upper[i] + tol),
            Variant::CappedSimplex {
                cap,
                budget,
                equality,
            } => {
                let coords_ok = x
                    .iter()
                    .all(|&c| c >= -tol && c <= *cap + tol);
                let s = x.sum();
                let sum_ok = if *equality {
                    (s - *budget).abs() <= tol
                } else {
                    s <= *budget + tol
                };
                coords_ok && sum_ok
            }
            Variant::BudgetPolytope { budget } => {
                x.iter().all(|&c| c >= -tol) && x.sum() <= *budget + tol
            }
        }
    }

    /// `argmax_{v ∈ X} ⟨g, v⟩`. Ties are broken toward the lowest coordinate
    /// index (and toward the lower bound on a box) so trajectories are
    /// reproducible.
    pub fn lmo(&self, g: &Vector<T>) -> Result<Vector<T>> {
        if g.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: g.dim(),
            });
        }
        Ok(match &self.variant {
            Variant::Box { lower, upper } => Vector::from_fn(self.dim, |i| {
                if g[i] > T::zero() {
                    upper[i]
                } else {
                    lower[i]
                }
            }),
            Variant::CappedSimplex {
                cap,
                budget,
                equality,
            } => {
                let mut order: Vec<usize> = (0..self.dim).collect();
                // descending g, lowest index first among ties
                order.sort_by(|&a, &b| {
                    g[b].partial_cmp(&g[a])
                        .expect("finite gradient")
                        .then(a.cmp(&b))
                });
                let mut v = vec![T::zero(); self.dim];
                let mut remaining = *budget;
                for &i in &order {
                    if remaining <= T::zero() {
                        break;
                    }
                    if !*equality && g[i] <= T::zero() {
                        break;
                    }
                    let take = remaining.min(*cap);
                    v[i] = take;
                    remaining = remaining - take;
                }
                Vector::from_raw(v)
            }
            Variant::BudgetPolytope { budget } => {
                let mut best = 0usize;
                for i in 1..self.dim {
                    if g[i] > g[best] {
                        best = i;
                    }
                }
                let mut v = vec![T::zero(); self.dim];
                if g[best] > T::zero() {
                    v[best] = *budget;
                }
                Vector::from_raw(v)
            }
        })
    }

    /// Euclidean projection onto the region.
    ///
    /// Boxes project by clipping. Sum-constrained variants bisect on the
    /// Lagrange multiplier of the sum constraint, clipping coordinates to
    /// their bounds; the bracket is shrunk below 1e-12 so the sum constraint
    /// holds to ~1e-10.
    pub fn project(&self, y: &Vector<T>) -> Result<Vector<T>> {
        if y.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: y.dim(),
            });
        }
        Ok(match &self.variant {
            Variant::Box { lower, upper } => {
                Vector::from_fn(self.dim, |i| y[i].max(lower[i]).min(upper[i]))
            }
            Variant::CappedSimplex {
                cap,
                budget,
                equality,
            } => {
                let clip = |lambda: T| {
                    Vector::from_fn(self.dim, |i| (y[i] - lambda).max(T::zero()).min(*cap))
                };
                if !*equality {
                    let clipped = clip(T::zero());
                    if clipped.sum() <= *budget {
                        return Ok(clipped);
                    }
                }
                bisect_multiplier(y, *budget, clip)
            }
            Variant::BudgetPolytope { budget } => {
                let clip =
                    |lambda: T| Vector::from_fn(self.dim, |i| (y[i] - lambda).max(T::zero()));
                let clipped = clip(T::zero());
                if clipped.sum() <= *budget {
                    clipped
                } else {
                    bisect_multiplier(y, *budget, clip)
                }
            }
        })
    }

    /// An upper bound `R ≥ sup_{x ∈ X} ‖x‖` under the given norm, computed
    /// analytically per variant. Conservative over-estimates are acceptable
    /// since `R` only enters performance bounds.
    pub fn radius(&self, norm: NormKind) -> T {
        match &self.variant {
            Variant::Box { upper, .. } => match norm {
                NormKind::L1 => upper.sum(),
                NormKind::L2 => upper.norm2(),
                NormKind::LInf => upper.iter().fold(T::zero(), |m, &u| m.max(u)),
            },
            Variant::CappedSimplex { cap, budget, .. } => match norm {
                NormKind::L1 => *budget,
                NormKind::L2 => (*budget * *cap).sqrt(),
                NormKind::LInf => cap.min(*budget),
            },
            Variant::BudgetPolytope { budget } => *budget,
        }
    }

    /// An upper bound on the squared Euclidean diameter `sup ‖x − y‖_2^2`.
    pub fn euclidean_diameter_sq(&self) -> T {
        let two = cast::<T>(2.0);
        match &self.variant {
            Variant::Box { lower, upper } => {
                let d = upper.sub(lower);
                d.dot(&d)
            }
            Variant::CappedSimplex {
                cap,
                budget,
                equality,
            } => {
                // Two maximally-separated points have (nearly) disjoint
                // supports; with an equality constraint the complementary
                // budget cap*dim - budget limits separation symmetrically.
                let full = *cap * cast::<T>(self.dim as f64);
                let s = if *equality {
                    budget.min(full - *budget)
                } else {
                    budget.min(full)
                };
                let k = (s / *cap).floor();
                let r = s - k * *cap;
                let sep = two * (k * *cap * *cap + r * r);
                let box_diam = cast::<T>(self.dim as f64) * *cap * *cap;
                sep.min(box_diam)
            }
            Variant::BudgetPolytope { budget } => {
                if self.dim >= 2 {
                    two * *budget * *budget
                } else {
                    *budget * *budget
                }
            }
        }
    }

    /// A feasible point drawn from a seeded generator (uniform in the
    /// bounding box, then projected). The distribution is unspecified; this
    /// exists for sampling-based estimates and property tests.
    pub fn sample_point(&self, rng: &mut impl Rng) -> Vector<T> {
        let raw = match &self.variant {
            Variant::Box { lower, upper } => Vector::from_fn(self.dim, |i| {
                let u: f64 = rng.gen();
                lower[i] + cast::<T>(u) * (upper[i] - lower[i])
            }),
            Variant::CappedSimplex { cap, .. } => {
                Vector::from_fn(self.dim, |_| cast::<T>(rng.gen::<f64>()) * *cap)
            }
            Variant::BudgetPolytope { budget } => {
                Vector::from_fn(self.dim, |_| cast::<T>(rng.gen::<f64>()) * *budget)
            }
        };
        self.project(&raw).expect("projection of matching dim")
    }
}

/// Finds `lambda` with `clip(lambda).sum() == target` by bisection.
/// `clip` must be coordinate-wise nonincreasing in `lambda`.
fn bisect_multiplier<T: Real>(
    y: &Vector<T>,
    target: T,
    clip: impl Fn(T) -> Vector<T>,
) -> Vector<T> {
    let mut lo = y.iter().fold(T::infinity(), |m, &v| m.min(v)) - target.abs() - T::one();
    let mut hi = y.iter().fold(T::neg_infinity(), |m, &v| m.max(v));
    debug_assert!(clip(lo).sum() >= target);
    debug_assert!(clip(hi).sum() <= target);
    let bracket = cast::<T>(BISECTION_BRACKET);
    for _ in 0..BISECTION_CAP {
        if hi - lo < bracket {
            break;
        }
        let mid = (lo + hi) / cast::<T>(2.0);
        if clip(mid).sum() >= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // lo side over-fills; mid-bracket keeps the sum error ~ bracket * dim
    clip((lo + hi) / cast::<T>(2.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn v(c: &[f64]) -> Vector<f64> {
        Vector::from_raw(c.to_vec())
    }

    #[test]
    fn lmo_capped_simplex_integral() {
        let region = FeasibleRegion::capped_simplex(4, 1.0, 2.0, true).unwrap();
        let out = region.lmo(&v(&[3.0, 1.0, 2.0, 0.0])).unwrap();
        assert_eq!(out.as_slice(), &[1.0, 0.0, 1.0, 0.0]);
    }

    #[test]
    fn lmo_capped_simplex_fractional() {
        let region = FeasibleRegion::capped_simplex(3, 1.0, 1.5, true).unwrap();
        let out = region.lmo(&v(&[2.0, 1.0, 0.0])).unwrap();
        assert_eq!(out.as_slice(), &[1.0, 0.5, 0.0]);
    }

    #[test]
    fn lmo_box_tie_breaks_low() {
        let region = FeasibleRegion::unit_box(2);
        let out = region.lmo(&v(&[0.0, 0.0])).unwrap();
        assert_eq!(out.as_slice(), &[0.0, 0.0]);
    }

    #[test]
    fn lmo_dimension_mismatch() {
        let region = FeasibleRegion::unit_box(2);
        assert!(region.lmo(&v(&[1.0])).is_err());
    }

    #[test]
    fn project_simplex_vertex() {
        let region = FeasibleRegion::capped_simplex(3, 1.0, 1.0, true).unwrap();
        let out = region.project(&v(&[2.0, 0.0, 0.0])).unwrap();
        assert_abs_diff_eq!(out[0], 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(out[1], 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!(out[2], 0.0, epsilon = 1e-10);
    }

    #[test]
    fn project_fixed_points() {
        let region = FeasibleRegion::unit_box(2);
        let out = region.project(&v(&[0.3, 0.7])).unwrap();
        assert_eq!(out.as_slice(), &[0.3, 0.7]);

        let simplex = FeasibleRegion::capped_simplex(2, 1.0, 1.0, true).unwrap();
        let out = simplex.project(&v(&[0.5, 0.5])).unwrap();
        assert_abs_diff_eq!(out[0], 0.5, epsilon = 1e-10);
        assert_abs_diff_eq!(out[1], 0.5, epsilon = 1e-10);
    }

    #[test]
    fn project_sum_tolerance() {
        let region = FeasibleRegion::capped_simplex(5, 1.0, 3.0, true).unwrap();
        let out = region
            .project(&v(&[9.0, -2.5, 0.4, 0.9, 3.0]))
            .unwrap();
        assert!((out.sum() - 3.0).abs() < 1e-10);
        assert!(region.contains(&out, 1e-10));
    }

    #[test]
    fn infeasible_budget_rejected() {
        assert!(FeasibleRegion::capped_simplex(2, 1.0, 3.0, true).is_err());
    }

    #[test]
    fn radius_values() {
        let region = FeasibleRegion::capped_simplex(50, 1.0, 5.0, true).unwrap();
        assert_abs_diff_eq!(region.radius(NormKind::L2), 5.0f64.sqrt());
        assert_eq!(region.radius(NormKind::L1), 5.0);
        assert_eq!(region.radius(NormKind::LInf), 1.0);

        let unit = FeasibleRegion::<f64>::unit_box(5);
        assert_abs_diff_eq!(unit.radius(NormKind::L2), 5.0f64.sqrt());
    }

    #[test]
    fn diameter_values() {
        let unit = FeasibleRegion::<f64>::unit_box(2);
        assert_abs_diff_eq!(unit.euclidean_diameter_sq(), 2.0);

        let simplex = FeasibleRegion::capped_simplex(2, 1.0, 1.0, true).unwrap();
        assert_abs_diff_eq!(simplex.euclidean_diameter_sq(), 2.0);

        // singleton: budget = cap * dim under equality
        let single = FeasibleRegion::capped_simplex(3, 1.0, 3.0, true).unwrap();
        assert_abs_diff_eq!(single.euclidean_diameter_sq(), 0.0);

        let point = FeasibleRegion::new_box(v(&[0.5, 0.5]), v(&[0.5, 0.5])).unwrap();
        assert_abs_diff_eq!(point.euclidean_diameter_sq(), 0.0);
    }

    #[test]
    fn budget_polytope_basics() {
        let region = FeasibleRegion::budget_polytope(3, 2.0).unwrap();
        let out = region.lmo(&v(&[1.0, 3.0, 3.0])).unwrap();
        assert_eq!(out.as_slice(), &[0.0, 2.0, 0.0]);
        let none = region.lmo(&v(&[-1.0, -2.0, 0.0])).unwrap();
        assert_eq!(none.as_slice(), &[0.0, 0.0, 0.0]);
        let proj = region.project(&v(&[3.0, 3.0, -1.0])).unwrap();
        assert!((proj.sum() - 2.0).abs() < 1e-10);
        assert!(region.contains(&proj, 1e-10));
        assert!(region.contains(&Vector::zeros(3), 0.0));
    }
}
