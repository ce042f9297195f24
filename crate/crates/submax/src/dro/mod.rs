//! Wasserstein distributionally robust maximization.
//!
//! The ambiguity set is a 2-Wasserstein ball of radius `θ` around an
//! empirical distribution on `N` samples `ξ^i` with weights `p_i`. Strong
//! duality turns the inner infimum over distributions into a finite problem
//! over scenario blocks `(ζ^1; …; ζ^N)` in
//! `Z = {Σ_i p_i ‖ξ^i − ζ^i‖² ≤ θ²} ∩ Ξ^N`.
//!
//! The worst case `F(x) = inf_Z Σ p_i f(x, ζ^i)` may be non-smooth and its
//! inner minimizers non-unique, so the solvers work with the regularized
//! value function
//! `H(x) = inf_Z Σ p_i (f(x, ζ^i) + (ε/2θ²)‖ξ^i − ζ^i‖²)`,
//! which satisfies `F ≤ H ≤ F + ε/2`, is monotone, up-concave, and
//! Hölder-smooth with exponents `{1, ½}`, and whose strongly convex inner
//! problem yields certified approximate gradients.

mod coupling;
mod inner;
mod solvers;

pub use coupling::{
    BilinearCoupling, Coupling, CoverageMultilinearCoupling, DecoupledLinearCoupling, EvalMode,
    ExpSatCoupling, QuadraticZetaCoupling,
};
pub use inner::{eval_H, eval_worst_case, project_Z, InnerResult, InnerSolver};
pub use solvers::{dro_continuous_greedy, dro_mirror_prox};

use crate::error::{Error, Result};
use crate::holder::HolderModulus;
use crate::scalar::{cast, Real};
use crate::vector::Vector;

/// Problem constants: `l1` bounds `‖∇_x f‖_*`, `lambda1` the x-smoothness of
/// `f`, `lambda2` the cross sensitivity `‖∇_x f(·, ζ¹) − ∇_x f(·, ζ²)‖_*`
/// per unit `‖ζ¹ − ζ²‖_2`, and `l2` the ζ-Lipschitz constant of `f`.
#[derive(Debug, Clone, Copy)]
pub struct DroConstants<T> {
    pub l1: T,
    pub lambda1: T,
    pub lambda2: T,
    pub l2: T,
}

/// The sample space `Ξ ⊆ ℝ^m`, a coordinate box whose bounds may be infinite.
#[derive(Debug, Clone)]
pub struct SampleBox<T> {
    lower: Vec<T>,
    upper: Vec<T>,
}

impl<T: Real> SampleBox<T> {
    pub fn new(lower: Vec<T>, upper: Vec<T>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch {
                expected: lower.len(),
                got: upper.len(),
            });
        }
        for i in 0..lower.len() {
            if lower[i].is_nan() || upper[i].is_nan() || lower[i] > upper[i] {
                return Err(Error::InvalidParameter(format!(
                    "sample box bounds invalid at coordinate {i}"
                )));
            }
        }
        Ok(SampleBox { lower, upper })
    }

    /// All of `ℝ^m`.
    pub fn unbounded(dim: usize) -> Self {
        SampleBox {
            lower: vec![T::neg_infinity(); dim],
            upper: vec![T::infinity(); dim],
        }
    }

    /// `[lo, hi]^m`.
    pub fn uniform(dim: usize, lo: T, hi: T) -> Result<Self> {
        Self::new(vec![lo; dim], vec![hi; dim])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn clip(&self, v: &Vector<T>) -> Vector<T> {
        Vector::from_fn(v.dim(), |i| v[i].max(self.lower[i]).min(self.upper[i]))
    }

    pub fn contains(&self, v: &Vector<T>, tol: T) -> bool {
        (0..v.dim()).all(|i| v[i] >= self.lower[i] - tol && v[i] <= self.upper[i] + tol)
    }
}

/// A distributionally robust instance: samples, weights, radius, sample box,
/// the coupling `f`, its constants, and the regularization accuracy `ε`.
pub struct DroInstance<T> {
    samples: Vec<Vector<T>>,
    weights: Vec<T>,
    theta: T,
    sample_box: SampleBox<T>,
    coupling: Box<dyn Coupling<T>>,
    constants: DroConstants<T>,
    eps: T,
}

impl<T: Real> DroInstance<T> {
    pub fn new(
        samples: Vec<Vector<T>>,
        weights: Vec<T>,
        theta: T,
        sample_box: SampleBox<T>,
        coupling: Box<dyn Coupling<T>>,
        constants: DroConstants<T>,
        eps: T,
    ) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidParameter("needs at least one sample".into()));
        }
        if weights.len() != samples.len() {
            return Err(Error::DimensionMismatch {
                expected: samples.len(),
                got: weights.len(),
            });
        }
        let m = coupling.dim_zeta();
        if sample_box.dim() != m || samples.iter().any(|s| s.dim() != m) {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: sample_box.dim(),
            });
        }
        if weights.iter().any(|&p| !(p > T::zero())) {
            return Err(Error::InvalidParameter(
                "every sample weight must be positive".into(),
            ));
        }
        let total: T = weights.iter().copied().sum();
        if (total - T::one()).abs() > cast::<T>(1e-12) {
            return Err(Error::InvalidParameter(format!(
                "sample weights must sum to 1, got {total}"
            )));
        }
        if !(theta > T::zero()) || !theta.is_finite() {
            return Err(Error::InvalidParameter("theta must be positive".into()));
        }
        if !(eps > T::zero()) || !eps.is_finite() {
            return Err(Error::InvalidParameter("eps must be positive".into()));
        }
        for (i, s) in samples.iter().enumerate() {
            if !sample_box.contains(s, cast::<T>(1e-9)) {
                return Err(Error::InvalidParameter(format!(
                    "sample {i} lies outside the sample box"
                )));
            }
        }
        let c = &constants;
        if c.l1 < T::zero() || c.lambda1 < T::zero() || c.lambda2 < T::zero() || c.l2 < T::zero() {
            return Err(Error::InvalidParameter(
                "constants must be nonnegative".into(),
            ));
        }
        Ok(DroInstance {
            samples,
            weights,
            theta,
            sample_box,
            coupling,
            constants,
            eps,
        })
    }

    pub fn n_samples(&self) -> usize {
        self.samples.len()
    }
    pub fn dim_x(&self) -> usize {
        self.coupling.dim_x()
    }
    pub fn dim_zeta(&self) -> usize {
        self.coupling.dim_zeta()
    }
    pub fn samples(&self) -> &[Vector<T>] {
        &self.samples
    }
    pub fn weights(&self) -> &[T] {
        &self.weights
    }
    pub fn theta(&self) -> T {
        self.theta
    }
    pub fn eps(&self) -> T {
        self.eps
    }
    pub fn sample_box(&self) -> &SampleBox<T> {
        &self.sample_box
    }
    pub fn coupling(&self) -> &dyn Coupling<T> {
        self.coupling.as_ref()
    }
    pub fn constants(&self) -> &DroConstants<T> {
        &self.constants
    }

    pub fn min_weight(&self) -> T {
        self.weights
            .iter()
            .copied()
            .fold(T::infinity(), |m, p| m.min(p))
    }
    pub fn max_weight(&self) -> T {
        self.weights.iter().copied().fold(T::zero(), |m, p| m.max(p))
    }

    /// `Σ_i p_i ‖ξ^i − ζ^i‖²`, the weighted transport cost of a block.
    pub fn transport_cost(&self, block: &ScenarioBlock<T>) -> T {
        self.weights
            .iter()
            .zip(self.samples.iter().zip(block.scenarios()))
            .map(|(&p, (xi, zeta))| {
                let d = xi.sub(zeta);
                p * d.dot(&d)
            })
            .sum()
    }
}

/// A scenario block `(ζ^1; …; ζ^N)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioBlock<T> {
    scenarios: Vec<Vector<T>>,
}

impl<T: Real> ScenarioBlock<T> {
    pub fn new(scenarios: Vec<Vector<T>>) -> Self {
        ScenarioBlock { scenarios }
    }

    pub fn scenarios(&self) -> &[Vector<T>] {
        &self.scenarios
    }

    /// `(ball violation, box violation)` against the instance's `Z`.
    pub fn violation(&self, inst: &DroInstance<T>) -> (T, T) {
        let ball = (inst.transport_cost(self) - inst.theta() * inst.theta()).max(T::zero());
        let mut box_v = T::zero();
        for zeta in &self.scenarios {
            for i in 0..zeta.dim() {
                let below = inst.sample_box.lower[i] - zeta[i];
                let above = zeta[i] - inst.sample_box.upper[i];
                box_v = box_v.max(below).max(above);
            }
        }
        (ball, box_v.max(T::zero()))
    }

    pub fn is_member(&self, inst: &DroInstance<T>, tol: T) -> bool {
        self.scenarios.len() == inst.n_samples()
            && self.scenarios.iter().all(|z| z.dim() == inst.dim_zeta())
            && {
                let (ball, box_v) = self.violation(inst);
                ball <= tol && box_v <= tol
            }
    }
}

/// Feasibility tolerance accepted when evaluating `R` at a given block.
const BLOCK_MEMBERSHIP_TOL: f64 = 1e-7;

/// `R(x, ζ¹, …, ζᴺ) = Σ_i p_i ( f(x, ζ^i) + (ε/2θ²) ‖ξ^i − ζ^i‖² )`.
#[allow(non_snake_case)]
pub fn eval_R<T: Real>(inst: &DroInstance<T>, x: &Vector<T>, block: &ScenarioBlock<T>) -> Result<T> {
    if x.dim() != inst.dim_x() {
        return Err(Error::DimensionMismatch {
            expected: inst.dim_x(),
            got: x.dim(),
        });
    }
    if !block.is_member(inst, cast::<T>(BLOCK_MEMBERSHIP_TOL)) {
        return Err(Error::InfeasiblePoint(
            "scenario block outside Z".into(),
        ));
    }
    Ok(eval_r_unchecked(inst, x, block, inst.eps()))
}

pub(crate) fn eval_r_unchecked<T: Real>(
    inst: &DroInstance<T>,
    x: &Vector<T>,
    block: &ScenarioBlock<T>,
    eps_reg: T,
) -> T {
    let reg = eps_reg / (cast::<T>(2.0) * inst.theta() * inst.theta());
    inst.weights
        .iter()
        .zip(inst.samples.iter().zip(block.scenarios()))
        .map(|(&p, (xi, zeta))| {
            let d = xi.sub(zeta);
            p * (inst.coupling.value(x, zeta) + reg * d.dot(&d))
        })
        .sum()
}

/// The Hölder modulus of `∇H`: `λ₁ z + 2λ₂θ√(L₁/ε) · z^{1/2}` (zero-coefficient
/// terms dropped).
pub fn h_modulus<T: Real>(inst: &DroInstance<T>) -> Result<HolderModulus<T>> {
    let c = inst.constants();
    let mut terms = Vec::new();
    if c.lambda1 > T::zero() {
        terms.push((c.lambda1, T::one()));
    }
    let sqrt_term =
        cast::<T>(2.0) * c.lambda2 * inst.theta() * (c.l1 / inst.eps()).sqrt();
    if sqrt_term > T::zero() {
        terms.push((sqrt_term, cast::<T>(0.5)));
    }
    HolderModulus::new(terms)
}

/// `Σ_i p_i ∇_x f(x, ζ̂^i)` from an inner result at the same anchor `x`.
/// With inner gap `Δ`, this approximates `∇H(x)` within
/// `λ₂ θ √(2Δ/ε)` in the dual norm.
#[allow(non_snake_case)]
pub fn approx_grad_H<T: Real>(
    inst: &DroInstance<T>,
    x: &Vector<T>,
    inner: &InnerResult<T>,
) -> Result<Vector<T>> {
    if inner.anchor().as_slice() != x.as_slice() {
        return Err(Error::StaleInnerResult);
    }
    let mut g = Vector::zeros(inst.dim_x());
    for (&p, zeta) in inst.weights.iter().zip(inner.block.scenarios()) {
        g = g.add_scaled(p, &inst.coupling.grad_x(x, zeta));
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// The 1-D instance with a piecewise closed-form H:
    /// f = ζ·x, ξ = 2, θ = 1, ε = 0.1, Ξ = ℝ.
    pub(crate) fn one_dim_instance() -> DroInstance<f64> {
        DroInstance::new(
            vec![Vector::from_raw(vec![2.0])],
            vec![1.0],
            1.0,
            SampleBox::unbounded(1),
            Box::new(BilinearCoupling::new(vec![vec![1.0]])),
            DroConstants {
                l1: 3.0,      // sup_{ζ∈Γ=[1,3]} |ζ|
                lambda1: 0.0, // grad_x independent of x
                lambda2: 1.0, // |ζ¹ − ζ²| sensitivity of grad_x = ζ
                l2: 1.0,      // |x| ≤ 1 on the unit box
            },
            0.1,
        )
        .unwrap()
    }

    #[test]
    fn eval_r_one_dim() {
        let inst = one_dim_instance();
        let x = Vector::from_raw(vec![1.0]);
        let block = ScenarioBlock::new(vec![Vector::from_raw(vec![1.0])]);
        // ζ·x + (ε/2θ²)(ξ−ζ)² = 1 + 0.05
        let r = eval_R(&inst, &x, &block).unwrap();
        assert!((r - 1.05).abs() < 1e-12);
    }

    #[test]
    fn eval_r_zero_transport() {
        let inst = one_dim_instance();
        let x = Vector::from_raw(vec![0.7]);
        let block = ScenarioBlock::new(vec![Vector::from_raw(vec![2.0])]);
        assert!((eval_R(&inst, &x, &block).unwrap() - 1.4).abs() < 1e-12);
    }

    #[test]
    fn eval_r_two_scenarios() {
        let inst = DroInstance::new(
            vec![
                Vector::from_raw(vec![2.0, 0.0]),
                Vector::from_raw(vec![0.0, 2.0]),
            ],
            vec![0.5, 0.5],
            1.0,
            SampleBox::unbounded(2),
            Box::new(BilinearCoupling::new(vec![
                vec![1.0, 0.0],
                vec![0.0, 1.0],
            ])),
            DroConstants {
                l1: 3.0,
                lambda1: 0.0,
                lambda2: 1.0,
                l2: 2.0,
            },
            0.1,
        )
        .unwrap();
        let x = Vector::from_raw(vec![1.0f64, 0.0]);
        let block = ScenarioBlock::new(inst.samples().to_vec());
        assert!((eval_R(&inst, &x, &block).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eval_r_rejects_infeasible_block() {
        let inst = one_dim_instance();
        let x = Vector::from_raw(vec![1.0]);
        let block = ScenarioBlock::new(vec![Vector::from_raw(vec![5.0])]);
        assert!(eval_R(&inst, &x, &block).is_err());
    }

    #[test]
    fn h_modulus_terms() {
        // §-style constants: λ₁=5, λ₂=10, θ=0.2, L₁=5, ε=0.01
        let inst = DroInstance::new(
            vec![Vector::from_raw(vec![2.0])],
            vec![1.0],
            0.2,
            SampleBox::unbounded(1),
            Box::new(BilinearCoupling::new(vec![vec![1.0]])),
            DroConstants {
                l1: 5.0,
                lambda1: 5.0,
                lambda2: 10.0,
                l2: 5.0,
            },
            0.01,
        )
        .unwrap();
        let h = h_modulus(&inst).unwrap();
        let terms = h.terms();
        assert_eq!(terms.len(), 2);
        assert_eq!(terms[0], (5.0, 1.0));
        assert!((terms[1].0 - 4.0 * 500.0f64.sqrt()).abs() < 1e-9);
        assert_eq!(terms[1].1, 0.5);
        assert_eq!(h.sigma_min(), 0.5);
    }

    #[test]
    fn h_modulus_drops_zero_terms() {
        let mut inst = one_dim_instance();
        inst.constants.lambda2 = 0.0;
        inst.constants.lambda1 = 2.0;
        let h = h_modulus(&inst).unwrap();
        assert_eq!(h.terms(), &[(2.0, 1.0)]);
    }

    #[test]
    fn weights_must_sum_to_one() {
        let r = DroInstance::new(
            vec![Vector::from_raw(vec![2.0])],
            vec![0.9],
            1.0,
            SampleBox::unbounded(1),
            Box::new(BilinearCoupling::new(vec![vec![1.0]])),
            DroConstants {
                l1: 1.0,
                lambda1: 0.0,
                lambda2: 1.0,
                l2: 1.0,
            },
            0.1,
        );
        assert!(r.is_err());
    }
}
