//! The objective-oracle interface shared by all solvers, plus a small family
//! of shipped objectives used by tests of the solvers and the benchmark
//! harness.
//!
//! An oracle reports values and up-super-gradients: vectors `g` with
//! `F(y) ≤ F(x) + ⟨g, y − x⟩` for all `y` comparable to `x` (`y ≥ x` or
//! `y ≤ x`). For differentiable up-concave `F` this is exactly the gradient.

use std::cell::Cell;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::holder::HolderModulus;
use crate::norm::NormKind;
use crate::scalar::{cast, Real};
use crate::vector::Vector;

/// Value + up-super-gradient oracle.
pub trait Objective<T: Real> {
    fn dim(&self) -> usize;

    fn value(&self, x: &Vector<T>) -> T;

    /// An up-super-gradient at `x` (the gradient when `F` is differentiable).
    fn supergradient(&self, x: &Vector<T>) -> Vector<T>;

    /// The norm the objective's smoothness and Lipschitz constants refer to;
    /// gradient errors are measured in its dual.
    fn norm(&self) -> NormKind;

    /// Declared smoothness modulus, when one is known.
    fn modulus(&self) -> Option<HolderModulus<T>> {
        None
    }

    /// Declared Lipschitz constant, when one is known.
    fn lipschitz(&self) -> Option<T> {
        None
    }

    /// Declared worst-case dual-norm error of returned supergradients.
    fn delta(&self) -> T {
        T::zero()
    }
}

/// `F(x) = ⟨c, x⟩`; monotone when `c ≥ 0`.
#[derive(Debug, Clone)]
pub struct LinearObjective<T> {
    c: Vector<T>,
    norm: NormKind,
}

impl<T: Real> LinearObjective<T> {
    pub fn new(c: Vector<T>, norm: NormKind) -> Self {
        LinearObjective { c, norm }
    }

    pub fn coefficients(&self) -> &Vector<T> {
        &self.c
    }
}

impl<T: Real> Objective<T> for LinearObjective<T> {
    fn dim(&self) -> usize {
        self.c.dim()
    }
    fn value(&self, x: &Vector<T>) -> T {
        self.c.dot(x)
    }
    fn supergradient(&self, _x: &Vector<T>) -> Vector<T> {
        self.c.clone()
    }
    fn norm(&self) -> NormKind {
        self.norm
    }
    fn lipschitz(&self) -> Option<T> {
        Some(crate::norm::dual_norm(self.norm, &self.c))
    }
}

/// `F(x) = ½ xᵀAx + bᵀx` with `A` symmetric and entrywise nonpositive, so the
/// Hessian has no positive entries and `F` is DR-submodular. `F(0) = 0`.
///
/// Declared l2 modulus: `(‖A‖_F, 1)` — the Frobenius norm bounds the spectral
/// norm, so the declaration is a valid (conservative) smoothness constant.
#[derive(Debug, Clone)]
pub struct QuadraticObjective<T> {
    a: Vec<Vec<T>>,
    b: Vector<T>,
}

impl<T: Real> QuadraticObjective<T> {
    pub fn new(a: Vec<Vec<T>>, b: Vector<T>) -> Result<Self> {
        let d = b.dim();
        if a.len() != d || a.iter().any(|row| row.len() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: a.len(),
            });
        }
        for i in 0..d {
            for j in 0..d {
                if a[i][j] > T::zero() {
                    return Err(Error::InvalidParameter(format!(
                        "Hessian entry ({i},{j}) positive; not DR-submodular"
                    )));
                }
                if (a[i][j] - a[j][i]).abs() > cast::<T>(1e-12) {
                    return Err(Error::InvalidParameter("Hessian not symmetric".into()));
                }
            }
        }
        Ok(QuadraticObjective { a, b })
    }

    fn hessian_apply(&self, x: &Vector<T>) -> Vector<T> {
        Vector::from_fn(self.b.dim(), |i| {
            self.a[i]
                .iter()
                .zip(x.iter())
                .map(|(&aij, &xj)| aij * xj)
                .sum()
        })
    }

    pub fn frobenius(&self) -> T {
        self.a
            .iter()
            .flat_map(|row| row.iter())
            .map(|&v| v * v)
            .sum::<T>()
            .sqrt()
    }

    /// Smallest gradient coordinate over a box `[lower, upper]`; nonnegative
    /// iff the objective is monotone there (the gradient is antitone).
    pub fn min_gradient_on_box(&self, upper: &Vector<T>) -> T {
        let g = self.supergradient(upper);
        g.iter().fold(T::infinity(), |m, &v| m.min(v))
    }
}

impl<T: Real> Objective<T> for QuadraticObjective<T> {
    fn dim(&self) -> usize {
        self.b.dim()
    }
    fn value(&self, x: &Vector<T>) -> T {
        self.hessian_apply(x).dot(x) / cast::<T>(2.0) + self.b.dot(x)
    }
    fn supergradient(&self, x: &Vector<T>) -> Vector<T> {
        self.hessian_apply(x).add(&self.b)
    }
    fn norm(&self) -> NormKind {
        NormKind::L2
    }
    fn modulus(&self) -> Option<HolderModulus<T>> {
        HolderModulus::single(self.frobenius().max(cast::<T>(1e-12)), T::one()).ok()
    }
}

/// `F ≡ c`, for degenerate-case tests.
#[derive(Debug, Clone)]
pub struct ConstantObjective<T> {
    pub value: T,
    pub dim: usize,
}

impl<T: Real> Objective<T> for ConstantObjective<T> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, _x: &Vector<T>) -> T {
        self.value
    }
    fn supergradient(&self, x: &Vector<T>) -> Vector<T> {
        Vector::zeros(x.dim())
    }
    fn norm(&self) -> NormKind {
        NormKind::L2
    }
}

/// Wraps an oracle and perturbs each returned supergradient by seeded noise
/// drawn uniformly from the dual-norm ball of radius `delta`. Used to
/// exercise the solvers' tolerance to inexact gradients.
pub struct NoisyOracle<'a, T> {
    inner: &'a dyn Objective<T>,
    noise_delta: T,
    seed: u64,
    calls: Cell<u64>,
}

impl<'a, T: Real> NoisyOracle<'a, T> {
    pub fn new(inner: &'a dyn Objective<T>, delta: T, seed: u64) -> Self {
        NoisyOracle {
            inner,
            noise_delta: delta,
            seed,
            calls: Cell::new(0),
        }
    }
}

impl<T: Real> Objective<T> for NoisyOracle<'_, T> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn value(&self, x: &Vector<T>) -> T {
        self.inner.value(x)
    }
    fn supergradient(&self, x: &Vector<T>) -> Vector<T> {
        let k = self.calls.get();
        self.calls.set(k + 1);
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ k);
        let noise = sample_dual_ball(self.inner.norm(), self.dim(), self.noise_delta, &mut rng);
        self.inner.supergradient(x).add(&noise)
    }
    fn norm(&self) -> NormKind {
        self.inner.norm()
    }
    fn modulus(&self) -> Option<HolderModulus<T>> {
        self.inner.modulus()
    }
    fn lipschitz(&self) -> Option<T> {
        self.inner.lipschitz()
    }
    fn delta(&self) -> T {
        self.inner.delta() + self.noise_delta
    }
}

/// A point drawn uniformly from the ball `{g : ‖g‖_{dual(norm)} ≤ radius}`.
/// Draws are made as `f64` and converted, so streams agree across scalars.
pub fn sample_dual_ball<T: Real>(
    norm: NormKind,
    dim: usize,
    radius: T,
    rng: &mut impl Rng,
) -> Vector<T> {
    let d = dim as f64;
    match norm.dual() {
        NormKind::LInf => Vector::from_fn(dim, |_| {
            radius * cast::<T>(rng.gen::<f64>() * 2.0 - 1.0)
        }),
        NormKind::L2 => {
            let dir: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
            let n = dir.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-300);
            let r = rng.gen::<f64>().powf(1.0 / d);
            Vector::from_fn(dim, |i| radius * cast::<T>(dir[i] / n * r))
        }
        NormKind::L1 => {
            let mags: Vec<f64> = (0..dim).map(|_| -rng.gen::<f64>().ln()).collect();
            let total: f64 = mags.iter().sum::<f64>().max(1e-300);
            let r = rng.gen::<f64>().powf(1.0 / d);
            Vector::from_fn(dim, |i| {
                let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
                radius * cast::<T>(sign * mags[i] / total * r)
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norm::dual_norm;

    #[test]
    fn quadratic_value_and_gradient() {
        // F = -1/2 x'Ax + b'x with A = [[1, .5], [.5, 1]], b = (2, 2)
        let obj = QuadraticObjective::new(
            vec![vec![-1.0, -0.5], vec![-0.5, -1.0]],
            Vector::from_raw(vec![2.0, 2.0]),
        )
        .unwrap();
        let x = Vector::from_raw(vec![1.0f64, 1.0]);
        assert!((obj.value(&x) - 2.5).abs() < 1e-12);
        assert_eq!(obj.supergradient(&x).as_slice(), &[0.5, 0.5]);
        assert_eq!(obj.value(&Vector::zeros(2)), 0.0);
    }

    #[test]
    fn quadratic_rejects_positive_entries() {
        assert!(QuadraticObjective::new(
            vec![vec![0.1, 0.0], vec![0.0, 0.0]],
            Vector::from_raw(vec![1.0, 1.0]),
        )
        .is_err());
    }

    #[test]
    fn noisy_oracle_stays_in_dual_ball() {
        for &norm in &[NormKind::L1, NormKind::L2, NormKind::LInf] {
            let inner = LinearObjective::new(Vector::from_raw(vec![1.0, 2.0, 3.0]), norm);
            let noisy = NoisyOracle::new(&inner, 0.25, 7);
            let x = Vector::zeros(3);
            for _ in 0..200 {
                let g = noisy.supergradient(&x);
                let err = g.sub(inner.coefficients());
                assert!(dual_norm(norm, &err) <= 0.25 + 1e-12);
            }
        }
    }

    #[test]
    fn noisy_oracle_deterministic_per_seed() {
        let inner = LinearObjective::new(Vector::from_raw(vec![1.0, 2.0]), NormKind::L2);
        let x = Vector::zeros(2);
        let a = NoisyOracle::new(&inner, 0.1, 42);
        let b = NoisyOracle::new(&inner, 0.1, 42);
        for _ in 0..10 {
            assert_eq!(a.supergradient(&x).as_slice(), b.supergradient(&x).as_slice());
        }
    }
}
