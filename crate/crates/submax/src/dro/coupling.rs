//! Coupling functions `f(x, ζ)`: monotone DR-submodular in the decision `x`,
//! convex in the scenario `ζ`.

use crate::multilinear::{
    exact_gradient, exact_value, sample_set, sampled_gradient, sampled_value, CoverageFunction,
    EXACT_ENUMERATION_CAP,
};
use crate::norm::NormKind;
use crate::scalar::{cast, Real};
use crate::vector::Vector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Value and both partial gradients of `f(x, ζ)`, plus the declared
/// smoothness of `ζ ↦ f(x, ζ)` that sets the inner step size (`0` for
/// couplings linear or piecewise-linear in `ζ`).
pub trait Coupling<T: Real> {
    fn dim_x(&self) -> usize;
    fn dim_zeta(&self) -> usize;
    fn value(&self, x: &Vector<T>, zeta: &Vector<T>) -> T;
    fn grad_x(&self, x: &Vector<T>, zeta: &Vector<T>) -> Vector<T>;
    fn grad_zeta(&self, x: &Vector<T>, zeta: &Vector<T>) -> Vector<T>;
    fn zeta_smoothness(&self) -> T;
    /// The norm on the decision side; gradient bounds use its dual.
    fn norm(&self) -> NormKind;

    /// For couplings with a set-valued scenario subdifferential (piecewise
    /// linear in `ζ`): a subgradient minimizing `⟨g, pull⟩` over
    /// `∂_ζ f(x, ·)`. `None` when the gradient is unique, which lets inner
    /// optimality certificates skip selection search.
    fn grad_zeta_min_align(
        &self,
        _x: &Vector<T>,
        _zeta: &Vector<T>,
        _pull: &Vector<T>,
    ) -> Option<Vector<T>> {
        None
    }
}

/// `f(x, ζ) = ζᵀ W x` with `W ≥ 0` (m × d): linear in both arguments.
#[derive(Debug, Clone)]
pub struct BilinearCoupling<T> {
    w: Vec<Vec<T>>,
    dim_x: usize,
}

impl<T: Real> BilinearCoupling<T> {
    pub fn new(w: Vec<Vec<T>>) -> Self {
        assert!(!w.is_empty(), "weight matrix must be nonempty");
        let dim_x = w[0].len();
        assert!(w.iter().all(|r| r.len() == dim_x));
        BilinearCoupling { w, dim_x }
    }
}

impl<T: Real> Coupling<T> for BilinearCoupling<T> {
    fn dim_x(&self) -> usize {
        self.dim_x
    }
    fn dim_zeta(&self) -> usize {
        self.w.len()
    }
    fn value(&self, x: &Vector<T>, zeta: &Vector<T>) -> T {
        self.w
            .iter()
            .zip(zeta.iter())
            .map(|(row, &z)| z * row.iter().zip(x.iter()).map(|(&w, &xi)| w * xi).sum::<T>())
            .sum()
    }
    fn grad_x(&self, _x: &Vector<T>, zeta: &Vector<T>) -> Vector<T> {
        Vector::from_fn(self.dim_x, |j| {
            self.w
                .iter()
                .zip(zeta.iter())
                .map(|(row, &z)| z * row[j])
                .sum()
        })
    }
    fn grad_zeta(&self, x: &Vector<T>, _zeta: &Vector<T>) -> Vector<T> {
        Vector::from_fn(self.w.len(), |i| {
            self.w[i]
                .iter()
                .zip(x.iter())
                .map(|(&w, &xi)| w * xi)
                .sum()
        })
    }
    fn zeta_smoothness(&self) -> T {
        T::zero()
    }
    fn norm(&self) -> NormKind {
        NormKind::L2
    }
}

/// `f(x, ζ) = ⟨c, x⟩`, independent of the scenario. The DRO machinery
/// collapses onto the plain solvers for this coupling.
#[derive(Debug, Clone)]
pub struct DecoupledLinearCoupling<T> {
    c: Vector<T>,
    dim_zeta: usize,
}

impl<T: Real> DecoupledLinearCoupling<T> {
    pub fn new(c: Vector<T>, dim_zeta: usize) -> Self {
        DecoupledLinearCoupling { c, dim_zeta }
    }
}

impl<T: Real> Coupling<T> for DecoupledLinearCoupling<T> {
    fn dim_x(&self) -> usize {
        self.c.dim()
    }
    fn dim_zeta(&self) -> usize {
        self.dim_zeta
    }
    fn value(&self, x: &Vector<T>, _zeta: &Vector<T>) -> T {
        self.c.dot(x)
    }
    fn grad_x(&self, _x: &Vector<T>, _zeta: &Vector<T>) -> Vector<T> {
        self.c.clone()
    }
    fn grad_zeta(&self, _x: &Vector<T>, _zeta: &Vector<T>) -> Vector<T> {
        Vector::zeros(self.dim_zeta)
    }
    fn zeta_smoothness(&self) -> T {
        T::zero()
    }
    fn norm(&self) -> NormKind {
        NormKind::L2
    }
}

/// `f(x, ζ) = Σ_j ζ_j (1 − e^{−x_j})` with `m = d`: saturating coordinate
/// utilities weighted by the scenario.
#[derive(Debug, Clone)]
pub struct ExpSatCoupling {
    pub dim: usize,
}

impl<T: Real> Coupling<T> for ExpSatCoupling {
    fn dim_x(&self) -> usize {
        self.dim
    }
    fn dim_zeta(&self) -> usize {
        self.dim
    }
    fn value(&self, x: &Vector<T>, zeta: &Vector<T>) -> T {
        x.iter()
            .zip(zeta.iter())
            .map(|(&xi, &z)| z * (T::one() - (-xi).exp()))
            .sum()
    }
    fn grad_x(&self, x: &Vector<T>, zeta: &Vector<T>) -> Vector<T> {
        Vector::from_fn(self.dim, |j| zeta[j] * (-x[j]).exp())
    }
    fn grad_zeta(&self, x: &Vector<T>, _zeta: &Vector<T>) -> Vector<T> {
        Vector::from_fn(self.dim, |j| T::one() - (-x[j]).exp())
    }
    fn zeta_smoothness(&self) -> T {
        T::zero()
    }
    fn norm(&self) -> NormKind {
        NormKind::L2
    }
}

/// `f(x, ζ) = Σ_i ζ_i² (Q x)_i` with `Q ≥ 0`: strictly smooth in `ζ`.
#[derive(Debug, Clone)]
pub struct QuadraticZetaCoupling<T> {
    q: Vec<Vec<T>>,
    dim_x: usize,
    /// `2 · sup_x max_i (Qx)_i` over the feasible region, supplied by the
    /// instance builder.
    zeta_smooth: T,
}

impl<T: Real> QuadraticZetaCoupling<T> {
    pub fn new(q: Vec<Vec<T>>, zeta_smooth: T) -> Self {
        assert!(!q.is_empty());
        let dim_x = q[0].len();
        assert!(q.iter().all(|r| r.len() == dim_x));
        QuadraticZetaCoupling {
            q,
            dim_x,
            zeta_smooth,
        }
    }

    fn qx(&self, x: &Vector<T>) -> Vec<T> {
        self.q
            .iter()
            .map(|row| row.iter().zip(x.iter()).map(|(&q, &xi)| q * xi).sum())
            .collect()
    }
}

impl<T: Real> Coupling<T> for QuadraticZetaCoupling<T> {
    fn dim_x(&self) -> usize {
        self.dim_x
    }
    fn dim_zeta(&self) -> usize {
        self.q.len()
    }
    fn value(&self, x: &Vector<T>, zeta: &Vector<T>) -> T {
        self.qx(x)
            .iter()
            .zip(zeta.iter())
            .map(|(&qx, &z)| z * z * qx)
            .sum()
    }
    fn grad_x(&self, _x: &Vector<T>, zeta: &Vector<T>) -> Vector<T> {
        Vector::from_fn(self.dim_x, |j| {
            self.q
                .iter()
                .zip(zeta.iter())
                .map(|(row, &z)| z * z * row[j])
                .sum()
        })
    }
    fn grad_zeta(&self, x: &Vector<T>, zeta: &Vector<T>) -> Vector<T> {
        let qx = self.qx(x);
        Vector::from_fn(self.q.len(), |i| cast::<T>(2.0) * zeta[i] * qx[i])
    }
    fn zeta_smoothness(&self) -> T {
        self.zeta_smooth
    }
    fn norm(&self) -> NormKind {
        NormKind::L2
    }
}

/// How multilinear quantities are evaluated.
#[derive(Debug, Clone, Copy)]
pub enum EvalMode {
    /// Full subset enumeration (`m ≤ 20`).
    Exact,
    /// Seeded unbiased sampling; the fixed seed keeps repeated evaluations
    /// (e.g. the mirror-prox window argmax) deterministic.
    Sampled { batch: usize, seed: u64 },
}

/// The movie-recommendation coupling: `f(x, ζ)` is the multilinear extension,
/// at inclusion probabilities `x`, of the coverage utility
/// `S ↦ max_{j∈S} ζ_j`, where `ζ` is a (possibly perturbed) rating vector.
///
/// Piecewise linear in `ζ`; the scenario gradient distributes each subset's
/// weight to its highest-rated member (lowest index on ties).
#[derive(Debug, Clone)]
pub struct CoverageMultilinearCoupling {
    dim: usize,
    mode: EvalMode,
}

impl CoverageMultilinearCoupling {
    pub fn new(dim: usize, mode: EvalMode) -> Self {
        if matches!(mode, EvalMode::Exact) {
            assert!(
                dim <= EXACT_ENUMERATION_CAP,
                "exact mode is capped at m = {EXACT_ENUMERATION_CAP}"
            );
        }
        CoverageMultilinearCoupling { dim, mode }
    }

    fn coverage<T: Real>(&self, zeta: &Vector<T>) -> CoverageFunction<T> {
        // scenario iterates stay inside the sample box, which is nonnegative
        // for rating instances; clamp guards evaluation at stray points
        let ratings: Vec<T> = zeta.iter().map(|&z| z.max(T::zero())).collect();
        CoverageFunction::new(ratings).expect("nonnegative ratings")
    }

    /// `argmax_{j ∈ set} ζ_j`, lowest index on ties.
    fn argmax_in_set<T: Real>(zeta: &Vector<T>, set: u64) -> Option<usize> {
        let mut best: Option<usize> = None;
        for j in 0..zeta.dim() {
            if set & (1 << j) == 0 {
                continue;
            }
            match best {
                None => best = Some(j),
                Some(b) => {
                    if zeta[j] > zeta[b] {
                        best = Some(j);
                    }
                }
            }
        }
        best
    }

    /// Among coordinates of `set` within tie tolerance of the set maximum,
    /// the one minimizing `pull` (any of them selects a valid subgradient
    /// term; this picks the extreme one for certificate search).
    fn argmax_tied_min_pull<T: Real>(
        zeta: &Vector<T>,
        set: u64,
        pull: &Vector<T>,
    ) -> Option<usize> {
        let top = Self::argmax_in_set(zeta, set)?;
        let tol = cast::<T>(1e-9) * (T::one() + zeta[top].abs());
        let mut best = top;
        for j in 0..zeta.dim() {
            if set & (1 << j) == 0 || zeta[j] < zeta[top] - tol {
                continue;
            }
            if pull[j] < pull[best] {
                best = j;
            }
        }
        Some(best)
    }

    /// Distributes each subset's multilinear weight onto one coordinate per
    /// subset chosen by `select`.
    fn attribute_weights<T: Real>(
        &self,
        x: &Vector<T>,
        mut select: impl FnMut(u64) -> Option<usize>,
    ) -> Vector<T> {
        let m = self.dim;
        let mut g = vec![T::zero(); m];
        match self.mode {
            EvalMode::Exact => {
                for set in 1..(1u64 << m) {
                    let mut weight = T::one();
                    for j in 0..m {
                        if set & (1 << j) != 0 {
                            weight = weight * x[j];
                        } else {
                            weight = weight * (T::one() - x[j]);
                        }
                    }
                    if weight > T::zero() {
                        if let Some(j) = select(set) {
                            g[j] += weight;
                        }
                    }
                }
            }
            EvalMode::Sampled { batch, seed } => {
                let inv = T::one() / cast::<T>(batch as f64);
                for k in 0..batch {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ k as u64);
                    let set = sample_set(x, &mut rng);
                    if let Some(j) = select(set) {
                        g[j] += inv;
                    }
                }
            }
        }
        Vector::from_raw(g)
    }
}

impl<T: Real> Coupling<T> for CoverageMultilinearCoupling {
    fn dim_x(&self) -> usize {
        self.dim
    }
    fn dim_zeta(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &Vector<T>, zeta: &Vector<T>) -> T {
        let f = self.coverage(zeta);
        match self.mode {
            EvalMode::Exact => exact_value(&f, x).expect("validated dims"),
            EvalMode::Sampled { batch, seed } => {
                sampled_value(&f, x, batch, seed).expect("validated dims")
            }
        }
    }

    fn grad_x(&self, x: &Vector<T>, zeta: &Vector<T>) -> Vector<T> {
        let f = self.coverage(zeta);
        match self.mode {
            EvalMode::Exact => exact_gradient(&f, x).expect("validated dims"),
            EvalMode::Sampled { batch, seed } => {
                sampled_gradient(&f, x, batch, seed).expect("validated dims")
            }
        }
    }

    fn grad_zeta(&self, x: &Vector<T>, zeta: &Vector<T>) -> Vector<T> {
        // each subset's multilinear weight goes to its argmax coordinate
        self.attribute_weights(x, |set| Self::argmax_in_set(zeta, set))
    }

    fn zeta_smoothness(&self) -> T {
        // piecewise linear in ζ; a unit surrogate keeps inner steps at the
        // scale where subset argmax patterns change slowly
        T::one()
    }

    fn norm(&self) -> NormKind {
        NormKind::L1
    }

    fn grad_zeta_min_align(
        &self,
        x: &Vector<T>,
        zeta: &Vector<T>,
        pull: &Vector<T>,
    ) -> Option<Vector<T>> {
        Some(self.attribute_weights(x, |set| Self::argmax_tied_min_pull(zeta, set, pull)))
    }
}
