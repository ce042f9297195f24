//! The multi-resolution data summarization problem: scores `x` over `k`
//! items with pairwise similarities `s_ij`, maximizing
//!
//! `F(x) = Σ_i Σ_j φ(x_j) s_ij − Σ_i Σ_j x_i x_j s_ij`
//!
//! over `{0 ≤ x_i ≤ 1, Σ x_i = 5}`. The concave utility `φ` is piecewise
//! linear (slopes 7 > 6 > 5 with breakpoints 1/2 and 3/4), so `F` is
//! up-concave but not differentiable.

use anyhow::{bail, Result};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use submax::holder::HolderModulus;
use submax::norm::{dual_norm, NormKind};
use submax::objective::Objective;
use submax::region::FeasibleRegion;
use submax::vector::Vector;
use submax::{Region64, Vector64};

/// `φ(x)`: 7x on [0, 1/2], 6x + 1/2 on [1/2, 3/4], 5x + 5/4 on [3/4, 1].
pub fn phi_eval(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        bail!("phi argument {x} outside [0, 1]");
    }
    Ok(if x <= 0.5 {
        7.0 * x
    } else if x <= 0.75 {
        6.0 * x + 0.5
    } else {
        5.0 * x + 1.25
    })
}

/// A superderivative of `φ`: the slope on open pieces, the midpoint of the
/// adjacent slopes at the breakpoints (6.5 at 1/2, 5.5 at 3/4) — a valid
/// element of the concave superdifferential.
pub fn phi_superderivative(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        bail!("phi argument {x} outside [0, 1]");
    }
    Ok(if x < 0.5 {
        7.0
    } else if x == 0.5 {
        6.5
    } else if x < 0.75 {
        6.0
    } else if x == 0.75 {
        5.5
    } else {
        5.0
    })
}

/// A summarization instance: `k` items and similarity indices in `[0, 1]`
/// (not necessarily symmetric).
#[derive(Debug, Clone)]
pub struct SummarizationInstance {
    pub k: usize,
    pub s: Vec<Vec<f64>>,
    pub budget: f64,
}

impl SummarizationInstance {
    pub fn new(s: Vec<Vec<f64>>, budget: f64) -> Result<Self> {
        let k = s.len();
        if k == 0 {
            bail!("instance needs at least one item");
        }
        for row in &s {
            if row.len() != k {
                bail!("similarity matrix must be square");
            }
            for &v in row {
                if !(0.0..=1.0).contains(&v) {
                    bail!("similarity index {v} outside [0, 1]");
                }
            }
        }
        if !(budget > 0.0) || budget > k as f64 {
            bail!("budget {budget} infeasible for k = {k}");
        }
        Ok(SummarizationInstance { k, s, budget })
    }

    /// `{0 ≤ x_i ≤ 1, Σ x_i = budget}`.
    pub fn region(&self) -> Region64 {
        FeasibleRegion::capped_simplex(self.k, 1.0, self.budget, true)
            .expect("validated at construction")
    }

    /// The non-differentiable objective with its up-super-gradient.
    pub fn objective(&self) -> SummarizationObjective {
        let k = self.k;
        let col_sums: Vec<f64> = (0..k).map(|l| (0..k).map(|i| self.s[i][l]).sum()).collect();
        let sym: Vec<Vec<f64>> = (0..k)
            .map(|l| (0..k).map(|j| self.s[l][j] + self.s[j][l]).collect())
            .collect();
        SummarizationObjective {
            col_sums,
            sym,
            modulus: None,
        }
    }
}

/// Evaluates `F` and its up-super-gradient
/// `g_ℓ = (Σ_i s_{iℓ}) φ'(x_ℓ) − Σ_j (s_{ℓj} + s_{jℓ}) x_j`.
#[derive(Debug, Clone)]
pub struct SummarizationObjective {
    col_sums: Vec<f64>,
    sym: Vec<Vec<f64>>,
    modulus: Option<HolderModulus<f64>>,
}

impl SummarizationObjective {
    /// Attaches the constant modulus `(2 L̂, 0)` with `L̂` the sampled
    /// Lipschitz estimate (1.1 safety factor), enabling the theory schedule.
    pub fn with_estimated_modulus(mut self, region: &Region64, samples: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut sup: f64 = 0.0;
        for _ in 0..samples {
            let x = region.sample_point(&mut rng);
            sup = sup.max(dual_norm(NormKind::L2, &self.supergradient(&x)));
        }
        let l_hat = sup * 1.1;
        self.modulus = HolderModulus::constant(2.0 * l_hat).ok();
        self
    }

    fn clamp01(x: &Vector64) -> Vec<f64> {
        x.iter().map(|&v| v.clamp(0.0, 1.0)).collect()
    }
}

impl Objective<f64> for SummarizationObjective {
    fn dim(&self) -> usize {
        self.col_sums.len()
    }

    fn value(&self, x: &Vector64) -> f64 {
        let xs = Self::clamp01(x);
        let utility: f64 = xs
            .iter()
            .zip(&self.col_sums)
            .map(|(&xj, &cs)| cs * phi_eval(xj).expect("clamped"))
            .sum();
        // x'Sx via the symmetrized rows: x'Sx = 1/2 Σ_ℓ x_ℓ Σ_j (s_ℓj + s_jℓ) x_j
        let quad: f64 = xs
            .iter()
            .enumerate()
            .map(|(l, &xl)| {
                xl * self.sym[l]
                    .iter()
                    .zip(&xs)
                    .map(|(&slj, &xj)| slj * xj)
                    .sum::<f64>()
            })
            .sum::<f64>()
            / 2.0;
        utility - quad
    }

    fn supergradient(&self, x: &Vector64) -> Vector64 {
        let xs = Self::clamp01(x);
        Vector::from_fn(self.dim(), |l| {
            self.col_sums[l] * phi_superderivative(xs[l]).expect("clamped")
                - self.sym[l]
                    .iter()
                    .zip(&xs)
                    .map(|(&slj, &xj)| slj * xj)
                    .sum::<f64>()
        })
    }

    fn norm(&self) -> NormKind {
        NormKind::L2
    }

    fn modulus(&self) -> Option<HolderModulus<f64>> {
        self.modulus.clone()
    }
}

/// Draws `s_ij` i.i.d. uniform on `[0, 1]` (not symmetrized), deterministic
/// per seed.
pub fn gen_summarization(k: usize, seed: u64, budget: f64) -> Result<SummarizationInstance> {
    if k == 0 {
        bail!("k must be at least 1");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s: Vec<Vec<f64>> = (0..k)
        .map(|_| (0..k).map(|_| rng.gen::<f64>()).collect())
        .collect();
    SummarizationInstance::new(s, budget)
}
