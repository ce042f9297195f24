//! Smoothness moduli of the form `h(z) = Σ_i β_i z^{σ_i}` with `σ_i ∈ [0, 1]`.
//!
//! `σ = 1` terms are classical smoothness, `σ = 0` terms admit non-smooth
//! objectives (e.g. a pointwise minimum with gradients bounded by `L` has the
//! constant modulus `h = 2L`). Step-size schedules and performance bounds are
//! driven by these terms.

use crate::error::{Error, Result};
use crate::scalar::{cast, Real};

/// A sum of power terms `(β_i, σ_i)` bounding gradient variation:
/// `‖g_x − g_y‖_* ≤ h(‖x − y‖)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HolderModulus<T> {
    terms: Vec<(T, T)>,
}

impl<T: Real> HolderModulus<T> {
    /// Builds a modulus from `(beta, sigma)` terms.
    /// Requires a nonempty list, every `beta > 0` and every `sigma ∈ [0, 1]`.
    pub fn new(terms: Vec<(T, T)>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidParameter(
                "modulus needs at least one term".into(),
            ));
        }
        for &(beta, sigma) in &terms {
            if !(beta > T::zero()) || !beta.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "modulus coefficient must be positive and finite, got {beta}"
                )));
            }
            if !(sigma >= T::zero() && sigma <= T::one()) {
                return Err(Error::InvalidParameter(format!(
                    "modulus exponent must lie in [0, 1], got {sigma}"
                )));
            }
        }
        Ok(HolderModulus { terms })
    }

    /// Single-term modulus `β z^σ`.
    pub fn single(beta: T, sigma: T) -> Result<Self> {
        Self::new(vec![(beta, sigma)])
    }

    /// Constant modulus `h ≡ c`, used for non-smooth objectives.
    pub fn constant(c: T) -> Result<Self> {
        Self::single(c, T::zero())
    }

    pub fn terms(&self) -> &[(T, T)] {
        &self.terms
    }

    /// `σ = min_i σ_i`, the exponent that drives convergence rates.
    pub fn sigma_min(&self) -> T {
        self.terms
            .iter()
            .map(|&(_, s)| s)
            .fold(T::one(), |m, s| m.min(s))
    }

    /// `Σ_i β_i`.
    pub fn beta_sum(&self) -> T {
        self.terms.iter().map(|&(b, _)| b).sum()
    }

    /// Evaluates `h(z) = Σ_i β_i z^{σ_i}` for `z ≥ 0`, with the convention
    /// `0^0 = 1` so constant terms stay constant at `z = 0`.
    pub fn eval(&self, z: T) -> Result<T> {
        if !(z >= T::zero()) {
            return Err(Error::InvalidParameter(format!(
                "modulus argument must be nonnegative, got {z}"
            )));
        }
        Ok(self
            .terms
            .iter()
            .map(|&(beta, sigma)| {
                if sigma == T::zero() {
                    beta
                } else {
                    beta * z.powf(sigma)
                }
            })
            .sum())
    }

    /// `Σ_i β_i / (1 + σ_i) · z^{1 + σ_i}`, the integrated modulus appearing
    /// in descent-style lower bounds.
    pub fn integrated(&self, z: T) -> T {
        debug_assert!(z >= T::zero());
        self.terms
            .iter()
            .map(|&(beta, sigma)| beta / (T::one() + sigma) * z.powf(T::one() + sigma))
            .sum()
    }

    /// `Σ_i β_i R^{1+σ_i} / T^{σ_i}`, the iteration-dependent slack of the
    /// continuous-greedy performance bound.
    pub fn greedy_slack(&self, radius: T, iterations: usize) -> T {
        let t = cast::<T>(iterations as f64);
        self.terms
            .iter()
            .map(|&(beta, sigma)| beta * radius.powf(T::one() + sigma) / t.powf(sigma))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_single_linear_term() {
        let h = HolderModulus::single(2.0, 1.0).unwrap();
        assert_eq!(h.eval(3.0).unwrap(), 6.0);
    }

    #[test]
    fn eval_mixed_terms() {
        // 1·4 + 2·√4 = 8
        let h = HolderModulus::new(vec![(1.0, 1.0), (2.0, 0.5)]).unwrap();
        assert_eq!(h.eval(4.0).unwrap(), 8.0);
        assert_eq!(h.sigma_min(), 0.5);
        assert_eq!(h.beta_sum(), 3.0);
    }

    #[test]
    fn constant_term_at_zero() {
        let h = HolderModulus::constant(5.0).unwrap();
        assert_eq!(h.eval(0.0).unwrap(), 5.0);
    }

    #[test]
    fn rejects_bad_terms() {
        assert!(HolderModulus::<f64>::new(vec![]).is_err());
        assert!(HolderModulus::new(vec![(0.0, 0.5)]).is_err());
        assert!(HolderModulus::new(vec![(-1.0, 0.5)]).is_err());
        assert!(HolderModulus::new(vec![(1.0, 1.5)]).is_err());
        assert!(HolderModulus::single(1.0, 0.5).unwrap().eval(-1.0).is_err());
    }

    #[test]
    fn monotone_in_z() {
        let h = HolderModulus::new(vec![(1.0, 0.0), (2.0, 0.3), (0.5, 1.0)]).unwrap();
        let mut prev = h.eval(0.0).unwrap();
        for i in 1..=100 {
            let z = 0.1 * i as f64;
            let cur = h.eval(z).unwrap();
            assert!(cur >= prev);
            prev = cur;
        }
        // h(0) = sum of constant-term coefficients
        assert_eq!(h.eval(0.0).unwrap(), 1.0);
    }
}
