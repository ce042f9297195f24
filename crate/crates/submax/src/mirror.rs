//! Mirror maps, Bregman divergences and the prox operator used by the
//! mirror-prox solver.
//!
//! Only the Euclidean map `Φ(x) = ½‖x‖_2²` ships; it is 1-strongly convex in
//! the l2 norm and its prox reduces to a Euclidean projection, which is what
//! the shipped experiments use. The trait admits other 1-strongly-convex maps.

use crate::error::Result;
use crate::norm::NormKind;
use crate::region::FeasibleRegion;
use crate::scalar::{cast, Real};
use crate::vector::Vector;

/// A differentiable map `Φ`, 1-strongly convex with respect to
/// `strong_convexity_norm`.
pub trait MirrorMap<T: Real> {
    fn phi(&self, x: &Vector<T>) -> T;
    fn grad_phi(&self, x: &Vector<T>) -> Vector<T>;
    fn strong_convexity_norm(&self) -> NormKind;

    /// `Prox_x(ξ) = argmin_{z ∈ X} { ⟨ξ, z⟩ + V_x(z) }`.
    fn prox(&self, region: &FeasibleRegion<T>, x: &Vector<T>, xi: &Vector<T>)
        -> Result<Vector<T>>;

    /// `argmin_{x ∈ X} Φ(x)`, the mirror-prox starting point.
    fn phi_argmin(&self, region: &FeasibleRegion<T>) -> Result<Vector<T>>;

    /// An upper bound `D ≥ sup_{x,y ∈ X} V_y(x)`.
    fn diameter_bound(&self, region: &FeasibleRegion<T>) -> T;
}

/// `Φ(x) = ½‖x‖_2²`; `∇Φ = id`; prox = projection of `x − ξ`.
#[derive(Debug, Clone, Copy, Default)]
pub struct EuclideanMap;

impl<T: Real> MirrorMap<T> for EuclideanMap {
    fn phi(&self, x: &Vector<T>) -> T {
        x.dot(x) / cast::<T>(2.0)
    }

    fn grad_phi(&self, x: &Vector<T>) -> Vector<T> {
        x.clone()
    }

    fn strong_convexity_norm(&self) -> NormKind {
        NormKind::L2
    }

    fn prox(
        &self,
        region: &FeasibleRegion<T>,
        x: &Vector<T>,
        xi: &Vector<T>,
    ) -> Result<Vector<T>> {
        region.project(&x.sub(xi))
    }

    fn phi_argmin(&self, region: &FeasibleRegion<T>) -> Result<Vector<T>> {
        region.project(&Vector::zeros(region.dim()))
    }

    fn diameter_bound(&self, region: &FeasibleRegion<T>) -> T {
        // V_y(x) = ½‖x − y‖² for the Euclidean map
        region.euclidean_diameter_sq() / cast::<T>(2.0)
    }
}

/// Bregman divergence `V_x(z) = Φ(z) − Φ(x) − ⟨∇Φ(x), z − x⟩`.
pub fn bregman<T: Real>(map: &dyn MirrorMap<T>, x: &Vector<T>, z: &Vector<T>) -> T {
    map.phi(z) - map.phi(x) - map.grad_phi(x).dot(&z.sub(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn v(c: &[f64]) -> Vector<f64> {
        Vector::from_raw(c.to_vec())
    }

    #[test]
    fn bregman_euclidean() {
        let map = EuclideanMap;
        assert_abs_diff_eq!(bregman(&map, &v(&[0.0, 0.0]), &v(&[3.0, 4.0])), 12.5);
        assert_abs_diff_eq!(bregman(&map, &v(&[1.0, 1.0]), &v(&[2.0, 0.0])), 1.0);
        let x = v(&[0.7, 0.2]);
        assert_abs_diff_eq!(bregman(&map, &x, &x), 0.0);
    }

    #[test]
    fn prox_is_projection_of_shifted_point() {
        let map = EuclideanMap;
        let region = FeasibleRegion::unit_box(2);
        let out = map
            .prox(&region, &v(&[0.5, 0.5]), &v(&[1.0, -1.0]))
            .unwrap();
        assert_eq!(out.as_slice(), &[0.0, 1.0]);

        // zero step is the identity
        let same = map
            .prox(&region, &v(&[0.5, 0.5]), &v(&[0.0, 0.0]))
            .unwrap();
        assert_eq!(same.as_slice(), &[0.5, 0.5]);

        let simplex = FeasibleRegion::capped_simplex(2, 1.0, 1.0, true).unwrap();
        let out = map
            .prox(&simplex, &v(&[0.5, 0.5]), &v(&[0.2, -0.2]))
            .unwrap();
        assert_abs_diff_eq!(out[0], 0.3, epsilon = 1e-10);
        assert_abs_diff_eq!(out[1], 0.7, epsilon = 1e-10);
    }

    #[test]
    fn diameter_bounds() {
        let map = EuclideanMap;
        let unit = FeasibleRegion::<f64>::unit_box(2);
        assert_abs_diff_eq!(MirrorMap::<f64>::diameter_bound(&map, &unit), 1.0);
        let simplex = FeasibleRegion::capped_simplex(2, 1.0, 1.0, true).unwrap();
        assert_abs_diff_eq!(map.diameter_bound(&simplex), 1.0);
    }

    #[test]
    fn phi_argmin_projects_origin() {
        let map = EuclideanMap;
        let simplex = FeasibleRegion::capped_simplex(2, 1.0, 1.0, true).unwrap();
        let x1 = map.phi_argmin(&simplex).unwrap();
        assert_abs_diff_eq!(x1[0], 0.5, epsilon = 1e-10);
        assert_abs_diff_eq!(x1[1], 0.5, epsilon = 1e-10);
    }
}
