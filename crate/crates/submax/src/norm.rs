//! Norms and their duals. Solvers measure iterate distances in a primal norm
//! and gradient errors in its dual.

use crate::scalar::Real;
use crate::vector::Vector;

/// The primal norm a problem is stated in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormKind {
    L1,
    L2,
    LInf,
}

impl NormKind {
    /// Dual pairing: L1 <-> LInf, L2 self-dual.
    pub fn dual(self) -> NormKind {
        match self {
            NormKind::L1 => NormKind::LInf,
            NormKind::L2 => NormKind::L2,
            NormKind::LInf => NormKind::L1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            NormKind::L1 => "l1",
            NormKind::L2 => "l2",
            NormKind::LInf => "linf",
        }
    }
}

/// `‖v‖` under the given norm.
pub fn norm<T: Real>(kind: NormKind, v: &Vector<T>) -> T {
    match kind {
        NormKind::L1 => v.iter().map(|&a| a.abs()).sum(),
        NormKind::L2 => v.norm2(),
        NormKind::LInf => v.iter().fold(T::zero(), |m, &a| m.max(a.abs())),
    }
}

/// `‖g‖_*`, the dual norm of `norm(kind, ·)`.
pub fn dual_norm<T: Real>(kind: NormKind, g: &Vector<T>) -> T {
    norm(kind.dual(), g)
}
