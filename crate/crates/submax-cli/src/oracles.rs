//! Brute-force optimum oracles used as acceptance references: exhaustive
//! grids over low-dimensional regions and exhaustive subset enumeration for
//! set problems.

use anyhow::{bail, Result};

use submax::dro::{DroInstance, InnerSolver};
use submax::multilinear::{SetFunction, SetMask};
use submax::objective::Objective;
use submax::region::RegionShape;
use submax::vector::Vector;
use submax::{Region64, Vector64};

pub const GRID_DIM_CAP: usize = 6;
pub const GRID_MIN_RESOLUTION: f64 = 0.01;
pub const SUBSET_ENUMERATION_CAP: u64 = 1_000_000;

/// Exhaustive grid search over the region at the given resolution. For
/// equality-constrained simplices the last coordinate is determined by the
/// sum constraint and only `d − 1` coordinates are gridded. The result is a
/// certified lower bound on the optimum (it is the value of a feasible
/// point).
pub fn brute_force_opt_grid(
    objective: &dyn Objective<f64>,
    region: &Region64,
    resolution: f64,
) -> Result<(f64, Vector64)> {
    if region.dim() > GRID_DIM_CAP {
        bail!(
            "grid oracle capped at dimension {GRID_DIM_CAP}, got {}",
            region.dim()
        );
    }
    if resolution < GRID_MIN_RESOLUTION {
        bail!("grid resolution must be at least {GRID_MIN_RESOLUTION}, got {resolution}");
    }
    let d = region.dim();
    let (axes, equality_budget): (Vec<(f64, f64)>, Option<f64>) = match region.shape() {
        RegionShape::Box { lower, upper } => (
            (0..d).map(|i| (lower[i], upper[i])).collect(),
            None,
        ),
        RegionShape::CappedSimplex {
            cap,
            budget,
            equality,
        } => {
            let hi = cap.min(budget);
            let free = if equality { d - 1 } else { d };
            (
                (0..free).map(|_| (0.0, hi)).collect(),
                equality.then_some(budget),
            )
        }
        RegionShape::BudgetPolytope { budget } => ((0..d).map(|_| (0.0, budget)).collect(), None),
    };

    let steps: Vec<usize> = axes
        .iter()
        .map(|&(lo, hi)| ((hi - lo) / resolution).round() as usize)
        .collect();
    let mut indices = vec![0usize; axes.len()];
    let mut best: Option<(f64, Vector64)> = None;
    let mut coords = vec![0.0f64; d];

    loop {
        for (i, &idx) in indices.iter().enumerate() {
            let (lo, hi) = axes[i];
            coords[i] = (lo + idx as f64 * resolution).min(hi);
        }
        let feasible = match equality_budget {
            Some(budget) => {
                let partial: f64 = coords[..d - 1].iter().sum();
                let last = budget - partial;
                coords[d - 1] = last;
                last >= -1e-12
            }
            None => true,
        };
        if feasible {
            let x = Vector::from_raw(coords.clone());
            if region.contains(&x, 1e-9) {
                let v = objective.value(&x);
                if best.as_ref().map_or(true, |(bv, _)| v > *bv) {
                    best = Some((v, x));
                }
            }
        }
        // odometer increment
        let mut axis = 0;
        loop {
            if axis == indices.len() {
                return best
                    .ok_or_else(|| anyhow::anyhow!("grid produced no feasible point"));
            }
            indices[axis] += 1;
            if indices[axis] <= steps[axis] {
                break;
            }
            indices[axis] = 0;
            axis += 1;
        }
    }
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut out: u64 = 1;
    for i in 0..k {
        out = out.saturating_mul(n - i) / (i + 1);
    }
    out
}

/// Iterates all `m`-bit masks of population `b` (Gosper's hack).
fn for_each_subset(m: usize, b: usize, mut visit: impl FnMut(SetMask)) {
    if b == 0 {
        visit(0);
        return;
    }
    let limit: SetMask = 1 << m;
    let mut set: SetMask = (1 << b) - 1;
    while set < limit {
        visit(set);
        let c = set & set.wrapping_neg();
        let r = set + c;
        if r >= limit || c == 0 {
            break;
        }
        set = (((r ^ set) >> 2) / c) | r;
    }
}

fn check_subset_cap(m: usize, b: usize) -> Result<()> {
    let count = binomial(m as u64, b as u64);
    if count > SUBSET_ENUMERATION_CAP {
        bail!("C({m}, {b}) = {count} exceeds the enumeration cap {SUBSET_ENUMERATION_CAP}");
    }
    Ok(())
}

/// Best subset of size exactly `b` by full enumeration.
pub fn brute_force_opt_sets(f: &dyn SetFunction<f64>, b: usize) -> Result<(f64, SetMask)> {
    let m = f.ground_size();
    if b > m {
        bail!("subset size {b} exceeds ground set {m}");
    }
    check_subset_cap(m, b)?;
    let mut best = (f64::NEG_INFINITY, 0 as SetMask);
    for_each_subset(m, b, |set| {
        let v = f.eval(set);
        if v > best.0 {
            best = (v, set);
        }
    });
    Ok(best)
}

/// Best `b`-subset of a distributionally robust set objective: each subset's
/// indicator vector is scored by a near-exact inner solve of the regularized
/// worst case `H`.
pub fn brute_force_opt_sets_dro(
    inst: &DroInstance<f64>,
    b: usize,
    delta: f64,
) -> Result<(f64, SetMask)> {
    let m = inst.dim_x();
    if b > m {
        bail!("subset size {b} exceeds ground set {m}");
    }
    check_subset_cap(m, b)?;
    let mut solver = InnerSolver::new();
    let mut best = (f64::NEG_INFINITY, 0 as SetMask);
    let mut failure: Option<anyhow::Error> = None;
    for_each_subset(m, b, |set| {
        if failure.is_some() {
            return;
        }
        let x = Vector::from_fn(m, |j| if set & (1 << j) != 0 { 1.0 } else { 0.0 });
        match solver.solve(inst, &x, delta) {
            Ok(inner) => {
                if inner.r_value > best.0 {
                    best = (inner.r_value, set);
                }
            }
            Err(e) => failure = Some(e.into()),
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(best)
}
