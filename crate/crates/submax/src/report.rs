//! Solver output: final solution plus an optional recorded trajectory.

use crate::scalar::Real;
use crate::vector::Vector;

/// One recorded iterate: `(iteration, objective value, wall-clock seconds)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryPoint<T> {
    pub iteration: usize,
    pub value: T,
    pub seconds: f64,
}

/// What a solve produced. `solution` is feasible in the region it was solved
/// over; `trajectory` is nonempty iff trajectory recording was requested.
#[derive(Debug, Clone)]
pub struct SolveReport<T> {
    pub solver: String,
    pub solution: Vector<T>,
    pub value: T,
    pub trajectory: Vec<TrajectoryPoint<T>>,
    /// Echo of the configuration the solve ran under.
    pub config_echo: String,
    /// Certified inner-solve gaps, one per oracle call, for solvers that
    /// obtain gradients from an inner optimization. Empty otherwise.
    pub inner_gaps: Vec<T>,
    /// Set when a Lipschitz constant had to be estimated by sampling
    /// rather than supplied.
    pub estimated_lipschitz: Option<T>,
}

impl<T: Real> SolveReport<T> {
    pub fn new(solver: impl Into<String>, solution: Vector<T>, value: T) -> Self {
        SolveReport {
            solver: solver.into(),
            solution,
            value,
            trajectory: Vec::new(),
            config_echo: String::new(),
            inner_gaps: Vec::new(),
            estimated_lipschitz: None,
        }
    }
}
