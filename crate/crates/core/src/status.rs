//! Strong-feasibility decisions through the auxiliary status problems.
//!
//! Each status problem is strongly feasible on both sides, so [`postprocess`] can solve it
//! from a cold start; its optimal value then decides the status of the source problem.

use crate::error::Result;
use crate::models::{
    build_status_dualside, build_status_primal, interpret_status_dualside, interpret_status_primal,
    DualStatusVerdict, StatusDualSolution, StatusPrimalSolution, StatusProblem, StatusVerdict,
};
use crate::operators::ProblemData;
use crate::refine::{postprocess, Clock, RefineConfig, RefineResult, WarmStart};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StatusConfig {
    pub refine: RefineConfig,
    /// Decision tolerance on the optimal value and on direction residuals.
    pub tol: f64,
}

impl Default for StatusConfig {
    fn default() -> Self {
        StatusConfig { refine: RefineConfig::default(), tol: 1e-8 }
    }
}

/// A solved status problem together with its interpretation.
#[derive(Clone, Debug, PartialEq)]
pub struct StatusReport<S, V> {
    pub problem: StatusProblem,
    pub refine: RefineResult,
    pub solution: S,
    pub verdict: Result<V>,
}

pub type PrimalStatusReport = StatusReport<StatusPrimalSolution, StatusVerdict>;
pub type DualStatusReport = StatusReport<StatusDualSolution, DualStatusVerdict>;

fn solve(sp: &StatusProblem, cfg: &StatusConfig, clock: &dyn Clock) -> Result<RefineResult> {
    postprocess(&sp.problem, &WarmStart::cold(&sp.problem), &cfg.refine, clock)
}

/// Is (P) strongly feasible? Optimal value 1 means no, and yields a direction for (P).
pub fn status_primal(p: &ProblemData, cfg: &StatusConfig, clock: &dyn Clock) -> Result<PrimalStatusReport> {
    let sp = build_status_primal(p);
    let refine = solve(&sp, cfg, clock)?;
    let solution = StatusPrimalSolution::from_solution(&sp, &refine.x, &refine.y);
    let verdict = interpret_status_primal(&solution, p, cfg.tol);
    Ok(StatusReport { problem: sp, refine, solution, verdict })
}

/// Is (D) strongly feasible? Optimal value 0 means no, and yields a direction for (D).
pub fn status_dualside(p: &ProblemData, cfg: &StatusConfig, clock: &dyn Clock) -> Result<DualStatusReport> {
    let sp = build_status_dualside(p);
    let refine = solve(&sp, cfg, clock)?;
    let solution = StatusDualSolution::from_solution(&refine.x, &refine.y);
    let verdict = interpret_status_dualside(&solution, p, cfg.tol);
    Ok(StatusReport { problem: sp, refine, solution, verdict })
}
