//! Bisection on the optimal value driven by the projection-and-rescaling oracle.
//!
//! [`refine_primal`] solves the kernel model of `A(theta)` and moves `UB` down whenever an
//! interior primal point with objective below `theta` exists; [`refine_dual`] does the same on
//! the range model from the dual side. [`postprocess`] chains both stages starting from an
//! approximate solution.

use alloc::vec::Vec;

use nalgebra::DVector;

use crate::error::Result;
use crate::jordan::{inv_sqrt, BlockVec, Scaling};
use crate::metrics::{dimacs, merit, DimacsErrors};
use crate::models::{interpret_kernel_point, interpret_range_point, Certificate};
use crate::operators::{homogenize, projectors, HomogenizedMap, Model, ProblemData};
use crate::prsolver::{pr_main, Diagnostic, PrConfig, PrResult};

/// Acceptance bound on residuals and eigenvalues of oracle outputs.
pub const ACCEPT_TOL: f64 = 1e-4;
/// Shift added past `-lambda_min` when a warm start is pushed into the interior.
pub const INTERIOR_SHIFT: f64 = 1e-15;
/// Lower limit of `|b^T (alpha d)|` in [`merge_dual`].
pub const MERGE_STEP_FLOOR: f64 = 1e-16;

/// Monotone seconds since an arbitrary origin.
pub trait Clock {
    fn seconds(&self) -> f64;
}

/// A clock that never advances; stages then never time out.
#[derive(Clone, Copy, Debug, Default)]
pub struct FrozenClock;

impl Clock for FrozenClock {
    fn seconds(&self) -> f64 {
        0.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RefineConfig {
    pub theta_acc: f64,
    pub pr: PrConfig,
    /// Seconds per stage.
    pub time_limit: f64,
    pub incorrect_limit: usize,
    pub noeps_limit: usize,
    /// Absolute `lambda_min` tolerance for dual feasibility of `y`.
    pub member_tol: f64,
}

impl Default for RefineConfig {
    fn default() -> Self {
        RefineConfig {
            theta_acc: 1e-12,
            pr: PrConfig::default(),
            time_limit: 1800.0,
            incorrect_limit: 30,
            noeps_limit: 30,
            member_tol: 1e-12,
        }
    }
}

/// An approximate solution `(x, y, z)`.
#[derive(Clone, Debug, PartialEq)]
pub struct WarmStart {
    pub x: BlockVec,
    pub y: DVector<f64>,
    pub z: BlockVec,
}

impl WarmStart {
    /// `x = e`, `y = 0`, `z = c`.
    pub fn cold(p: &ProblemData) -> Self {
        WarmStart { x: BlockVec::identity(p.shape()), y: DVector::zeros(p.m()), z: p.c.clone() }
    }

    /// `(x, y, c - A^* y)`.
    pub fn from_xy(p: &ProblemData, x: BlockVec, y: DVector<f64>) -> Self {
        let z = p.slack(&y);
        WarmStart { x, y, z }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// Kernel model, `UB` driven.
    Primal,
    /// Range model, `LB` driven.
    Dual,
}

impl Side {
    pub fn model(self) -> Model {
        match self {
            Side::Primal => Model::Kernel,
            Side::Dual => Model::Range,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Side::Primal => "primal",
            Side::Dual => "dual",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutcomeTag {
    /// Accepted primal point, `UB <- theta`.
    PrimalPoint,
    /// Accepted dual point, `LB <- theta`.
    DualPoint,
    NoEpsFeasible,
    Incorrect,
    Certificate,
}

impl OutcomeTag {
    pub fn name(self) -> &'static str {
        match self {
            OutcomeTag::PrimalPoint => "primal_point",
            OutcomeTag::DualPoint => "dual_point",
            OutcomeTag::NoEpsFeasible => "no_eps_feasible",
            OutcomeTag::Incorrect => "incorrect",
            OutcomeTag::Certificate => "certificate",
        }
    }
}

/// One outer iteration; `lb` and `ub` are the bounds after the update.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceRecord {
    pub side: Side,
    pub k: usize,
    pub theta: f64,
    pub outcome: OutcomeTag,
    pub lb: f64,
    pub ub: f64,
    pub seconds: f64,
    pub rounds: usize,
    pub bp_iterations: usize,
    /// Reason for an incorrect output.
    pub diagnostic: Option<Diagnostic>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Exit {
    Complete,
    TimeOver,
    NumericalError,
    CertificateFound(Certificate),
}

impl Exit {
    pub fn name(&self) -> &'static str {
        match self {
            Exit::Complete => "complete",
            Exit::TimeOver => "time_over",
            Exit::NumericalError => "numerical_error",
            Exit::CertificateFound(_) => "certificate_found",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RefineResult {
    pub x: BlockVec,
    pub y: DVector<f64>,
    pub z: BlockVec,
    pub exit: Exit,
    pub dimacs: DimacsErrors,
    pub lb: f64,
    pub ub: f64,
    pub trace: Vec<TraceRecord>,
}

/// Loop state of one stage.
#[derive(Clone, Debug)]
pub struct RefineState {
    pub lb: f64,
    pub ub: f64,
    pub theta: f64,
    pub ybar: Option<DVector<f64>>,
    pub vbar: Scaling,
    pub sol_p: Vec<BlockVec>,
    pub sol_d: Vec<DVector<f64>>,
    pub consecutive_incorrect: usize,
    pub consecutive_noeps: usize,
    expand: i32,
}

impl RefineState {
    fn raise_lb(&mut self, v: f64) {
        if v > self.lb {
            self.lb = v;
        }
    }

    fn lower_ub(&mut self, v: f64) {
        if v < self.ub {
            self.ub = v;
        }
    }
}

fn is_member(p: &ProblemData, y: &DVector<f64>, tol: f64) -> bool {
    matches!(p.slack(y).lambda_min(), Ok(l) if l >= -tol)
}

/// Combines a dual feasible `ybar` with a candidate `y_tmp` into a dual feasible point whose
/// objective is at least `b^T ybar`.
pub fn merge_dual(p: &ProblemData, y_tmp: &DVector<f64>, ybar: &DVector<f64>, tol: f64) -> (DVector<f64>, BlockVec) {
    let (obar, otmp) = (p.dual_objective(ybar), p.dual_objective(y_tmp));
    let mut base = ybar.clone();
    let (d, u) = if obar == otmp {
        return (base.clone(), p.slack(&base));
    } else if obar > otmp {
        (ybar - y_tmp, 5.0)
    } else if is_member(p, y_tmp, tol) {
        base = y_tmp.clone();
        (y_tmp - ybar, 5.0)
    } else {
        (y_tmp - ybar, 1.0)
    };
    let mut alpha = u;
    while p.dual_objective(&(alpha * &d)) > MERGE_STEP_FLOOR {
        let y = &base + alpha * &d;
        if is_member(p, &y, tol) {
            let z = p.slack(&y);
            return (y, z);
        }
        alpha *= 0.5;
    }
    let z = p.slack(&base);
    (base, z)
}

/// Pool extraction: the best filtered dual point, then the primal point of least merit.
pub fn select_best(
    p: &ProblemData,
    sol_p: &[BlockVec],
    sol_d: &[DVector<f64>],
    y0: &DVector<f64>,
    ybar: Option<&DVector<f64>>,
) -> Result<(BlockVec, DVector<f64>)> {
    let floor = p.slack(y0).lambda_min()?.min(0.0);
    let mut best: Option<(f64, &DVector<f64>)> = None;
    for y in sol_d {
        let ok = matches!(p.slack(y).lambda_min(), Ok(l) if l >= floor);
        let obj = p.dual_objective(y);
        if ok && obj.is_finite() && best.is_none_or(|(b, _)| obj > b) {
            best = Some((obj, y));
        }
    }
    let mut y_star = match (best, ybar) {
        (Some((_, y)), _) => y.clone(),
        (None, Some(yb)) => yb.clone(),
        (None, None) => y0.clone(),
    };
    if let Some(yb) = ybar {
        if p.dual_objective(yb) >= p.dual_objective(&y_star) {
            y_star = yb.clone();
        }
    }
    let z_star = p.slack(&y_star);
    let mut x_best: Option<(f64, &BlockVec)> = None;
    for x in sol_p {
        let f = merit(x, &y_star, &z_star, p)?;
        if f.is_finite() && x_best.is_none_or(|(b, _)| f < b) {
            x_best = Some((f, x));
        }
    }
    let x_star = match x_best {
        Some((_, x)) => x.clone(),
        None => sol_p.first().cloned().unwrap_or_else(|| BlockVec::identity(p.shape())),
    };
    Ok((x_star, y_star))
}

fn pow2(n: i32) -> f64 {
    num_traits::Float::powi(2.0, n)
}

/// Bisection fractions used after consecutive incorrect outputs.
const JITTER: [f64; 5] = [0.5, 0.25, 0.75, 0.125, 0.875];

/// Next `theta` strictly inside `(lb, ub)`, or `None` when no such double exists.
fn choose_theta(state: &mut RefineState, theta0: f64, first: bool, jitter: usize) -> Option<f64> {
    let (lb, ub) = (state.lb, state.ub);
    let step = theta0.abs().max(1.0);
    let inside = |t: f64| t.is_finite() && lb < t && t < ub;
    if first && inside(theta0) {
        return Some(theta0);
    }
    let t = match (lb.is_finite(), ub.is_finite()) {
        (true, true) => lb + JITTER[jitter % JITTER.len()] * (ub - lb),
        (true, false) => {
            state.expand += 1;
            lb + pow2(state.expand - 1) * step
        }
        (false, true) => {
            state.expand += 1;
            ub - pow2(state.expand - 1) * step
        }
        (false, false) => {
            state.expand += 1;
            let sign = if state.expand % 2 == 0 { 1.0 } else { -1.0 };
            theta0 + sign * pow2(state.expand / 2) * step
        }
    };
    inside(t).then_some(t)
}

/// What one oracle call means for the bracket.
enum Event {
    Primal { x: BlockVec, own: bool },
    Dual { y: DVector<f64>, z: BlockVec, own: bool },
    NoEps,
    Incorrect(Diagnostic),
    Terminal(Certificate),
}

fn accept(cert: Result<Certificate>, own: bool) -> Event {
    match cert {
        Ok(Certificate::PrimalInterior { x, residual, lambda_min, .. }) => {
            if residual <= ACCEPT_TOL && lambda_min >= -ACCEPT_TOL {
                Event::Primal { x, own }
            } else {
                Event::Incorrect(Diagnostic::Rejected { residual, lambda_min })
            }
        }
        Ok(Certificate::DualFeasible { y, z, lambda_min, .. }) => {
            if lambda_min >= -ACCEPT_TOL {
                Event::Dual { y, z, own }
            } else {
                Event::Incorrect(Diagnostic::Rejected { residual: 0.0, lambda_min })
            }
        }
        Ok(c) => Event::Terminal(c),
        Err(e) => Event::Incorrect(Diagnostic::Algebra(e)),
    }
}

fn interpret(result: PrResult, side: Side, map: &HomogenizedMap, p: &ProblemData) -> Event {
    let range_point = |w: &BlockVec| interpret_range_point(w, map, &projectors(map.matrix()), p);
    match (result, side) {
        (PrResult::Feasible(w), Side::Primal) => accept(interpret_kernel_point(&w, p), true),
        (PrResult::Feasible(w), Side::Dual) => accept(range_point(&w), true),
        (PrResult::AltFeasible(s), Side::Primal) => accept(range_point(&s), false),
        (PrResult::AltFeasible(s), Side::Dual) => accept(interpret_kernel_point(&s, p), false),
        (PrResult::NoEpsFeasible, _) => Event::NoEps,
        (PrResult::IncorrectOutput(d), _) => Event::Incorrect(d),
    }
}

/// `(v^{-1/2}, 1, 1)` as a scaling of the extended cone.
fn warm_scaling(v: &BlockVec) -> Option<Scaling> {
    let s = inv_sqrt(v).ok()?;
    Scaling::from_quad(&s.with_tail(&[1.0, 1.0])).ok()
}

fn delta(v: f64) -> f64 {
    (1e-8 * v.abs()).max(1e-8)
}

fn run_stage(
    p: &ProblemData,
    warm: &WarmStart,
    cfg: &RefineConfig,
    clock: &dyn Clock,
    side: Side,
) -> Result<RefineResult> {
    let start = clock.seconds();
    let ext = p.shape().extended();
    let mut st = RefineState {
        lb: f64::NEG_INFINITY,
        ub: f64::INFINITY,
        theta: f64::NAN,
        ybar: None,
        vbar: Scaling::identity(&ext),
        sol_p: alloc::vec![warm.x.clone()],
        sol_d: alloc::vec![warm.y.clone()],
        consecutive_incorrect: 0,
        consecutive_noeps: 0,
        expand: 0,
    };
    if is_member(p, &warm.y, cfg.member_tol) {
        st.lb = p.dual_objective(&warm.y);
        st.ybar = Some(warm.y.clone());
    }
    let seed = match side {
        Side::Primal => &warm.x,
        Side::Dual => &warm.z,
    };
    if matches!(seed.lambda_min(), Ok(l) if l > 0.0) {
        if let Some(s) = warm_scaling(seed) {
            st.vbar = s;
        }
    }
    let theta0 = match side {
        Side::Primal => {
            let o = p.dual_objective(&warm.y);
            o + delta(o)
        }
        Side::Dual => {
            let o = p.primal_objective(&warm.x);
            o - delta(o)
        }
    };

    let mut trace = Vec::new();
    let mut exit = Exit::Complete;
    let mut k = 0;
    while st.ub - st.lb > cfg.theta_acc {
        if clock.seconds() - start > cfg.time_limit {
            exit = Exit::TimeOver;
            break;
        }
        let jitter = st.consecutive_incorrect;
        let Some(theta) = choose_theta(&mut st, theta0, k == 0, jitter) else {
            if st.lb.is_finite() && st.ub.is_finite() {
                break;
            }
            exit = Exit::NumericalError;
            break;
        };
        st.theta = theta;
        let map = homogenize(p, theta);
        let out = pr_main(&map, side.model(), &st.vbar, &cfg.pr);
        let event = interpret(out.result, side, &map, p);
        let mut diagnostic = None;

        let tag = match event {
            Event::Primal { x, own } => {
                st.lower_ub(theta);
                if own {
                    if st.ub - st.lb <= 1.0 {
                        st.vbar = out.scaling;
                    } else if matches!(x.lambda_min(), Ok(l) if l > 0.0) {
                        if let Some(s) = warm_scaling(&x) {
                            st.vbar = s;
                        }
                    }
                }
                st.sol_p.push(x);
                OutcomeTag::PrimalPoint
            }
            Event::Dual { y, z, own } => {
                st.raise_lb(theta);
                match st.ybar.take() {
                    Some(yb) => {
                        let (ynew, _) = merge_dual(p, &y, &yb, cfg.member_tol);
                        st.raise_lb(p.dual_objective(&ynew));
                        st.ybar = Some(ynew);
                    }
                    None => {
                        if matches!(z.lambda_min(), Ok(l) if l >= -cfg.member_tol) {
                            st.raise_lb(p.dual_objective(&y));
                            st.ybar = Some(y.clone());
                        }
                    }
                }
                if own {
                    if st.ub - st.lb <= 1.0 {
                        st.vbar = out.scaling;
                    } else if matches!(z.lambda_min(), Ok(l) if l > 0.0) {
                        if let Some(s) = warm_scaling(&z) {
                            st.vbar = s;
                        }
                    }
                }
                st.sol_d.push(y);
                OutcomeTag::DualPoint
            }
            Event::NoEps => {
                match side {
                    Side::Primal => st.raise_lb(theta),
                    Side::Dual => st.lower_ub(theta),
                }
                OutcomeTag::NoEpsFeasible
            }
            Event::Incorrect(d) => {
                diagnostic = Some(d);
                OutcomeTag::Incorrect
            }
            Event::Terminal(c) => {
                exit = Exit::CertificateFound(c);
                OutcomeTag::Certificate
            }
        };
        if tag == OutcomeTag::Incorrect {
            st.consecutive_incorrect += 1;
        } else {
            st.consecutive_incorrect = 0;
        }
        if tag == OutcomeTag::NoEpsFeasible {
            st.consecutive_noeps += 1;
        } else {
            st.consecutive_noeps = 0;
        }
        trace.push(TraceRecord {
            side,
            k,
            theta,
            outcome: tag,
            lb: st.lb,
            ub: st.ub,
            seconds: clock.seconds() - start,
            rounds: out.rounds,
            bp_iterations: out.bp_iterations,
            diagnostic,
        });
        k += 1;
        if tag == OutcomeTag::Certificate {
            break;
        }
        if st.consecutive_incorrect >= cfg.incorrect_limit || st.consecutive_noeps >= cfg.noeps_limit {
            exit = Exit::NumericalError;
            break;
        }
    }

    let (x, y) = select_best(p, &st.sol_p, &st.sol_d, &warm.y, st.ybar.as_ref())?;
    let z = p.slack(&y);
    let dimacs = dimacs(&x, &y, &z, p)?;
    Ok(RefineResult { x, y, z, exit, dimacs, lb: st.lb, ub: st.ub, trace })
}

/// Kernel-model refinement: drives `UB` down with interior primal points.
pub fn refine_primal(p: &ProblemData, warm: &WarmStart, cfg: &RefineConfig, clock: &dyn Clock) -> Result<RefineResult> {
    run_stage(p, warm, cfg, clock, Side::Primal)
}

/// Range-model refinement: drives `LB` up with interior dual points.
pub fn refine_dual(p: &ProblemData, warm: &WarmStart, cfg: &RefineConfig, clock: &dyn Clock) -> Result<RefineResult> {
    run_stage(p, warm, cfg, clock, Side::Dual)
}

/// `x + (-lambda_min(x) + 1e-15) e` when `x` is not interior.
pub fn shift_interior(x: &BlockVec) -> Result<BlockVec> {
    let l = x.lambda_min()?;
    if l > 0.0 {
        return Ok(x.clone());
    }
    let e = BlockVec::identity(&x.shape());
    Ok(x + &((-l + INTERIOR_SHIFT) * &e))
}

/// Runs both refinement stages in the order dictated by the warm start.
pub fn postprocess(p: &ProblemData, warm: &WarmStart, cfg: &RefineConfig, clock: &dyn Clock) -> Result<RefineResult> {
    let tol = cfg.member_tol;
    let mut cur = warm.clone();
    let order = if warm.z.lambda_min()? >= -tol {
        cur.z = shift_interior(&cur.z)?;
        [Side::Dual, Side::Primal]
    } else if warm.x.lambda_min()? >= -tol {
        cur.x = shift_interior(&cur.x)?;
        [Side::Primal, Side::Dual]
    } else {
        [Side::Dual, Side::Primal]
    };

    let mut trace = Vec::new();
    let mut last = None;
    for side in order {
        let r = run_stage(p, &cur, cfg, clock, side)?;
        trace.extend(r.trace.iter().cloned());
        cur = WarmStart { x: r.x.clone(), y: r.y.clone(), z: r.z.clone() };
        let stop = matches!(r.exit, Exit::CertificateFound(_));
        last = Some(r);
        if stop {
            break;
        }
    }
    let mut r = last.expect("two stages");
    r.trace = trace;
    Ok(r)
}
