//! Meaning of oracle outputs on the homogenized models, and the status problems.
//!
//! A kernel point `(x, tau, rho)` of `A(theta)` with `tau > 0` gives the primal point `x/tau`
//! with objective at most `theta`; with `tau = 0` it is an improving ray of (P) or a reducing
//! direction for (D). A range point `A(theta)^*(y, gamma) = (A^*y + gamma c, -b^T y - gamma theta,
//! gamma)` with `gamma > 0` gives the dual point `-y/gamma`; with `gamma = 0` the vector `-y` is
//! an improving ray of (D) or a reducing direction for (P).
//!
//! Classification thresholds are absolute and applied after scaling the point to
//! `||w||_inf = 1`.

use alloc::format;
use alloc::vec::Vec;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::jordan::{spectral, Block, BlockData, BlockVec, ConeShape};
use crate::operators::{
    recover_multipliers, HomogenizedMap, LinearMap, ProblemData, ProjectorPair, SparseEntry,
};

/// Absolute threshold of the certificate rules.
pub const CERT_TOL: f64 = 1e-12;

/// Quantities a ray or reducing-direction classification is based on.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RayScalars {
    /// `tau` for kernel points, `gamma` for range points.
    pub lead: f64,
    /// `<c, x>` for kernel points, `b^T y` for range points.
    pub objective: f64,
    /// `lambda_min(x)` or `lambda_min(A^* y)`.
    pub lambda_min: f64,
    /// `||x||` or `||A^* y||`.
    pub norm: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RayTag {
    ReducingDirection,
    ImprovingRay,
}

/// The two threshold rules shared by both models.
pub fn classify_ray_or_reducing(s: &RayScalars) -> Option<RayTag> {
    let t = CERT_TOL;
    if !(s.lead.abs() <= t) {
        return None;
    }
    if s.objective.abs() <= t && s.lambda_min >= -t && s.norm > t {
        return Some(RayTag::ReducingDirection);
    }
    if s.objective < -t && s.lambda_min / (-s.objective) >= -t {
        return Some(RayTag::ImprovingRay);
    }
    None
}

#[derive(Clone, Debug, PartialEq)]
pub enum Certificate {
    /// Primal feasible point `x` with `||Ax - b||` and `lambda_min(x)` attached.
    PrimalInterior { x: BlockVec, objective: f64, residual: f64, lambda_min: f64 },
    /// Dual point with `z = c - A^* y`.
    DualFeasible { y: DVector<f64>, z: BlockVec, objective: f64, lambda_min: f64 },
    /// `x in K`, `Ax = 0`, `<c, x> < 0`.
    ImprovingRayP { x: BlockVec, scalars: RayScalars },
    /// `b^T y > 0`, `-A^* y in K`.
    ImprovingRayD { y: DVector<f64>, slack: BlockVec, scalars: RayScalars },
    /// `b^T y = 0`, `-A^* y in K \ {0}`.
    ReducingDirP { y: DVector<f64>, slack: BlockVec, scalars: RayScalars },
    /// `x in K \ {0}`, `Ax = 0`, `<c, x> = 0`.
    ReducingDirD { x: BlockVec, scalars: RayScalars },
}

impl Certificate {
    pub fn tag(&self) -> &'static str {
        match self {
            Certificate::PrimalInterior { .. } => "primal_interior",
            Certificate::DualFeasible { .. } => "dual_feasible",
            Certificate::ImprovingRayP { .. } => "improving_ray_p",
            Certificate::ImprovingRayD { .. } => "improving_ray_d",
            Certificate::ReducingDirP { .. } => "reducing_dir_p",
            Certificate::ReducingDirD { .. } => "reducing_dir_d",
        }
    }

    /// Rays and reducing directions end a refinement early.
    pub fn is_terminal(&self) -> bool {
        !matches!(self, Certificate::PrimalInterior { .. } | Certificate::DualFeasible { .. })
    }
}

fn normalized(w: &BlockVec) -> Result<BlockVec> {
    let n = spectral(w)?.norm_inf();
    if n > 0.0 && n.is_finite() {
        Ok(w.scale(1.0 / n))
    } else {
        Ok(w.clone())
    }
}

/// Interprets `(x, tau, rho)` from a kernel-model solve.
pub fn interpret_kernel_point(w: &BlockVec, p: &ProblemData) -> Result<Certificate> {
    let w = normalized(w)?;
    let (x, tail) = w.split_tail();
    let tau = tail[0];
    if tau > CERT_TOL {
        let xs = x.scale(1.0 / tau);
        let residual = (p.a.apply(&xs) - &p.b).norm();
        let lambda_min = xs.lambda_min()?;
        return Ok(Certificate::PrimalInterior { objective: p.primal_objective(&xs), x: xs, residual, lambda_min });
    }
    let scalars =
        RayScalars { lead: tau, objective: p.primal_objective(&x), lambda_min: x.lambda_min()?, norm: x.norm() };
    match classify_ray_or_reducing(&scalars) {
        Some(RayTag::ReducingDirection) => Ok(Certificate::ReducingDirD { x, scalars }),
        Some(RayTag::ImprovingRay) => Ok(Certificate::ImprovingRayP { x, scalars }),
        None => Err(Error::Unclassifiable),
    }
}

/// Interprets `(z, omega, kappa)` from a range-model solve; `pair` must belong to `map`.
pub fn interpret_range_point(
    w: &BlockVec,
    map: &HomogenizedMap,
    pair: &ProjectorPair,
    p: &ProblemData,
) -> Result<Certificate> {
    let w = normalized(w)?;
    let mult = recover_multipliers(map, pair, &w)?;
    let (_, tail) = w.split_tail();
    let kappa = tail[1];
    if kappa > CERT_TOL {
        let y = -&mult.y / kappa;
        let z = p.slack(&y);
        let lambda_min = z.lambda_min()?;
        return Ok(Certificate::DualFeasible { objective: p.dual_objective(&y), y, z, lambda_min });
    }
    let asy = p.a.adjoint(&mult.y);
    let scalars = RayScalars {
        lead: mult.gamma,
        objective: p.dual_objective(&mult.y),
        lambda_min: asy.lambda_min()?,
        norm: asy.norm(),
    };
    let f = -&mult.y;
    match classify_ray_or_reducing(&scalars) {
        Some(RayTag::ReducingDirection) => Ok(Certificate::ReducingDirP { y: f, slack: asy, scalars }),
        Some(RayTag::ImprovingRay) => Ok(Certificate::ImprovingRayD { y: f, slack: asy, scalars }),
        None => Err(Error::Unclassifiable),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StatusKind {
    /// Strong feasibility of (P): variables `(alpha, beta, gamma, s)`.
    Primal,
    /// Strong feasibility of (D): variables `(x, t, w)`.
    Dual,
}

/// An auxiliary problem whose optimal value decides strong feasibility.
#[derive(Clone, Debug, PartialEq)]
pub struct StatusProblem {
    pub problem: ProblemData,
    /// `<e, e>` of the source problem.
    pub ee: f64,
    pub kind: StatusKind,
}

fn shifted(entries: &[SparseEntry], by: usize) -> impl Iterator<Item = SparseEntry> + '_ {
    entries.iter().map(move |e| SparseEntry { block: e.block + by, ..*e })
}

fn identity_entries(shape: &ConeShape, first_block: usize, scale: f64) -> Vec<SparseEntry> {
    let mut out = Vec::new();
    for (k, b) in shape.blocks().iter().enumerate() {
        for i in 0..b.size {
            out.push(SparseEntry { block: k + first_block, row: i, col: i, value: scale });
        }
    }
    out
}

/// Builds the primal-side status problem over `R^3_+ x K`:
/// `min alpha` s.t. `-alpha + beta + gamma + <e,s> = 0` and
/// `alpha (b - Ae)/(1+<e,e>) - gamma b + A s = (b - Ae)/(1+<e,e>)`.
pub fn build_status_primal(p: &ProblemData) -> StatusProblem {
    let shape = p.shape();
    let e = BlockVec::identity(shape);
    let ee = e.inner(&e);
    let r = (&p.b - p.a.apply(&e)) / (1.0 + ee);
    let mut blocks = Vec::with_capacity(shape.num_blocks() + 1);
    blocks.push(Block::diag(3));
    blocks.extend_from_slice(shape.blocks());
    let new_shape = ConeShape::new(blocks).expect("nonempty shape");

    let mut rows = Vec::with_capacity(p.m() + 1);
    let mut first = alloc::vec![
        SparseEntry { block: 0, row: 0, col: 0, value: -1.0 },
        SparseEntry { block: 0, row: 1, col: 1, value: 1.0 },
        SparseEntry { block: 0, row: 2, col: 2, value: 1.0 },
    ];
    first.extend(identity_entries(shape, 1, 1.0));
    rows.push(first);
    for (i, ai) in p.a.entries().iter().enumerate() {
        let mut row = Vec::with_capacity(ai.len() + 2);
        if r[i] != 0.0 {
            row.push(SparseEntry { block: 0, row: 0, col: 0, value: r[i] });
        }
        if p.b[i] != 0.0 {
            row.push(SparseEntry { block: 0, row: 2, col: 2, value: -p.b[i] });
        }
        row.extend(shifted(ai, 1));
        rows.push(row);
    }
    let a = LinearMap::from_entries(new_shape.clone(), rows).expect("entries derived from a valid map");
    let mut b = DVector::zeros(p.m() + 1);
    b.rows_mut(1, p.m()).copy_from(&r);
    let mut cblocks = alloc::vec![BlockData::Diag(DVector::from_column_slice(&[1.0, 0.0, 0.0]))];
    cblocks.extend(BlockVec::zeros(shape).into_blocks());
    let c = BlockVec::from_blocks(cblocks);
    StatusProblem { problem: ProblemData::new(a, b, c).expect("consistent"), ee, kind: StatusKind::Primal }
}

/// Builds the dual-side status problem over `K x R_+ x R_+`:
/// `min t` s.t. `-<c, x - t e> + t - w = 0`, `<e, x> + w = 1`, `A x - t A e = 0`.
pub fn build_status_dualside(p: &ProblemData) -> StatusProblem {
    let shape = p.shape();
    let e = BlockVec::identity(shape);
    let ee = e.inner(&e);
    let ae = p.a.apply(&e);
    let ce = p.c.trace();
    let nb = shape.num_blocks();
    let new_shape = shape.with_tail(2);
    let tail = |row: usize, value: f64| SparseEntry { block: nb, row, col: row, value };

    let mut rows = Vec::with_capacity(p.m() + 2);
    let mut first: Vec<SparseEntry> = crate::operators::sparse_entries(&p.c.scale(-1.0));
    first.push(tail(0, ce + 1.0));
    first.push(tail(1, -1.0));
    rows.push(first);
    let mut second = identity_entries(shape, 0, 1.0);
    second.push(tail(1, 1.0));
    rows.push(second);
    for (i, ai) in p.a.entries().iter().enumerate() {
        let mut row: Vec<SparseEntry> = ai.clone();
        if ae[i] != 0.0 {
            row.push(tail(0, -ae[i]));
        }
        rows.push(row);
    }
    let a = LinearMap::from_entries(new_shape.clone(), rows).expect("entries derived from a valid map");
    let mut b = DVector::zeros(p.m() + 2);
    b[1] = 1.0;
    let c = BlockVec::zeros(shape).with_tail(&[1.0, 0.0]);
    StatusProblem { problem: ProblemData::new(a, b, c).expect("consistent"), ee, kind: StatusKind::Dual }
}

/// Primal and dual solutions of the primal-side status problem, split into their parts.
#[derive(Clone, Debug, PartialEq)]
pub struct StatusPrimalSolution {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub s: BlockVec,
    pub kappa: f64,
    pub f: DVector<f64>,
    /// Optimal value used for the decision.
    pub value: f64,
}

impl StatusPrimalSolution {
    /// Splits `(x, y)` of the built problem; the value is the dual objective.
    pub fn from_solution(sp: &StatusProblem, x: &BlockVec, y: &DVector<f64>) -> Self {
        let mut blocks = x.blocks().to_vec();
        let head = match blocks.remove(0) {
            BlockData::Diag(d) => d,
            BlockData::Psd(_) => panic!("status problem starts with a diagonal block"),
        };
        let m = y.len() - 1;
        StatusPrimalSolution {
            alpha: head[0],
            beta: head[1],
            gamma: head[2],
            s: BlockVec::from_blocks(blocks),
            kappa: y[0],
            f: y.rows(1, m).into_owned(),
            value: sp.problem.dual_objective(y),
        }
    }
}

/// Outcome of the primal-side status decision.
#[derive(Clone, Debug, PartialEq)]
pub enum StatusVerdict {
    NotStronglyFeasible(Certificate),
    InteriorPoint(BlockVec),
}

/// Residuals of a candidate direction `f` for (P).
pub fn direction_scalars(p: &ProblemData, f: &DVector<f64>) -> Result<RayScalars> {
    let slack = -&p.a.adjoint(f);
    Ok(RayScalars { lead: 0.0, objective: p.dual_objective(f), lambda_min: slack.lambda_min()?, norm: slack.norm() })
}

/// Decides strong feasibility of (P) from a status-problem solution.
pub fn interpret_status_primal(sol: &StatusPrimalSolution, p: &ProblemData, tol: f64) -> Result<StatusVerdict> {
    if sol.value >= 1.0 - tol {
        let f = sol.f.clone();
        let fnorm = f.norm();
        let slack = -&p.a.adjoint(&f);
        let sd = spectral(&slack)?;
        let scalars = RayScalars {
            lead: sol.kappa,
            objective: p.dual_objective(&f),
            lambda_min: sd.lambda_min(),
            norm: slack.norm(),
        };
        if !(fnorm > 0.0) || !(sd.norm_inf() > 0.0) || scalars.lambda_min < -tol * sd.norm_inf() {
            return Err(Error::Inconsistent(format!(
                "value {:e} but -A^*f has lambda_min {:e}",
                sol.value, scalars.lambda_min
            )));
        }
        let bf = scalars.objective;
        return if bf.abs() <= tol * fnorm {
            Ok(StatusVerdict::NotStronglyFeasible(Certificate::ReducingDirP { y: f, slack, scalars }))
        } else if bf > tol * fnorm {
            Ok(StatusVerdict::NotStronglyFeasible(Certificate::ImprovingRayD { y: f, slack, scalars }))
        } else {
            Err(Error::Inconsistent(format!("b^T f = {bf:e} is negative")))
        };
    }
    let k = 1.0 + p.shape().rank() as f64;
    let denom = sol.gamma * k + 1.0 - sol.alpha;
    if !(denom > 0.0) {
        return Err(Error::Inconsistent(format!("interior-point scale denominator {denom:e}")));
    }
    let mut x = sol.s.clone();
    x.axpy((1.0 - sol.alpha) / k, &BlockVec::identity(p.shape()));
    let x = x.scale(k / denom);
    let residual = (p.a.apply(&x) - &p.b).norm();
    let lmin = x.lambda_min()?;
    if residual <= tol * (1.0 + p.b.norm()) && lmin > 0.0 {
        Ok(StatusVerdict::InteriorPoint(x))
    } else {
        Err(Error::Inconsistent(format!("interior point residual {residual:e}, lambda_min {lmin:e}")))
    }
}

/// Maps a feasible `(x1, x2, x3)` of `sup x2 s.t. A x3 - x1 b = 0, 1 - x1 - <e,x3> >= 0,
/// x1 - x2 >= 0, x3 - x2 e in K` to a feasible `(alpha, beta, gamma, s)`.
pub fn status_primal_from_dp(x1: f64, x2: f64, x3: &BlockVec, ee: f64) -> (f64, f64, f64, BlockVec) {
    let e = BlockVec::identity(&x3.shape());
    let mut s = x3.clone();
    s.axpy(-x2, &e);
    (1.0 - (1.0 + ee) * x2, 1.0 - x1 - x3.trace(), x1 - x2, s)
}

/// Solutions of the dual-side status problem.
#[derive(Clone, Debug, PartialEq)]
pub struct StatusDualSolution {
    pub x: BlockVec,
    pub t: f64,
    pub w: f64,
    /// Dual multipliers `(y1, y2, y3)`.
    pub y1: f64,
    pub y2: f64,
    pub y3: DVector<f64>,
    /// Optimal value used for the decision (primal objective `t`).
    pub value: f64,
}

impl StatusDualSolution {
    pub fn from_solution(x: &BlockVec, y: &DVector<f64>) -> Self {
        let (xs, tail) = x.split_tail();
        let m = y.len() - 2;
        StatusDualSolution {
            x: xs,
            t: tail[0],
            w: tail[1],
            y1: y[0],
            y2: y[1],
            y3: y.rows(2, m).into_owned(),
            value: tail[0],
        }
    }
}

/// Outcome of the dual-side status decision.
#[derive(Clone, Debug, PartialEq)]
pub enum DualStatusVerdict {
    NotStronglyFeasible(Certificate),
    /// `y` with `c - A^* y` in the interior.
    InteriorPoint(DVector<f64>),
}

/// Decides strong feasibility of (D). A zero value makes `x` an improving ray of (P) or a
/// reducing direction for (D); a positive value yields the interior dual point `y3 / y1`.
pub fn interpret_status_dualside(sol: &StatusDualSolution, p: &ProblemData, tol: f64) -> Result<DualStatusVerdict> {
    if sol.value <= tol {
        let x = &sol.x;
        let sd = spectral(x)?;
        let nx = sd.norm_inf();
        let cx = p.primal_objective(x);
        let scalars =
            RayScalars { lead: sol.t, objective: cx, lambda_min: sd.lambda_min(), norm: x.norm() };
        if !(nx > 0.0) || scalars.lambda_min < -tol * nx {
            return Err(Error::Inconsistent(format!("x has lambda_min {:e}", scalars.lambda_min)));
        }
        return if cx.abs() <= tol * x.norm() {
            Ok(DualStatusVerdict::NotStronglyFeasible(Certificate::ReducingDirD { x: x.clone(), scalars }))
        } else if cx < 0.0 {
            Ok(DualStatusVerdict::NotStronglyFeasible(Certificate::ImprovingRayP { x: x.clone(), scalars }))
        } else {
            Err(Error::Inconsistent(format!("<c, x> = {cx:e} is positive")))
        };
    }
    if !(sol.y1 > 0.0) {
        return Err(Error::Inconsistent(format!("y1 = {:e} is not positive", sol.y1)));
    }
    let y = &sol.y3 / sol.y1;
    let lmin = p.slack(&y).lambda_min()?;
    if lmin > 0.0 {
        Ok(DualStatusVerdict::InteriorPoint(y))
    } else {
        Err(Error::Inconsistent(format!("c - A^*y has lambda_min {lmin:e}")))
    }
}
