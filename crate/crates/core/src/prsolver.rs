//! Projection-and-rescaling oracle for `FP(L, int K)` where `K` is the extended cone.
//!
//! The basic procedure works in svec coordinates with an orthogonal projector `P` onto `L`.
//! Its iterates stay on the spectraplex `{x in K : tr x = 1}`; each iteration either finds a
//! point of `L` in the interior, a nonzero point of `L^perp` in the cone, or a Jordan frame
//! `{c_i}` with bounds `<c_i, x> <= u_i` valid for every feasible `x` with `||x||_inf <= 1`.
//! The main loop rescales the subspace by `Q_v` with `v = sum_{h in H} u_h^{-1/2} c_h +
//! sum_{h not in H} c_h` after each cut and gives up after a fixed number of rounds.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::jordan::{spectral, BlockVec, ConeShape, FrameIndex, Scaling, SpectralDecomp};
use crate::operators::{
    projectors, scale_matrix, solve_multipliers, HomogenizedMap, Model, ProjectorPair,
};

/// Iterations after which cuts with bounds in `(xi, 1)` are accepted.
pub const STAGE_THRESHOLD: usize = 100;
/// Relative cone tolerance of the alternative test inside the basic procedure.
pub const ALT_TOL: f64 = 1e-14;
/// Relative cone tolerance on validated alternative points.
pub const ALT_CONE_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum BasicScheme {
    /// Von Neumann steps towards the most violated idempotent.
    VonNeumann,
    /// Smooth perceptron with spectraplex projections.
    #[default]
    SmoothPerceptron,
}

/// A Jordan frame with bounds `<c_h, x> <= u_h` for every feasible `x` with `||x||_inf <= 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Cut {
    pub frame: SpectralDecomp,
    /// The index set `H`.
    pub members: Vec<FrameIndex>,
    /// Bounds `u_h`, aligned with `members`.
    pub bounds: Vec<f64>,
}

impl Cut {
    /// `v = sum_{h in H} u_h^{-1/2} c_h + sum_{h not in H} c_h`.
    pub fn scaling_vector(&self) -> BlockVec {
        self.frame.compose(|i, _| match self.members.iter().position(|&h| h == i) {
            Some(k) => 1.0 / self.bounds[k].sqrt(),
            None => 1.0,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum BpOutcome {
    /// A point of `L` in the interior of the cone.
    Primal(BlockVec),
    /// A nonzero point of `L^perp` in the cone.
    Alt(BlockVec),
    Cut(Cut),
}

#[derive(Clone, Debug, PartialEq)]
pub struct BpReport {
    pub outcome: BpOutcome,
    pub iterations: usize,
}

/// `ceil(p^2 r_max^2 / xi^2)`.
pub fn bp_budget(shape: &ConeShape, xi: f64) -> usize {
    let p = shape.simple_count() as f64;
    let r = shape.max_simple_rank() as f64;
    (p * p * r * r / (xi * xi)).ceil() as usize
}

/// `ceil(r ln(1/eps) / ln(1/xi))`.
pub fn round_cap(shape: &ConeShape, eps: f64, xi: f64) -> usize {
    (shape.rank() as f64 * (1.0 / eps).ln() / (1.0 / xi).ln()).ceil() as usize
}

fn bv(shape: &ConeShape, v: &DVector<f64>) -> BlockVec {
    BlockVec::from_svec(shape, v.as_slice())
}

/// Euclidean projection onto the spectraplex.
pub fn project_spectraplex(x: &BlockVec) -> Result<BlockVec> {
    let sd = spectral(x)?;
    let mut vals: Vec<f64> = sd.eigenvalues().map(|(_, l)| l).collect();
    vals.sort_by(|a, b| b.total_cmp(a));
    let mut sum = 0.0;
    let mut shift = 0.0;
    for (j, &v) in vals.iter().enumerate() {
        sum += v;
        let t = (sum - 1.0) / (j + 1) as f64;
        if v - t > 0.0 {
            shift = t;
        }
    }
    Ok(sd.map(|l| (l - shift).max(0.0)))
}

struct Tests<'a> {
    shape: &'a ConeShape,
    xi: f64,
    sqrt_r: f64,
}

impl Tests<'_> {
    /// Alternative test on `s = y - P y`.
    fn alt(&self, s: &DVector<f64>) -> Result<Option<BlockVec>> {
        let sb = bv(self.shape, s);
        let sd = spectral(&sb)?;
        if sd.lambda_min() >= -ALT_TOL * sd.norm_inf() && s.norm() > ALT_TOL {
            return Ok(Some(sb));
        }
        Ok(None)
    }

    /// Cut test on a spectraplex point `y` with `z = P y`.
    fn cut(&self, y: &DVector<f64>, z_spec: &SpectralDecomp, z_norm: f64, k: usize) -> Result<Option<Cut>> {
        let pos_trace: f64 = z_spec.eigenvalues().map(|(_, l)| l.max(0.0)).sum();
        let bound = (self.sqrt_r * z_norm).min(pos_trace);
        let frame = spectral(&bv(self.shape, y))?;
        let mut members = Vec::new();
        let mut bounds = Vec::new();
        for (i, l) in frame.eigenvalues() {
            if l <= 0.0 {
                continue;
            }
            let u = bound / l;
            let pass = if k <= STAGE_THRESHOLD { u <= self.xi } else { u < 1.0 };
            if pass {
                members.push(i);
                bounds.push(u);
            }
        }
        if members.is_empty() {
            return Ok(None);
        }
        Ok(Some(Cut { frame, members, bounds }))
    }
}

/// Basic procedure on the subspace with projector `p_target`.
pub fn basic_procedure(
    p_target: &DMatrix<f64>,
    shape: &ConeShape,
    xi: f64,
    budget: usize,
    scheme: BasicScheme,
) -> Result<BpReport> {
    assert_eq!(p_target.nrows(), shape.svec_dim(), "projector size does not match the cone");
    match scheme {
        BasicScheme::VonNeumann => von_neumann(p_target, shape, xi, budget),
        BasicScheme::SmoothPerceptron => smooth_perceptron(p_target, shape, xi, budget),
    }
}

fn center(shape: &ConeShape) -> DVector<f64> {
    BlockVec::identity(shape).to_svec() / shape.rank() as f64
}

fn von_neumann(p: &DMatrix<f64>, shape: &ConeShape, xi: f64, budget: usize) -> Result<BpReport> {
    let tests = Tests { shape, xi, sqrt_r: (shape.rank() as f64).sqrt() };
    let mut y = center(shape);
    for k in 0..budget {
        let z = p * &y;
        let zb = bv(shape, &z);
        let zs = spectral(&zb)?;
        if zs.lambda_min() > 0.0 {
            return Ok(BpReport { outcome: BpOutcome::Primal(zb), iterations: k });
        }
        if let Some(s) = tests.alt(&(&y - &z))? {
            return Ok(BpReport { outcome: BpOutcome::Alt(s), iterations: k });
        }
        if let Some(cut) = tests.cut(&y, &zs, z.norm(), k)? {
            return Ok(BpReport { outcome: BpOutcome::Cut(cut), iterations: k });
        }
        let c = zs.idempotent(zs.argmin()).to_svec();
        let pc = p * &c;
        let d = &z - &pc;
        let dd = d.norm_squared();
        let alpha = if dd > 0.0 { (z.dot(&d) / dd).clamp(0.0, 1.0) } else { 0.0 };
        y = &y * (1.0 - alpha) + &c * alpha;
    }
    Err(Error::BudgetExhausted { iterations: budget })
}

fn smooth_perceptron(p: &DMatrix<f64>, shape: &ConeShape, xi: f64, budget: usize) -> Result<BpReport> {
    let tests = Tests { shape, xi, sqrt_r: (shape.rank() as f64).sqrt() };
    let xbar = center(shape);
    let prox = |v: &DVector<f64>, mu: f64| -> Result<DVector<f64>> {
        Ok(project_spectraplex(&bv(shape, &(&xbar - v / mu)))?.to_svec())
    };
    let mut mu = 2.0;
    let mut v = p * &xbar;
    let mut w = prox(&v, mu)?;
    let mut pw = p * &w;
    let mut u = w.clone();
    for k in 0..budget {
        let pu = p * &u;
        let pub_ = bv(shape, &pu);
        let pus = spectral(&pub_)?;
        if pus.lambda_min() > 0.0 {
            return Ok(BpReport { outcome: BpOutcome::Primal(pub_), iterations: k });
        }
        let vb = bv(shape, &v);
        if spectral(&vb)?.lambda_min() > 0.0 {
            return Ok(BpReport { outcome: BpOutcome::Primal(vb), iterations: k });
        }
        if let Some(s) = tests.alt(&(&u - &pu))? {
            return Ok(BpReport { outcome: BpOutcome::Alt(s), iterations: k });
        }
        if let Some(cut) = tests.cut(&u, &pus, pu.norm(), k)? {
            return Ok(BpReport { outcome: BpOutcome::Cut(cut), iterations: k });
        }
        let theta = 2.0 / (k as f64 + 3.0);
        v = (&v + &pu * theta) * (1.0 - theta) + &pw * (theta * theta);
        mu *= 1.0 - theta;
        w = prox(&v, mu)?;
        pw = p * &w;
        u = &u * (1.0 - theta) + &w * theta;
    }
    Err(Error::BudgetExhausted { iterations: budget })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PrConfig {
    pub eps: f64,
    pub xi: f64,
    pub scheme: BasicScheme,
}

impl Default for PrConfig {
    fn default() -> Self {
        PrConfig { eps: 1e-16, xi: 0.25, scheme: BasicScheme::default() }
    }
}

/// Why a solve was rejected.
#[derive(Clone, Debug, PartialEq)]
pub enum Diagnostic {
    BudgetExhausted { round: usize, iterations: usize },
    NotInterior { lambda_min: f64 },
    ConeViolation { lambda_min: f64 },
    Algebra(Error),
    /// Output classified but outside the acceptance thresholds of the caller.
    Rejected { residual: f64, lambda_min: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub enum PrResult {
    /// Point of the original subspace in the interior, `||w||_inf = 1`.
    Feasible(BlockVec),
    /// Nonzero point of the original orthogonal complement in the cone, `||s||_inf = 1`.
    AltFeasible(BlockVec),
    NoEpsFeasible,
    IncorrectOutput(Diagnostic),
}

impl PrResult {
    fn select(interior: bool, w: BlockVec) -> Self {
        if interior {
            PrResult::Feasible(w)
        } else {
            PrResult::AltFeasible(w)
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PrOutcome {
    pub result: PrResult,
    /// Composed scaling at exit, including the initial one.
    pub scaling: Scaling,
    /// Per-round scaling vectors applied on top of the initial scaling.
    pub trail: Vec<BlockVec>,
    pub rounds: usize,
    pub bp_iterations: usize,
}

/// A cut emitted in round `round` for the subspace `scaling(L)`.
pub struct CutEvent<'a> {
    pub round: usize,
    pub scaling: &'a Scaling,
    pub cut: &'a Cut,
}

/// Projection-and-rescaling solve of `FP(L, int K)` with `L = ker M` or `range M^*`.
pub fn pr_main(map: &HomogenizedMap, model: Model, init: &Scaling, cfg: &PrConfig) -> PrOutcome {
    pr_main_observed(map, model, init, cfg, &mut |_| {})
}

/// [`pr_main`] with a callback on every cut.
pub fn pr_main_observed(
    map: &HomogenizedMap,
    model: Model,
    init: &Scaling,
    cfg: &PrConfig,
    observer: &mut dyn FnMut(&CutEvent<'_>),
) -> PrOutcome {
    let shape = map.shape();
    let kmax = round_cap(shape, cfg.eps, cfg.xi);
    let budget = bp_budget(shape, cfg.xi);
    let mut scaling = init.clone();
    let mut trail = Vec::new();
    let mut bp_iterations = 0;
    let finish = |result, scaling, trail, rounds, bp_iterations| PrOutcome { result, scaling, trail, rounds, bp_iterations };

    for round in 1..=kmax {
        let scaled = scale_matrix(map.matrix(), shape, &scaling, model);
        let pair = projectors(&scaled);
        let target = match model {
            Model::Kernel => &pair.p_ker,
            Model::Range => &pair.p_range,
        };
        let report = match basic_procedure(target, shape, cfg.xi, budget, cfg.scheme) {
            Ok(r) => r,
            Err(Error::BudgetExhausted { iterations }) => {
                bp_iterations += iterations;
                let d = Diagnostic::BudgetExhausted { round, iterations };
                return finish(PrResult::IncorrectOutput(d), scaling, trail, round, bp_iterations);
            }
            Err(e) => {
                return finish(PrResult::IncorrectOutput(Diagnostic::Algebra(e)), scaling, trail, round, bp_iterations)
            }
        };
        bp_iterations += report.iterations;
        match report.outcome {
            BpOutcome::Primal(w) => {
                let result = match model {
                    Model::Kernel => validate_kernel_point(map, &scaling.apply_inverse(&w), true),
                    Model::Range => rebuild_range_point(map, &scaled, &pair, &w, true),
                };
                return finish(result, scaling, trail, round, bp_iterations);
            }
            BpOutcome::Alt(s) => {
                let result = match model {
                    Model::Kernel => rebuild_range_point(map, &scaled, &pair, &s, false),
                    Model::Range => validate_kernel_point(map, &scaling.apply_adjoint(&s), false),
                };
                return finish(result, scaling, trail, round, bp_iterations);
            }
            BpOutcome::Cut(cut) => {
                observer(&CutEvent { round, scaling: &scaling, cut: &cut });
                let v = cut.scaling_vector();
                if let Err(e) = scaling.then_quad(&v) {
                    return finish(PrResult::IncorrectOutput(Diagnostic::Algebra(e)), scaling, trail, round, bp_iterations);
                }
                trail.push(v);
            }
        }
    }
    finish(PrResult::NoEpsFeasible, scaling, trail, kmax, bp_iterations)
}

/// Acceptance of a candidate: interior for the solved problem, nonzero cone member for the
/// alternative. Returns the point scaled to `||.||_inf = 1`.
fn accept_point(w: BlockVec, interior: bool) -> PrResult {
    match spectral(&w) {
        Ok(sd) => {
            let (n, l) = (sd.norm_inf(), sd.lambda_min());
            let ok = n > 0.0 && n.is_finite() && if interior { l > 0.0 } else { l >= -ALT_CONE_TOL * n };
            match (ok, interior) {
                (true, _) => PrResult::select(interior, w.scale(1.0 / n)),
                (false, true) => PrResult::IncorrectOutput(Diagnostic::NotInterior { lambda_min: l }),
                (false, false) => PrResult::IncorrectOutput(Diagnostic::ConeViolation { lambda_min: l }),
            }
        }
        Err(e) => PrResult::IncorrectOutput(Diagnostic::Algebra(e)),
    }
}

/// A descaled point of `ker M`, re-projected with the unscaled projector.
fn validate_kernel_point(map: &HomogenizedMap, w: &BlockVec, interior: bool) -> PrResult {
    let ws = w.to_svec();
    let wn = ws.norm();
    if !(wn > 0.0) || !wn.is_finite() {
        return accept_point(BlockVec::zeros(map.shape()), interior);
    }
    let pair = projectors(map.matrix());
    accept_point(BlockVec::from_svec(map.shape(), (&pair.p_ker * &ws).as_slice()), interior)
}

/// A point of the scaled `range M_s^*` carries the same multipliers as its preimage in
/// `range M^*`, so the unscaled point is rebuilt as `M^T q`. That point lies in `range M^*` by
/// construction; only its cone membership is tested.
fn rebuild_range_point(
    map: &HomogenizedMap,
    scaled: &DMatrix<f64>,
    pair: &ProjectorPair,
    w: &BlockVec,
    interior: bool,
) -> PrResult {
    let (q, _) = solve_multipliers(scaled, pair, &w.to_svec());
    accept_point(BlockVec::from_svec(map.shape(), map.matrix().tr_mul(&q).as_slice()), interior)
}
