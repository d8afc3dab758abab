//! Seeded random instances with planted solutions and certificates.

use conerefine::jordan::{BlockData, BlockKind, BlockVec, ConeShape};
use conerefine::operators::{LinearMap, ProblemData};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GenMode {
    /// Interior points on both sides.
    StrongBoth,
    /// Strictly complementary optimal pair with known value; both sides strongly feasible.
    KnownOptimal,
    /// Primal feasible without interior; `f = e_1` is a reducing direction.
    WeakPrimal,
    /// Primal strongly feasible and unbounded along a planted ray.
    RayP,
}

impl GenMode {
    pub fn name(self) -> &'static str {
        match self {
            GenMode::StrongBoth => "strong_both",
            GenMode::KnownOptimal => "known_optimal",
            GenMode::WeakPrimal => "weak_primal",
            GenMode::RayP => "ray_p",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [GenMode::StrongBoth, GenMode::KnownOptimal, GenMode::WeakPrimal, GenMode::RayP]
            .into_iter()
            .find(|m| m.name() == s)
    }
}

/// Objects planted by the generator.
#[derive(Clone, Debug, PartialEq)]
pub struct Planted {
    /// Primal feasible point.
    pub x: BlockVec,
    /// Dual point with `z = c - A^* y`.
    pub y: DVector<f64>,
    pub z: BlockVec,
    /// Strictly feasible points, when the side has them.
    pub x_interior: Option<BlockVec>,
    pub y_interior: Option<DVector<f64>>,
    /// Common optimal value (`KnownOptimal`).
    pub theta: Option<f64>,
    /// Reducing direction of (P) (`WeakPrimal`).
    pub reducing_y: Option<DVector<f64>>,
    /// Improving ray of (P) (`RayP`).
    pub ray_x: Option<BlockVec>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub problem: ProblemData,
    pub planted: Planted,
}

struct Gen {
    rng: ChaCha8Rng,
}

impl Gen {
    fn unif(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.random_range(lo..hi)
    }

    fn sym(&mut self, n: usize) -> DMatrix<f64> {
        let m = DMatrix::from_fn(n, n, |_, _| self.rng.random_range(-1.0..1.0));
        (&m + m.transpose()) * 0.5
    }

    fn orthogonal(&mut self, n: usize) -> DMatrix<f64> {
        let m = DMatrix::from_fn(n, n, |_, _| self.rng.random_range(-1.0..1.0));
        m.qr().q()
    }

    fn element(&mut self, shape: &ConeShape) -> BlockVec {
        let blocks = shape
            .blocks()
            .iter()
            .map(|b| match b.kind {
                BlockKind::Psd => BlockData::Psd(self.sym(b.size)),
                BlockKind::Diag => BlockData::Diag(DVector::from_fn(b.size, |_, _| self.rng.random_range(-1.0..1.0))),
            })
            .collect();
        BlockVec::from_blocks(blocks)
    }

    /// Interior element with eigenvalues in `[0.5, 2]`.
    fn interior(&mut self, shape: &ConeShape) -> BlockVec {
        let ones: Vec<Vec<bool>> = shape.blocks().iter().map(|b| vec![true; b.size]).collect();
        let frames = self.frames(shape);
        self.spectral(shape, &frames, &ones)
    }

    fn vector(&mut self, m: usize) -> DVector<f64> {
        DVector::from_fn(m, |_, _| self.rng.random_range(-1.0..1.0))
    }

    /// Random frame per block (`None` for diagonal blocks).
    fn frames(&mut self, shape: &ConeShape) -> Vec<Option<DMatrix<f64>>> {
        shape
            .blocks()
            .iter()
            .map(|b| match b.kind {
                BlockKind::Psd => Some(self.orthogonal(b.size)),
                BlockKind::Diag => None,
            })
            .collect()
    }

    /// `sum_i lambda_i c_i` over the selected frame members, `lambda_i` in `[0.5, 2]`.
    fn spectral(&mut self, shape: &ConeShape, frames: &[Option<DMatrix<f64>>], sel: &[Vec<bool>]) -> BlockVec {
        let blocks = shape
            .blocks()
            .iter()
            .enumerate()
            .map(|(k, b)| {
                let lam = DVector::from_fn(b.size, |i, _| if sel[k][i] { self.unif(0.5, 2.0) } else { 0.0 });
                match &frames[k] {
                    Some(q) => BlockData::Psd(q * DMatrix::from_diagonal(&lam) * q.transpose()),
                    None => BlockData::Diag(lam),
                }
            })
            .collect();
        BlockVec::from_blocks(blocks)
    }

    /// Projector onto the selected frame members.
    fn projector(shape: &ConeShape, frames: &[Option<DMatrix<f64>>], sel: &[Vec<bool>]) -> BlockVec {
        let blocks = shape
            .blocks()
            .iter()
            .enumerate()
            .map(|(k, b)| {
                let d = DVector::from_fn(b.size, |i, _| if sel[k][i] { 1.0 } else { 0.0 });
                match &frames[k] {
                    Some(q) => BlockData::Psd(q * DMatrix::from_diagonal(&d) * q.transpose()),
                    None => BlockData::Diag(d),
                }
            })
            .collect();
        BlockVec::from_blocks(blocks)
    }

    /// Random split of the simple indices into two nonempty parts.
    fn split(&mut self, shape: &ConeShape) -> Vec<Vec<bool>> {
        let total = shape.rank();
        loop {
            let sel: Vec<Vec<bool>> =
                shape.blocks().iter().map(|b| (0..b.size).map(|_| self.rng.random_bool(0.5)).collect()).collect();
            let on = sel.iter().flatten().filter(|s| **s).count();
            if total < 2 || (on > 0 && on < total) {
                return sel;
            }
        }
    }

    fn rows(&mut self, shape: &ConeShape, m: usize) -> Vec<BlockVec> {
        (0..m).map(|_| self.element(shape)).collect()
    }
}

fn complement(sel: &[Vec<bool>]) -> Vec<Vec<bool>> {
    sel.iter().map(|b| b.iter().map(|s| !s).collect()).collect()
}

/// Removes the `d` component of every row in `rows`.
fn orthogonalize(rows: &mut [BlockVec], d: &BlockVec) {
    let dd = d.inner(d);
    for r in rows {
        let t = r.inner(d) / dd;
        r.axpy(-t, d);
    }
}

fn assemble(shape: &ConeShape, rows: &[BlockVec], x: &BlockVec, y: &DVector<f64>, z: &BlockVec) -> ProblemData {
    let a = LinearMap::from_coefficients(shape.clone(), rows).expect("rows conform");
    let b = a.apply(x);
    let c = &a.adjoint(y) + z;
    ProblemData::new(a, b, c).expect("consistent data")
}

/// Draws an instance of the given kind. `m >= 1`.
pub fn generate_instance(shape: &ConeShape, m: usize, seed: u64, mode: GenMode) -> Instance {
    assert!(m >= 1, "m must be positive");
    let mut g = Gen { rng: ChaCha8Rng::seed_from_u64(seed) };
    match mode {
        GenMode::StrongBoth => {
            let x = g.interior(shape);
            let z = g.interior(shape);
            let y = g.vector(m);
            let rows = g.rows(shape, m);
            let problem = assemble(shape, &rows, &x, &y, &z);
            let planted = Planted {
                x_interior: Some(x.clone()),
                y_interior: Some(y.clone()),
                x,
                y,
                z,
                theta: None,
                reducing_y: None,
                ray_x: None,
            };
            Instance { problem, planted }
        }
        GenMode::KnownOptimal => {
            let frames = g.frames(shape);
            let sel = g.split(shape);
            let x = g.spectral(shape, &frames, &sel);
            let z = g.spectral(shape, &frames, &complement(&sel));
            let y = g.vector(m);
            // A_1 interior gives the dual interior point y - e_1.
            let mut rows = g.rows(shape, m);
            rows[0] = g.interior(shape);
            // D = P_0 - beta x with <A_1, D> = 0 and x + D / (2 beta) interior.
            let p0 = Gen::projector(shape, &frames, &complement(&sel));
            let beta = rows[0].inner(&p0) / rows[0].inner(&x);
            let mut d = p0;
            d.axpy(-beta, &x);
            orthogonalize(&mut rows[1..], &d);
            let problem = assemble(shape, &rows, &x, &y, &z);
            let mut x_int = x.clone();
            x_int.axpy(0.5 / beta, &d);
            let mut y_int = y.clone();
            y_int[0] -= 1.0;
            let theta = problem.primal_objective(&x);
            let planted = Planted {
                x,
                y,
                z,
                x_interior: Some(x_int),
                y_interior: Some(y_int),
                theta: Some(theta),
                reducing_y: None,
                ray_x: None,
            };
            Instance { problem, planted }
        }
        GenMode::WeakPrimal => {
            let frames = g.frames(shape);
            let sel = g.split(shape);
            let f = g.spectral(shape, &frames, &sel);
            let x = g.spectral(shape, &frames, &complement(&sel));
            let z = g.interior(shape);
            let y = g.vector(m);
            let mut rows = g.rows(shape, m);
            rows[0] = f.scale(-1.0);
            let mut problem = assemble(shape, &rows, &x, &y, &z);
            // <F, x> vanishes in exact arithmetic.
            problem.b[0] = 0.0;
            let mut e1 = DVector::zeros(m);
            e1[0] = 1.0;
            let y_int = y.clone();
            let planted = Planted {
                x,
                y,
                z,
                x_interior: None,
                y_interior: Some(y_int),
                theta: None,
                reducing_y: Some(e1),
                ray_x: None,
            };
            Instance { problem, planted }
        }
        GenMode::RayP => {
            let ray = g.interior(shape);
            let x = g.interior(shape);
            let z = g.interior(shape);
            let y = g.vector(m);
            let mut rows = g.rows(shape, m);
            orthogonalize(&mut rows, &ray);
            let mut problem = assemble(shape, &rows, &x, &y, &z);
            let t = (problem.c.inner(&ray) + 1.0) / ray.inner(&ray);
            problem.c.axpy(-t, &ray);
            let z = problem.slack(&y);
            let planted = Planted {
                x_interior: Some(x.clone()),
                x,
                y,
                z,
                y_interior: None,
                theta: None,
                reducing_y: None,
                ray_x: Some(ray),
            };
            Instance { problem, planted }
        }
    }
}

/// `((1-t) x + t x_int, (1-t) y + t y_int)`: a strictly feasible approximation of the planted
/// optimum with gap of order `t`, the shape of interior-point output.
pub fn perturbed_start(inst: &Instance, t: f64) -> Option<(BlockVec, DVector<f64>)> {
    let pl = &inst.planted;
    let xi = pl.x_interior.as_ref()?;
    let yi = pl.y_interior.as_ref()?;
    let x = &pl.x.scale(1.0 - t) + &xi.scale(t);
    let y = &pl.y * (1.0 - t) + yi * t;
    Some((x, y))
}
