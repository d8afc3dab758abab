//! Linear maps `A : E -> R^m`, the homogenized operator `A(theta)` over `K x R^2_+`,
//! SVD-based orthogonal projectors and multiplier recovery.

use alloc::format;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector, SVD};

use crate::error::{Error, Result};
use crate::jordan::{BlockData, BlockKind, BlockVec, ConeShape, Scaling, SQRT2};

/// Singular values below this fraction of the largest are treated as zero.
pub const RANK_CUTOFF: f64 = 1e-13;
/// Relative residual above which recovered multipliers are rejected.
pub const RECOVERY_TOL: f64 = 1e-6;

/// Which subspace of the homogenized operator a feasibility solve targets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Model {
    /// `ker A(theta)`, whose interior points encode primal solutions.
    Kernel,
    /// `range A(theta)^*`, whose interior points encode dual solutions.
    Range,
}

/// One upper-triangular entry of a symmetric coefficient block (`row <= col`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SparseEntry {
    pub block: usize,
    pub row: usize,
    pub col: usize,
    pub value: f64,
}

/// `A x = (<A_1, x>, ..., <A_m, x>)` with sparse coefficients and a dense svec matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearMap {
    shape: ConeShape,
    entries: Vec<Vec<SparseEntry>>,
    dense: DMatrix<f64>,
}

fn svec_index(shape: &ConeShape, offsets: &[usize], e: &SparseEntry) -> Result<usize> {
    let blk = shape
        .blocks()
        .get(e.block)
        .ok_or_else(|| Error::DimensionMismatch(format!("block index {} out of range", e.block + 1)))?;
    let n = blk.size;
    if e.row > e.col || e.col >= n {
        return Err(Error::DimensionMismatch(format!(
            "entry ({}, {}) invalid for block {} of size {}",
            e.row + 1,
            e.col + 1,
            e.block + 1,
            n
        )));
    }
    match blk.kind {
        BlockKind::Psd => Ok(offsets[e.block] + e.row * n - e.row * (e.row + 1) / 2 + e.col),
        BlockKind::Diag => {
            if e.row != e.col {
                return Err(Error::DimensionMismatch(format!(
                    "off-diagonal entry in diagonal block {}",
                    e.block + 1
                )));
            }
            Ok(offsets[e.block] + e.row)
        }
    }
}

impl LinearMap {
    /// Builds the map from per-constraint entry lists; duplicate entries are summed.
    pub fn from_entries(shape: ConeShape, entries: Vec<Vec<SparseEntry>>) -> Result<Self> {
        let m = entries.len();
        let d = shape.svec_dim();
        let offsets = shape.svec_offsets();
        let mut dense = DMatrix::zeros(m, d);
        for (i, row) in entries.iter().enumerate() {
            for e in row {
                let k = svec_index(&shape, &offsets, e)?;
                let scale = if e.row == e.col { 1.0 } else { SQRT2 };
                dense[(i, k)] += scale * e.value;
            }
        }
        Ok(LinearMap { shape, entries, dense })
    }

    /// Builds the map from dense coefficient elements `A_1, ..., A_m`.
    pub fn from_coefficients(shape: ConeShape, coeffs: &[BlockVec]) -> Result<Self> {
        let mut entries = Vec::with_capacity(coeffs.len());
        for a in coeffs {
            if !a.conforms(&shape) {
                return Err(Error::ShapeMismatch);
            }
            entries.push(sparse_entries(a));
        }
        Self::from_entries(shape, entries)
    }

    pub fn m(&self) -> usize {
        self.dense.nrows()
    }

    pub fn shape(&self) -> &ConeShape {
        &self.shape
    }

    pub fn entries(&self) -> &[Vec<SparseEntry>] {
        &self.entries
    }

    /// The `m x d` svec matrix.
    pub fn to_matrix(&self) -> &DMatrix<f64> {
        &self.dense
    }

    /// `A_i` as an algebra element.
    pub fn coefficient(&self, i: usize) -> BlockVec {
        BlockVec::from_svec(&self.shape, self.dense.row(i).transpose().as_slice())
    }

    pub fn apply(&self, x: &BlockVec) -> DVector<f64> {
        &self.dense * x.to_svec()
    }

    /// `A^* y = sum_i y_i A_i`.
    pub fn adjoint(&self, y: &DVector<f64>) -> BlockVec {
        let v = self.dense.tr_mul(y);
        BlockVec::from_svec(&self.shape, v.as_slice())
    }
}

/// Nonzero upper-triangular entries of an element.
pub fn sparse_entries(a: &BlockVec) -> Vec<SparseEntry> {
    let mut out = Vec::new();
    for (k, b) in a.blocks().iter().enumerate() {
        match b {
            BlockData::Psd(m) => {
                for i in 0..m.nrows() {
                    for j in i..m.ncols() {
                        if m[(i, j)] != 0.0 {
                            out.push(SparseEntry { block: k, row: i, col: j, value: m[(i, j)] });
                        }
                    }
                }
            }
            BlockData::Diag(d) => {
                for (i, &v) in d.iter().enumerate() {
                    if v != 0.0 {
                        out.push(SparseEntry { block: k, row: i, col: i, value: v });
                    }
                }
            }
        }
    }
    out
}

/// Data of `(P) min <c,x> s.t. Ax = b, x in K` and its dual `(D) max b^T y s.t. c - A^*y in K`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProblemData {
    pub a: LinearMap,
    pub b: DVector<f64>,
    pub c: BlockVec,
}

impl ProblemData {
    pub fn new(a: LinearMap, b: DVector<f64>, c: BlockVec) -> Result<Self> {
        if b.len() != a.m() {
            return Err(Error::DimensionMismatch(format!("b has {} entries, A has {} rows", b.len(), a.m())));
        }
        if !c.conforms(a.shape()) {
            return Err(Error::ShapeMismatch);
        }
        Ok(ProblemData { a, b, c })
    }

    pub fn shape(&self) -> &ConeShape {
        self.a.shape()
    }

    pub fn m(&self) -> usize {
        self.a.m()
    }

    /// `c - A^* y`.
    pub fn slack(&self, y: &DVector<f64>) -> BlockVec {
        &self.c - &self.a.adjoint(y)
    }

    pub fn primal_objective(&self, x: &BlockVec) -> f64 {
        self.c.inner(x)
    }

    pub fn dual_objective(&self, y: &DVector<f64>) -> f64 {
        self.b.dot(y)
    }
}

/// `A(theta) = [[A, -b, 0], [c^T, -theta, 1]]` acting on `(x, tau, rho)`.
#[derive(Clone, Debug, PartialEq)]
pub struct HomogenizedMap {
    theta: f64,
    m: usize,
    shape: ConeShape,
    matrix: DMatrix<f64>,
}

/// Builds `A(theta)`.
pub fn homogenize(p: &ProblemData, theta: f64) -> HomogenizedMap {
    let m = p.m();
    let d = p.shape().svec_dim();
    let mut matrix = DMatrix::zeros(m + 1, d + 2);
    matrix.view_mut((0, 0), (m, d)).copy_from(p.a.to_matrix());
    for i in 0..m {
        matrix[(i, d)] = -p.b[i];
    }
    let c = p.c.to_svec();
    for k in 0..d {
        matrix[(m, k)] = c[k];
    }
    matrix[(m, d)] = -theta;
    matrix[(m, d + 1)] = 1.0;
    HomogenizedMap { theta, m, shape: p.shape().extended(), matrix }
}

impl HomogenizedMap {
    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Number of rows of `A`, so the map has `m + 1` rows.
    pub fn m(&self) -> usize {
        self.m
    }

    /// The cone `K x R^2_+`.
    pub fn shape(&self) -> &ConeShape {
        &self.shape
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// `(Ax - tau b, <c,x> - tau theta + rho)`.
    pub fn apply(&self, w: &BlockVec) -> DVector<f64> {
        &self.matrix * w.to_svec()
    }

    /// `(A^*y + gamma c, -b^T y - gamma theta, gamma)`.
    pub fn adjoint(&self, y: &DVector<f64>, gamma: f64) -> BlockVec {
        let mut q = DVector::zeros(self.m + 1);
        q.rows_mut(0, self.m).copy_from(y);
        q[self.m] = gamma;
        BlockVec::from_svec(&self.shape, self.matrix.tr_mul(&q).as_slice())
    }
}

/// Orthogonal projectors onto `ker M` and `range M^*` with the retained SVD factors.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectorPair {
    pub p_ker: DMatrix<f64>,
    pub p_range: DMatrix<f64>,
    /// Left singular vectors of the retained singular values.
    pub u: DMatrix<f64>,
    pub sigma: DVector<f64>,
    /// Right singular vectors of the retained singular values, as columns.
    pub v: DMatrix<f64>,
    /// Numerical rank.
    pub rank: usize,
}

/// Projectors of a row matrix from one SVD.
pub fn projectors(matrix: &DMatrix<f64>) -> ProjectorPair {
    let (rows, cols) = matrix.shape();
    let svd = SVD::new(matrix.clone(), true, true);
    let u_full = svd.u.expect("left singular vectors requested");
    let vt_full = svd.v_t.expect("right singular vectors requested");
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| smax > 0.0 && svd.singular_values[i] > RANK_CUTOFF * smax)
        .collect();
    let rank = keep.len();
    let u = DMatrix::from_fn(rows, rank, |r, c| u_full[(r, keep[c])]);
    let v = DMatrix::from_fn(cols, rank, |r, c| vt_full[(keep[c], r)]);
    let sigma = DVector::from_fn(rank, |i, _| svd.singular_values[keep[i]]);
    let mut p_range = &v * v.transpose();
    for i in 0..cols {
        for j in (i + 1)..cols {
            let s = 0.5 * (p_range[(i, j)] + p_range[(j, i)]);
            p_range[(i, j)] = s;
            p_range[(j, i)] = s;
        }
    }
    let p_ker = DMatrix::identity(cols, cols) - &p_range;
    ProjectorPair { p_ker, p_range, u, sigma, v, rank }
}

/// Multipliers `(y, gamma)` with `A(theta)^*(y, gamma) = w`.
#[derive(Clone, Debug, PartialEq)]
pub struct Multipliers {
    pub y: DVector<f64>,
    pub gamma: f64,
    /// `||M^T q - w|| / ||w||`.
    pub residual: f64,
}

/// Least-squares `q = U Sigma^{-1} V^T w` with `M^T q ~ w`, and `||M^T q - w|| / ||w||`.
pub fn solve_multipliers(matrix: &DMatrix<f64>, pair: &ProjectorPair, ws: &DVector<f64>) -> (DVector<f64>, f64) {
    let coef = pair.v.tr_mul(ws);
    let scaled = DVector::from_fn(pair.rank, |i, _| coef[i] / pair.sigma[i]);
    let q = &pair.u * scaled;
    let back = matrix.tr_mul(&q);
    let wn = ws.norm();
    let residual = if wn > 0.0 { (&back - ws).norm() / wn } else { (&back - ws).norm() };
    (q, residual)
}

/// Least-squares multipliers for a point of `range M^*`.
pub fn recover_multipliers(map: &HomogenizedMap, pair: &ProjectorPair, w: &BlockVec) -> Result<Multipliers> {
    let (q, residual) = solve_multipliers(map.matrix(), pair, &w.to_svec());
    if !(residual <= RECOVERY_TOL) {
        return Err(Error::ResidualTooLarge { residual, tolerance: RECOVERY_TOL });
    }
    let m = map.m();
    Ok(Multipliers { y: q.rows(0, m).into_owned(), gamma: q[m], residual })
}

/// Matrix of the scaled operator: rows `G^{-*} r_i` for the kernel model (its kernel is
/// `G(ker M)`), rows `G r_i` for the range model (its adjoint range is `G(range M^*)`).
pub fn scale_matrix(matrix: &DMatrix<f64>, shape: &ConeShape, scaling: &Scaling, model: Model) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(matrix.nrows(), matrix.ncols());
    let mut buf = alloc::vec![0.0; matrix.ncols()];
    for i in 0..matrix.nrows() {
        let row: Vec<f64> = matrix.row(i).iter().copied().collect();
        let r = BlockVec::from_svec(shape, &row);
        let s = match model {
            Model::Kernel => scaling.apply_inverse_adjoint(&r),
            Model::Range => scaling.apply(&r),
        };
        s.write_svec(&mut buf);
        for (k, &v) in buf.iter().enumerate() {
            out[(i, k)] = v;
        }
    }
    out
}

/// `M o Q_{v^{-1}}` (kernel model) or `M o Q_v` (range model) for one interior `v`.
pub fn scale_operator(map: &HomogenizedMap, v: &BlockVec, model: Model) -> Result<DMatrix<f64>> {
    let scaling = Scaling::from_quad(v)?;
    Ok(scale_matrix(map.matrix(), map.shape(), &scaling, model))
}
