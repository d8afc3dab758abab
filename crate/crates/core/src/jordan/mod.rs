//! Euclidean Jordan algebra over a product of symmetric matrix blocks.
//!
//! An element of `E = S^{r_1} x ... x S^{r_p}` is a [`BlockVec`]. Diagonal blocks are stored as
//! vectors and behave as diagonal symmetric blocks, so each diagonal entry is a rank-one simple
//! factor. The symmetric cone `K` is the product of the PSD cones and orthants.
//!
//! The `svec` embedding lists the upper triangle of each PSD block row by row and scales the
//! off-diagonal entries by `sqrt(2)`, so the Euclidean dot product of two embeddings equals the
//! trace inner product `<x, y> = tr(x y)`.

mod scaling;
mod spectral;

use alloc::vec::Vec;
use core::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::error::{Error, Result};

pub use scaling::Scaling;
pub use spectral::{spectral, BlockSpectrum, Frame, FrameIndex, SpectralDecomp};

pub(crate) const SQRT2: f64 = core::f64::consts::SQRT_2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BlockKind {
    Psd,
    Diag,
}

/// One factor of the cone: a PSD block of order `size` or `size` nonnegative scalars.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Block {
    pub kind: BlockKind,
    pub size: usize,
}

impl Block {
    pub fn psd(size: usize) -> Self {
        Block { kind: BlockKind::Psd, size }
    }

    pub fn diag(size: usize) -> Self {
        Block { kind: BlockKind::Diag, size }
    }

    pub fn svec_dim(&self) -> usize {
        match self.kind {
            BlockKind::Psd => self.size * (self.size + 1) / 2,
            BlockKind::Diag => self.size,
        }
    }

    /// Number of simple cones this block contributes.
    pub fn simple_count(&self) -> usize {
        match self.kind {
            BlockKind::Psd => 1,
            BlockKind::Diag => self.size,
        }
    }

    /// Rank of the largest simple cone in this block.
    pub fn simple_rank(&self) -> usize {
        match self.kind {
            BlockKind::Psd => self.size,
            BlockKind::Diag => 1,
        }
    }
}

/// Ordered list of blocks describing `K`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ConeShape {
    blocks: Vec<Block>,
}

impl ConeShape {
    pub fn new(blocks: Vec<Block>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::InvalidShape("no blocks"));
        }
        if blocks.iter().any(|b| b.size == 0) {
            return Err(Error::InvalidShape("block of size zero"));
        }
        Ok(ConeShape { blocks })
    }

    /// Builds a shape from SDPA-style sizes, where a negative size denotes a diagonal block.
    pub fn from_signed_sizes(sizes: &[i64]) -> Result<Self> {
        let blocks = sizes
            .iter()
            .map(|&s| {
                if s > 0 {
                    Ok(Block::psd(s as usize))
                } else if s < 0 {
                    Ok(Block::diag(s.unsigned_abs() as usize))
                } else {
                    Err(Error::InvalidShape("block of size zero"))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(blocks)
    }

    pub fn signed_sizes(&self) -> Vec<i64> {
        self.blocks
            .iter()
            .map(|b| match b.kind {
                BlockKind::Psd => b.size as i64,
                BlockKind::Diag => -(b.size as i64),
            })
            .collect()
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Total rank `r`, the trace of the identity.
    pub fn rank(&self) -> usize {
        self.blocks.iter().map(|b| b.size).sum()
    }

    /// Number of simple cones `p` (each diagonal entry counts once).
    pub fn simple_count(&self) -> usize {
        self.blocks.iter().map(Block::simple_count).sum()
    }

    /// Largest simple-cone rank `r_max`.
    pub fn max_simple_rank(&self) -> usize {
        self.blocks.iter().map(Block::simple_rank).max().unwrap_or(0)
    }

    pub fn svec_dim(&self) -> usize {
        self.blocks.iter().map(Block::svec_dim).sum()
    }

    /// Start offset of each block inside the svec embedding.
    pub fn svec_offsets(&self) -> Vec<usize> {
        let mut off = 0;
        self.blocks
            .iter()
            .map(|b| {
                let o = off;
                off += b.svec_dim();
                o
            })
            .collect()
    }

    /// `K x R^n_+`, appending one diagonal block.
    pub fn with_tail(&self, n: usize) -> ConeShape {
        let mut blocks = self.blocks.clone();
        blocks.push(Block::diag(n));
        ConeShape { blocks }
    }

    /// The cone `K x R^2_+` of the homogenized models.
    pub fn extended(&self) -> ConeShape {
        self.with_tail(2)
    }
}

/// Storage of one block of a [`BlockVec`].
#[derive(Clone, Debug, PartialEq)]
pub enum BlockData {
    Psd(DMatrix<f64>),
    Diag(DVector<f64>),
}

impl BlockData {
    pub fn block(&self) -> Block {
        match self {
            BlockData::Psd(m) => Block::psd(m.nrows()),
            BlockData::Diag(v) => Block::diag(v.len()),
        }
    }

    fn zip_map(&self, other: &BlockData, f: impl Fn(f64, f64) -> f64) -> BlockData {
        match (self, other) {
            (BlockData::Psd(a), BlockData::Psd(b)) => BlockData::Psd(a.zip_map(b, f)),
            (BlockData::Diag(a), BlockData::Diag(b)) => BlockData::Diag(a.zip_map(b, f)),
            _ => panic!("block kinds differ"),
        }
    }

    fn map(&self, f: impl Fn(f64) -> f64) -> BlockData {
        match self {
            BlockData::Psd(a) => BlockData::Psd(a.map(f)),
            BlockData::Diag(a) => BlockData::Diag(a.map(f)),
        }
    }
}

fn symmetrize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let s = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = s;
            m[(j, i)] = s;
        }
    }
}

/// An element of the algebra `E`.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockVec {
    blocks: Vec<BlockData>,
}

impl BlockVec {
    /// Builds an element, symmetrizing every PSD block.
    pub fn from_blocks(mut blocks: Vec<BlockData>) -> Self {
        for b in &mut blocks {
            if let BlockData::Psd(m) = b {
                assert_eq!(m.nrows(), m.ncols(), "PSD block must be square");
                symmetrize(m);
            }
        }
        BlockVec { blocks }
    }

    pub fn zeros(shape: &ConeShape) -> Self {
        Self::filled(shape, 0.0)
    }

    /// The identity `e`.
    pub fn identity(shape: &ConeShape) -> Self {
        Self::filled(shape, 1.0)
    }

    fn filled(shape: &ConeShape, diag: f64) -> Self {
        let blocks = shape
            .blocks()
            .iter()
            .map(|b| match b.kind {
                BlockKind::Psd => BlockData::Psd(DMatrix::identity(b.size, b.size) * diag),
                BlockKind::Diag => BlockData::Diag(DVector::from_element(b.size, diag)),
            })
            .collect();
        BlockVec { blocks }
    }

    pub fn blocks(&self) -> &[BlockData] {
        &self.blocks
    }

    pub fn into_blocks(self) -> Vec<BlockData> {
        self.blocks
    }

    pub fn shape(&self) -> ConeShape {
        ConeShape { blocks: self.blocks.iter().map(BlockData::block).collect() }
    }

    pub fn conforms(&self, shape: &ConeShape) -> bool {
        self.blocks.len() == shape.blocks.len()
            && self.blocks.iter().zip(&shape.blocks).all(|(d, b)| d.block() == *b)
    }

    /// Checks shape agreement with another element.
    pub fn same_shape(&self, other: &BlockVec) -> bool {
        self.blocks.len() == other.blocks.len()
            && self.blocks.iter().zip(&other.blocks).all(|(a, b)| a.block() == b.block())
    }

    pub fn from_svec(shape: &ConeShape, v: &[f64]) -> Self {
        assert_eq!(v.len(), shape.svec_dim(), "svec length does not match shape");
        let mut off = 0;
        let blocks = shape
            .blocks()
            .iter()
            .map(|b| {
                let n = b.size;
                let d = match b.kind {
                    BlockKind::Psd => {
                        let mut m = DMatrix::zeros(n, n);
                        let mut k = off;
                        for i in 0..n {
                            m[(i, i)] = v[k];
                            k += 1;
                            for j in (i + 1)..n {
                                let x = v[k] / SQRT2;
                                m[(i, j)] = x;
                                m[(j, i)] = x;
                                k += 1;
                            }
                        }
                        BlockData::Psd(m)
                    }
                    BlockKind::Diag => BlockData::Diag(DVector::from_column_slice(&v[off..off + n])),
                };
                off += b.svec_dim();
                d
            })
            .collect();
        BlockVec { blocks }
    }

    pub fn write_svec(&self, out: &mut [f64]) {
        let mut k = 0;
        for b in &self.blocks {
            match b {
                BlockData::Psd(m) => {
                    let n = m.nrows();
                    for i in 0..n {
                        out[k] = m[(i, i)];
                        k += 1;
                        for j in (i + 1)..n {
                            out[k] = SQRT2 * m[(i, j)];
                            k += 1;
                        }
                    }
                }
                BlockData::Diag(d) => {
                    out[k..k + d.len()].copy_from_slice(d.as_slice());
                    k += d.len();
                }
            }
        }
        assert_eq!(k, out.len(), "svec buffer length does not match shape");
    }

    pub fn svec_dim(&self) -> usize {
        self.blocks.iter().map(|b| b.block().svec_dim()).sum()
    }

    pub fn to_svec(&self) -> DVector<f64> {
        let mut out = DVector::zeros(self.svec_dim());
        self.write_svec(out.as_mut_slice());
        out
    }

    /// Trace inner product.
    pub fn inner(&self, other: &BlockVec) -> f64 {
        debug_assert!(self.same_shape(other));
        self.blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| match (a, b) {
                (BlockData::Psd(a), BlockData::Psd(b)) => a.dot(b),
                (BlockData::Diag(a), BlockData::Diag(b)) => a.dot(b),
                _ => panic!("block kinds differ"),
            })
            .sum()
    }

    /// Frobenius norm induced by the trace inner product.
    pub fn norm(&self) -> f64 {
        self.inner(self).sqrt()
    }

    pub fn trace(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| match b {
                BlockData::Psd(m) => m.trace(),
                BlockData::Diag(d) => d.sum(),
            })
            .sum()
    }

    /// Largest absolute matrix entry (no svec scaling).
    pub fn max_abs_entry(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| match b {
                BlockData::Psd(m) => m.amax(),
                BlockData::Diag(d) => d.amax(),
            })
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.blocks.iter().all(|b| match b {
            BlockData::Psd(m) => m.iter().all(|x| x.is_finite()),
            BlockData::Diag(d) => d.iter().all(|x| x.is_finite()),
        })
    }

    /// Jordan product `x o y`: `(XY + YX)/2` per PSD block, elementwise per diagonal block.
    pub fn jordan(&self, other: &BlockVec) -> BlockVec {
        debug_assert!(self.same_shape(other));
        let blocks = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| match (a, b) {
                (BlockData::Psd(a), BlockData::Psd(b)) => {
                    let ab = a * b;
                    BlockData::Psd((&ab + ab.transpose()) * 0.5)
                }
                (BlockData::Diag(a), BlockData::Diag(b)) => BlockData::Diag(a.component_mul(b)),
                _ => panic!("block kinds differ"),
            })
            .collect();
        BlockVec { blocks }
    }

    pub fn scale(&self, a: f64) -> BlockVec {
        BlockVec { blocks: self.blocks.iter().map(|b| b.map(|x| a * x)).collect() }
    }

    /// `self += a * x`.
    pub fn axpy(&mut self, a: f64, x: &BlockVec) {
        debug_assert!(self.same_shape(x));
        for (s, t) in self.blocks.iter_mut().zip(&x.blocks) {
            match (s, t) {
                (BlockData::Psd(s), BlockData::Psd(t)) => *s += t * a,
                (BlockData::Diag(s), BlockData::Diag(t)) => *s += t * a,
                _ => panic!("block kinds differ"),
            }
        }
    }

    /// Appends a diagonal tail block, e.g. `(x, tau, rho)`.
    pub fn with_tail(&self, tail: &[f64]) -> BlockVec {
        let mut blocks = self.blocks.clone();
        blocks.push(BlockData::Diag(DVector::from_column_slice(tail)));
        BlockVec { blocks }
    }

    /// Splits off the trailing diagonal block.
    pub fn split_tail(&self) -> (BlockVec, Vec<f64>) {
        let mut blocks = self.blocks.clone();
        match blocks.pop() {
            Some(BlockData::Diag(d)) => (BlockVec { blocks }, d.as_slice().to_vec()),
            _ => panic!("element has no diagonal tail block"),
        }
    }

    /// Smallest eigenvalue.
    pub fn lambda_min(&self) -> Result<f64> {
        Ok(spectral(self)?.lambda_min())
    }
}

impl Add for &BlockVec {
    type Output = BlockVec;
    fn add(self, rhs: &BlockVec) -> BlockVec {
        debug_assert!(self.same_shape(rhs));
        BlockVec {
            blocks: self.blocks.iter().zip(&rhs.blocks).map(|(a, b)| a.zip_map(b, |x, y| x + y)).collect(),
        }
    }
}

impl Sub for &BlockVec {
    type Output = BlockVec;
    fn sub(self, rhs: &BlockVec) -> BlockVec {
        debug_assert!(self.same_shape(rhs));
        BlockVec {
            blocks: self.blocks.iter().zip(&rhs.blocks).map(|(a, b)| a.zip_map(b, |x, y| x - y)).collect(),
        }
    }
}

impl Neg for &BlockVec {
    type Output = BlockVec;
    fn neg(self) -> BlockVec {
        self.scale(-1.0)
    }
}

impl Mul<&BlockVec> for f64 {
    type Output = BlockVec;
    fn mul(self, rhs: &BlockVec) -> BlockVec {
        rhs.scale(self)
    }
}

/// Quadratic representation `Q_v(x)`: `VXV` per PSD block, `v^2 x` per diagonal block.
pub fn quad_rep(v: &BlockVec, x: &BlockVec) -> BlockVec {
    assert!(v.same_shape(x), "quad_rep shape mismatch");
    let blocks = v
        .blocks
        .iter()
        .zip(&x.blocks)
        .map(|(v, x)| match (v, x) {
            (BlockData::Psd(v), BlockData::Psd(x)) => BlockData::Psd(v * x * v),
            (BlockData::Diag(v), BlockData::Diag(x)) => {
                BlockData::Diag(DVector::from_fn(v.len(), |i, _| v[i] * v[i] * x[i]))
            }
            _ => panic!("block kinds differ"),
        })
        .collect();
    BlockVec::from_blocks(blocks)
}

/// `x^{-1/2}` for interior `x`.
pub fn inv_sqrt(x: &BlockVec) -> Result<BlockVec> {
    let sd = spectral(x)?;
    let lmin = sd.lambda_min();
    if !(lmin > 0.0) {
        return Err(Error::NotInterior { lambda_min: lmin });
    }
    Ok(sd.map(|l| 1.0 / l.sqrt()))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ConeMembership {
    Interior,
    Member,
    Outside,
}

/// Membership status with the smallest eigenvalue attached.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConeStatus {
    pub membership: ConeMembership,
    pub lambda_min: f64,
}

/// Outside iff `lambda_min < -tol`, Interior iff `lambda_min > tol`, Member otherwise.
pub fn cone_status(x: &BlockVec, tol: f64) -> Result<ConeStatus> {
    let lambda_min = x.lambda_min()?;
    let membership = if lambda_min < -tol {
        ConeMembership::Outside
    } else if lambda_min > tol {
        ConeMembership::Interior
    } else {
        ConeMembership::Member
    };
    Ok(ConeStatus { membership, lambda_min })
}

/// PSD block from a row-major dense matrix.
pub fn psd_block(n: usize, rows: &[f64]) -> BlockData {
    assert_eq!(rows.len(), n * n);
    BlockData::Psd(DMatrix::from_row_slice(n, n, rows))
}

/// Diagonal block from its entries.
pub fn diag_block(values: &[f64]) -> BlockData {
    BlockData::Diag(DVector::from_column_slice(values))
}
