use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use super::{BlockData, BlockVec};
use crate::error::{Error, Result};

const EIGEN_MAX_SWEEPS: usize = 100_000;

/// Eigenvector frame of one block.
#[derive(Clone, Debug, PartialEq)]
pub enum Frame {
    /// Orthonormal eigenvectors as columns, ordered like the eigenvalues.
    Psd(DMatrix<f64>),
    /// Coordinate of each eigenvalue.
    Diag(Vec<usize>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct BlockSpectrum {
    /// Eigenvalues in descending order.
    pub values: Vec<f64>,
    pub frame: Frame,
}

/// Position of a primitive idempotent inside a Jordan frame.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FrameIndex {
    pub block: usize,
    pub index: usize,
}

/// `x = sum_i lambda_i c_i` over a Jordan frame.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralDecomp {
    blocks: Vec<BlockSpectrum>,
}

/// Spectral decomposition, eigenvalues sorted descending within each block.
pub fn spectral(x: &BlockVec) -> Result<SpectralDecomp> {
    let blocks = x
        .blocks()
        .iter()
        .enumerate()
        .map(|(k, b)| match b {
            BlockData::Psd(m) => psd_spectrum(m, k),
            BlockData::Diag(d) => Ok(diag_spectrum(d)),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectralDecomp { blocks })
}

fn psd_spectrum(m: &DMatrix<f64>, block: usize) -> Result<BlockSpectrum> {
    let n = m.nrows();
    if !m.iter().all(|v| v.is_finite()) {
        return Err(Error::EigenFailure { block });
    }
    if n == 1 {
        return Ok(BlockSpectrum { values: alloc::vec![m[(0, 0)]], frame: Frame::Psd(DMatrix::identity(1, 1)) });
    }
    let eig = SymmetricEigen::try_new(m.clone(), f64::EPSILON, EIGEN_MAX_SWEEPS)
        .ok_or(Error::EigenFailure { block })?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(BlockSpectrum { values, frame: Frame::Psd(vectors) })
}

fn diag_spectrum(d: &DVector<f64>) -> BlockSpectrum {
    let mut order: Vec<usize> = (0..d.len()).collect();
    order.sort_by(|&a, &b| d[b].total_cmp(&d[a]));
    BlockSpectrum { values: order.iter().map(|&i| d[i]).collect(), frame: Frame::Diag(order) }
}

impl SpectralDecomp {
    pub fn blocks(&self) -> &[BlockSpectrum] {
        &self.blocks
    }

    /// All eigenvalues with their frame positions, block by block.
    pub fn eigenvalues(&self) -> impl Iterator<Item = (FrameIndex, f64)> + '_ {
        self.blocks.iter().enumerate().flat_map(|(block, b)| {
            b.values.iter().enumerate().map(move |(index, &l)| (FrameIndex { block, index }, l))
        })
    }

    /// Number of frame elements, the rank `r`.
    pub fn len(&self) -> usize {
        self.blocks.iter().map(|b| b.values.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn value(&self, at: FrameIndex) -> f64 {
        self.blocks[at.block].values[at.index]
    }

    pub fn lambda_min(&self) -> f64 {
        self.blocks.iter().filter_map(|b| b.values.last().copied()).fold(f64::INFINITY, f64::min)
    }

    pub fn lambda_max(&self) -> f64 {
        self.blocks.iter().filter_map(|b| b.values.first().copied()).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Frame position of the smallest eigenvalue (first block wins ties).
    pub fn argmin(&self) -> FrameIndex {
        let mut best = FrameIndex { block: 0, index: 0 };
        let mut best_val = f64::INFINITY;
        for (k, b) in self.blocks.iter().enumerate() {
            if let Some(&l) = b.values.last() {
                if l < best_val {
                    best_val = l;
                    best = FrameIndex { block: k, index: b.values.len() - 1 };
                }
            }
        }
        best
    }

    pub fn trace(&self) -> f64 {
        self.blocks.iter().flat_map(|b| b.values.iter()).sum()
    }

    /// `sum_i log|lambda_i|`.
    pub fn log_det(&self) -> f64 {
        self.blocks.iter().flat_map(|b| b.values.iter()).map(|l| l.abs().ln()).sum()
    }

    /// `max_i |lambda_i|`.
    pub fn norm_inf(&self) -> f64 {
        self.blocks.iter().flat_map(|b| b.values.iter()).fold(0.0, |a, l| a.max(l.abs()))
    }

    /// The primitive idempotent `c_i`.
    pub fn idempotent(&self, at: FrameIndex) -> BlockVec {
        self.compose(|i, _| if i == at { 1.0 } else { 0.0 })
    }

    /// `sum_i f(lambda_i) c_i`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> BlockVec {
        self.compose(|_, l| f(l))
    }

    /// `sum_i g(i, lambda_i) c_i` for an arbitrary coefficient rule.
    pub fn compose(&self, g: impl Fn(FrameIndex, f64) -> f64) -> BlockVec {
        let blocks = self
            .blocks
            .iter()
            .enumerate()
            .map(|(block, b)| {
                let coef: Vec<f64> =
                    b.values.iter().enumerate().map(|(index, &l)| g(FrameIndex { block, index }, l)).collect();
                match &b.frame {
                    Frame::Psd(u) => {
                        let mut scaled = u.clone();
                        for (c, &w) in coef.iter().enumerate() {
                            scaled.column_mut(c).scale_mut(w);
                        }
                        BlockData::Psd(&scaled * u.transpose())
                    }
                    Frame::Diag(order) => {
                        let mut d = DVector::zeros(order.len());
                        for (k, &pos) in order.iter().enumerate() {
                            d[pos] = coef[k];
                        }
                        BlockData::Diag(d)
                    }
                }
            })
            .collect();
        BlockVec::from_blocks(blocks)
    }
}
