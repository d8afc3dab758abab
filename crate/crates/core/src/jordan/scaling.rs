use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use super::{spectral, BlockData, BlockVec, ConeShape};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum ScaleBlock {
    /// `X -> W X W^T`, with `W^{-1}` carried along.
    Psd { w: DMatrix<f64>, w_inv: DMatrix<f64> },
    /// `x -> d o x`.
    Diag { d: DVector<f64> },
}

/// A cone automorphism `G = Q_{v_k} o ... o Q_{v_1}` stored in factored form.
///
/// Each PSD block keeps a general matrix `W` with `G(X) = W X W^T`; composing with `Q_v` maps
/// `W` to `V W`. Diagonal blocks keep the product of the squared factors.
#[derive(Clone, Debug, PartialEq)]
pub struct Scaling {
    blocks: Vec<ScaleBlock>,
}

impl Scaling {
    pub fn identity(shape: &ConeShape) -> Self {
        let blocks = shape
            .blocks()
            .iter()
            .map(|b| match b.kind {
                super::BlockKind::Psd => ScaleBlock::Psd {
                    w: DMatrix::identity(b.size, b.size),
                    w_inv: DMatrix::identity(b.size, b.size),
                },
                super::BlockKind::Diag => ScaleBlock::Diag { d: DVector::from_element(b.size, 1.0) },
            })
            .collect();
        Scaling { blocks }
    }

    /// `Q_v` for interior `v`.
    pub fn from_quad(v: &BlockVec) -> Result<Self> {
        let mut s = Scaling::identity(&v.shape());
        s.then_quad(v)?;
        Ok(s)
    }

    /// Replaces `G` by `Q_v o G`.
    pub fn then_quad(&mut self, v: &BlockVec) -> Result<()> {
        let sd = spectral(v)?;
        let lmin = sd.lambda_min();
        if !(lmin > 0.0) {
            return Err(Error::NotInterior { lambda_min: lmin });
        }
        if v.blocks().len() != self.blocks.len() {
            return Err(Error::ShapeMismatch);
        }
        let v_inv = sd.map(|l| 1.0 / l);
        for ((s, vb), ib) in self.blocks.iter_mut().zip(v.blocks()).zip(v_inv.blocks()) {
            match (s, vb, ib) {
                (ScaleBlock::Psd { w, w_inv }, BlockData::Psd(vm), BlockData::Psd(im)) => {
                    if vm.nrows() != w.nrows() {
                        return Err(Error::ShapeMismatch);
                    }
                    *w = vm * &*w;
                    *w_inv = &*w_inv * im;
                }
                (ScaleBlock::Diag { d }, BlockData::Diag(vd), _) => {
                    if vd.len() != d.len() {
                        return Err(Error::ShapeMismatch);
                    }
                    for (di, vi) in d.iter_mut().zip(vd.iter()) {
                        *di *= vi * vi;
                    }
                }
                _ => return Err(Error::ShapeMismatch),
            }
        }
        Ok(())
    }

    fn act(&self, x: &BlockVec, op: Op) -> BlockVec {
        assert_eq!(x.blocks().len(), self.blocks.len(), "scaling shape mismatch");
        let blocks = self
            .blocks
            .iter()
            .zip(x.blocks())
            .map(|(s, xb)| match (s, xb) {
                (ScaleBlock::Psd { w, w_inv }, BlockData::Psd(m)) => {
                    let out = match op {
                        Op::Forward => w * m * w.transpose(),
                        Op::Adjoint => w.transpose() * m * w,
                        Op::Inverse => w_inv * m * w_inv.transpose(),
                        Op::InverseAdjoint => w_inv.transpose() * m * w_inv,
                    };
                    BlockData::Psd(out)
                }
                (ScaleBlock::Diag { d }, BlockData::Diag(v)) => {
                    let out = match op {
                        Op::Forward | Op::Adjoint => v.component_mul(d),
                        Op::Inverse | Op::InverseAdjoint => v.component_div(d),
                    };
                    BlockData::Diag(out)
                }
                _ => panic!("scaling shape mismatch"),
            })
            .collect();
        BlockVec::from_blocks(blocks)
    }

    /// `G x`.
    pub fn apply(&self, x: &BlockVec) -> BlockVec {
        self.act(x, Op::Forward)
    }

    /// `G^* x`.
    pub fn apply_adjoint(&self, x: &BlockVec) -> BlockVec {
        self.act(x, Op::Adjoint)
    }

    /// `G^{-1} x`.
    pub fn apply_inverse(&self, x: &BlockVec) -> BlockVec {
        self.act(x, Op::Inverse)
    }

    /// `G^{-*} x`.
    pub fn apply_inverse_adjoint(&self, x: &BlockVec) -> BlockVec {
        self.act(x, Op::InverseAdjoint)
    }
}

#[derive(Clone, Copy)]
enum Op {
    Forward,
    Adjoint,
    Inverse,
    InverseAdjoint,
}
