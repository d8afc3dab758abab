//! Seeded random data for unit tests.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::jordan::{Block, BlockData, BlockKind, BlockVec, ConeShape};
use crate::operators::{LinearMap, ProblemData};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// One to three blocks: PSD of size 1..=5 or diagonal of size 1..=4.
pub fn shape(r: &mut ChaCha8Rng) -> ConeShape {
    let n = r.random_range(1..=3);
    let blocks: Vec<Block> = (0..n)
        .map(|_| if r.random_bool(0.7) { Block::psd(r.random_range(1..=5)) } else { Block::diag(r.random_range(1..=4)) })
        .collect();
    ConeShape::new(blocks).unwrap()
}

pub fn element(r: &mut ChaCha8Rng, shape: &ConeShape) -> BlockVec {
    let blocks = shape
        .blocks()
        .iter()
        .map(|b| match b.kind {
            BlockKind::Psd => BlockData::Psd(DMatrix::from_fn(b.size, b.size, |_, _| r.random_range(-1.0..1.0))),
            BlockKind::Diag => BlockData::Diag(DVector::from_fn(b.size, |_, _| r.random_range(-1.0..1.0))),
        })
        .collect();
    BlockVec::from_blocks(blocks)
}

/// `x o x + 0.1 e`, so `lambda_min >= 0.1`.
pub fn interior(r: &mut ChaCha8Rng, shape: &ConeShape) -> BlockVec {
    let x = element(r, shape);
    let mut s = x.jordan(&x);
    s.axpy(0.1, &BlockVec::identity(shape));
    s
}

/// `x o x`, a cone member that is singular with positive probability for diagonal blocks.
pub fn member(r: &mut ChaCha8Rng, shape: &ConeShape) -> BlockVec {
    let x = element(r, shape);
    x.jordan(&x)
}

pub fn vector(r: &mut ChaCha8Rng, m: usize) -> DVector<f64> {
    DVector::from_fn(m, |_, _| r.random_range(-1.0..1.0))
}

pub fn linear_map(r: &mut ChaCha8Rng, shape: &ConeShape, m: usize) -> LinearMap {
    let rows: Vec<BlockVec> = (0..m).map(|_| element(r, shape)).collect();
    LinearMap::from_coefficients(shape.clone(), &rows).unwrap()
}

/// Random data with `b = A x0` for an interior `x0`.
pub fn problem(r: &mut ChaCha8Rng, shape: &ConeShape, m: usize) -> ProblemData {
    let a = linear_map(r, shape, m);
    let x0 = interior(r, shape);
    let b = a.apply(&x0);
    let c = element(r, shape);
    ProblemData::new(a, b, c).unwrap()
}

/// The 3x3 problem with a feasible but not strongly feasible primal; optimal value 1.
pub fn ex11() -> ProblemData {
    use crate::jordan::psd_block;
    let shape = ConeShape::new(alloc::vec![Block::psd(3)]).unwrap();
    let m = |rows: [f64; 9]| BlockVec::from_blocks(alloc::vec![psd_block(3, &rows)]);
    let a = [
        m([1.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0]),
        m([0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0]),
        m([0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 2.0]),
    ];
    let a = LinearMap::from_coefficients(shape, &a).unwrap();
    let c = m([1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]);
    ProblemData::new(a, DVector::from_vec(alloc::vec![1.0, 0.0, 0.0]), c).unwrap()
}

/// `min x1` s.t. `x1/4 + x2 = 1`, `x >= 0`.
pub fn ex_b() -> ProblemData {
    use crate::jordan::diag_block;
    let shape = ConeShape::new(alloc::vec![Block::diag(2)]).unwrap();
    let a = LinearMap::from_coefficients(shape, &[BlockVec::from_blocks(alloc::vec![diag_block(&[0.25, 1.0])])])
        .unwrap();
    let c = BlockVec::from_blocks(alloc::vec![diag_block(&[1.0, 0.0])]);
    ProblemData::new(a, DVector::from_vec(alloc::vec![1.0]), c).unwrap()
}
