#![allow(dead_code)]

use conerefine::jordan::{diag_block, psd_block, Block, BlockVec, ConeShape};
use conerefine::operators::{LinearMap, ProblemData};
use nalgebra::DVector;

/// The 3x3 problem whose primal is feasible but has no interior point; optimal value 1.
pub fn ex11() -> ProblemData {
    let shape = ConeShape::new(vec![Block::psd(3)]).unwrap();
    let m = |rows: [f64; 9]| BlockVec::from_blocks(vec![psd_block(3, &rows)]);
    let a = [
        m([1.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0]),
        m([0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0]),
        m([0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 2.0]),
    ];
    let a = LinearMap::from_coefficients(shape, &a).unwrap();
    let c = m([1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]);
    ProblemData::new(a, DVector::from_vec(vec![1.0, 0.0, 0.0]), c).unwrap()
}

/// `min x1` s.t. `x1/4 + x2 = 1`, `x >= 0`; both optimal values are 0.
pub fn ex_b() -> ProblemData {
    let shape = ConeShape::new(vec![Block::diag(2)]).unwrap();
    let a = LinearMap::from_coefficients(shape, &[BlockVec::from_blocks(vec![diag_block(&[0.25, 1.0])])]).unwrap();
    ProblemData::new(a, DVector::from_vec(vec![1.0]), BlockVec::from_blocks(vec![diag_block(&[1.0, 0.0])])).unwrap()
}
