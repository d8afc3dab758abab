//! DIMACS error measures and the pool-selection merit function.

use nalgebra::DVector;

use crate::error::Result;
use crate::jordan::BlockVec;
use crate::operators::ProblemData;

/// The six DIMACS errors; `err5` and `err6` keep their sign.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DimacsErrors {
    pub err1: f64,
    pub err2: f64,
    pub err3: f64,
    pub err4: f64,
    pub err5: f64,
    pub err6: f64,
}

impl DimacsErrors {
    pub fn as_array(&self) -> [f64; 6] {
        [self.err1, self.err2, self.err3, self.err4, self.err5, self.err6]
    }
}

fn max_abs_b(p: &ProblemData) -> f64 {
    p.b.amax()
}

/// DIMACS errors of `(x, y, z)`; norms are Frobenius and `max|c_i|` runs over matrix entries.
pub fn dimacs(x: &BlockVec, y: &DVector<f64>, z: &BlockVec, p: &ProblemData) -> Result<DimacsErrors> {
    let bden = 1.0 + max_abs_b(p);
    let cden = 1.0 + p.c.max_abs_entry();
    let cx = p.primal_objective(x);
    let by = p.dual_objective(y);
    let gden = 1.0 + cx.abs() + by.abs();
    let dual_res = &(&p.c - &p.a.adjoint(y)) - z;
    Ok(DimacsErrors {
        err1: (p.a.apply(x) - &p.b).norm() / bden,
        err2: (-x.lambda_min()? / bden).max(0.0),
        err3: dual_res.norm() / cden,
        err4: (-z.lambda_min()? / cden).max(0.0),
        err5: (cx - by) / gden,
        err6: x.inner(z) / gden,
    })
}

/// `||Ax-b||/(1+max|b_i|) + max(0, -lambda_min(x)/(1+max|b_i|)) + |gap| + |<x,z>|`, the last
/// two divided by `1 + |<c,x>| + |b^T y|`.
pub fn merit(x: &BlockVec, y: &DVector<f64>, z: &BlockVec, p: &ProblemData) -> Result<f64> {
    let bden = 1.0 + max_abs_b(p);
    let cx = p.primal_objective(x);
    let by = p.dual_objective(y);
    let gden = 1.0 + cx.abs() + by.abs();
    Ok((p.a.apply(x) - &p.b).norm() / bden
        + (-x.lambda_min()? / bden).max(0.0)
        + (cx - by).abs() / gden
        + x.inner(z).abs() / gden)
}
