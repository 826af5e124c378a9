//! Index plumbing for operators on tensor-factored spaces.
//!
//! Subsystems are ordered left to right with the first factor most
//! significant, i.e. |i⟩⊗|j⟩ ↦ index i·d_2 + j.

use num_complex::Complex64 as C64;

use super::matrix::{CMatrix, ZERO};
use crate::error::{Error, Result};

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

fn check_square(m: &CMatrix, dims: &[usize]) -> Result<()> {
    let total: usize = dims.iter().product();
    if !m.is_square() || m.rows() != total {
        return Err(Error::Dimension(format!(
            "operator is {}x{} but subsystem dims {:?} multiply to {total}",
            m.rows(),
            m.cols(),
            dims
        )));
    }
    Ok(())
}

/// (I ⊗ … ⊗ op_k ⊗ … ⊗ I) · m
pub fn apply_local_left(op: &CMatrix, m: &CMatrix, dims: &[usize], sys: usize) -> Result<CMatrix> {
    check_square(m, dims)?;
    if sys >= dims.len() || op.rows() != dims[sys] || op.cols() != dims[sys] {
        return Err(Error::Dimension(format!(
            "local operator {}x{} does not act on subsystem {sys} of {:?}",
            op.rows(),
            op.cols(),
            dims
        )));
    }
    let n = m.rows();
    let d = dims[sys];
    let stride = strides(dims)[sys];
    let mut out = CMatrix::zeros(n, n);
    for row in 0..n {
        let digit = (row / stride) % d;
        let base = row - digit * stride;
        for x in 0..d {
            let coef = op[(digit, x)];
            if coef == ZERO {
                continue;
            }
            let src = base + x * stride;
            for col in 0..n {
                out[(row, col)] += coef * m[(src, col)];
            }
        }
    }
    Ok(out)
}

/// (I ⊗ op ⊗ I) m (I ⊗ op ⊗ I)†
pub fn conjugate_local(op: &CMatrix, m: &CMatrix, dims: &[usize], sys: usize) -> Result<CMatrix> {
    let left = apply_local_left(op, m, dims, sys)?;
    // (X op†) = (op X†)†
    Ok(apply_local_left(op, &left.adjoint(), dims, sys)?.adjoint())
}

/// Embeds a local operator into the full space.
pub fn embed_local(op: &CMatrix, dims: &[usize], sys: usize) -> Result<CMatrix> {
    let n: usize = dims.iter().product();
    apply_local_left(op, &CMatrix::identity(n), dims, sys)
}

/// Partial trace keeping the listed subsystems (in their original order).
pub fn partial_trace(m: &CMatrix, dims: &[usize], keep: &[usize]) -> Result<CMatrix> {
    check_square(m, dims)?;
    let mut keep_sorted = keep.to_vec();
    keep_sorted.sort_unstable();
    keep_sorted.dedup();
    if keep_sorted.iter().any(|&k| k >= dims.len()) {
        return Err(Error::Dimension(format!("keep set {keep:?} out of range for {dims:?}")));
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|k| !keep_sorted.contains(k)).collect();
    let kdims: Vec<usize> = keep_sorted.iter().map(|&k| dims[k]).collect();
    let tdims: Vec<usize> = traced.iter().map(|&k| dims[k]).collect();
    let kn: usize = kdims.iter().product();
    let tn: usize = tdims.iter().product();
    let st = strides(dims);

    let full_index = |kidx: usize, tidx: usize| -> usize {
        let mut idx = 0;
        let mut r = kidx;
        for (pos, &k) in keep_sorted.iter().enumerate().rev() {
            idx += (r % kdims[pos]) * st[k];
            r /= kdims[pos];
        }
        let mut r = tidx;
        for (pos, &t) in traced.iter().enumerate().rev() {
            idx += (r % tdims[pos]) * st[t];
            r /= tdims[pos];
        }
        idx
    };

    let mut out = CMatrix::zeros(kn, kn);
    for i in 0..kn {
        for j in 0..kn {
            let mut s = ZERO;
            for t in 0..tn {
                s += m[(full_index(i, t), full_index(j, t))];
            }
            out[(i, j)] = s;
        }
    }
    Ok(out)
}

/// Matrix of a vector on A⊗B reshaped to d_A × d_B (ψ_{ab}).
pub fn reshape_bipartite(psi: &[C64], da: usize, db: usize) -> Result<CMatrix> {
    if psi.len() != da * db {
        return Err(Error::Dimension(format!("vector of length {} is not {da}x{db}", psi.len())));
    }
    CMatrix::from_vec(da, db, psi.to_vec())
}
