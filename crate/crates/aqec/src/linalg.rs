//! Dense complex linear algebra: tensor products, projectors, channel
//! application, orthonormalization, and a cyclic-Jacobi Hermitian eigensolver.
//!
//! Everything is double precision and dense; Hilbert-space dimensions are
//! capped at [`DIM_CAP`] so a misconfigured site count fails loudly instead of
//! allocating gigabytes.

use ndarray::{Array1, Array2};

use crate::{AqecError, Result};

pub type C64 = num_complex::Complex64;
pub type CVec = Array1<C64>;
pub type CMat = Array2<C64>;

/// Hard limit on any produced Hilbert-space dimension.
pub const DIM_CAP: usize = 4096;

/// Relative rank tolerance for projector construction: error-word amplitudes
/// scale like sqrt(gamma) >= 3e-2 on the sweep grids, far above this floor.
pub const RANK_REL_TOL: f64 = 1e-9;

pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity(dim: usize) -> CMat {
    Array2::eye(dim)
}

/// Computational basis vector |idx> in dimension `dim`.
pub fn basis_vec(dim: usize, idx: usize) -> Result<CVec> {
    if idx >= dim {
        return Err(AqecError::DimMismatch(format!(
            "basis index {idx} out of range for dimension {dim}"
        )));
    }
    let mut v = Array1::zeros(dim);
    v[idx] = C64::new(1.0, 0.0);
    Ok(v)
}

pub fn dagger(m: &CMat) -> CMat {
    m.t().mapv(|z| z.conj())
}

/// Hermitian inner product <a|b>, conjugate-linear in the first argument.
pub fn inner(a: &CVec, b: &CVec) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// Outer product |a><b|.
pub fn outer(a: &CVec, b: &CVec) -> CMat {
    let mut m = Array2::zeros((a.len(), b.len()));
    for (i, ai) in a.iter().enumerate() {
        for (j, bj) in b.iter().enumerate() {
            m[(i, j)] = ai * bj.conj();
        }
    }
    m
}

pub fn vec_norm(v: &CVec) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn fro_norm(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_norm(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Kronecker product of two operators; the first factor is the
/// most significant subsystem.
pub fn tensor(a: &CMat, b: &CMat) -> Result<CMat> {
    let rows = a
        .nrows()
        .checked_mul(b.nrows())
        .ok_or(AqecError::DimCap { got: usize::MAX, cap: DIM_CAP })?;
    let cols = a
        .ncols()
        .checked_mul(b.ncols())
        .ok_or(AqecError::DimCap { got: usize::MAX, cap: DIM_CAP })?;
    if rows > DIM_CAP || cols > DIM_CAP {
        return Err(AqecError::DimCap { got: rows.max(cols), cap: DIM_CAP });
    }
    Ok(ndarray::linalg::kron(a, b))
}

/// Kronecker product of states; the first factor is the most significant
/// subsystem.
pub fn tensor_state(a: &CVec, b: &CVec) -> Result<CVec> {
    let dim = a
        .len()
        .checked_mul(b.len())
        .ok_or(AqecError::DimCap { got: usize::MAX, cap: DIM_CAP })?;
    if dim > DIM_CAP {
        return Err(AqecError::DimCap { got: dim, cap: DIM_CAP });
    }
    let mut v = Array1::zeros(dim);
    for (i, ai) in a.iter().enumerate() {
        for (j, bj) in b.iter().enumerate() {
            v[i * b.len() + j] = ai * bj;
        }
    }
    Ok(v)
}

/// Left-to-right Kronecker product of a factor list.
pub fn tensor_all(ops: &[CMat]) -> Result<CMat> {
    let mut iter = ops.iter();
    let first = iter
        .next()
        .ok_or_else(|| AqecError::DimMismatch("tensor of an empty factor list".into()))?;
    let mut acc = first.clone();
    for op in iter {
        acc = tensor(&acc, op)?;
    }
    Ok(acc)
}

/// Applies the channel rho -> sum_a E_a rho E_a^dag.
///
/// Dimensions are validated; completeness is not (the weight-truncated error
/// sets used throughout are deliberately trace-non-increasing).
pub fn apply_channel(kraus: &[CMat], rho: &CMat) -> Result<CMat> {
    let dim = rho.nrows();
    if rho.ncols() != dim {
        return Err(AqecError::DimMismatch(format!(
            "channel input must be square, got {}x{}",
            rho.nrows(),
            rho.ncols()
        )));
    }
    let mut out: CMat = Array2::zeros((dim, dim));
    for e in kraus {
        if e.nrows() != dim || e.ncols() != dim {
            return Err(AqecError::DimMismatch(format!(
                "Kraus operator is {}x{}, state is {dim}x{dim}",
                e.nrows(),
                e.ncols()
            )));
        }
        let er = e.dot(rho);
        out = out + er.dot(&dagger(e));
    }
    Ok(out)
}

/// Max-norm of sum_a E_a^dag E_a - I, zero for a complete Kraus family.
pub fn kraus_defect(kraus: &[CMat]) -> Result<f64> {
    let first = kraus
        .first()
        .ok_or_else(|| AqecError::DimMismatch("empty Kraus family".into()))?;
    let dim = first.nrows();
    let mut acc: CMat = Array2::zeros((dim, dim));
    for e in kraus {
        if e.nrows() != dim || e.ncols() != dim {
            return Err(AqecError::DimMismatch("mixed Kraus dimensions".into()));
        }
        acc = acc + dagger(e).dot(e);
    }
    acc = acc - identity(dim);
    Ok(max_norm(&acc))
}

/// Orthonormal basis of the span of `vs` by pivoted modified Gram-Schmidt
/// with one re-orthogonalization pass. The returned basis may be smaller than
/// the input when vectors are dependent; the tolerance is relative to the
/// largest input norm.
pub fn orthonormal_basis(vs: &[CVec], rel_tol: f64) -> Result<Vec<CVec>> {
    let Some(first) = vs.first() else {
        return Ok(Vec::new());
    };
    let dim = first.len();
    if vs.iter().any(|v| v.len() != dim) {
        return Err(AqecError::DimMismatch("mixed vector dimensions".into()));
    }
    let mut work: Vec<CVec> = vs.to_vec();
    let max_input = work.iter().map(vec_norm).fold(0.0, f64::max);
    let tol = rel_tol * max_input;
    let mut basis: Vec<CVec> = Vec::new();
    loop {
        let Some((idx, norm)) = work
            .iter()
            .enumerate()
            .map(|(i, v)| (i, vec_norm(v)))
            .max_by(|a, b| a.1.total_cmp(&b.1))
        else {
            break;
        };
        if norm <= tol {
            break;
        }
        let mut b = work.swap_remove(idx);
        // A second projection pass keeps the basis orthonormal to machine
        // precision even when the pivot nearly lies in the current span.
        for _ in 0..2 {
            for e in &basis {
                let c = inner(e, &b);
                b = b - e.mapv(|z| z * c);
            }
        }
        let bn = vec_norm(&b);
        if bn <= tol {
            continue;
        }
        b.mapv_inplace(|z| z / bn);
        for w in work.iter_mut() {
            let c = inner(&b, w);
            *w = w.clone() - b.mapv(|z| z * c);
        }
        basis.push(b);
    }
    Ok(basis)
}

/// Orthogonal projector onto the span of linearly independent vectors.
pub fn projector_from_vectors(vs: &[CVec]) -> Result<CMat> {
    if vs.is_empty() {
        return Err(AqecError::RankDeficient("no vectors given".into()));
    }
    let basis = orthonormal_basis(vs, RANK_REL_TOL)?;
    if basis.len() < vs.len() {
        return Err(AqecError::RankDeficient(format!(
            "{} vectors span only {} dimensions",
            vs.len(),
            basis.len()
        )));
    }
    let dim = vs[0].len();
    let mut p: CMat = Array2::zeros((dim, dim));
    for b in &basis {
        p = p + outer(b, b);
    }
    Ok(p)
}

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues in descending order with matching eigenvector columns.
pub fn hermitian_eig(h: &CMat) -> Result<(Vec<f64>, CMat)> {
    let n = h.nrows();
    if h.ncols() != n {
        return Err(AqecError::DimMismatch(format!(
            "eigensolver needs a square matrix, got {}x{}",
            n,
            h.ncols()
        )));
    }
    let scale = fro_norm(h).max(1.0);
    let herm_defect = fro_norm(&(h - &dagger(h)));
    if herm_defect > 1e-10 * scale {
        return Err(AqecError::Decomposition(format!(
            "matrix is not Hermitian (defect {herm_defect:.2e})"
        )));
    }
    let mut a = h.clone();
    let mut v = identity(n);
    let mut converged = false;
    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[(p, q)].norm_sqr();
            }
        }
        if off.sqrt() <= 1e-14 * scale {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let b = a[(p, q)];
                let babs = b.norm();
                if babs <= 1e-300 {
                    continue;
                }
                let phase = C64::from_polar(1.0, b.arg());
                let tau = (a[(p, p)].re - a[(q, q)].re) / (2.0 * babs);
                let t = tau.signum() / (tau.abs() + (tau * tau + 1.0).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // Right-multiply columns p,q by the rotation, then
                // left-multiply rows p,q by its adjoint, and accumulate V.
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * c + akq * s * phase.conj();
                    a[(k, q)] = -akp * s * phase + akq * c;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = apk * c + aqk * s * phase;
                    a[(q, k)] = -apk * s * phase.conj() + aqk * c;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * c + vkq * s * phase.conj();
                    v[(k, q)] = -vkp * s * phase + vkq * c;
                }
            }
        }
    }
    if !converged {
        return Err(AqecError::Decomposition(
            "Jacobi eigensolver did not converge in 100 sweeps".into(),
        ));
    }
    let mut order: Vec<usize> = (0..n).collect();
    let evals: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| evals[j].total_cmp(&evals[i]));
    let sorted_vals: Vec<f64> = order.iter().map(|&i| evals[i]).collect();
    let mut sorted_vecs: CMat = Array2::zeros((n, n));
    for (new_col, &old_col) in order.iter().enumerate() {
        for r in 0..n {
            sorted_vecs[(r, new_col)] = v[(r, old_col)];
        }
    }
    Ok((sorted_vals, sorted_vecs))
}
