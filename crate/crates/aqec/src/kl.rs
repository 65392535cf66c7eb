//! Knill-Laflamme violation diagnostics: the matrices of codeword overlaps
//! under pairs of error operators, and the scalar losses built from their
//! off-diagonal weight and diagonal spread.

use crate::codes::CodeSpace;
use crate::dit::DitString;
use crate::linalg::{inner, CMat, CVec};
use crate::noise::ErrorSet;
use crate::{AqecError, Result};

/// One overlap matrix M_(alpha beta) = <psi_alpha| E_a^dag E_b |psi_beta>.
#[derive(Clone, Debug)]
pub struct KLMatrix {
    pub a: DitString,
    pub b: DitString,
    pub m: CMat,
}

/// Loss contribution of a single operator pair.
#[derive(Clone, Debug)]
pub struct MuContribution {
    pub a: DitString,
    pub b: DitString,
    pub l1: f64,
    pub l2: f64,
}

/// Total losses plus the per-pair breakdown, tagged with the damping
/// strength the error set was built at.
#[derive(Clone, Debug)]
pub struct LossReport {
    pub gamma: f64,
    pub l1: f64,
    pub l2: f64,
    pub per_mu: Vec<MuContribution>,
}

fn check_compatible(code: &CodeSpace, errors: &ErrorSet) -> Result<()> {
    if code.n != errors.n || code.q as usize != errors.q {
        return Err(AqecError::DimMismatch(format!(
            "code on {} sites of dimension {} against errors on {} sites of dimension {}",
            code.n, code.q, errors.n, errors.q
        )));
    }
    Ok(())
}

/// Computes the overlap matrix for every ordered pair (a, b) of error
/// operators, in error-set order with the first label varying slowest.
pub fn kl_matrices(code: &CodeSpace, errors: &ErrorSet) -> Result<Vec<KLMatrix>> {
    check_compatible(code, errors)?;
    let k = code.logical_dim();
    let states = code.state_vecs()?;
    // Images E_a |psi_beta>, reused across all pairs.
    let images: Vec<Vec<CVec>> = errors
        .kraus
        .iter()
        .map(|(_, e)| states.iter().map(|v| e.dot(v)).collect())
        .collect();
    let mut out = Vec::with_capacity(images.len() * images.len());
    for (ia, (label_a, _)) in errors.kraus.iter().enumerate() {
        for (ib, (label_b, _)) in errors.kraus.iter().enumerate() {
            let mut m: CMat = ndarray::Array2::zeros((k, k));
            for alpha in 0..k {
                for beta in 0..k {
                    m[(alpha, beta)] = inner(&images[ia][alpha], &images[ib][beta]);
                }
            }
            out.push(KLMatrix { a: label_a.clone(), b: label_b.clone(), m });
        }
    }
    Ok(out)
}

fn mu_contribution(m: &CMat) -> (f64, f64) {
    let k = m.nrows();
    let mean = (0..k).map(|i| m[(i, i)]).sum::<crate::C64>() / k as f64;
    let mut l1 = 0.0;
    let mut l2 = 0.0;
    for alpha in 0..k {
        for beta in (alpha + 1)..k {
            let v = m[(alpha, beta)].norm();
            l1 += v;
            l2 += v * v;
        }
        let d = (m[(alpha, alpha)] - mean).norm();
        l1 += 0.5 * d;
        l2 += 0.25 * d * d;
    }
    (l1, l2)
}

/// Evaluates both losses over every ordered pair of error operators. The
/// first loss sums off-diagonal magnitudes plus half the diagonal deviation
/// from its mean; the second uses squared magnitudes with a quarter weight
/// on the diagonal deviation.
pub fn losses(code: &CodeSpace, errors: &ErrorSet) -> Result<LossReport> {
    let mats = kl_matrices(code, errors)?;
    let mut per_mu = Vec::with_capacity(mats.len());
    let mut l1 = 0.0;
    let mut l2 = 0.0;
    for kl in &mats {
        let (c1, c2) = mu_contribution(&kl.m);
        l1 += c1;
        l2 += c2;
        per_mu.push(MuContribution { a: kl.a.clone(), b: kl.b.clone(), l1: c1, l2: c2 });
    }
    Ok(LossReport { gamma: errors.gamma, l1, l2, per_mu })
}

pub fn l1_loss(code: &CodeSpace, errors: &ErrorSet) -> Result<f64> {
    Ok(losses(code, errors)?.l1)
}

pub fn l2_loss(code: &CodeSpace, errors: &ErrorSet) -> Result<f64> {
    Ok(losses(code, errors)?.l2)
}

/// Worst-case fidelity lower bound implied by a small first loss for a code
/// with the given logical dimension.
pub fn lemma_fidelity_bound(l1: f64, logical_dim: usize) -> f64 {
    1.0 - 2.0 * (logical_dim * logical_dim) as f64 * l1
}
