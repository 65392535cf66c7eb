//! Syndrome-filter recovery plans and exact worst-case fidelities.
//!
//! A plan partitions the error-image space into syndrome sectors. Each
//! sector holds one normalized error word per logical index together with
//! the amplitude the noise assigns to it; the recovery map filters every
//! sector down to its smallest amplitude so that no residual logical error
//! remains. The worst-case fidelity is then the sum of squared filter
//! amplitudes, independent of the logical input state.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::codes::CodeSpace;
use crate::linalg::{hermitian_eig, inner, outer, projector_from_vectors, vec_norm};
use crate::noise::ErrorSet;
use crate::{AqecError, C64, CMat, CVec, Result};

/// Image norms below this count as an absent logical index in a sector.
const IMAGE_ZERO_TOL: f64 = 1e-12;
/// Two error-image spaces overlap when any principal angle has cosine above
/// this; otherwise their labels become separate singleton sectors.
const OVERLAP_COS_TOL: f64 = 1e-8;
/// Relative gap under which mixture eigenvalues count as one cluster, making
/// the invariant-subspace split ambiguous.
const EIG_CLUSTER_REL_TOL: f64 = 1e-8;
/// Orthonormality tolerance for error words within a sector.
const WORD_ORTHO_TOL: f64 = 1e-10;
/// Agreement tolerance between the plan fidelity and the sampling oracle.
const ORACLE_TOL: f64 = 1e-9;

/// One syndrome subspace: per-logical-index error words |e_lambda> and the
/// amplitudes a_lambda, so the noise maps |psi_lambda> into this sector as
/// a_lambda |e_lambda>.
#[derive(Clone, Debug)]
pub struct SyndromeSector {
    pub label: String,
    pub projector: CMat,
    /// One normalized error word per logical index; zero vector where the
    /// index has no image in this sector.
    pub error_words: Vec<CVec>,
    /// Non-negative image amplitudes, zero where the index is absent.
    pub amplitudes: Vec<f64>,
}

impl SyndromeSector {
    /// Filter amplitude m_s: the smallest image amplitude over all logical
    /// indices. An index missing from the sector forces zero, sending the
    /// whole sector to the abort flag.
    pub fn min_amplitude(&self) -> f64 {
        self.amplitudes.iter().fold(f64::INFINITY, |m, &a| m.min(a)).max(0.0)
    }
}

/// Ordered syndrome sectors plus the residual probability mass that the
/// filters discard to the abort flag.
#[derive(Clone, Debug)]
pub struct RecoveryPlan {
    pub sectors: Vec<SyndromeSector>,
    pub fail_weight: f64,
}

/// Sum of squared filter amplitudes: the exact worst-case fidelity of the
/// plan, independent of the logical input.
pub fn worst_case_fidelity(plan: &RecoveryPlan) -> f64 {
    plan.sectors.iter().map(|s| s.min_amplitude().powi(2)).sum()
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

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    fn find(&mut self, i: usize) -> usize {
        if self.parent[i] != i {
            let root = self.find(self.parent[i]);
            self.parent[i] = root;
        }
        self.parent[i]
    }

    fn union(&mut self, i: usize, j: usize) {
        let (ri, rj) = (self.find(i), self.find(j));
        if ri != rj {
            self.parent[rj.max(ri)] = rj.min(ri);
        }
    }
}

/// Largest principal-angle cosine between two spans given orthonormal bases.
fn max_principal_cosine(qa: &[CVec], qb: &[CVec]) -> Result<f64> {
    if qa.is_empty() || qb.is_empty() {
        return Ok(0.0);
    }
    let mut m: CMat = ndarray::Array2::zeros((qa.len(), qb.len()));
    for (i, a) in qa.iter().enumerate() {
        for (j, b) in qb.iter().enumerate() {
            m[(i, j)] = inner(a, b);
        }
    }
    // sigma_max(M)^2 is the top eigenvalue of M^dagger M.
    let mut mtm: CMat = ndarray::Array2::zeros((qb.len(), qb.len()));
    for i in 0..qb.len() {
        for j in 0..qb.len() {
            let mut s = C64::new(0.0, 0.0);
            for k in 0..qa.len() {
                s += m[(k, i)].conj() * m[(k, j)];
            }
            mtm[(i, j)] = s;
        }
    }
    let (eigs, _) = hermitian_eig(&mtm)?;
    Ok(eigs.first().copied().unwrap_or(0.0).max(0.0).sqrt())
}

fn sector_from_words(label: String, words: Vec<CVec>, amplitudes: Vec<f64>) -> Result<SyndromeSector> {
    let present: Vec<&CVec> = words
        .iter()
        .zip(&amplitudes)
        .filter(|(_, &a)| a > IMAGE_ZERO_TOL)
        .map(|(w, _)| w)
        .collect();
    for (i, a) in present.iter().enumerate() {
        let na = vec_norm(a);
        if (na - 1.0).abs() > WORD_ORTHO_TOL {
            return Err(AqecError::Decomposition(format!(
                "sector {label}: error word {i} has norm {na}"
            )));
        }
        for b in present.iter().skip(i + 1) {
            let ov = inner(a, b).norm();
            if ov > WORD_ORTHO_TOL {
                return Err(AqecError::Decomposition(format!(
                    "sector {label}: error words overlap by {ov:.2e}"
                )));
            }
        }
    }
    let owned: Vec<CVec> = present.into_iter().cloned().collect();
    let projector = projector_from_vectors(&owned)?;
    Ok(SyndromeSector { label, projector, error_words: words, amplitudes })
}

/// Splits a group of overlapping error labels into invariant subspaces.
///
/// For each logical index the group's image mixture is diagonalized through
/// its Gram matrix; rank-j eigenvectors across all indices form sector j.
/// Degenerate eigenvalue clusters make the split ambiguous and fail.
fn split_group(
    label: String,
    members: &[usize],
    images: &[Vec<CVec>],
    kk: usize,
) -> Result<Vec<SyndromeSector>> {
    let g = members.len();
    // rays[lambda] = per-index list of (amplitude, normalized ray), rank-major.
    let mut rays: Vec<Vec<(f64, CVec)>> = Vec::with_capacity(kk);
    for lam in 0..kk {
        let ws: Vec<&CVec> = members.iter().map(|&a| &images[a][lam]).collect();
        let mut gram: CMat = ndarray::Array2::zeros((g, g));
        for i in 0..g {
            for j in 0..g {
                gram[(i, j)] = inner(ws[i], ws[j]);
            }
        }
        let (eigs, vecs) = hermitian_eig(&gram)?;
        let keep_tol = IMAGE_ZERO_TOL * IMAGE_ZERO_TOL;
        let kept: Vec<usize> = (0..g).filter(|&j| eigs[j] > keep_tol).collect();
        for w in kept.windows(2) {
            if (eigs[w[0]] - eigs[w[1]]).abs() <= EIG_CLUSTER_REL_TOL * eigs[kept[0]] {
                return Err(AqecError::Decomposition(format!(
                    "group {label}: degenerate mixture eigenvalues {:.6e} and {:.6e} \
                     leave the invariant-subspace split ambiguous",
                    eigs[w[0]], eigs[w[1]]
                )));
            }
        }
        let mut lam_rays = Vec::with_capacity(kept.len());
        for &j in &kept {
            let amp = eigs[j].sqrt();
            let dim = ws[0].len();
            let mut ray: CVec = ndarray::Array1::zeros(dim);
            for (i, w) in ws.iter().enumerate() {
                let c = vecs[(i, j)];
                ray = ray + w.mapv(|z| z * c);
            }
            ray.mapv_inplace(|z| z / amp);
            lam_rays.push((amp, ray));
        }
        rays.push(lam_rays);
    }
    let r_max = rays.iter().map(Vec::len).max().unwrap_or(0);
    let dim = images[members[0]][0].len();
    let mut sectors = Vec::with_capacity(r_max);
    for j in 0..r_max {
        let mut words = Vec::with_capacity(kk);
        let mut amps = Vec::with_capacity(kk);
        for lam_rays in &rays {
            if let Some((a, ray)) = lam_rays.get(j) {
                amps.push(*a);
                words.push(ray.clone());
            } else {
                amps.push(0.0);
                words.push(ndarray::Array1::zeros(dim));
            }
        }
        sectors.push(sector_from_words(format!("{label}#{j}"), words, amps)?);
    }
    Ok(sectors)
}

/// Builds the syndrome-filter recovery plan for a code under an error set.
///
/// Error labels whose image spaces are mutually orthogonal become singleton
/// sectors; overlapping labels are grouped and split into invariant
/// subspaces of their classical mixture, one pure ray per logical index.
pub fn build_recovery(code: &CodeSpace, errors: &ErrorSet) -> Result<RecoveryPlan> {
    check_compatible(code, errors)?;
    let states = code.state_vecs()?;
    let kk = states.len();
    let images: Vec<Vec<CVec>> = errors
        .kraus
        .iter()
        .map(|(_, e)| states.iter().map(|v| e.dot(v)).collect())
        .collect();
    let norms: Vec<Vec<f64>> =
        images.iter().map(|per_lam| per_lam.iter().map(vec_norm).collect()).collect();
    // Labels whose images all vanish (for example every jump at zero damping)
    // produce no sector at all.
    let active: Vec<usize> = (0..images.len())
        .filter(|&a| norms[a].iter().any(|&x| x > IMAGE_ZERO_TOL))
        .collect();
    let spans: Vec<Vec<CVec>> = active
        .iter()
        .map(|&a| {
            let present: Vec<CVec> = (0..kk)
                .filter(|&lam| norms[a][lam] > IMAGE_ZERO_TOL)
                .map(|lam| images[a][lam].clone())
                .collect();
            crate::linalg::orthonormal_basis(&present, 1e-10)
        })
        .collect::<Result<_>>()?;
    let mut uf = UnionFind::new(active.len());
    for i in 0..active.len() {
        for j in (i + 1)..active.len() {
            if max_principal_cosine(&spans[i], &spans[j])? > OVERLAP_COS_TOL {
                uf.union(i, j);
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); active.len()];
    for i in 0..active.len() {
        let root = uf.find(i);
        groups[root].push(active[i]);
    }
    let mut sectors = Vec::new();
    for members in groups.into_iter().filter(|m| !m.is_empty()) {
        let label = members
            .iter()
            .map(|&a| errors.kraus[a].0.to_string())
            .collect::<Vec<_>>()
            .join("+");
        if members.len() == 1 {
            let a = members[0];
            let dim = images[a][0].len();
            let mut words = Vec::with_capacity(kk);
            let mut amps = Vec::with_capacity(kk);
            for lam in 0..kk {
                let norm = norms[a][lam];
                if norm > IMAGE_ZERO_TOL {
                    amps.push(norm);
                    words.push(images[a][lam].mapv(|z| z / norm));
                } else {
                    amps.push(0.0);
                    words.push(ndarray::Array1::zeros(dim));
                }
            }
            sectors.push(sector_from_words(label, words, amps)?);
        } else {
            sectors.extend(split_group(label, &members, &images, kk)?);
        }
    }
    validate_cross_sector(&sectors)?;
    let fidelity: f64 = sectors.iter().map(|s| s.min_amplitude().powi(2)).sum();
    Ok(RecoveryPlan { sectors, fail_weight: (1.0 - fidelity).max(0.0) })
}

fn validate_cross_sector(sectors: &[SyndromeSector]) -> Result<()> {
    for (i, s) in sectors.iter().enumerate() {
        for t in sectors.iter().skip(i + 1) {
            for (a, &na) in s.error_words.iter().zip(&s.amplitudes) {
                if na <= IMAGE_ZERO_TOL {
                    continue;
                }
                for (b, &nb) in t.error_words.iter().zip(&t.amplitudes) {
                    if nb <= IMAGE_ZERO_TOL {
                        continue;
                    }
                    let ov = inner(a, b).norm();
                    if ov > OVERLAP_COS_TOL {
                        return Err(AqecError::Decomposition(format!(
                            "sectors {} and {} overlap by {ov:.2e}",
                            s.label, t.label
                        )));
                    }
                }
            }
        }
    }
    Ok(())
}

/// Kraus operators of the filter recovery, one per sector: R_s maps the
/// sector's error words back onto the codewords, scaled down to the filter
/// amplitude so the map is trace non-increasing.
pub fn recovery_kraus(plan: &RecoveryPlan, code: &CodeSpace) -> Result<Vec<CMat>> {
    let states = code.state_vecs()?;
    let dim = states[0].len();
    let mut out = Vec::with_capacity(plan.sectors.len());
    for s in &plan.sectors {
        if s.amplitudes.len() != states.len() {
            return Err(AqecError::DimMismatch(
                "plan and code disagree on the logical dimension".into(),
            ));
        }
        let m = s.min_amplitude();
        let mut r: CMat = ndarray::Array2::zeros((dim, dim));
        if m > 0.0 {
            for (lam, (word, &a)) in s.error_words.iter().zip(&s.amplitudes).enumerate() {
                r = r + outer(&states[lam], word).mapv(|z| z * (m / a));
            }
        }
        out.push(r);
    }
    Ok(out)
}

/// K x K transition blocks of the recovered channel: one matrix per
/// (sector, error) pair, so that the recovered amplitude on input
/// coefficients c is c^dagger B c.
fn fidelity_blocks(code: &CodeSpace, errors: &ErrorSet, plan: &RecoveryPlan) -> Result<Vec<CMat>> {
    check_compatible(code, errors)?;
    let states = code.state_vecs()?;
    let kk = states.len();
    let mut blocks = Vec::new();
    for s in &plan.sectors {
        let m = s.min_amplitude();
        if m <= 0.0 {
            continue;
        }
        for (_, e) in &errors.kraus {
            let mut b: CMat = ndarray::Array2::zeros((kk, kk));
            for beta in 0..kk {
                let img = e.dot(&states[beta]);
                for lam in 0..kk {
                    if s.amplitudes[lam] > IMAGE_ZERO_TOL {
                        b[(lam, beta)] =
                            inner(&s.error_words[lam], &img) * (m / s.amplitudes[lam]);
                    }
                }
            }
            blocks.push(b);
        }
    }
    Ok(blocks)
}

fn state_fidelity_from_blocks(blocks: &[CMat], c: &[C64]) -> f64 {
    let kk = c.len();
    let mut f = 0.0;
    for b in blocks {
        let mut z = C64::new(0.0, 0.0);
        for lam in 0..kk {
            for beta in 0..kk {
                z += c[lam].conj() * b[(lam, beta)] * c[beta];
            }
        }
        f += z.norm_sqr();
    }
    f
}

/// Exact fidelity of one logical state (coefficients in the codeword basis)
/// under noise followed by the plan's recovery.
pub fn logical_state_fidelity(
    code: &CodeSpace,
    errors: &ErrorSet,
    plan: &RecoveryPlan,
    coeffs: &[C64],
) -> Result<f64> {
    if coeffs.len() != code.logical_dim() {
        return Err(AqecError::DimMismatch(format!(
            "expected {} logical coefficients, got {}",
            code.logical_dim(),
            coeffs.len()
        )));
    }
    let norm: f64 = coeffs.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm <= 0.0 {
        return Err(AqecError::Domain("logical state must be nonzero".into()));
    }
    let c: Vec<C64> = coeffs.iter().map(|z| z / norm).collect();
    let blocks = fidelity_blocks(code, errors, plan)?;
    Ok(state_fidelity_from_blocks(&blocks, &c))
}

fn random_unit(rng: &mut ChaCha8Rng, kk: usize) -> Vec<C64> {
    loop {
        let c: Vec<C64> = (0..kk)
            .map(|_| {
                C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
            })
            .collect();
        let norm: f64 = c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            return c.into_iter().map(|z| z / norm).collect();
        }
    }
}

/// Minimum recovered fidelity over sampled logical states, without the
/// agreement check against the plan value.
pub fn fidelity_min_over_states(
    code: &CodeSpace,
    errors: &ErrorSet,
    plan: &RecoveryPlan,
    n_samples: usize,
    seed: u64,
) -> Result<f64> {
    let kk = code.logical_dim();
    let blocks = fidelity_blocks(code, errors, plan)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best_c = random_unit(&mut rng, kk);
    let mut best = state_fidelity_from_blocks(&blocks, &best_c);
    for _ in 1..n_samples.max(1) {
        let c = random_unit(&mut rng, kk);
        let f = state_fidelity_from_blocks(&blocks, &c);
        if f < best {
            best = f;
            best_c = c;
        }
    }
    // Local refinement around the worst sample: random perturbations with a
    // shrinking step, which only matters when the plan is input dependent.
    let mut step = 0.1;
    let mut stall = 0;
    for _ in 0..300 {
        let dir = random_unit(&mut rng, kk);
        let cand: Vec<C64> =
            best_c.iter().zip(&dir).map(|(a, d)| a + d * C64::new(step, 0.0)).collect();
        let norm: f64 = cand.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let cand: Vec<C64> = cand.into_iter().map(|z| z / norm).collect();
        let f = state_fidelity_from_blocks(&blocks, &cand);
        if f < best {
            best = f;
            best_c = cand;
            stall = 0;
        } else {
            stall += 1;
            if stall >= 15 {
                step *= 0.5;
                stall = 0;
            }
        }
    }
    Ok(best)
}

/// Independent numerical oracle for the worst-case fidelity: samples Haar
/// logical states, refines the minimum, and checks agreement with the plan
/// value, failing loudly when the plan is broken.
pub fn fidelity_oracle_min_over_states(
    code: &CodeSpace,
    errors: &ErrorSet,
    plan: &RecoveryPlan,
    n_restarts: usize,
) -> Result<f64> {
    let min = fidelity_min_over_states(code, errors, plan, n_restarts, 0x0a5e_c0de)?;
    let plan_value = worst_case_fidelity(plan);
    if (min - plan_value).abs() > ORACLE_TOL {
        return Err(AqecError::Decomposition(format!(
            "sampled worst-case fidelity {min:.12e} disagrees with the plan value \
             {plan_value:.12e}"
        )));
    }
    Ok(min)
}
