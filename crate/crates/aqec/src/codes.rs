//! Code families for amplitude damping: shift-orbit (self-complementary)
//! codes on qubits and qudits, pair-complementary codes, and the 0-2-4
//! binomial bosonic code, each in a fixed-coefficient and a
//! noise-strength-adapted variant.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use ndarray::Array1;

use crate::dit::DitString;
use crate::linalg::{c64, CVec, C64, DIM_CAP};
use crate::{AqecError, Result};

/// Tag identifying a constructible code family in sweeps and reports.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    Lncy,
    NsaSc,
    NonNsaSc,
    NsaPc,
    NsaScQudit,
    NonNsaScQudit,
    Binomial024,
    NsaBinomial024,
    Custom,
}

impl Family {
    pub const ALL: [Family; 8] = [
        Family::Lncy,
        Family::NsaSc,
        Family::NonNsaSc,
        Family::NsaPc,
        Family::NsaScQudit,
        Family::NonNsaScQudit,
        Family::Binomial024,
        Family::NsaBinomial024,
    ];

    pub fn tag(&self) -> &'static str {
        match self {
            Family::Lncy => "LNCY",
            Family::NsaSc => "NSA_SC",
            Family::NonNsaSc => "NONNSA_SC",
            Family::NsaPc => "NSA_PC",
            Family::NsaScQudit => "NSA_SC_QUDIT",
            Family::NonNsaScQudit => "NONNSA_SC_QUDIT",
            Family::Binomial024 => "BINOMIAL_024",
            Family::NsaBinomial024 => "NSA_BINOMIAL_024",
            Family::Custom => "CUSTOM",
        }
    }

    /// True when the codeword coefficients depend on the noise strength.
    pub fn is_adapted(&self) -> bool {
        matches!(
            self,
            Family::NsaSc | Family::NsaPc | Family::NsaScQudit | Family::NsaBinomial024
        )
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Family {
    type Err = AqecError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "LNCY" => Ok(Family::Lncy),
            "NSA_SC" => Ok(Family::NsaSc),
            "NONNSA_SC" => Ok(Family::NonNsaSc),
            "NSA_PC" => Ok(Family::NsaPc),
            "NSA_SC_QUDIT" => Ok(Family::NsaScQudit),
            "NONNSA_SC_QUDIT" => Ok(Family::NonNsaScQudit),
            "BINOMIAL_024" => Ok(Family::Binomial024),
            "NSA_BINOMIAL_024" => Ok(Family::NsaBinomial024),
            "CUSTOM" => Ok(Family::Custom),
            other => Err(AqecError::UnsupportedFamily(other.to_string())),
        }
    }
}

/// A sparse logical state: basis labels mapped to complex amplitudes.
#[derive(Clone, Debug, PartialEq)]
pub struct Codeword {
    n: usize,
    q: u8,
    amps: BTreeMap<DitString, C64>,
}

impl Codeword {
    pub fn from_terms(n: usize, q: u8, terms: &[(DitString, C64)]) -> Result<Self> {
        let mut amps = BTreeMap::new();
        for (label, amp) in terms {
            if label.n() != n || label.q() != q {
                return Err(AqecError::DimMismatch(format!(
                    "basis label {label} does not live on {n} sites of dimension {q}"
                )));
            }
            if amp.norm() > 0.0 {
                *amps.entry(label.clone()).or_insert(c64(0.0, 0.0)) += *amp;
            }
        }
        Ok(Codeword { n, q, amps })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> u8 {
        self.q
    }

    pub fn terms(&self) -> impl Iterator<Item = (&DitString, &C64)> {
        self.amps.iter()
    }

    pub fn amp(&self, label: &DitString) -> C64 {
        self.amps.get(label).copied().unwrap_or_else(|| c64(0.0, 0.0))
    }

    pub fn support(&self) -> Vec<&DitString> {
        self.amps.keys().collect()
    }

    pub fn norm(&self) -> f64 {
        self.amps.values().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn inner(&self, other: &Codeword) -> C64 {
        let mut acc = c64(0.0, 0.0);
        for (label, a) in &self.amps {
            if let Some(b) = other.amps.get(label) {
                acc += a.conj() * b;
            }
        }
        acc
    }

    pub fn normalized(&self) -> Result<Codeword> {
        let norm = self.norm();
        if norm <= 0.0 {
            return Err(AqecError::Domain("cannot normalize the zero state".into()));
        }
        let mut out = self.clone();
        for amp in out.amps.values_mut() {
            *amp /= norm;
        }
        Ok(out)
    }

    /// Dense statevector with site 1 most significant.
    pub fn to_vec(&self) -> Result<CVec> {
        let dim = (self.q as usize)
            .checked_pow(self.n as u32)
            .ok_or(AqecError::DimCap { got: usize::MAX, cap: DIM_CAP })?;
        if dim > DIM_CAP {
            return Err(AqecError::DimCap { got: dim, cap: DIM_CAP });
        }
        let mut v: CVec = Array1::zeros(dim);
        for (label, amp) in &self.amps {
            v[label.index()] += *amp;
        }
        Ok(v)
    }

    /// Sparsifies a dense statevector, dropping amplitudes below `tol`.
    pub fn from_vec(v: &CVec, n: usize, q: u8, tol: f64) -> Result<Codeword> {
        let dim = (q as usize)
            .checked_pow(n as u32)
            .ok_or(AqecError::DimCap { got: usize::MAX, cap: DIM_CAP })?;
        if v.len() != dim {
            return Err(AqecError::DimMismatch(format!(
                "vector length {} does not match {q}^{n} = {dim}",
                v.len()
            )));
        }
        let mut amps = BTreeMap::new();
        for (idx, amp) in v.iter().enumerate() {
            if amp.norm() > tol {
                amps.insert(DitString::from_index(idx, n, q)?, *amp);
            }
        }
        Ok(Codeword { n, q, amps })
    }
}

/// An orthonormal set of logical states defining a code subspace.
#[derive(Clone, Debug)]
pub struct CodeSpace {
    pub family: Family,
    pub n: usize,
    pub q: u8,
    /// Noise strength the coefficients were adapted to; zero for fixed codes.
    pub gamma: f64,
    codewords: Vec<Codeword>,
}

const ORTHO_TOL: f64 = 1e-12;

impl CodeSpace {
    pub fn new(
        family: Family,
        n: usize,
        q: u8,
        gamma: f64,
        codewords: Vec<Codeword>,
    ) -> Result<Self> {
        if codewords.is_empty() {
            return Err(AqecError::InvalidBasis("code has no logical states".into()));
        }
        for w in &codewords {
            if w.n() != n || w.q() != q {
                return Err(AqecError::DimMismatch(format!(
                    "codeword on {} sites of dimension {} inside a ({n}, {q}) code",
                    w.n(),
                    w.q()
                )));
            }
        }
        for i in 0..codewords.len() {
            for j in i..codewords.len() {
                let overlap = codewords[i].inner(&codewords[j]);
                let target = if i == j { 1.0 } else { 0.0 };
                if (overlap - target).norm() > ORTHO_TOL {
                    return Err(AqecError::InvalidBasis(format!(
                        "logical states {i} and {j} have overlap {overlap} (want {target})"
                    )));
                }
            }
        }
        Ok(CodeSpace { family, n, q, gamma, codewords })
    }

    pub fn codewords(&self) -> &[Codeword] {
        &self.codewords
    }

    pub fn logical_dim(&self) -> usize {
        self.codewords.len()
    }

    /// Number of logical qudits: log_q of the logical dimension.
    pub fn k(&self) -> usize {
        let mut k = 0usize;
        let mut m = 1usize;
        while m * (self.q as usize) <= self.logical_dim() {
            m *= self.q as usize;
            k += 1;
        }
        k
    }

    pub fn state_vecs(&self) -> Result<Vec<CVec>> {
        self.codewords.iter().map(|w| w.to_vec()).collect()
    }
}

fn check_code_gamma(gamma: f64) -> Result<()> {
    if !(0.0..1.0).contains(&gamma) {
        return Err(AqecError::Domain(format!(
            "adapted coefficients need gamma = {gamma} in [0, 1)"
        )));
    }
    Ok(())
}

/// The constant-shift orbit of a label: u, u+1, ..., u+(q-1) digitwise mod q.
pub fn shift_orbit(rep: &DitString) -> Vec<DitString> {
    (0..rep.q()).map(|a| rep.shifted(a)).collect()
}

/// All basis labels reachable from any orbit member by lowering one site by
/// any number of levels.
fn lowered_set(orbit: &[DitString]) -> BTreeSet<DitString> {
    let mut out = BTreeSet::new();
    for member in orbit {
        for site in 0..member.n() {
            for level in 1..=member.digit(site) {
                if let Some(lowered) = member.lowered(site, level) {
                    out.insert(lowered);
                }
            }
        }
    }
    out
}

/// A validated set of shift-orbit classes usable as a code basis.
///
/// Validity requires, for every pair of classes X and Y: disjoint orbits,
/// disjoint one-site-lowered sets, and no lowered state of X landing on a
/// basis state of Y (including X = Y). The last check is what rejects the
/// two-site basis {00, 01}: lowering 01 or 10 reproduces the codeword
/// state 00.
#[derive(Clone, Debug)]
pub struct SCBasisSet {
    n: usize,
    q: u8,
    classes: Vec<Vec<DitString>>,
}

impl SCBasisSet {
    pub fn new(n: usize, q: u8, reps: Vec<DitString>) -> Result<Self> {
        if reps.is_empty() {
            return Err(AqecError::InvalidBasis("basis has no classes".into()));
        }
        for rep in &reps {
            if rep.n() != n || rep.q() != q {
                return Err(AqecError::DimMismatch(format!(
                    "class representative {rep} does not live on {n} sites of dimension {q}"
                )));
            }
        }
        let classes: Vec<Vec<DitString>> = reps.iter().map(shift_orbit).collect();
        let orbits: Vec<BTreeSet<DitString>> =
            classes.iter().map(|c| c.iter().cloned().collect()).collect();
        let lowered: Vec<BTreeSet<DitString>> = classes.iter().map(|c| lowered_set(c)).collect();

        for (i, orbit) in orbits.iter().enumerate() {
            if orbit.len() != q as usize {
                return Err(AqecError::InvalidBasis(format!(
                    "class {} has {} distinct members, expected {q}",
                    reps[i],
                    orbit.len()
                )));
            }
        }
        for i in 0..classes.len() {
            for j in 0..classes.len() {
                if i != j && !orbits[i].is_disjoint(&orbits[j]) {
                    return Err(AqecError::InvalidBasis(format!(
                        "classes {} and {} share a basis state",
                        reps[i], reps[j]
                    )));
                }
                if i < j && !lowered[i].is_disjoint(&lowered[j]) {
                    return Err(AqecError::InvalidBasis(format!(
                        "classes {} and {} share a one-jump error state",
                        reps[i], reps[j]
                    )));
                }
                if !lowered[i].is_disjoint(&orbits[j]) {
                    return Err(AqecError::InvalidBasis(format!(
                        "a one-jump error of class {} lands on a basis state of class {}",
                        reps[i], reps[j]
                    )));
                }
            }
        }
        Ok(SCBasisSet { n, q, classes })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> u8 {
        self.q
    }

    pub fn classes(&self) -> &[Vec<DitString>] {
        &self.classes
    }

    pub fn reps(&self) -> Vec<&DitString> {
        self.classes.iter().map(|c| &c[0]).collect()
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    /// Logical qudit count when this basis is used as a code: log_q of the
    /// class count, rounded down.
    pub fn k(&self) -> usize {
        let mut k = 0usize;
        let mut m = 1usize;
        while m * (self.q as usize) <= self.num_classes() {
            m *= self.q as usize;
            k += 1;
        }
        k
    }
}

fn pair_compatible(
    orbit_a: &BTreeSet<DitString>,
    lowered_a: &BTreeSet<DitString>,
    orbit_b: &BTreeSet<DitString>,
    lowered_b: &BTreeSet<DitString>,
) -> bool {
    orbit_a.is_disjoint(orbit_b)
        && lowered_a.is_disjoint(lowered_b)
        && lowered_a.is_disjoint(orbit_b)
        && lowered_b.is_disjoint(orbit_a)
}

/// Searches for a largest set of mutually compatible shift-orbit classes on
/// n sites of local dimension q, then trims it to a power of q so the result
/// carries an integer number of logical qudits.
///
/// Candidates are scanned with the all-zero class first, then by increasing
/// weight spread of the orbit and lexicographic representative; the first
/// maximum clique in that order is kept, so results are deterministic. With
/// `k_target` set, the search stops as soon as q^k_target classes are found
/// and fails if no such set exists.
pub fn search_sc_basis(n: usize, q: u8, k_target: Option<usize>) -> Result<SCBasisSet> {
    if n < 2 {
        return Err(AqecError::Domain("basis search needs at least two sites".into()));
    }
    let cap = match q {
        2 => 10,
        3 => 6,
        other => {
            return Err(AqecError::Domain(format!(
                "basis search supports local dimension 2 or 3, got {other}"
            )))
        }
    };
    if n > cap {
        return Err(AqecError::Domain(format!(
            "basis search at local dimension {q} is capped at {cap} sites, got {n}"
        )));
    }

    // One representative per orbit: the lexicographically least member.
    let mut reps: Vec<DitString> = Vec::new();
    for u in DitString::all(n, q)? {
        if shift_orbit(&u).iter().all(|m| *m >= u) {
            reps.push(u);
        }
    }
    let mut candidates: Vec<(Vec<DitString>, BTreeSet<DitString>, BTreeSet<DitString>)> = reps
        .into_iter()
        .map(|rep| {
            let orbit = shift_orbit(&rep);
            let orbit_set: BTreeSet<DitString> = orbit.iter().cloned().collect();
            let lowered = lowered_set(&orbit);
            (orbit, orbit_set, lowered)
        })
        .filter(|(_, orbit_set, lowered)| lowered.is_disjoint(orbit_set))
        .collect();
    candidates.sort_by_key(|(orbit, _, _)| {
        let weights: Vec<usize> = orbit.iter().map(|m| m.weight()).collect();
        let spread = weights.iter().max().unwrap() - weights.iter().min().unwrap();
        let all_zero = orbit[0].weight() != 0;
        (all_zero, spread, orbit[0].clone())
    });

    let adj: Vec<Vec<bool>> = (0..candidates.len())
        .map(|i| {
            (0..candidates.len())
                .map(|j| {
                    i != j
                        && pair_compatible(
                            &candidates[i].1,
                            &candidates[i].2,
                            &candidates[j].1,
                            &candidates[j].2,
                        )
                })
                .collect()
        })
        .collect();

    let stop_at = k_target.map(|k| (q as usize).pow(k as u32));
    let mut best: Vec<usize> = Vec::new();
    let mut current: Vec<usize> = Vec::new();

    fn dfs(
        start: usize,
        allowed: &[usize],
        adj: &[Vec<bool>],
        current: &mut Vec<usize>,
        best: &mut Vec<usize>,
        stop_at: Option<usize>,
    ) -> bool {
        if current.len() > best.len() {
            *best = current.clone();
            if let Some(target) = stop_at {
                if best.len() >= target {
                    return true;
                }
            }
        }
        for (pos, &cand) in allowed.iter().enumerate() {
            if cand < start {
                continue;
            }
            // Even taking every remaining candidate cannot beat the best.
            if current.len() + (allowed.len() - pos) <= best.len() {
                break;
            }
            let next: Vec<usize> =
                allowed[pos + 1..].iter().copied().filter(|&j| adj[cand][j]).collect();
            current.push(cand);
            if dfs(cand + 1, &next, adj, current, best, stop_at) {
                return true;
            }
            current.pop();
        }
        false
    }

    let all: Vec<usize> = (0..candidates.len()).collect();
    dfs(0, &all, &adj, &mut current, &mut best, stop_at);

    if best.is_empty() {
        return Err(AqecError::Infeasible(format!(
            "no valid class exists on {n} sites of dimension {q}"
        )));
    }
    if let Some(target) = stop_at {
        if best.len() < target {
            return Err(AqecError::Infeasible(format!(
                "found at most {} compatible classes on {n} sites, need {target}",
                best.len()
            )));
        }
        best.truncate(target);
    } else {
        // Trim to the largest power of q that fits.
        let mut keep = 1usize;
        while keep * (q as usize) <= best.len() {
            keep *= q as usize;
        }
        best.truncate(keep);
    }
    let reps: Vec<DitString> = best.iter().map(|&i| candidates[i].0[0].clone()).collect();
    SCBasisSet::new(n, q, reps)
}

/// The fixed family of q shift-orbit classes underlying the closed-form
/// qudit fidelity expressions. For q dividing n the representatives are
/// j * (equal blocks of digits 0..q-1) digitwise mod q; otherwise digit j is
/// placed on the last floor(n/2) sites.
///
/// These classes span an orthonormal codeword set (orbits are pairwise
/// disjoint), but for q >= 4 their multi-level single-site errors collide
/// across classes, so they do not support a syndrome-filter recovery and are
/// returned as plain class lists rather than a validated basis.
pub fn canonical_shift_classes(n: usize, q: u8) -> Result<Vec<Vec<DitString>>> {
    if n < 2 {
        return Err(AqecError::Domain("need at least two sites".into()));
    }
    if q < 2 {
        return Err(AqecError::Domain(format!("local dimension {q} must be >= 2")));
    }
    let qs = q as usize;
    let reps: Vec<DitString> = if n % qs == 0 {
        let block = n / qs;
        let mut base = Vec::with_capacity(n);
        for d in 0..q {
            base.extend(std::iter::repeat(d).take(block));
        }
        (0..q)
            .map(|j| {
                let digits: Vec<u8> =
                    base.iter().map(|&d| ((d as usize * j as usize) % qs) as u8).collect();
                DitString::new(digits, q)
            })
            .collect::<Result<Vec<_>>>()?
    } else {
        let tail = n / 2;
        (0..q)
            .map(|j| {
                let mut digits = vec![0u8; n];
                for d in digits.iter_mut().skip(n - tail) {
                    *d = j;
                }
                DitString::new(digits, q)
            })
            .collect::<Result<Vec<_>>>()?
    };
    let mut classes = Vec::with_capacity(reps.len());
    let mut seen = BTreeSet::new();
    for rep in reps {
        let mut orbit = shift_orbit(&rep);
        orbit.sort();
        for member in &orbit {
            if !seen.insert(member.clone()) {
                return Err(AqecError::InvalidBasis(format!(
                    "canonical classes on {n} sites of dimension {q} are not disjoint"
                )));
            }
        }
        classes.push(orbit);
    }
    Ok(classes)
}

/// Builds one shift-orbit codeword: an equal superposition for the fixed
/// variant, or weight-dependent coefficients (1-gamma)^(-|v|/2) for the
/// adapted variant.
fn orbit_codeword(class: &[DitString], gamma: f64, adapted: bool) -> Result<Codeword> {
    let n = class[0].n();
    let q = class[0].q();
    let terms: Vec<(DitString, C64)> = class
        .iter()
        .map(|member| {
            let coeff = if adapted {
                (1.0 - gamma).powf(-(member.weight() as f64) / 2.0)
            } else {
                1.0
            };
            (member.clone(), c64(coeff, 0.0))
        })
        .collect();
    Codeword::from_terms(n, q, &terms)?.normalized()
}

fn sc_code_from_basis(
    family: Family,
    basis: &SCBasisSet,
    gamma: f64,
    adapted: bool,
) -> Result<CodeSpace> {
    let codewords = basis
        .classes()
        .iter()
        .map(|class| orbit_codeword(class, gamma, adapted))
        .collect::<Result<Vec<_>>>()?;
    CodeSpace::new(family, basis.n(), basis.q(), if adapted { gamma } else { 0.0 }, codewords)
}

/// The fixed 4-qubit code with codewords (|0000> + |1111>)/sqrt(2) and
/// (|0011> + |1100>)/sqrt(2).
pub fn lncy_code() -> Result<CodeSpace> {
    let basis = search_sc_basis(4, 2, None)?;
    sc_code_from_basis(Family::Lncy, &basis, 0.0, false)
}

/// Noise-adapted shift-orbit qubit code on the given basis.
pub fn nsa_sc_code(basis: &SCBasisSet, gamma: f64) -> Result<CodeSpace> {
    check_code_gamma(gamma)?;
    require_qubits(basis)?;
    sc_code_from_basis(Family::NsaSc, basis, gamma, true)
}

/// Fixed-coefficient counterpart of [`nsa_sc_code`] on the same basis.
pub fn nonnsa_sc_code(basis: &SCBasisSet) -> Result<CodeSpace> {
    require_qubits(basis)?;
    sc_code_from_basis(Family::NonNsaSc, basis, 0.0, false)
}

/// Noise-adapted shift-orbit qudit code on the given basis.
pub fn nsa_sc_qudit_code(basis: &SCBasisSet, gamma: f64) -> Result<CodeSpace> {
    check_code_gamma(gamma)?;
    sc_code_from_basis(Family::NsaScQudit, basis, gamma, true)
}

/// Fixed-coefficient counterpart of [`nsa_sc_qudit_code`].
pub fn nonnsa_sc_qudit_code(basis: &SCBasisSet) -> Result<CodeSpace> {
    sc_code_from_basis(Family::NonNsaScQudit, basis, 0.0, false)
}

fn require_qubits(basis: &SCBasisSet) -> Result<()> {
    if basis.q() != 2 {
        return Err(AqecError::DimMismatch(format!(
            "qubit family given a basis of local dimension {}",
            basis.q()
        )));
    }
    Ok(())
}

/// Noise-adapted pair-complementary code, built by extending each
/// shift-orbit class of the given (n-2)-qubit basis with a two-qubit suffix.
/// Codewords come in an unprimed block (suffixes 00 and 11 on the class
/// representative u, minus suffixes 10 and 01 on its complement) followed by
/// a primed block (all plus signs on the complementary suffix pattern).
pub fn nsa_pc_code(inner_basis: &SCBasisSet, gamma: f64) -> Result<CodeSpace> {
    check_code_gamma(gamma)?;
    require_qubits(inner_basis)?;
    let n = inner_basis.n() + 2;
    let weighted = |u: &DitString, suffix: &[u8], sign: f64| -> Result<(DitString, C64)> {
        let label = u.appended(suffix)?;
        let coeff = (1.0 - gamma).powf(-(label.weight() as f64) / 2.0);
        Ok((label, c64(sign * coeff, 0.0)))
    };
    let mut unprimed = Vec::new();
    let mut primed = Vec::new();
    for class in inner_basis.classes() {
        let u = &class[0];
        let tu = u.complement();
        let psi = Codeword::from_terms(
            n,
            2,
            &[
                weighted(u, &[0, 0], 1.0)?,
                weighted(u, &[1, 1], 1.0)?,
                weighted(&tu, &[1, 0], -1.0)?,
                weighted(&tu, &[0, 1], -1.0)?,
            ],
        )?
        .normalized()?;
        let psi_prime = Codeword::from_terms(
            n,
            2,
            &[
                weighted(u, &[0, 1], 1.0)?,
                weighted(u, &[1, 0], 1.0)?,
                weighted(&tu, &[1, 1], 1.0)?,
                weighted(&tu, &[0, 0], 1.0)?,
            ],
        )?
        .normalized()?;
        unprimed.push(psi);
        primed.push(psi_prime);
    }
    let mut codewords = unprimed;
    codewords.append(&mut primed);
    CodeSpace::new(Family::NsaPc, n, 2, gamma, codewords)
}

/// Searches the two-class qubit basis on n sites and builds the adapted
/// one-logical-qubit code. The early-stopping search keeps construction
/// polynomial in the orbit count, where proving basis maximality is not.
pub fn nsa_sc_code_for(n: usize, gamma: f64) -> Result<CodeSpace> {
    nsa_sc_code(&search_sc_basis(n, 2, Some(1))?, gamma)
}

/// Searches the two-class qubit basis on n sites and builds the fixed
/// one-logical-qubit code.
pub fn nonnsa_sc_code_for(n: usize) -> Result<CodeSpace> {
    nonnsa_sc_code(&search_sc_basis(n, 2, Some(1))?)
}

/// Searches the q-class basis on n sites of dimension q (q in {2, 3}) and
/// builds the adapted one-logical-qudit code.
pub fn nsa_sc_qudit_code_for(n: usize, q: u8, gamma: f64) -> Result<CodeSpace> {
    nsa_sc_qudit_code(&search_sc_basis(n, q, Some(1))?, gamma)
}

/// Searched-basis counterpart of [`nonnsa_sc_qudit_code`].
pub fn nonnsa_sc_qudit_code_for(n: usize, q: u8) -> Result<CodeSpace> {
    nonnsa_sc_qudit_code(&search_sc_basis(n, q, Some(1))?)
}

/// Searches the (n-2)-qubit basis and builds the pair-complementary code on
/// n qubits.
pub fn nsa_pc_code_for(n: usize, gamma: f64) -> Result<CodeSpace> {
    if n < 4 {
        return Err(AqecError::Domain(format!(
            "pair-complementary codes need at least 4 qubits, got {n}"
        )));
    }
    nsa_pc_code(&search_sc_basis(n - 2, 2, None)?, gamma)
}

/// Fock-space cutoff used by the 0-2-4 binomial constructors.
pub const BINOMIAL_CUTOFF: usize = 6;

/// The 0-2-4 binomial code on one bosonic mode: |2> encodes one logical
/// state, and the other superposes |0> and |4> with a fixed coefficient or
/// the noise-adapted coefficient (1-gamma)^(-2).
pub fn binomial_code(gamma: f64, adapted: bool) -> Result<CodeSpace> {
    if adapted {
        check_code_gamma(gamma)?;
    }
    let q = BINOMIAL_CUTOFF as u8;
    let coeff = if adapted { (1.0 - gamma).powi(-2) } else { 1.0 };
    let zero = Codeword::from_terms(
        1,
        q,
        &[
            (DitString::new(vec![0], q)?, c64(1.0, 0.0)),
            (DitString::new(vec![4], q)?, c64(coeff, 0.0)),
        ],
    )?
    .normalized()?;
    let one = Codeword::from_terms(1, q, &[(DitString::new(vec![2], q)?, c64(1.0, 0.0))])?;
    let family = if adapted { Family::NsaBinomial024 } else { Family::Binomial024 };
    CodeSpace::new(family, 1, q, if adapted { gamma } else { 0.0 }, vec![zero, one])
}
