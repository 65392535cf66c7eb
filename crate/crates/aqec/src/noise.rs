//! Single-site amplitude-damping Kraus families (qubit, qudit, truncated
//! bosonic) and the weight-bounded independent error sets built from them.

use ndarray::Array2;

use crate::dit::DitString;
use crate::linalg::{c64, tensor, CMat, DIM_CAP};
use crate::{AqecError, Result};

/// The Kraus family of one site: jump level l paired with its q x q operator.
#[derive(Clone, Debug)]
pub struct SiteKrausFamily {
    pub q: usize,
    pub gamma: f64,
    pub ops: Vec<(usize, CMat)>,
}

impl SiteKrausFamily {
    pub fn op(&self, level: usize) -> Option<&CMat> {
        self.ops.iter().find(|(l, _)| *l == level).map(|(_, m)| m)
    }

    /// Max-norm of sum_l A_l^dag A_l - I; zero for untruncated families.
    pub fn completeness_defect(&self) -> Result<f64> {
        let mats: Vec<CMat> = self.ops.iter().map(|(_, m)| m.clone()).collect();
        crate::linalg::kraus_defect(&mats)
    }
}

/// Labeled weight-<=t error operators E_a on n sites.
#[derive(Clone, Debug)]
pub struct ErrorSet {
    pub n: usize,
    pub t: usize,
    pub q: usize,
    pub gamma: f64,
    pub kraus: Vec<(DitString, CMat)>,
}

impl ErrorSet {
    pub fn len(&self) -> usize {
        self.kraus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kraus.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.kraus.first().map(|(_, m)| m.nrows()).unwrap_or(0)
    }

    pub fn get(&self, label: &DitString) -> Option<&CMat> {
        self.kraus.iter().find(|(l, _)| l == label).map(|(_, m)| m)
    }
}

pub(crate) fn binom(a: usize, l: usize) -> f64 {
    if l > a {
        return 0.0;
    }
    let mut acc = 1.0;
    for i in 0..l {
        acc = acc * (a - i) as f64 / (i + 1) as f64;
    }
    acc
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(AqecError::Domain(format!("decay rate gamma = {gamma} outside [0, 1]")));
    }
    Ok(())
}

/// Amplitude-damping family on a q-level site: A_l lowers by l levels with
/// entry <a-l| A_l |a> = sqrt(C(a,l)) sqrt((1-gamma)^(a-l) gamma^l).
pub fn qudit_ad(q: usize, gamma: f64) -> Result<SiteKrausFamily> {
    if q < 2 {
        return Err(AqecError::Domain(format!("local dimension {q} must be >= 2")));
    }
    check_gamma(gamma)?;
    let mut ops = Vec::with_capacity(q);
    for l in 0..q {
        let mut m: CMat = Array2::zeros((q, q));
        for a in l..q {
            let amp = (binom(a, l) * (1.0 - gamma).powi((a - l) as i32) * gamma.powi(l as i32))
                .sqrt();
            m[(a - l, a)] = c64(amp, 0.0);
        }
        ops.push((l, m));
    }
    Ok(SiteKrausFamily { q, gamma, ops })
}

/// The qubit special case: A0 = |0><0| + sqrt(1-gamma)|1><1|,
/// A1 = sqrt(gamma)|0><1|.
pub fn qubit_ad(gamma: f64) -> Result<SiteKrausFamily> {
    qudit_ad(2, gamma)
}

/// Photon-loss family on a Fock space truncated to dimension `cutoff`,
/// keeping jump operators up to level `lmax`. Matrix entries coincide with
/// the qudit family at q = cutoff; the truncation at lmax leaves a
/// completeness deficit of order gamma^(lmax+1).
pub fn bosonic_ad(cutoff: usize, gamma: f64, lmax: usize) -> Result<SiteKrausFamily> {
    if cutoff < 5 {
        return Err(AqecError::Domain(format!(
            "Fock cutoff {cutoff} too small: the 0-2-4 code needs dimension >= 5"
        )));
    }
    if lmax < 1 || lmax >= cutoff {
        return Err(AqecError::Domain(format!("jump cap lmax = {lmax} outside [1, cutoff)")));
    }
    let full = qudit_ad(cutoff, gamma)?;
    let ops = full.ops.into_iter().take(lmax + 1).collect();
    Ok(SiteKrausFamily { q: cutoff, gamma, ops })
}

/// Builds the ordered error set {E_a} of all site-jump patterns with at most
/// `t` jumped sites, one tensor factor per site with site 1 most significant.
///
/// Labels are ordered by (number of jumped sites, site-major position, level
/// ascending), so the single-jump block reads 1000, 0100, 0010, 0001 on four
/// qubits.
pub fn build_error_set(family: &SiteKrausFamily, n: usize, t: usize) -> Result<ErrorSet> {
    if n == 0 {
        return Err(AqecError::Domain("need at least one site".into()));
    }
    if t > n {
        return Err(AqecError::Domain(format!("jump weight cap {t} exceeds site count {n}")));
    }
    let q = family.q;
    match q.checked_pow(n as u32) {
        Some(d) if d <= DIM_CAP => {}
        Some(d) => return Err(AqecError::DimCap { got: d, cap: DIM_CAP }),
        None => return Err(AqecError::DimCap { got: usize::MAX, cap: DIM_CAP }),
    }
    let levels: Vec<usize> = family.ops.iter().map(|(l, _)| *l).filter(|&l| l > 0).collect();

    let mut labels: Vec<DitString> = Vec::new();
    let mut digits = vec![0u8; n];
    fn rec(
        digits: &mut Vec<u8>,
        site: usize,
        jumps_left: usize,
        levels: &[usize],
        q: u8,
        out: &mut Vec<DitString>,
    ) {
        if site == digits.len() {
            out.push(DitString::new(digits.clone(), q).expect("digits validated by construction"));
            return;
        }
        digits[site] = 0;
        rec(digits, site + 1, jumps_left, levels, q, out);
        if jumps_left > 0 {
            for &l in levels {
                digits[site] = l as u8;
                rec(digits, site + 1, jumps_left - 1, levels, q, out);
            }
            digits[site] = 0;
        }
    }
    rec(&mut digits, 0, t, &levels, q as u8, &mut labels);
    // Site-major order: earlier sites vary slowest, so sort on the reversed
    // digit string after grouping by jump count.
    labels.sort_by_key(|u| {
        let mut rev = u.digits().to_vec();
        rev.reverse();
        (u.jump_count(), rev)
    });

    let mut kraus = Vec::with_capacity(labels.len());
    for label in labels {
        let factors: Vec<CMat> = label
            .digits()
            .iter()
            .map(|&d| {
                family
                    .op(d as usize)
                    .cloned()
                    .ok_or_else(|| AqecError::Domain(format!("family lacks jump level {d}")))
            })
            .collect::<Result<Vec<CMat>>>()?;
        let e = crate::linalg::tensor_all(&factors)?;
        kraus.push((label, e));
    }
    Ok(ErrorSet { n, t, q, gamma: family.gamma, kraus })
}

/// Convenience: the identity factor count check used by tensor builders.
pub fn tensor_power(op: &CMat, n: usize) -> Result<CMat> {
    let mut acc = op.clone();
    for _ in 1..n {
        acc = tensor(&acc, op)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn qubit_family_at_zero_damping_is_identity_plus_null() {
        let fam = qubit_ad(0.0).unwrap();
        let a0 = fam.op(0).unwrap();
        let a1 = fam.op(1).unwrap();
        assert_abs_diff_eq!(a0[(0, 0)].re, 1.0, epsilon = 0.0);
        assert_abs_diff_eq!(a0[(1, 1)].re, 1.0, epsilon = 0.0);
        assert_abs_diff_eq!(crate::linalg::max_norm(a1), 0.0, epsilon = 0.0);
    }

    #[test]
    fn qubit_family_at_full_decay() {
        let fam = qubit_ad(1.0).unwrap();
        let a0 = fam.op(0).unwrap();
        let a1 = fam.op(1).unwrap();
        assert_abs_diff_eq!(a0[(0, 0)].re, 1.0, epsilon = 0.0);
        assert_abs_diff_eq!(a0[(1, 1)].re, 0.0, epsilon = 0.0);
        assert_abs_diff_eq!(a1[(0, 1)].re, 1.0, epsilon = 0.0);
    }

    #[test]
    fn qubit_entries_at_gamma_036() {
        let fam = qubit_ad(0.36).unwrap();
        assert_abs_diff_eq!(fam.op(0).unwrap()[(1, 1)].re, 0.8, epsilon = 1e-15);
        assert_abs_diff_eq!(fam.op(1).unwrap()[(0, 1)].re, 0.6, epsilon = 1e-15);
    }

    #[test]
    fn qutrit_jump_operators_match_closed_forms() {
        let g = 0.2;
        let fam = qudit_ad(3, g).unwrap();
        let a1 = fam.op(1).unwrap();
        assert_abs_diff_eq!(a1[(0, 1)].re, g.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(a1[(1, 2)].re, (2.0 * g * (1.0 - g)).sqrt(), epsilon = 1e-15);
        let a2 = fam.op(2).unwrap();
        assert_abs_diff_eq!(a2[(0, 2)].re, g, epsilon = 1e-15);
        let a0 = fam.op(0).unwrap();
        assert_abs_diff_eq!(a0[(2, 2)].re, 1.0 - g, epsilon = 1e-15);
    }

    #[test]
    fn qudit_reduces_to_qubit_at_q_two() {
        let g = 0.17;
        let qb = qubit_ad(g).unwrap();
        let qd = qudit_ad(2, g).unwrap();
        for l in 0..2 {
            let diff = qb.op(l).unwrap() - qd.op(l).unwrap();
            assert_abs_diff_eq!(crate::linalg::max_norm(&diff), 0.0, epsilon = 0.0);
        }
    }

    #[test]
    fn qudit_family_is_complete() {
        for &q in &[2usize, 3, 5, 6] {
            let fam = qudit_ad(q, 0.1).unwrap();
            assert!(fam.completeness_defect().unwrap() < 1e-12, "q = {q}");
        }
    }

    #[test]
    fn subdiagonal_structure_holds() {
        let fam = qudit_ad(5, 0.3).unwrap();
        for (l, m) in &fam.ops {
            for a in 0..5 {
                for b in 0..5 {
                    if m[(a, b)].norm() > 0.0 {
                        assert_eq!(b - a, *l);
                    }
                }
            }
        }
    }

    #[test]
    fn bosonic_entries_match_ladder_algebra() {
        let g = 0.1;
        let fam = bosonic_ad(6, g, 1).unwrap();
        assert_eq!(fam.ops.len(), 2);
        let a0 = fam.op(0).unwrap();
        // (1-gamma)^(n/2) on the diagonal.
        assert_abs_diff_eq!(a0[(0, 0)].re, 1.0, epsilon = 0.0);
        assert_abs_diff_eq!(a0[(2, 2)].re, 1.0 - g, epsilon = 1e-15);
        let a1 = fam.op(1).unwrap();
        // A1|4> = 2 sqrt(gamma) (1-gamma)^(3/2) |3>.
        assert_abs_diff_eq!(
            a1[(3, 4)].re,
            2.0 * g.sqrt() * (1.0 - g).powf(1.5),
            epsilon = 1e-15
        );
        // Truncation leaves an O(gamma^2) completeness deficit.
        let defect = fam.completeness_defect().unwrap();
        assert!(defect > 0.0 && defect < 10.0 * g * g);
    }

    #[test]
    fn bosonic_rejects_small_cutoff() {
        assert!(bosonic_ad(4, 0.1, 1).is_err());
    }

    #[test]
    fn qubit_error_set_orders_single_jumps_site_major() {
        let fam = qubit_ad(0.25).unwrap();
        let errs = build_error_set(&fam, 4, 1).unwrap();
        let labels: Vec<String> = errs.kraus.iter().map(|(l, _)| l.to_string()).collect();
        assert_eq!(labels, vec!["0000", "1000", "0100", "0010", "0001"]);
    }

    #[test]
    fn single_site_error_set_is_the_bare_family() {
        let fam = qubit_ad(0.3).unwrap();
        let errs = build_error_set(&fam, 1, 1).unwrap();
        assert_eq!(errs.len(), 2);
        let diff0 = &errs.kraus[0].1 - fam.op(0).unwrap();
        let diff1 = &errs.kraus[1].1 - fam.op(1).unwrap();
        assert_abs_diff_eq!(crate::linalg::max_norm(&diff0), 0.0, epsilon = 0.0);
        assert_abs_diff_eq!(crate::linalg::max_norm(&diff1), 0.0, epsilon = 0.0);
    }

    #[test]
    fn qutrit_error_set_counts_all_levels() {
        let fam = qudit_ad(3, 0.1).unwrap();
        let errs = build_error_set(&fam, 4, 1).unwrap();
        assert_eq!(errs.len(), 9);
        let labels: Vec<String> = errs.kraus.iter().map(|(l, _)| l.to_string()).collect();
        assert_eq!(labels[0], "0000");
        assert_eq!(labels[1], "1000");
        assert_eq!(labels[2], "2000");
        assert_eq!(labels[3], "0100");
        assert_eq!(labels[8], "0002");
    }

    #[test]
    fn error_operators_are_tensor_products_per_label() {
        let g = 0.2;
        let fam = qubit_ad(g).unwrap();
        let errs = build_error_set(&fam, 2, 1).unwrap();
        let e10 = errs.get(&DitString::parse("10", 2).unwrap()).unwrap();
        let expect =
            crate::linalg::tensor(fam.op(1).unwrap(), fam.op(0).unwrap()).unwrap();
        assert_abs_diff_eq!(crate::linalg::max_norm(&(e10 - &expect)), 0.0, epsilon = 0.0);
        // Under the site-major index convention the 10-jump amplitudes sit at
        // columns with the first qubit excited.
        assert_abs_diff_eq!(e10[(0, 2)].re, g.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(e10[(1, 3)].re, (g * (1.0 - g)).sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn weight_two_error_sets_include_double_jumps() {
        let fam = qubit_ad(0.1).unwrap();
        let errs = build_error_set(&fam, 3, 2).unwrap();
        // 1 + 3 singles + 3 doubles.
        assert_eq!(errs.len(), 7);
        assert_eq!(errs.kraus[4].0.to_string(), "110");
        assert_eq!(errs.kraus[5].0.to_string(), "101");
        assert_eq!(errs.kraus[6].0.to_string(), "011");
    }

    #[test]
    fn truncated_error_set_defect_scales_beyond_t() {
        let fam = qubit_ad(1e-2).unwrap();
        let errs = build_error_set(&fam, 3, 1).unwrap();
        let mats: Vec<CMat> = errs.kraus.iter().map(|(_, m)| m.clone()).collect();
        let defect_small = crate::linalg::kraus_defect(&mats).unwrap();
        let fam2 = qubit_ad(1e-1).unwrap();
        let errs2 = build_error_set(&fam2, 3, 1).unwrap();
        let mats2: Vec<CMat> = errs2.kraus.iter().map(|(_, m)| m.clone()).collect();
        let defect_large = crate::linalg::kraus_defect(&mats2).unwrap();
        // Deficit ~ gamma^(t+1): a decade in gamma moves it ~two decades.
        let ratio = defect_large / defect_small;
        assert!(ratio > 50.0 && ratio < 200.0, "ratio = {ratio}");
    }

    #[test]
    fn error_set_rejects_oversized_systems() {
        let fam = qubit_ad(0.1).unwrap();
        assert!(matches!(
            build_error_set(&fam, 13, 1),
            Err(AqecError::DimCap { .. })
        ));
    }
}
