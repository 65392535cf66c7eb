//! Exact worst-case fidelity expressions and series coefficients for the
//! built-in code families.
//!
//! Every function evaluates the exact expression, not a truncated series;
//! the *_deficit_coeff helpers return the quadratic coefficient of 1 - F
//! that the exact curves approach as the damping strength goes to zero.

use crate::codes::{canonical_shift_classes, Family};
use crate::dit::DitString;
use crate::noise::binom;
use crate::{AqecError, Result};

fn check_gamma(gamma: f64) -> Result<()> {
    if !(0.0..1.0).contains(&gamma) {
        return Err(AqecError::Domain(format!(
            "damping strength must lie in [0, 1), got {gamma}"
        )));
    }
    Ok(())
}

/// Self-complementary adapted family: the no-jump sector keeps the all-zero
/// orbit amplitude, every jump sector the matching minimum.
pub fn nsa_sc_fidelity(n: usize, gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    if n < 2 {
        return Err(AqecError::Domain("self-complementary codes need n >= 2".into()));
    }
    let x = 1.0 - gamma;
    Ok(2.0 / (1.0 + x.powi(-(n as i32)))
        + n as f64 * gamma / (x.powi(1 - n as i32) + x))
}

/// Self-complementary fixed-coefficient family.
pub fn nonnsa_sc_fidelity(n: usize, gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    if n < 2 {
        return Err(AqecError::Domain("self-complementary codes need n >= 2".into()));
    }
    let x = 1.0 - gamma;
    let half = (n / 2) as i32;
    Ok((x.powi(half) + x.powi(n as i32 - half)) / 2.0
        + n as f64 * gamma * x.powi(n as i32 - 1) / 2.0)
}

/// Pair-complementary adapted family built over an (n-2)-site inner basis.
pub fn nsa_pc_fidelity(n: usize, gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    if n < 4 {
        return Err(AqecError::Domain("pair-complementary codes need n >= 4".into()));
    }
    let x = 1.0 - gamma;
    let ni = n as i32;
    Ok((4.0 + 2.0 * n as f64 * gamma / x)
        / (x.powi(-ni) + x.powi(-(ni - 2)) + 2.0 * x.powi(-1)))
}

/// Shift-orbit adapted family on q-level sites: exact sum over jump levels.
pub fn nsa_sc_qudit_fidelity(n: usize, q: usize, gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    if n < 2 || q < 2 {
        return Err(AqecError::Domain("shift-orbit codes need n >= 2 and q >= 2".into()));
    }
    let x = 1.0 - gamma;
    let den: f64 = (0..q).map(|a| x.powi(-((a * n) as i32))).sum();
    let mut num = q as f64;
    for l in 1..q {
        num += n as f64 * binom(q, l + 1) * (gamma / x).powi(l as i32);
    }
    Ok(num / den)
}

/// Shift-orbit fixed-coefficient family: per-sector minimum over the
/// canonical shift classes, evaluated combinatorially.
pub fn nonnsa_sc_qudit_fidelity(n: usize, q: usize, gamma: f64) -> Result<f64> {
    let qd = u8::try_from(q)
        .map_err(|_| AqecError::Domain(format!("local dimension {q} does not fit a digit")))?;
    let classes = canonical_shift_classes(n, qd)?;
    sc_filter_fidelity_from_classes(&classes, gamma, false)
}

/// Adapted 0-2-4 binomial code on a single bosonic mode.
pub fn nsa_binomial_fidelity(gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    let x = 1.0 - gamma;
    let nsq = 1.0 + x.powi(-4);
    let no_jump = (2.0 / nsq).min(x * x);
    let one_jump = (4.0 * gamma / (x * nsq)).min(2.0 * gamma * x);
    Ok(no_jump + one_jump)
}

/// Fixed-coefficient 0-2-4 binomial code.
pub fn binomial_fidelity(gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    let x = 1.0 - gamma;
    let no_jump = ((1.0 + x.powi(4)) / 2.0).min(x * x);
    let one_jump = (2.0 * gamma * x.powi(3)).min(2.0 * gamma * x);
    Ok(no_jump + one_jump)
}

/// Worst-case fidelity of a shift-orbit code over explicit orbit classes,
/// assuming distinguishable jump sectors: the no-jump minimum plus one
/// minimum per (site, level) sector.
///
/// This combinatorial form needs only the member weights and digits, so it
/// also covers local dimensions whose canonical classes admit no projective
/// sector plan.
pub fn sc_filter_fidelity_from_classes(
    classes: &[Vec<DitString>],
    gamma: f64,
    adapted: bool,
) -> Result<f64> {
    check_gamma(gamma)?;
    let Some(first) = classes.first().and_then(|c| c.first()) else {
        return Err(AqecError::InvalidBasis("no orbit classes given".into()));
    };
    let n = first.n();
    let q = first.q() as usize;
    for class in classes {
        if class.len() != q {
            return Err(AqecError::InvalidBasis(format!(
                "orbit class has {} members, expected {q}",
                class.len()
            )));
        }
        if class.iter().any(|m| m.n() != n || m.q() as usize != q) {
            return Err(AqecError::InvalidBasis("mixed member shapes".into()));
        }
    }
    let x = 1.0 - gamma;
    let norms_sq: Vec<f64> = classes
        .iter()
        .map(|class| class.iter().map(|m| x.powi(-(m.weight() as i32))).sum())
        .collect();
    let no_jump = classes
        .iter()
        .zip(&norms_sq)
        .map(|(class, nsq)| {
            if adapted {
                q as f64 / nsq
            } else {
                class.iter().map(|m| x.powi(m.weight() as i32)).sum::<f64>() / q as f64
            }
        })
        .fold(f64::INFINITY, f64::min);
    let mut fidelity = no_jump;
    for site in 0..n {
        for level in 1..q {
            let sector = classes
                .iter()
                .zip(&norms_sq)
                .map(|(class, nsq)| {
                    class
                        .iter()
                        .map(|m| {
                            let d = m.digit(site) as usize;
                            if adapted {
                                binom(d, level) * (gamma / x).powi(level as i32) / nsq
                            } else {
                                binom(d, level)
                                    * gamma.powi(level as i32)
                                    * x.powi(m.weight() as i32 - level as i32)
                                    / q as f64
                            }
                        })
                        .sum::<f64>()
                })
                .fold(f64::INFINITY, f64::min);
            fidelity += sector;
        }
    }
    Ok(fidelity)
}

/// Exact worst-case fidelity of a built-in family at one damping strength.
pub fn closed_form_fidelity(
    family: Family,
    n: usize,
    k: usize,
    q: usize,
    gamma: f64,
) -> Result<f64> {
    if k > n {
        return Err(AqecError::Domain(format!(
            "cannot host {k} logical sites on {n} physical sites"
        )));
    }
    match family {
        Family::Lncy => {
            if n != 4 || q != 2 {
                return Err(AqecError::Domain(
                    "the fixed ((4,1)) code is defined at n = 4, q = 2".into(),
                ));
            }
            nonnsa_sc_fidelity(4, gamma)
        }
        Family::NsaSc => {
            require_qubit_family(q)?;
            nsa_sc_fidelity(n, gamma)
        }
        Family::NonNsaSc => {
            require_qubit_family(q)?;
            nonnsa_sc_fidelity(n, gamma)
        }
        Family::NsaPc => {
            require_qubit_family(q)?;
            nsa_pc_fidelity(n, gamma)
        }
        Family::NsaScQudit => nsa_sc_qudit_fidelity(n, q, gamma),
        Family::NonNsaScQudit => nonnsa_sc_qudit_fidelity(n, q, gamma),
        Family::NsaBinomial024 => {
            require_binomial_shape(n, q)?;
            nsa_binomial_fidelity(gamma)
        }
        Family::Binomial024 => {
            require_binomial_shape(n, q)?;
            binomial_fidelity(gamma)
        }
        Family::Custom => Err(AqecError::UnsupportedFamily(
            "custom codes have no closed-form fidelity".into(),
        )),
    }
}

fn require_qubit_family(q: usize) -> Result<()> {
    if q != 2 {
        return Err(AqecError::Domain(format!(
            "qubit family evaluated at local dimension {q}"
        )));
    }
    Ok(())
}

fn require_binomial_shape(n: usize, q: usize) -> Result<()> {
    if n != 1 || q < 5 {
        return Err(AqecError::Domain(format!(
            "the 0-2-4 binomial code lives on one mode of dimension >= 5, got n = {n}, q = {q}"
        )));
    }
    Ok(())
}

/// Quadratic deficit coefficient of the adapted self-complementary family.
pub fn sc_deficit_coeff(n: usize) -> f64 {
    (n * n - n) as f64 / 4.0
}

/// Quadratic deficit coefficient of the fixed self-complementary family.
pub fn nonnsa_sc_deficit_coeff(n: usize) -> f64 {
    let half = n / 2;
    (n * n - n + 2 * n * half - 2 * half * half) as f64 / 4.0
}

/// Quadratic deficit coefficient of the adapted pair-complementary family.
pub fn pc_deficit_coeff(n: usize) -> f64 {
    (n * n - 3 * n + 3) as f64 / 4.0
}

/// Quadratic deficit coefficient of the adapted shift-orbit family.
pub fn nsa_qudit_deficit_coeff(n: usize, q: usize) -> f64 {
    ((q - 1) * (2 * q - 1) * (n * n - n)) as f64 / 12.0
}

/// Quadratic deficit coefficient of the fixed shift-orbit family; exact for
/// site counts divisible by the local dimension, where a digit-balanced
/// class exists.
pub fn nonnsa_qudit_deficit_coeff(n: usize, q: usize) -> f64 {
    let nf = n as f64;
    let qf = q as f64;
    nf * (qf - 1.0) * (2.0 - 4.0 * qf + nf * (5.0 * qf - 1.0)) / 24.0
}

/// Quadratic coefficient of the adapted-over-fixed fidelity gap for the
/// shift-orbit family, valid where the local dimension divides the site
/// count.
pub fn qudit_gap_coeff(n: usize, q: usize) -> f64 {
    (n * n * (q * q - 1)) as f64 / 24.0
}

/// One sampled point of the family-ordering comparison.
#[derive(Clone, Debug)]
pub struct OrderingSample {
    pub gamma: f64,
    pub f_sc_n: f64,
    pub f_pc_next: f64,
    pub f_sc_next: f64,
}

/// Verdict of the strict fidelity ordering between an n-site
/// self-complementary code and the two (n+2)-site alternatives.
#[derive(Clone, Debug)]
pub struct OrderingVerdict {
    pub n: usize,
    pub holds: bool,
    pub samples: Vec<OrderingSample>,
}

/// Checks F_SC(n) > F_PC(n+2) > F_SC(n+2) strictly on a 10-point log grid.
pub fn ordering_check(n: usize) -> Result<OrderingVerdict> {
    if n < 3 {
        return Err(AqecError::Domain("ordering comparison needs n >= 3".into()));
    }
    let mut samples = Vec::with_capacity(10);
    let mut holds = true;
    for i in 0..10 {
        let exponent = -3.0 + 2.5 * i as f64 / 9.0;
        let gamma = 10f64.powf(exponent);
        let f_sc_n = nsa_sc_fidelity(n, gamma)?;
        let f_pc_next = nsa_pc_fidelity(n + 2, gamma)?;
        let f_sc_next = nsa_sc_fidelity(n + 2, gamma)?;
        holds &= f_sc_n > f_pc_next && f_pc_next > f_sc_next;
        samples.push(OrderingSample { gamma, f_sc_n, f_pc_next, f_sc_next });
    }
    Ok(OrderingVerdict { n, holds, samples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn all_forms_are_perfect_at_zero_damping() {
        assert_abs_diff_eq!(nsa_sc_fidelity(4, 0.0).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(nonnsa_sc_fidelity(6, 0.0).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(nsa_pc_fidelity(4, 0.0).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(nsa_sc_qudit_fidelity(4, 3, 0.0).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(nonnsa_sc_qudit_fidelity(4, 3, 0.0).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(nsa_binomial_fidelity(0.0).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(binomial_fidelity(0.0).unwrap(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn qubit_forms_agree_with_the_qudit_forms_at_q_two() {
        for &g in &[0.01, 0.1, 0.3] {
            for &n in &[4usize, 6, 8] {
                assert_abs_diff_eq!(
                    nsa_sc_fidelity(n, g).unwrap(),
                    nsa_sc_qudit_fidelity(n, 2, g).unwrap(),
                    epsilon = 1e-14
                );
                assert_abs_diff_eq!(
                    nonnsa_sc_fidelity(n, g).unwrap(),
                    nonnsa_sc_qudit_fidelity(n, 2, g).unwrap(),
                    epsilon = 1e-14
                );
            }
        }
    }

    #[test]
    fn class_evaluator_matches_the_adapted_qudit_sum() {
        for &(n, q) in &[(4usize, 3u8), (6, 3), (4, 4), (6, 5), (4, 7)] {
            let classes = canonical_shift_classes(n, q).unwrap();
            for &g in &[0.005, 0.05, 0.2] {
                assert_abs_diff_eq!(
                    sc_filter_fidelity_from_classes(&classes, g, true).unwrap(),
                    nsa_sc_qudit_fidelity(n, q as usize, g).unwrap(),
                    epsilon = 1e-12
                );
            }
        }
    }

    #[test]
    fn small_damping_deficits_pin_worked_examples_and_table_rows() {
        let g = 1e-4;
        let pins = [
            (nsa_sc_qudit_fidelity(4, 3, g).unwrap(), 10.0),
            (nonnsa_sc_qudit_fidelity(4, 3, g).unwrap(), 14.0),
            (nsa_sc_qudit_fidelity(6, 3, g).unwrap(), 25.0),
            (nonnsa_sc_qudit_fidelity(6, 3, g).unwrap(), 37.0),
            (nsa_sc_qudit_fidelity(4, 4, g).unwrap(), 21.0),
            (nonnsa_sc_qudit_fidelity(4, 4, g).unwrap(), 31.0),
            (nsa_sc_qudit_fidelity(6, 6, g).unwrap(), 137.5),
            (nonnsa_sc_qudit_fidelity(6, 6, g).unwrap(), 190.0),
        ];
        for (f, coeff) in pins {
            assert!(((1.0 - f) / (g * g) - coeff).abs() < 0.05 * coeff.max(1.0));
        }
    }

    #[test]
    fn deficit_coefficients_reproduce_printed_fractions() {
        for &n in &[4usize, 6] {
            let nf = n as f64;
            assert_abs_diff_eq!(
                nsa_qudit_deficit_coeff(n, 3),
                5.0 / 6.0 * (nf * nf - nf),
                epsilon = 1e-12
            );
            assert_abs_diff_eq!(
                nonnsa_qudit_deficit_coeff(n, 3),
                (14.0 * nf * nf - 10.0 * nf) / 12.0,
                epsilon = 1e-12
            );
            assert_abs_diff_eq!(
                nsa_qudit_deficit_coeff(n, 5),
                3.0 * (nf * nf - nf),
                epsilon = 1e-12
            );
            assert_abs_diff_eq!(
                nonnsa_qudit_deficit_coeff(n, 7),
                (34.0 * nf * nf - 26.0 * nf) / 4.0,
                epsilon = 1e-12
            );
        }
        assert_abs_diff_eq!(nsa_qudit_deficit_coeff(4, 2), sc_deficit_coeff(4), epsilon = 1e-12);
        assert_abs_diff_eq!(
            nonnsa_qudit_deficit_coeff(6, 2),
            nonnsa_sc_deficit_coeff(6),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            nsa_qudit_deficit_coeff(6, 3) + qudit_gap_coeff(6, 3),
            nonnsa_qudit_deficit_coeff(6, 3),
            epsilon = 1e-12
        );
    }

    #[test]
    fn binomial_min_expressions_resolve_to_the_known_branches() {
        let g = 0.06;
        let x = 1.0 - g;
        assert_abs_diff_eq!(
            nsa_binomial_fidelity(g).unwrap(),
            2.0 / (1.0 + x.powi(-4)) + 4.0 * g / (x + x.powi(-3)),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            binomial_fidelity(g).unwrap(),
            x * x + 2.0 * g * x.powi(3),
            epsilon = 1e-15
        );
    }

    #[test]
    fn dispatch_covers_families_and_rejects_misuse() {
        let f = closed_form_fidelity(Family::NsaSc, 4, 1, 2, 0.05).unwrap();
        assert_abs_diff_eq!(f, nsa_sc_fidelity(4, 0.05).unwrap(), epsilon = 1e-15);
        let f = closed_form_fidelity(Family::NsaBinomial024, 1, 1, 6, 0.05).unwrap();
        assert_abs_diff_eq!(f, nsa_binomial_fidelity(0.05).unwrap(), epsilon = 1e-15);
        assert!(closed_form_fidelity(Family::Custom, 4, 1, 2, 0.05).is_err());
        assert!(closed_form_fidelity(Family::Lncy, 6, 1, 2, 0.05).is_err());
        assert!(closed_form_fidelity(Family::NsaSc, 4, 1, 3, 0.05).is_err());
        assert!(closed_form_fidelity(Family::NsaSc, 4, 1, 2, 1.0).is_err());
    }

    #[test]
    fn ordering_holds_for_small_and_larger_codes() {
        for &n in &[3usize, 4, 6, 10] {
            let verdict = ordering_check(n).unwrap();
            assert!(verdict.holds, "ordering broke at n = {n}");
            assert_eq!(verdict.samples.len(), 10);
        }
        assert!(ordering_check(2).is_err());
    }
}
