//! Cross-checks of the syndrome-filter recovery plans against the exact
//! fidelity expressions and the independent state-sampling oracle, for every
//! family the crate can construct.

use aqec::closed_form::closed_form_fidelity;
use aqec::codes::{
    binomial_code, lncy_code, nonnsa_sc_code_for, nonnsa_sc_qudit_code_for, nsa_pc_code_for,
    nsa_sc_code_for, nsa_sc_qudit_code_for, CodeSpace, Codeword, Family,
};
use aqec::linalg::hermitian_eig;
use aqec::noise::{bosonic_ad, build_error_set, qubit_ad, qudit_ad, ErrorSet};
use aqec::recovery::{
    build_recovery, fidelity_min_over_states, fidelity_oracle_min_over_states,
    logical_state_fidelity, recovery_kraus, worst_case_fidelity,
};
use aqec::C64;

/// Every constructible family with its code builder and matching error set.
fn constructible_families(gamma: f64) -> Vec<(Family, CodeSpace, ErrorSet)> {
    let qubit = |n: usize| build_error_set(&qubit_ad(gamma).unwrap(), n, 1).unwrap();
    let qutrit = |n: usize| build_error_set(&qudit_ad(3, gamma).unwrap(), n, 1).unwrap();
    let mode = build_error_set(&bosonic_ad(6, gamma, 1).unwrap(), 1, 1).unwrap();
    vec![
        (Family::Lncy, lncy_code().unwrap(), qubit(4)),
        (Family::NsaSc, nsa_sc_code_for(4, gamma).unwrap(), qubit(4)),
        (Family::NsaSc, nsa_sc_code_for(6, gamma).unwrap(), qubit(6)),
        (Family::NonNsaSc, nonnsa_sc_code_for(4).unwrap(), qubit(4)),
        (Family::NonNsaSc, nonnsa_sc_code_for(6).unwrap(), qubit(6)),
        (Family::NsaPc, nsa_pc_code_for(4, gamma).unwrap(), qubit(4)),
        (Family::NsaPc, nsa_pc_code_for(6, gamma).unwrap(), qubit(6)),
        (
            Family::NsaScQudit,
            nsa_sc_qudit_code_for(4, 3, gamma).unwrap(),
            qutrit(4),
        ),
        (
            Family::NonNsaScQudit,
            nonnsa_sc_qudit_code_for(4, 3).unwrap(),
            qutrit(4),
        ),
        (
            Family::NsaBinomial024,
            binomial_code(gamma, true).unwrap(),
            mode.clone(),
        ),
        (Family::Binomial024, binomial_code(gamma, false).unwrap(), mode),
    ]
}

#[test]
fn plans_reproduce_every_closed_form_exactly() {
    for &g in &[0.01, 0.05, 0.1] {
        for (family, code, errors) in constructible_families(g) {
            let plan = build_recovery(&code, &errors).unwrap();
            let got = worst_case_fidelity(&plan);
            let want =
                closed_form_fidelity(family, code.n, code.k().max(1), code.q as usize, g).unwrap();
            assert!(
                (got - want).abs() < 1e-10,
                "{family:?} n={} at gamma={g}: plan {got} vs closed form {want}",
                code.n
            );
        }
    }
}

#[test]
fn sampling_oracle_confirms_every_plan() {
    // The oracle builds the recovered-fidelity quadratic form independently
    // of the plan's amplitude bookkeeping and errors out if its sampled
    // minimum strays from the plan value by more than 1e-9.
    for &g in &[0.01, 0.1] {
        for (family, code, errors) in constructible_families(g) {
            let plan = build_recovery(&code, &errors).unwrap();
            let sampled = fidelity_oracle_min_over_states(&code, &errors, &plan, 200)
                .unwrap_or_else(|e| panic!("{family:?} n={} oracle: {e}", code.n));
            assert!(
                (sampled - worst_case_fidelity(&plan)).abs() < 1e-9,
                "{family:?}: {sampled}"
            );
        }
    }
}

#[test]
fn recovered_fidelity_ignores_the_logical_state() {
    let g = 0.07;
    for (family, code, errors) in constructible_families(g) {
        let plan = build_recovery(&code, &errors).unwrap();
        let base = worst_case_fidelity(&plan);
        let k = code.logical_dim();
        // A spread of deterministic logical directions, including unbalanced
        // and complex-phased ones.
        let mut probes: Vec<Vec<C64>> = Vec::new();
        for i in 0..k {
            let mut c = vec![C64::new(0.0, 0.0); k];
            c[i] = C64::new(1.0, 0.0);
            probes.push(c);
        }
        let mut equal = vec![C64::new(1.0 / (k as f64).sqrt(), 0.0); k];
        probes.push(equal.clone());
        equal[0] = C64::new(0.0, 1.0 / (k as f64).sqrt());
        probes.push(equal);
        for c in &probes {
            let f = logical_state_fidelity(&code, &errors, &plan, c).unwrap();
            assert!(
                (f - base).abs() < 1e-10,
                "{family:?}: state-dependent fidelity {f} vs {base}"
            );
        }
        let sampled = fidelity_min_over_states(&code, &errors, &plan, 50, 0xfeed).unwrap();
        assert!((sampled - base).abs() < 1e-10, "{family:?}: sampled {sampled}");
    }
}

#[test]
fn recovery_kraus_families_are_contractive() {
    let g = 0.08;
    for (family, code, errors) in constructible_families(g) {
        let plan = build_recovery(&code, &errors).unwrap();
        let ops = recovery_kraus(&plan, &code).unwrap();
        assert_eq!(ops.len(), plan.sectors.len());
        let dim = ops[0].ncols();
        let mut acc = ndarray::Array2::<C64>::zeros((dim, dim));
        for r in &ops {
            acc = acc + r.t().mapv(|z| z.conj()).dot(r);
        }
        let (evals, _) = hermitian_eig(&acc).unwrap();
        for &ev in &evals {
            assert!(
                (-1e-10..=1.0 + 1e-10).contains(&ev),
                "{family:?}: sum R^dag R eigenvalue {ev}"
            );
        }
    }
}

#[test]
fn flipped_codeword_sign_breaks_the_sector_structure() {
    // Flip the sign of one basis term in one PC codeword. The mutated word
    // set is still orthonormal (the supports are disjoint), but the damped
    // images of the two logical states no longer pair up ray-by-ray, so the
    // sector-purity check inside the plan construction must reject the code
    // rather than silently emit a lossy recovery.
    let g = 0.05;
    let code = nsa_pc_code_for(4, g).unwrap();
    let errors = build_error_set(&qubit_ad(g).unwrap(), 4, 1).unwrap();

    let words = code.codewords();
    let mut terms: Vec<_> = words[1]
        .terms()
        .map(|(d, a)| (d.clone(), *a))
        .collect();
    terms[0].1 = -terms[0].1;
    let mutated_word = Codeword::from_terms(4, 2, &terms).unwrap();
    let mutated = CodeSpace::new(
        Family::Custom,
        4,
        2,
        g,
        vec![words[0].clone(), mutated_word],
    )
    .unwrap();

    let err = build_recovery(&mutated, &errors).unwrap_err();
    let msg = err.to_string();
    assert!(
        msg.contains("overlap"),
        "expected a sector overlap rejection, got: {msg}"
    );

    // The untouched code still builds, so the rejection is the mutation's.
    build_recovery(&code, &errors).unwrap();
}

#[test]
fn fail_weight_vanishes_for_full_rank_plans() {
    let g = 0.05;
    for (family, code, errors) in constructible_families(g) {
        let plan = build_recovery(&code, &errors).unwrap();
        let total: f64 = plan
            .sectors
            .iter()
            .map(|s| s.min_amplitude() * s.min_amplitude())
            .sum();
        assert!(
            (plan.fail_weight - (1.0 - total).max(0.0)).abs() < 1e-12,
            "{family:?}: fail weight {} vs 1 - {total}",
            plan.fail_weight
        );
        assert!(plan.fail_weight < 1.0, "{family:?} recovers nothing");
    }
}
