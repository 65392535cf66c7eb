//! Maps family tags from configs to concrete code and error-set builders.

use anyhow::{bail, Result};

use aqec::codes::{
    binomial_code, lncy_code, nonnsa_sc_code_for, nonnsa_sc_qudit_code_for, nsa_pc_code_for,
    nsa_sc_code_for, nsa_sc_qudit_code_for, CodeSpace, Family, BINOMIAL_CUTOFF,
};
use aqec::closed_form::closed_form_fidelity;
use aqec::noise::{bosonic_ad, build_error_set, qubit_ad, qudit_ad, ErrorSet};

use crate::config::SweepConfig;

/// One family resolved against a config's (n, k, q) selection. Fixed-shape
/// families (the 4-qubit baseline and the one-mode binomials) keep their
/// intrinsic shape regardless of the selection, so mixed sweeps stay valid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FamilySelection {
    pub family: Family,
    pub n: usize,
    pub q: u8,
}

impl FamilySelection {
    pub fn resolve(tag: &str, cfg: &SweepConfig) -> Result<Self> {
        let family: Family = tag.parse()?;
        let (n, q) = match family {
            Family::Lncy => (4, 2),
            Family::NsaSc | Family::NonNsaSc | Family::NsaPc => {
                if cfg.q != 2 {
                    bail!("{tag} is a qubit family, got q = {}", cfg.q);
                }
                (cfg.n, 2)
            }
            Family::NsaScQudit | Family::NonNsaScQudit => (cfg.n, cfg.q),
            Family::Binomial024 | Family::NsaBinomial024 => (1, BINOMIAL_CUTOFF as u8),
            Family::Custom => bail!("CUSTOM codes come from files, not sweep selections"),
        };
        Ok(FamilySelection { family, n, q })
    }

    pub fn resolve_all(cfg: &SweepConfig) -> Result<Vec<Self>> {
        cfg.families.iter().map(|tag| Self::resolve(tag, cfg)).collect()
    }

    pub fn tag(&self) -> &'static str {
        self.family.tag()
    }

    /// Whether a recovery plan can be constructed: the basis search behind
    /// the qudit families only covers local dimensions 2 and 3, so larger q
    /// is closed-form only.
    pub fn supports_plan(&self) -> bool {
        match self.family {
            Family::NsaScQudit | Family::NonNsaScQudit => self.q <= 3,
            _ => true,
        }
    }

    pub fn build_code(&self, gamma: f64) -> Result<CodeSpace> {
        let code = match self.family {
            Family::Lncy => lncy_code()?,
            Family::NsaSc => nsa_sc_code_for(self.n, gamma)?,
            Family::NonNsaSc => nonnsa_sc_code_for(self.n)?,
            Family::NsaPc => nsa_pc_code_for(self.n, gamma)?,
            Family::NsaScQudit => nsa_sc_qudit_code_for(self.n, self.q, gamma)?,
            Family::NonNsaScQudit => nonnsa_sc_qudit_code_for(self.n, self.q)?,
            Family::Binomial024 => binomial_code(gamma, false)?,
            Family::NsaBinomial024 => binomial_code(gamma, true)?,
            Family::Custom => bail!("CUSTOM codes come from files, not sweep selections"),
        };
        Ok(code)
    }

    pub fn build_errors(&self, gamma: f64) -> Result<ErrorSet> {
        let site = match self.family {
            Family::Binomial024 | Family::NsaBinomial024 => {
                bosonic_ad(BINOMIAL_CUTOFF, gamma, 1)?
            }
            _ if self.q == 2 => qubit_ad(gamma)?,
            _ => qudit_ad(self.q as usize, gamma)?,
        };
        Ok(build_error_set(&site, self.n, 1)?)
    }

    pub fn closed_form(&self, gamma: f64) -> Result<f64> {
        Ok(closed_form_fidelity(self.family, self.n, 1, self.q as usize, gamma)?)
    }

    /// Logical qudit count reported in fidelity rows. Every built-in family
    /// encodes one logical unit: a qudit for the SC/PC constructions, a
    /// two-dimensional space for the binomials.
    pub fn k_label(&self) -> usize {
        1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg_with(n: usize, q: u8, families: &[&str]) -> SweepConfig {
        SweepConfig {
            n,
            q,
            families: families.iter().map(|s| s.to_string()).collect(),
            ..SweepConfig::default()
        }
    }

    #[test]
    fn fixed_shape_families_ignore_the_selection() {
        let cfg = cfg_with(6, 2, &["LNCY", "NSA_SC", "BINOMIAL_024"]);
        let sel = FamilySelection::resolve_all(&cfg).unwrap();
        assert_eq!(sel[0].n, 4);
        assert_eq!(sel[1].n, 6);
        assert_eq!(sel[2].n, 1);
        assert_eq!(sel[2].q, BINOMIAL_CUTOFF as u8);
    }

    #[test]
    fn qubit_families_reject_other_local_dimensions() {
        let cfg = cfg_with(4, 3, &["NSA_SC"]);
        assert!(FamilySelection::resolve_all(&cfg).is_err());
        let cfg = cfg_with(4, 3, &["NSA_SC_QUDIT"]);
        let sel = FamilySelection::resolve_all(&cfg).unwrap();
        assert_eq!(sel[0].q, 3);
        assert!(sel[0].supports_plan());
    }

    #[test]
    fn large_local_dimension_is_closed_form_only() {
        let cfg = cfg_with(4, 4, &["NSA_SC_QUDIT"]);
        let sel = &FamilySelection::resolve_all(&cfg).unwrap()[0];
        assert!(!sel.supports_plan());
        assert!(sel.closed_form(0.01).unwrap() < 1.0);
        assert!(sel.build_code(0.01).is_err());
    }

    #[test]
    fn builders_agree_with_their_error_sets() {
        let cfg = cfg_with(4, 2, &["LNCY", "NSA_SC", "NSA_PC", "NSA_BINOMIAL_024"]);
        for sel in FamilySelection::resolve_all(&cfg).unwrap() {
            let code = sel.build_code(0.05).unwrap();
            let errors = sel.build_errors(0.05).unwrap();
            assert_eq!(code.n, errors.n);
            assert_eq!(code.q as usize, errors.q);
        }
    }

    #[test]
    fn unknown_tags_are_rejected() {
        let cfg = cfg_with(4, 2, &["NSA_XX"]);
        assert!(FamilySelection::resolve_all(&cfg).is_err());
    }
}
