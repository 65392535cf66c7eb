//! Grid sweeps: L1/L2 losses and recovered fidelities per family, evaluated
//! in parallel and emitted as deterministic CSV.

use std::io::Write;

use anyhow::{Context, Result};
use rayon::prelude::*;

use aqec::kl::losses;
use aqec::recovery::{build_recovery, fidelity_oracle_min_over_states, worst_case_fidelity};

use crate::config::SweepConfig;
use crate::families::FamilySelection;

/// Restarts handed to the sampling oracle per fidelity row. The oracle
/// cross-checks its minimum against the plan value at 1e-9 internally, so a
/// moderate count per row already gives the consistency guarantee.
pub const SWEEP_ORACLE_RESTARTS: usize = 32;

#[derive(Debug, Clone, PartialEq)]
pub struct LossRow {
    pub gamma: f64,
    pub family: String,
    pub l1: f64,
    pub l2: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FidelityRow {
    pub gamma: f64,
    pub family: String,
    pub n: usize,
    pub k: usize,
    pub q: u8,
    pub f_plan: Option<f64>,
    pub f_oracle: Option<f64>,
    pub f_closed_form: f64,
}

/// Loss rows for every selected family: codes re-adapted at each grid point,
/// plus one frozen curve per adapted family when `gamma0` is set (the code
/// built once at gamma0 and swept over the grid).
pub fn sweep_loss(cfg: &SweepConfig) -> Result<Vec<LossRow>> {
    let grid = cfg.gamma_grid()?;
    let selections = FamilySelection::resolve_all(cfg)?;

    let mut jobs: Vec<(FamilySelection, String, Option<f64>, f64)> = Vec::new();
    for sel in &selections {
        for &g in &grid {
            jobs.push((*sel, sel.tag().to_string(), None, g));
        }
        if let Some(g0) = cfg.gamma0 {
            if sel.family.is_adapted() {
                let label = format!("{}_FROZEN", sel.tag());
                for &g in &grid {
                    jobs.push((*sel, label.clone(), Some(g0), g));
                }
            }
        }
    }

    jobs.par_iter()
        .map(|(sel, label, frozen_at, gamma)| {
            let code = sel
                .build_code(frozen_at.unwrap_or(*gamma))
                .with_context(|| format!("building {label} for the loss sweep"))?;
            let errors = sel.build_errors(*gamma)?;
            let report = losses(&code, &errors)
                .with_context(|| format!("losses for {label} at gamma = {gamma}"))?;
            Ok(LossRow { gamma: *gamma, family: label.clone(), l1: report.l1, l2: report.l2 })
        })
        .collect()
}

/// Fidelity rows for every selected family. Families whose recovery plan
/// cannot be constructed (basis search does not cover their local dimension)
/// get empty plan and oracle columns; the closed form is still evaluated.
pub fn sweep_fidelity(cfg: &SweepConfig) -> Result<Vec<FidelityRow>> {
    let grid = cfg.gamma_grid()?;
    let selections = FamilySelection::resolve_all(cfg)?;

    let mut jobs: Vec<(FamilySelection, f64)> = Vec::new();
    for sel in &selections {
        for &g in &grid {
            jobs.push((*sel, g));
        }
    }

    jobs.par_iter()
        .map(|(sel, gamma)| {
            let closed = sel
                .closed_form(*gamma)
                .with_context(|| format!("closed form for {} at gamma = {gamma}", sel.tag()))?;
            let (f_plan, f_oracle) = if sel.supports_plan() {
                let code = sel.build_code(*gamma)?;
                let errors = sel.build_errors(*gamma)?;
                let plan = build_recovery(&code, &errors)
                    .with_context(|| format!("recovery plan for {} at gamma = {gamma}", sel.tag()))?;
                let oracle =
                    fidelity_oracle_min_over_states(&code, &errors, &plan, SWEEP_ORACLE_RESTARTS)?;
                (Some(worst_case_fidelity(&plan)), Some(oracle))
            } else {
                (None, None)
            };
            Ok(FidelityRow {
                gamma: *gamma,
                family: sel.tag().to_string(),
                n: sel.n,
                k: sel.k_label(),
                q: sel.q,
                f_plan,
                f_oracle,
                f_closed_form: closed,
            })
        })
        .collect()
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.16e}")).unwrap_or_default()
}

pub fn write_loss_csv<W: Write>(rows: &[LossRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["gamma", "family", "l1", "l2"])?;
    for r in rows {
        w.write_record([
            format!("{:.16e}", r.gamma),
            r.family.clone(),
            format!("{:.16e}", r.l1),
            format!("{:.16e}", r.l2),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_fidelity_csv<W: Write>(rows: &[FidelityRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["gamma", "family", "n", "k", "q", "F_plan", "F_oracle", "F_closed_form"])?;
    for r in rows {
        w.write_record([
            format!("{:.16e}", r.gamma),
            r.family.clone(),
            r.n.to_string(),
            r.k.to_string(),
            r.q.to_string(),
            fmt_opt(r.f_plan),
            fmt_opt(r.f_oracle),
            format!("{:.16e}", r.f_closed_form),
        ])?;
    }
    w.flush()?;
    Ok(())
}
