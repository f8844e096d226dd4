use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;
use sha2::{Digest, Sha256};

use super::config::{Experiment, NonrivalryOptions, ScenarioConfig, TransitionRuns};
use super::presets::find_preset;
use super::table::{emit_plot_data, Cell, Table};
use crate::bgp::{
    bgp_consumer_constrained, bgp_consumer_owned, bgp_decentralized, bgp_firm_ownership,
    bgp_planner, data_overuse_ratio, labor_income_share, labor_share_decentralized,
    labor_share_planner, misallocation_grid, planner_growth_cap, BgpSolution, GridReport,
};
use crate::error::{Error, Result};
use crate::model::{bgp_levels, format_value, validate_params, ModelParams};
use crate::nonrivalry::{
    accumulation_equivalence, creative_destruction_crossover, oracle_roots,
    planner_prefactor_survey, resale_table, AccumulationReport, PlannerPrefactor, ResaleProblem,
    ResaleRegime,
};
use crate::policy::{data_tax_neutrality_check, policy_report, DataTaxReport, PolicyReport};
use crate::transition::{growth_trap_experiment, solve_transition, Trajectory};

/// Environment variable that replaces the output root.
pub const OUTPUT_ROOT_VAR: &str = "GROWTHLAB_OUT";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

impl Artifact {
    fn text(name: impl Into<String>, text: String) -> Self {
        Artifact {
            name: name.into(),
            bytes: text.into_bytes(),
        }
    }

    fn json(name: impl Into<String>, value: &impl Serialize) -> Result<Self> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        Ok(Self::text(name, text))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOutcome {
    pub dir: PathBuf,
    pub files: Vec<String>,
}

pub fn trajectory_table(p: &ModelParams, tr: &Trajectory) -> Table {
    let mut t = Table::new(
        &[
            "t",
            "g_N",
            "g_mu",
            "l_E",
            "g_c",
            "g_phi",
            "phi_level",
            "phi_cumulative",
            "binding",
            "l_R",
            "dot_l_E",
            "labor_income_share",
        ],
        &[
            "t",
            "g_N",
            "g_mu",
            "l_E",
            "g_c",
            "g_phi",
            "phi_level",
            "phi_cumulative",
            "binding",
        ],
    );
    for s in &tr.samples {
        let income = labor_income_share(p, s.state.rd_share).unwrap_or(f64::NAN);
        t.push(vec![
            s.state.time.into(),
            s.state.variety_growth.into(),
            s.state.shadow_growth.into(),
            s.state.production_share().into(),
            s.consumption_growth.into(),
            s.data_growth.into(),
            s.phi_level.into(),
            s.phi_cumulative.into(),
            s.binding.into(),
            s.state.rd_share.into(),
            s.d_production_share.into(),
            income.into(),
        ]);
    }
    t
}

pub fn grid_table(report: &GridReport) -> Table {
    let cols = [
        "xi",
        "zeta",
        "sigma",
        "s_rd_planner",
        "s_rd_decentralized",
        "gap",
        "overuse_ratio",
        "feasible",
    ];
    let mut t = Table::new(&cols, &cols);
    for c in &report.cells {
        t.push(vec![
            c.xi.into(),
            c.zeta.into(),
            c.sigma.into(),
            c.rd_share_planner.into(),
            c.rd_share_decentralized.into(),
            c.gap.into(),
            c.overuse_ratio.into(),
            c.feasible.into(),
        ]);
    }
    t
}

pub fn policy_table(r: &PolicyReport) -> Table {
    let cols = [
        "tau_labor",
        "tau_profit",
        "theta_d_subsidized",
        "theta_s",
        "share_gap_after_subsidy",
    ];
    let mut t = Table::new(&cols, &cols);
    t.push(vec![
        r.rates.tau_labor.into(),
        r.rates.tau_profit.into(),
        r.theta_subsidized.into(),
        r.theta_planner.into(),
        r.share_gap_after_subsidy.into(),
    ]);
    t
}

fn data_tax_table(r: &DataTaxReport) -> Table {
    let cols = ["tax_rate", "g_star", "g_phi_star", "s_rd_decentralized", "deviation"];
    let mut t = Table::new(&cols, &cols);
    for row in &r.rows {
        t.push(vec![
            row.tax_rate.into(),
            row.growth.into(),
            row.data_growth.into(),
            row.rd_share.into(),
            row.deviation.into(),
        ]);
    }
    t
}

fn accumulation_table(r: &AccumulationReport) -> Table {
    let cols = ["t", "stock", "stock_growth", "gap"];
    let mut t = Table::new(&cols, &cols);
    for s in &r.samples {
        t.push(vec![s.time.into(), s.stock.into(), s.stock_growth.into(), s.gap.into()]);
    }
    t
}

fn bgp_table(rows: &[(&str, BgpSolution)]) -> Table {
    let cols = [
        "regime",
        "g_star",
        "g_phi_star",
        "g_mu_star",
        "r_star",
        "constraint_binding",
        "feasible",
    ];
    let mut t = Table::new(&cols, &cols);
    for (name, s) in rows {
        t.push(vec![
            (*name).into(),
            s.growth.into(),
            s.data_growth.into(),
            s.shadow_growth.into(),
            s.interest_rate.into(),
            s.constraint_binding.into(),
            s.feasible.into(),
        ]);
    }
    t
}

fn regime_name(r: ResaleRegime) -> &'static str {
    match r {
        ResaleRegime::Decentralized => "decentralized",
        ResaleRegime::Planner => "planner",
    }
}

fn main_table(cfg: &ScenarioConfig) -> Option<&[String]> {
    cfg.columns.as_deref()
}

fn bgp_artifacts(p: &ModelParams, cfg: &ScenarioConfig) -> Result<Vec<Artifact>> {
    let mut rows = vec![
        ("decentralized", bgp_decentralized(p)?),
        ("planner", bgp_planner(p)?),
        ("consumer_constrained", bgp_consumer_constrained(p)?),
    ];
    if p.processing_scale > 0.0 {
        rows.push(("firm_owned", bgp_firm_ownership(p)?));
        if let Ok(s) = bgp_consumer_owned(p) {
            rows.push(("consumer_owned", s));
        }
    }
    let market = labor_share_decentralized(p)?;
    let planner = labor_share_planner(p)?;
    let base = bgp_decentralized(p)?;
    let levels = bgp_levels(p, 1.0, 1.0 - market.rd_share, base.interest_rate)?;
    let summary = json!({
        "labor_share_decentralized": market,
        "labor_share_planner": planner,
        "overuse_ratio": data_overuse_ratio(p)?,
        "planner_growth_cap": planner_growth_cap(p)?,
        "levels_at_unit_varieties": levels,
    });
    Ok(vec![
        Artifact::text("bgp.csv", emit_plot_data(&bgp_table(&rows), main_table(cfg))?),
        Artifact::json("bgp_summary.json", &summary)?,
    ])
}

fn transition_artifacts(
    p: &ModelParams,
    cfg: &ScenarioConfig,
    shooting: &crate::transition::ShootingConfig,
    runs: TransitionRuns,
) -> Result<Vec<Artifact>> {
    let mut out = Vec::new();
    let wanted: &[(&str, bool)] = match runs {
        TransitionRuns::Both => &[("unconstrained", false), ("constrained", true)],
        TransitionRuns::Unconstrained => &[("unconstrained", false)],
        TransitionRuns::Constrained => &[("constrained", true)],
    };
    for &(label, constrained) in wanted {
        let tr = solve_transition(p, shooting, constrained)?;
        out.push(Artifact::text(
            format!("trajectory_{label}.csv"),
            emit_plot_data(&trajectory_table(p, &tr), main_table(cfg))?,
        ));
        out.push(Artifact::json(format!("shooting_{label}.json"), &tr.diagnostics)?);
    }
    Ok(out)
}

fn trap_artifacts(
    p: &ModelParams,
    cfg: &ScenarioConfig,
    shooting: &crate::transition::ShootingConfig,
    starts: &[f64],
    slacks: &[f64],
) -> Result<Vec<Artifact>> {
    let report = growth_trap_experiment(p, starts, slacks, shooting)?;
    let cols = ["start", "s", "arrival_time", "binding_time", "converged", "path_file"];
    let mut table = Table::new(&cols, &cols);
    let mut out = Vec::new();
    for (k, run) in report.runs.iter().enumerate() {
        let file = match &run.trajectory {
            Some(tr) => {
                let name = format!("trap_path_{k}.csv");
                out.push(Artifact::text(
                    name.clone(),
                    emit_plot_data(&trajectory_table(p, tr), main_table(cfg))?,
                ));
                name
            }
            None => String::new(),
        };
        table.push(vec![
            run.start.into(),
            Cell::Text(format_value(run.slack)),
            run.arrival_time.unwrap_or(f64::NAN).into(),
            run.binding_time.into(),
            run.error.is_none().into(),
            Cell::Text(file),
        ]);
    }
    out.insert(0, Artifact::text("trap.csv", emit_plot_data(&table, None)?));
    out.insert(1, Artifact::json("trap_summary.json", &report)?);
    Ok(out)
}

fn nonrivalry_artifacts(p: &ModelParams, cfg: &ScenarioConfig, opts: &NonrivalryOptions) -> Result<Vec<Artifact>> {
    let prob = ResaleProblem::from_params(p)?;
    let survey = planner_prefactor_survey(&prob, opts.reference_root, opts.reference_tolerance, &opts.search)?;
    let prefactor = opts
        .prefactor
        .or(survey.matched)
        .unwrap_or(PlannerPrefactor::Displayed);
    let reports = resale_table(&prob, &opts.destruction, prefactor, &opts.search)?;

    let cols = ["regime", "c0", "root", "in_unit_interval", "residual", "trivial"];
    let mut table = Table::new(&cols, &cols[..5]);
    let mut oracle_gap: f64 = 0.0;
    for (market, planner) in &reports {
        for rep in [market, planner] {
            for r in &rep.roots {
                table.push(vec![
                    regime_name(rep.regime).into(),
                    rep.destruction.into(),
                    r.value.into(),
                    r.in_unit_interval.into(),
                    r.residual.into(),
                    r.trivial.into(),
                ]);
            }
            let solver: Vec<f64> = rep.roots.iter().filter(|r| !r.trivial).map(|r| r.value).collect();
            let oracle = oracle_roots(
                &prob.with_destruction(rep.destruction),
                rep.regime,
                prefactor,
                opts.oracle_step,
                opts.search.upper,
            );
            if solver.len() != oracle.len() {
                oracle_gap = f64::INFINITY;
            } else {
                for (a, b) in solver.iter().zip(&oracle) {
                    oracle_gap = oracle_gap.max((a - b).abs());
                }
            }
        }
    }
    let crossover = creative_destruction_crossover(&prob, opts.crossover_range, prefactor, &opts.search);
    let summary = json!({
        "planner_prefactor": prefactor.name(),
        "prefactor_survey": survey,
        "crossover": crossover.as_ref().ok(),
        "crossover_error": crossover.as_ref().err().map(|e| e.to_string()),
        "oracle_max_difference": if oracle_gap.is_finite() { json!(oracle_gap) } else { json!("root count mismatch") },
        "market_value_growth": prob.market_value_growth,
        "planner_value_growth": prob.planner_value_growth,
    });
    Ok(vec![
        Artifact::text("nonrivalry.csv", emit_plot_data(&table, main_table(cfg))?),
        Artifact::json("nonrivalry_summary.json", &summary)?,
    ])
}

/// Compute every artifact of a scenario without touching the file system.
pub fn compute_artifacts(cfg: &ScenarioConfig) -> Result<Vec<Artifact>> {
    let p = &cfg.params;
    validate_params(p).into_result()?;
    match &cfg.experiment {
        Experiment::Bgp => bgp_artifacts(p, cfg),
        Experiment::Grid(spec) => {
            let report = misallocation_grid(p, spec);
            let summary = json!({
                "cells": report.cells.len(),
                "feasible_cells": report.cells.iter().filter(|c| c.feasible).count(),
                "planner_share_above_market": report.cells.iter().filter(|c| c.feasible).all(|c| c.gap > 0.0),
                "monotonicity": report.monotonicity,
            });
            Ok(vec![
                Artifact::text("grid.csv", emit_plot_data(&grid_table(&report), main_table(cfg))?),
                Artifact::json("grid_summary.json", &summary)?,
            ])
        }
        Experiment::Transition { shooting, runs } => transition_artifacts(p, cfg, shooting, *runs),
        Experiment::Trap {
            shooting,
            starts,
            slacks,
        } => trap_artifacts(p, cfg, shooting, starts, slacks),
        Experiment::Policy { tax_rates } => {
            let report = policy_report(p)?;
            let tax = data_tax_neutrality_check(p, tax_rates)?;
            let meta = json!({
                "rates": report.rates,
                "subsidy_formula": "share-matching: (1-beta)[(sigma-xi)n + xi rho - (sigma-xi)(1-zeta)g] / (xi (gamma g + rho - n))",
                "tau_labor_unscaled": report.rates.tau_labor_unscaled,
                "denominator": "gamma g + rho - n",
                "data_tax": tax,
            });
            Ok(vec![
                Artifact::text("policy.csv", emit_plot_data(&policy_table(&report), main_table(cfg))?),
                Artifact::text("data_tax.csv", emit_plot_data(&data_tax_table(&tax), None)?),
                Artifact::json("policy_meta.json", &meta)?,
            ])
        }
        Experiment::Nonrivalry(opts) => nonrivalry_artifacts(p, cfg, opts),
        Experiment::Accumulation {
            depreciation,
            horizon,
            dt,
            initial_stock,
        } => {
            let r = accumulation_equivalence(p, *depreciation, *horizon, *dt, *initial_stock)?;
            let summary = json!({
                "data_growth": r.data_growth,
                "kappa": r.depreciation,
                "final_gap": r.final_gap,
                "predicted_gap": r.predicted_gap,
                "stable_ratio": r.stable_ratio,
            });
            Ok(vec![
                Artifact::text("accumulation.csv", emit_plot_data(&accumulation_table(&r), main_table(cfg))?),
                Artifact::json("accumulation_summary.json", &summary)?,
            ])
        }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Manifest text: parameters as config strings, software version and file checksums.
pub fn manifest(cfg: &ScenarioConfig, artifacts: &[Artifact]) -> Result<String> {
    let params: serde_json::Map<String, serde_json::Value> = cfg
        .params
        .to_pairs()
        .into_iter()
        .map(|(k, v)| (k.to_string(), json!(v)))
        .collect();
    let files: Vec<serde_json::Value> = artifacts
        .iter()
        .map(|a| json!({"name": a.name, "sha256": sha256_hex(&a.bytes), "bytes": a.bytes.len()}))
        .collect();
    let value = json!({
        "software": "growthlab",
        "version": crate::VERSION,
        "experiment": cfg.experiment.kind(),
        "params": params,
        "files": files,
    });
    let mut text = serde_json::to_string_pretty(&value)?;
    text.push('\n');
    Ok(text)
}

/// Parameters recorded in a manifest.
pub fn manifest_params(manifest: &str) -> Result<ModelParams> {
    let value: serde_json::Value = serde_json::from_str(manifest)?;
    let params = value
        .get("params")
        .and_then(|p| p.as_object())
        .ok_or_else(|| Error::Validation("manifest has no params object".into()))?;
    let mut p = ModelParams::default();
    for (k, v) in params {
        let v = v
            .as_str()
            .ok_or_else(|| Error::Validation(format!("manifest param `{k}` is not a string")))?;
        p.set(k, v)?;
    }
    Ok(p)
}

/// Compute, then write artifacts and `manifest.json` into `dir`. Nothing is
/// written if any computation fails.
pub fn run_config(cfg: &ScenarioConfig, dir: &Path) -> Result<RunOutcome> {
    let artifacts = compute_artifacts(cfg)?;
    let manifest = manifest(cfg, &artifacts)?;
    std::fs::create_dir_all(dir)?;
    let mut files = Vec::new();
    for a in &artifacts {
        std::fs::write(dir.join(&a.name), &a.bytes)?;
        files.push(a.name.clone());
    }
    std::fs::write(dir.join("manifest.json"), manifest)?;
    files.push("manifest.json".into());
    Ok(RunOutcome {
        dir: dir.to_path_buf(),
        files,
    })
}

/// Output root: `$GROWTHLAB_OUT` if set, else the working directory.
pub fn output_root() -> PathBuf {
    std::env::var_os(OUTPUT_ROOT_VAR)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."))
}

pub fn run_scenario(config_path: &Path) -> Result<RunOutcome> {
    let cfg = ScenarioConfig::load(config_path)?;
    run_config(&cfg, &output_root().join(&cfg.output_dir))
}

/// Run a preset into `out`, or into its own directory under the output root.
pub fn run_preset(name: &str, out: Option<&Path>) -> Result<RunOutcome> {
    let preset = find_preset(name)?;
    let cfg = ScenarioConfig::parse(preset.config)?;
    let dir = match out {
        Some(d) => d.to_path_buf(),
        None => output_root().join(&cfg.output_dir),
    };
    run_config(&cfg, &dir)
}
