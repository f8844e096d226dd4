use std::path::PathBuf;

use serde::Serialize;

use crate::bgp::{grid_axis, GridSpec};
use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::nonrivalry::{PlannerPrefactor, RootSearch};
use crate::transition::ShootingConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TransitionRuns {
    Unconstrained,
    Constrained,
    Both,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NonrivalryOptions {
    pub destruction: Vec<f64>,
    pub search: RootSearch,
    /// `None` picks the variant that matches the reference root.
    pub prefactor: Option<PlannerPrefactor>,
    pub reference_root: f64,
    pub reference_tolerance: f64,
    pub crossover_range: (f64, f64),
    pub oracle_step: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Experiment {
    Bgp,
    Grid(GridSpec),
    Transition {
        shooting: ShootingConfig,
        runs: TransitionRuns,
    },
    Trap {
        shooting: ShootingConfig,
        starts: Vec<f64>,
        slacks: Vec<f64>,
    },
    Policy {
        tax_rates: Vec<f64>,
    },
    Nonrivalry(NonrivalryOptions),
    Accumulation {
        depreciation: f64,
        horizon: f64,
        dt: f64,
        initial_stock: f64,
    },
}

impl Experiment {
    pub fn kind(&self) -> &'static str {
        match self {
            Experiment::Bgp => "bgp",
            Experiment::Grid(_) => "grid",
            Experiment::Transition { .. } => "transition",
            Experiment::Trap { .. } => "trap",
            Experiment::Policy { .. } => "policy",
            Experiment::Nonrivalry(_) => "nonrivalry",
            Experiment::Accumulation { .. } => "accumulation",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioConfig {
    pub params: ModelParams,
    pub experiment: Experiment,
    pub output_dir: PathBuf,
    /// Columns of the main table, in order. `None` keeps the default layout.
    pub columns: Option<Vec<String>>,
}

struct Entry {
    key: String,
    value: String,
    line: usize,
    used: bool,
}

struct Section {
    name: String,
    line: usize,
    entries: Vec<Entry>,
}

impl Section {
    fn take(&mut self, key: &str) -> Option<(String, usize)> {
        self.entries.iter_mut().find(|e| e.key == key).map(|e| {
            e.used = true;
            (e.value.clone(), e.line)
        })
    }

    fn number(&mut self, key: &str, default: f64) -> Result<f64> {
        match self.take(key) {
            None => Ok(default),
            Some((v, line)) => parse_number(&v, line, key),
        }
    }

    fn list(&mut self, key: &str, default: &[f64]) -> Result<Vec<f64>> {
        match self.take(key) {
            None => Ok(default.to_vec()),
            Some((v, line)) => v
                .split(',')
                .map(|item| parse_number(item, line, key))
                .collect(),
        }
    }

    fn reject_unused(&self) -> Result<()> {
        match self.entries.iter().find(|e| !e.used) {
            Some(e) => Err(Error::UnknownKey {
                section: self.name.clone(),
                key: e.key.clone(),
            }),
            None => Ok(()),
        }
    }
}

fn parse_number(raw: &str, line: usize, key: &str) -> Result<f64> {
    let raw = raw.trim();
    if raw == "unbounded" {
        return Ok(f64::INFINITY);
    }
    raw.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::Config {
            line,
            msg: format!("`{key}`: `{raw}` is not a number"),
        })
}

fn split_sections(text: &str) -> Result<Vec<Section>> {
    let mut sections: Vec<Section> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(name) = content.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            let name = name.trim().to_string();
            if sections.iter().any(|s| s.name == name) {
                return Err(Error::Config {
                    line,
                    msg: format!("section [{name}] appears twice"),
                });
            }
            sections.push(Section {
                name,
                line,
                entries: Vec::new(),
            });
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(Error::Config {
                line,
                msg: format!("expected `key = value`, found `{content}`"),
            });
        };
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() {
            return Err(Error::Config {
                line,
                msg: "empty key".into(),
            });
        }
        let Some(section) = sections.last_mut() else {
            return Err(Error::Config {
                line,
                msg: format!("`{key}` appears before any section header"),
            });
        };
        if section.entries.iter().any(|e| e.key == key) {
            return Err(Error::Config {
                line,
                msg: format!("`{key}` set twice in [{}]", section.name),
            });
        }
        section.entries.push(Entry {
            key: key.to_string(),
            value: value.to_string(),
            line,
            used: false,
        });
    }
    Ok(sections)
}

fn shooting_options(sec: &mut Section) -> Result<ShootingConfig> {
    let d = ShootingConfig::default();
    let target_growth = match sec.take("target_growth") {
        None => d.target_growth,
        Some((v, _)) if v == "none" => None,
        Some((v, line)) => Some(parse_number(&v, line, "target_growth")?),
    };
    let cfg = ShootingConfig {
        dt: sec.number("dt", d.dt)?,
        horizon: sec.number("horizon", d.horizon)?,
        perturbation_scale: sec.number("perturbation_scale", d.perturbation_scale)?,
        target_growth,
        tolerance: sec.number("tolerance", d.tolerance)?,
        share_margin: sec.number("share_margin", d.share_margin)?,
        growth_floor: sec.number("growth_floor", d.growth_floor)?,
    };
    cfg.check()?;
    Ok(cfg)
}

fn axis(sec: &mut Section, name: &str, lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    if let Some((v, line)) = sec.take(&format!("{name}_values")) {
        return v
            .split(',')
            .map(|item| parse_number(item, line, name))
            .collect();
    }
    let lo = sec.number(&format!("{name}_min"), lo)?;
    let hi = sec.number(&format!("{name}_max"), hi)?;
    let step = sec.number(&format!("{name}_step"), step)?;
    grid_axis(lo, hi, step)
}

fn experiment(sec: &mut Section) -> Result<Experiment> {
    let Some((kind, line)) = sec.take("kind") else {
        return Err(Error::Config {
            line: sec.line,
            msg: "[experiment] needs `kind`".into(),
        });
    };
    Ok(match kind.as_str() {
        "bgp" => Experiment::Bgp,
        "grid" => Experiment::Grid(GridSpec {
            xi: axis(sec, "xi", 0.3, 0.8, 0.05)?,
            zeta: axis(sec, "zeta", 0.5, 0.95, 0.05)?,
            sigma: axis(sec, "sigma", 1.5, 2.5, 1.0)?,
        }),
        "transition" => {
            let runs = match sec.take("runs") {
                None => TransitionRuns::Both,
                Some((v, line)) => match v.as_str() {
                    "both" => TransitionRuns::Both,
                    "constrained" => TransitionRuns::Constrained,
                    "unconstrained" => TransitionRuns::Unconstrained,
                    other => {
                        return Err(Error::Config {
                            line,
                            msg: format!("`runs` must be both, constrained or unconstrained, not `{other}`"),
                        })
                    }
                },
            };
            Experiment::Transition {
                shooting: shooting_options(sec)?,
                runs,
            }
        }
        "trap" => {
            let starts = sec.list("starts", &[1e-20, 1e-4, 1e-2])?;
            let slacks = sec.list("s_values", &[0.0, 0.078, f64::INFINITY])?;
            let shooting = shooting_options(sec)?;
            Experiment::Trap {
                shooting,
                starts,
                slacks,
            }
        }
        "policy" => Experiment::Policy {
            tax_rates: sec.list("tax_rates", &[0.5, 1.0, 2.0])?,
        },
        "nonrivalry" => {
            let d = RootSearch::default();
            let prefactor = match sec.take("planner_prefactor") {
                None => None,
                Some((v, _)) if v == "auto" => None,
                Some((v, line)) => Some(PlannerPrefactor::from_name(&v).ok_or_else(|| {
                    Error::Config {
                        line,
                        msg: format!("unknown planner_prefactor `{v}`"),
                    }
                })?),
            };
            let pieces = sec.number("pieces", d.pieces as f64)?;
            if !(pieces >= 1.0 && pieces.fract() == 0.0) {
                return Err(Error::Validation("`pieces` must be a positive integer".into()));
            }
            Experiment::Nonrivalry(NonrivalryOptions {
                destruction: sec.list("c0_values", &[0.2, 4.0, 14.0])?,
                search: RootSearch {
                    upper: sec.number("d_max", d.upper)?,
                    pieces: pieces as usize,
                },
                prefactor,
                reference_root: sec.number("reference_root", 0.53)?,
                reference_tolerance: sec.number("reference_tolerance", 0.02)?,
                crossover_range: (
                    sec.number("crossover_min", 4.0)?,
                    sec.number("crossover_max", 30.0)?,
                ),
                oracle_step: sec.number("oracle_step", 1e-4)?,
            })
        }
        "accumulation" => Experiment::Accumulation {
            depreciation: sec.number("kappa", 0.1)?,
            horizon: sec.number("horizon", 500.0)?,
            dt: sec.number("dt", 0.1)?,
            initial_stock: sec.number("initial_stock", 1.0)?,
        },
        other => {
            return Err(Error::Config {
                line,
                msg: format!("unknown experiment kind `{other}`"),
            })
        }
    })
}

impl ScenarioConfig {
    /// Parse the plain-text scenario format: `[params]`, `[experiment]` and
    /// `[output]` sections of `key = value` lines, `#` comments.
    pub fn parse(text: &str) -> Result<Self> {
        let mut sections = split_sections(text)?;
        for s in &sections {
            if !matches!(s.name.as_str(), "params" | "experiment" | "output") {
                return Err(Error::Config {
                    line: s.line,
                    msg: format!("unknown section [{}]", s.name),
                });
            }
        }
        let find = |sections: &[Section], name: &str| sections.iter().position(|s| s.name == name);

        let mut params = ModelParams::default();
        if let Some(i) = find(&sections, "params") {
            for e in sections[i].entries.iter_mut() {
                params.set(&e.key, &e.value)?;
                e.used = true;
            }
        }

        let Some(ei) = find(&sections, "experiment") else {
            return Err(Error::Config {
                line: 0,
                msg: "missing [experiment] section".into(),
            });
        };
        let experiment = experiment(&mut sections[ei])?;
        sections[ei].reject_unused()?;

        let mut output_dir = PathBuf::from(experiment.kind());
        let mut columns = None;
        if let Some(oi) = find(&sections, "output") {
            let sec = &mut sections[oi];
            if let Some((v, _)) = sec.take("dir") {
                output_dir = PathBuf::from(v);
            }
            if let Some((v, _)) = sec.take("columns") {
                columns = Some(v.split(',').map(|c| c.trim().to_string()).collect());
            }
            sec.reject_unused()?;
        }
        Ok(ScenarioConfig {
            params,
            experiment,
            output_dir,
            columns,
        })
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }
}
