use rayon::prelude::*;
use serde::Serialize;

use super::shooting::{arrival_time, integrate_backward, ShootingConfig, Trajectory};
use crate::bgp::bgp_planner;
use crate::error::Result;
use crate::model::ModelParams;

/// Relative distance to BGP growth that counts as arrival.
pub const ARRIVAL_BAND: f64 = 0.01;

/// JSON has no infinity; write an unbounded slack the way configs spell it.
fn slack_json<S: serde::Serializer>(slack: &f64, ser: S) -> std::result::Result<S::Ok, S::Error> {
    if slack.is_infinite() {
        ser.serialize_str("unbounded")
    } else {
        ser.serialize_f64(*slack)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrapRun {
    pub start: f64,
    #[serde(serialize_with = "slack_json")]
    pub slack: f64,
    pub arrival_time: Option<f64>,
    /// Total time spent with the constraint binding.
    pub binding_time: f64,
    pub error: Option<String>,
    #[serde(skip)]
    pub trajectory: Option<Trajectory>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrapDelay {
    #[serde(serialize_with = "slack_json")]
    pub slack: f64,
    pub later_start: f64,
    pub earlier_start: f64,
    /// Arrival of `later_start` minus arrival of `earlier_start`.
    pub delay: f64,
}

/// Whether loosening the constraint lets the lagging economy make up some, but not
/// all, of its lag behind the leading one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CatchUp {
    pub lagging_start: f64,
    pub leading_start: f64,
    pub lagging_tight: f64,
    pub lagging_loose: f64,
    pub leading_tight: f64,
    pub partial: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrapReport {
    pub bgp_growth: f64,
    pub runs: Vec<TrapRun>,
    pub delays: Vec<TrapDelay>,
    /// Per start: arrival strictly earlier for every looser slack.
    pub ordered_by_slack: Vec<(f64, bool)>,
    pub catch_up: Option<CatchUp>,
}

impl TrapReport {
    pub fn arrival(&self, start: f64, slack: f64) -> Option<f64> {
        self.runs
            .iter()
            .find(|r| r.start == start && r.slack == slack)
            .and_then(|r| r.arrival_time)
    }
}

fn run_one(p: &ModelParams, cfg: &ShootingConfig, start: f64, slack: f64, bgp: f64) -> TrapRun {
    let cfg = ShootingConfig {
        target_growth: Some(start),
        ..*cfg
    };
    match integrate_backward(p, &cfg, slack) {
        Ok(tr) => {
            let binding_time = tr
                .samples
                .windows(2)
                .filter(|w| w[0].binding)
                .map(|w| w[1].state.time - w[0].state.time)
                .fold(0.0, |acc, dt| acc + dt);
            TrapRun {
                start,
                slack,
                arrival_time: arrival_time(&tr.samples, bgp, ARRIVAL_BAND),
                binding_time,
                error: None,
                trajectory: Some(tr),
            }
        }
        Err(e) => TrapRun {
            start,
            slack,
            arrival_time: None,
            binding_time: 0.0,
            error: Some(e.to_string()),
            trajectory: None,
        },
    }
}

/// Solve every `(start, slack)` pair and compare arrival times at the BGP.
/// Failed cells carry their error and no arrival time.
pub fn growth_trap_experiment(
    p: &ModelParams,
    starts: &[f64],
    slacks: &[f64],
    cfg: &ShootingConfig,
) -> Result<TrapReport> {
    cfg.check()?;
    let bgp = bgp_planner(p)?.growth;
    let pairs: Vec<(f64, f64)> = starts
        .iter()
        .flat_map(|&a| slacks.iter().map(move |&s| (a, s)))
        .collect();
    let runs: Vec<TrapRun> = pairs
        .par_iter()
        .map(|&(a, s)| run_one(p, cfg, a, s, bgp))
        .collect();
    let mut report = TrapReport {
        bgp_growth: bgp,
        runs,
        delays: Vec::new(),
        ordered_by_slack: Vec::new(),
        catch_up: None,
    };

    for &s in slacks {
        for (i, &a) in starts.iter().enumerate() {
            for &b in &starts[i + 1..] {
                if let (Some(ta), Some(tb)) = (report.arrival(a, s), report.arrival(b, s)) {
                    report.delays.push(TrapDelay {
                        slack: s,
                        later_start: a,
                        earlier_start: b,
                        delay: ta - tb,
                    });
                }
            }
        }
    }

    let mut sorted_slacks = slacks.to_vec();
    sorted_slacks.sort_by(f64::total_cmp);
    for &a in starts {
        let times: Vec<Option<f64>> = sorted_slacks.iter().map(|&s| report.arrival(a, s)).collect();
        let ordered = times
            .windows(2)
            .all(|w| matches!((w[0], w[1]), (Some(x), Some(y)) if y < x));
        report.ordered_by_slack.push((a, ordered));
    }

    let lagging = starts.iter().copied().reduce(f64::min);
    let leading = starts.iter().copied().reduce(f64::max);
    let tight = sorted_slacks.first().copied();
    let loose = sorted_slacks.last().copied();
    if let (Some(lag), Some(lead), Some(tight), Some(loose)) = (lagging, leading, tight, loose) {
        if let (Some(lt), Some(ll), Some(dt)) = (
            report.arrival(lag, tight),
            report.arrival(lag, loose),
            report.arrival(lead, tight),
        ) {
            report.catch_up = Some(CatchUp {
                lagging_start: lag,
                leading_start: lead,
                lagging_tight: lt,
                lagging_loose: ll,
                leading_tight: dt,
                partial: ll < lt && ll > dt,
            });
        }
    }
    Ok(report)
}
