use nalgebra::Matrix3;
use serde::Serialize;

use super::system::{flow_with_slack, ode_rhs, steady_state, DataRegime, Flow, TransitionState};
use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::ode::rk4_step;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShootingConfig {
    pub dt: f64,
    /// Longest backward integration time.
    pub horizon: f64,
    /// Distance from the steady state at which backward integration starts.
    pub perturbation_scale: f64,
    /// Required starting variety growth. Without one the path runs to the horizon
    /// or to the edge of the admissible region.
    pub target_growth: Option<f64>,
    pub tolerance: f64,
    /// Labor shares must stay inside `[share_margin, 1 - share_margin]`.
    pub share_margin: f64,
    /// Variety growth below this ends the backward integration.
    pub growth_floor: f64,
}

impl Default for ShootingConfig {
    fn default() -> Self {
        ShootingConfig {
            dt: 0.1,
            horizon: 1000.0,
            perturbation_scale: 1e-6,
            target_growth: Some(1e-4),
            tolerance: 1e-6,
            share_margin: 1e-6,
            growth_floor: 1e-9,
        }
    }
}

impl ShootingConfig {
    pub fn check(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::Validation(format!("shooting config: {what}")));
        if !(self.dt > 0.0) {
            return bad("dt must be positive");
        }
        if !(self.tolerance > 0.0) {
            return bad("tolerance must be positive");
        }
        if !(self.horizon > 0.0) {
            return bad("horizon must be positive");
        }
        if !(self.perturbation_scale >= 0.0) {
            return bad("perturbation_scale must be non-negative");
        }
        if !(self.share_margin >= 0.0 && self.share_margin < 0.5) {
            return bad("share_margin must lie in [0, 0.5)");
        }
        if let Some(t) = self.target_growth {
            if !(t > self.growth_floor) {
                return bad("target growth must exceed the growth floor");
            }
        }
        Ok(())
    }
}

/// One sample of a forward-time path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrajectorySample {
    pub state: TransitionState,
    pub consumption_growth: f64,
    pub data_growth: f64,
    pub d_production_share: f64,
    /// Data provision relative to its starting value.
    pub phi_level: f64,
    /// Running integral of `phi_level`.
    pub phi_cumulative: f64,
    pub binding: bool,
}

/// A candidate starting direction and its score.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Candidate {
    pub eigenvalue: f64,
    /// Unit direction in `(g_N, g_mu, l_E)` coordinates.
    pub direction: [f64; 3],
    /// Norm of the three state derivatives at the perturbed point.
    pub residual: f64,
    pub reached_target: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShootingDiagnostics {
    /// Jacobian eigenvalues at the steady state as `(re, im)` pairs.
    pub eigenvalues: Vec<(f64, f64)>,
    pub candidates: Vec<Candidate>,
    /// Index into `candidates` of the direction used.
    pub chosen: Option<usize>,
    pub perturbation_scale: f64,
    pub candidates_tried: usize,
    pub steps: usize,
    pub landing_iterations: usize,
    pub landing_residual: f64,
    pub terminal_distance: f64,
    pub stop_reason: String,
    pub chattering: bool,
    pub binding_samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub samples: Vec<TrajectorySample>,
    pub diagnostics: ShootingDiagnostics,
}

const FD_STEP: f64 = 1e-7;
const LANDING_ITERATIONS: usize = 60;
const CHATTER_RUN: usize = 100;

fn jacobian(p: &ModelParams, ss: &TransitionState, slack: f64) -> Result<Matrix3<f64>> {
    let base = ss.vector();
    let mut jac = Matrix3::zeros();
    for j in 0..3 {
        let h = FD_STEP * base[j].abs().max(1e-3);
        let mut up = base;
        let mut down = base;
        up[j] += h;
        down[j] -= h;
        let fu = flow_with_slack(&TransitionState::from_vector(0.0, &up), p, slack)?.vector();
        let fd = flow_with_slack(&TransitionState::from_vector(0.0, &down), p, slack)?.vector();
        for i in 0..3 {
            jac[(i, j)] = (fu[i] - fd[i]) / (2.0 * h);
        }
    }
    Ok(jac)
}

/// Null vector of `m` from the best-conditioned cross product of its rows.
fn null_vector(m: &Matrix3<f64>) -> [f64; 3] {
    let rows = [m.row(0).transpose(), m.row(1).transpose(), m.row(2).transpose()];
    let mut best = rows[0].cross(&rows[1]);
    for (a, b) in [(0, 2), (1, 2)] {
        let c = rows[a].cross(&rows[b]);
        if c.norm() > best.norm() {
            best = c;
        }
    }
    let v = best.normalize();
    [v[0], v[1], v[2]]
}

fn to_share_coords(v: [f64; 3]) -> [f64; 3] {
    [v[0], v[1], -v[2]]
}

fn distance(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

enum Stop {
    Target,
    Horizon,
    Left(String),
}

struct Backward {
    points: Vec<(f64, [f64; 3])>,
    stop: Stop,
    landing_iterations: usize,
    landing_residual: f64,
}

fn integrate_from(
    p: &ModelParams,
    cfg: &ShootingConfig,
    slack: f64,
    start: [f64; 3],
    falling: bool,
) -> Backward {
    // backward time: y' = -f(y), regime fixed from the start of each step
    let step = |y: &[f64; 3], h: f64| -> Result<[f64; 3]> {
        let regime = if flow_with_slack(&TransitionState::from_vector(0.0, y), p, slack)?.binding {
            DataRegime::Binding(slack)
        } else {
            DataRegime::Unconstrained
        };
        let mut rhs = |_t: f64, z: &[f64; 3]| -> Result<[f64; 3]> {
            let f = ode_rhs(&TransitionState::from_vector(0.0, z), p, regime)?;
            Ok(f.vector().map(|d| -d))
        };
        rk4_step(&mut rhs, 0.0, y, h)
    };
    let admissible = |y: &[f64; 3]| -> Option<String> {
        if !y.iter().all(|v| v.is_finite()) {
            return Some("state is not finite".into());
        }
        if y[0] <= cfg.growth_floor {
            return Some(format!("g_N fell to {} (floor {})", y[0], cfg.growth_floor));
        }
        if y[2] < cfg.share_margin || y[2] > 1.0 - cfg.share_margin {
            return Some(format!("R&D share {} left the admissible band", y[2]));
        }
        None
    };
    let passed = |y: &[f64; 3], target: f64| if falling { y[0] <= target } else { y[0] >= target };

    let mut points = vec![(0.0, start)];
    let mut y = start;
    let mut tau = 0.0;
    let steps = (cfg.horizon / cfg.dt).ceil() as usize;
    for _ in 0..steps {
        let h = cfg.dt.min(cfg.horizon - tau);
        if h <= 0.0 {
            break;
        }
        let next = match step(&y, h) {
            Ok(next) => next,
            Err(e) => {
                return Backward {
                    points,
                    stop: Stop::Left(e.to_string()),
                    landing_iterations: 0,
                    landing_residual: f64::NAN,
                }
            }
        };
        if let Some(target) = cfg.target_growth {
            if next[0].is_finite() && passed(&next, target) {
                // shrink the last step until it lands on the target
                let (mut lo, mut hi) = (0.0, h);
                let mut landed = next;
                let mut iterations = 0;
                for _ in 0..LANDING_ITERATIONS {
                    iterations += 1;
                    let mid = 0.5 * (lo + hi);
                    match step(&y, mid) {
                        Ok(z) if passed(&z, target) => {
                            hi = mid;
                            landed = z;
                        }
                        Ok(_) => lo = mid,
                        Err(_) => hi = mid,
                    }
                    if (landed[0] - target).abs() <= cfg.tolerance * target.abs() {
                        break;
                    }
                }
                let residual = (landed[0] - target).abs();
                points.push((tau + hi, landed));
                return Backward {
                    points,
                    stop: if residual <= cfg.tolerance * target.abs() {
                        Stop::Target
                    } else {
                        Stop::Left(format!("landing residual {residual}"))
                    },
                    landing_iterations: iterations,
                    landing_residual: residual,
                };
            }
        }
        if let Some(reason) = admissible(&next) {
            return Backward {
                points,
                stop: Stop::Left(reason),
                landing_iterations: 0,
                landing_residual: f64::NAN,
            };
        }
        tau += h;
        y = next;
        points.push((tau, y));
    }
    Backward {
        points,
        stop: Stop::Horizon,
        landing_iterations: 0,
        landing_residual: f64::NAN,
    }
}

fn forward_samples(
    p: &ModelParams,
    slack: f64,
    backward: &[(f64, [f64; 3])],
) -> Result<Vec<TrajectorySample>> {
    let total = backward.last().map(|b| b.0).unwrap_or(0.0);
    let mut samples: Vec<TrajectorySample> = Vec::with_capacity(backward.len());
    for (tau, y) in backward.iter().rev() {
        let state = TransitionState::from_vector(total - tau, y);
        let f: Flow = flow_with_slack(&state, p, slack)?;
        let (phi_level, phi_cumulative) = match samples.last() {
            None => (1.0, 0.0),
            Some(prev) => {
                let dt = state.time - prev.state.time;
                let level = prev.phi_level * (prev.data_growth * dt).exp();
                (level, prev.phi_cumulative + 0.5 * dt * (prev.phi_level + level))
            }
        };
        samples.push(TrajectorySample {
            state,
            consumption_growth: f.consumption_growth,
            data_growth: f.data_growth,
            d_production_share: f.d_production_share,
            phi_level,
            phi_cumulative,
            binding: f.binding,
        });
    }
    Ok(samples)
}

fn chattering(samples: &[TrajectorySample]) -> bool {
    let mut run = 0;
    for w in samples.windows(2) {
        if w[0].binding != w[1].binding {
            run += 1;
            if run > CHATTER_RUN {
                return true;
            }
        } else {
            run = 0;
        }
    }
    false
}

/// Reverse shooting under data slack `slack` (`f64::INFINITY` for none).
///
/// Backward integration starts a small step from the steady state along a stable
/// eigenvector of the linearized system; every stable direction is tried in order of
/// its derivative residual until one reaches the target.
pub fn integrate_backward(p: &ModelParams, cfg: &ShootingConfig, slack: f64) -> Result<Trajectory> {
    cfg.check()?;
    let ss = steady_state(p)?;
    let base = ss.vector();
    let jac = jacobian(p, &ss, slack)?;
    let eig = jac.complex_eigenvalues();
    let eigenvalues: Vec<(f64, f64)> = eig.iter().map(|c| (c.re, c.im)).collect();
    let falling = cfg
        .target_growth
        .map(|t| t < ss.variety_growth)
        .unwrap_or(true);

    let mut candidates = Vec::new();
    for c in eig.iter() {
        if c.im.abs() > 1e-12 || c.re >= -1e-9 {
            continue;
        }
        let v = null_vector(&(jac - Matrix3::identity() * c.re));
        for sign in [1.0, -1.0] {
            let dir = v.map(|x| sign * x);
            let start: [f64; 3] = std::array::from_fn(|i| base[i] + cfg.perturbation_scale * dir[i]);
            let residual = flow_with_slack(&TransitionState::from_vector(0.0, &start), p, slack)
                .map(|f| f.vector().iter().map(|d| d * d).sum::<f64>().sqrt())
                .unwrap_or(f64::INFINITY);
            candidates.push((c.re, dir, residual));
        }
    }
    // directions that move g_N the right way first, then by residual
    candidates.sort_by(|a, b| {
        let wrong = |d: &[f64; 3]| (falling && d[0] > 0.0) || (!falling && d[0] < 0.0);
        wrong(&a.1)
            .cmp(&wrong(&b.1))
            .then(a.2.partial_cmp(&b.2).unwrap_or(std::cmp::Ordering::Equal))
    });

    let mut report: Vec<Candidate> = candidates
        .iter()
        .map(|(ev, dir, residual)| Candidate {
            eigenvalue: *ev,
            direction: to_share_coords(*dir),
            residual: *residual,
            reached_target: false,
        })
        .collect();

    let mut last_reason = String::from("no stable direction at the steady state");
    let mut tried = 0;
    let directions: Vec<Option<[f64; 3]>> = if cfg.perturbation_scale == 0.0 {
        vec![None]
    } else {
        candidates.iter().map(|c| Some(c.1)).collect()
    };
    for (idx, dir) in directions.iter().enumerate() {
        tried += 1;
        let start: [f64; 3] = match dir {
            Some(d) => std::array::from_fn(|i| base[i] + cfg.perturbation_scale * d[i]),
            None => base,
        };
        let back = integrate_from(p, cfg, slack, start, falling);
        let accepted = match (&back.stop, cfg.target_growth) {
            (Stop::Target, _) => true,
            (_, None) => true,
            (Stop::Horizon, Some(_)) => {
                last_reason = format!("horizon {} reached before the target", cfg.horizon);
                false
            }
            (Stop::Left(r), Some(_)) => {
                last_reason = r.clone();
                false
            }
        };
        if !accepted {
            continue;
        }
        let chosen = dir.map(|_| idx);
        if let Some(i) = chosen {
            report[i].reached_target = cfg.target_growth.is_some();
        }
        let samples = forward_samples(p, slack, &back.points)?;
        let terminal = samples.last().map(|s| s.state.vector()).unwrap_or(base);
        let stop_reason = match back.stop {
            Stop::Target => "target reached".to_string(),
            Stop::Horizon => "horizon reached".to_string(),
            Stop::Left(r) => r,
        };
        return Ok(Trajectory {
            diagnostics: ShootingDiagnostics {
                eigenvalues,
                candidates: report,
                chosen,
                perturbation_scale: cfg.perturbation_scale,
                candidates_tried: tried,
                steps: back.points.len() - 1,
                landing_iterations: back.landing_iterations,
                landing_residual: back.landing_residual,
                terminal_distance: distance(&to_share_coords(terminal), &to_share_coords(base)),
                stop_reason,
                chattering: chattering(&samples),
                binding_samples: samples.iter().filter(|s| s.binding).count(),
            },
            samples,
        });
    }
    Err(Error::NonConvergence(format!(
        "reverse shooting tried {tried} direction(s): {last_reason}"
    )))
}

/// Transition path with or without the data-provision constraint at the slack in `p`.
pub fn solve_transition(p: &ModelParams, cfg: &ShootingConfig, constrained: bool) -> Result<Trajectory> {
    let slack = if constrained {
        p.data_slack
    } else {
        f64::INFINITY
    };
    integrate_backward(p, cfg, slack)
}

/// First forward time at which variety growth is within `band` (relative) of
/// `level`, linearly interpolated between samples.
pub fn arrival_time(samples: &[TrajectorySample], level: f64, band: f64) -> Option<f64> {
    let near = |g: f64| (g - level).abs() <= band * level.abs();
    let first = samples.first()?;
    if near(first.state.variety_growth) {
        return Some(first.state.time);
    }
    let edge = if first.state.variety_growth < level {
        level * (1.0 - band)
    } else {
        level * (1.0 + band)
    };
    for w in samples.windows(2) {
        let (a, b) = (&w[0].state, &w[1].state);
        if near(b.variety_growth) {
            let frac = (edge - a.variety_growth) / (b.variety_growth - a.variety_growth);
            let frac = if frac.is_finite() { frac.clamp(0.0, 1.0) } else { 1.0 };
            return Some(a.time + frac * (b.time - a.time));
        }
    }
    None
}
