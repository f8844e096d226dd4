use rayon::prelude::*;
use serde::Serialize;

use crate::bgp::bgp_decentralized;
use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::rootfind::{brent, brute_force_roots, scan_brackets};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ResaleRegime {
    Decentralized,
    Planner,
}

/// Multiplier on the planner's resale value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PlannerPrefactor {
    /// `delta^-M`, as in the simplified planner condition.
    Displayed,
    /// Resold stock as a point mass at the lag: `delta^M d`.
    StockPointMass,
    /// Resold stock spread evenly over the lag window: `d * int_0^M delta^u du`.
    StockIntegral,
}

impl PlannerPrefactor {
    pub const ALL: [PlannerPrefactor; 3] = [
        PlannerPrefactor::Displayed,
        PlannerPrefactor::StockPointMass,
        PlannerPrefactor::StockIntegral,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PlannerPrefactor::Displayed => "displayed",
            PlannerPrefactor::StockPointMass => "stock-point-mass",
            PlannerPrefactor::StockIntegral => "stock-integral",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|v| v.name() == name)
    }
}

/// Single-lag resale problem: data produced now can be sold to entrants `lag` later.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResaleProblem {
    pub data_elasticity: f64,
    pub spillover: f64,
    pub privacy_curvature: f64,
    pub pop_growth: f64,
    pub new_data_weight: f64,
    pub substitution: f64,
    pub destruction: f64,
    pub lag: f64,
    pub vintage_decay: f64,
    pub growth: f64,
    pub data_growth: f64,
    /// Growth of the market's resale value term.
    pub market_value_growth: f64,
    /// Growth of the planner's resale value term.
    pub planner_value_growth: f64,
}

impl ResaleProblem {
    pub fn from_params(p: &ModelParams) -> Result<Self> {
        let bad = |what: String| Err(Error::Validation(format!("resale problem: {what}")));
        if !(p.substitution > 1.0) {
            return bad(format!("epsilon = {} must exceed 1", p.substitution));
        }
        if !(p.resale_lag > 0.0) {
            return bad(format!("lag = {} must be positive", p.resale_lag));
        }
        if !(p.vintage_decay > 0.0 && p.vintage_decay <= 1.0) {
            return bad(format!("delta = {} must lie in (0, 1]", p.vintage_decay));
        }
        if !(p.new_data_weight > 0.0 && p.new_data_weight <= 1.0) {
            return bad(format!("alpha = {} must lie in (0, 1]", p.new_data_weight));
        }
        let bgp = bgp_decentralized(p)?;
        let (xi, zeta, sigma, n, eps) = (
            p.data_elasticity,
            p.spillover,
            p.privacy_curvature,
            p.pop_growth,
            p.substitution,
        );
        Ok(ResaleProblem {
            data_elasticity: xi,
            spillover: zeta,
            privacy_curvature: sigma,
            pop_growth: n,
            new_data_weight: p.new_data_weight,
            substitution: eps,
            destruction: p.destruction,
            lag: p.resale_lag,
            vintage_decay: p.vintage_decay,
            growth: bgp.growth,
            data_growth: bgp.data_growth,
            market_value_growth: zeta * bgp.growth + xi * bgp.data_growth + n,
            planner_value_growth: (-sigma + 1.0 - 1.0 / eps) * bgp.data_growth
                + (1.0 - 1.0 / eps) * n,
        })
    }

    pub fn with_destruction(&self, c0: f64) -> Self {
        ResaleProblem {
            destruction: c0,
            ..*self
        }
    }

    /// CES aggregator of new and resold data, normalized by new data.
    fn composite(&self, stock: f64) -> f64 {
        let (a, inv) = (self.new_data_weight, 1.0 / self.substitution);
        1.0 / (a * stock.powf(-inv) + (1.0 - a) * stock.powf(1.0 - inv))
    }

    /// Effective resold stock at resale proportion `d`.
    fn lagged_stock(&self, d: f64) -> f64 {
        let m = self.lag;
        m.powf(1.0 / (1.0 - self.substitution))
            * self.vintage_decay.powf(m)
            * d
            * (-(self.data_growth + self.pop_growth) * m).exp()
    }

    /// Market condition, left side minus right side.
    pub fn market_residual(&self, d: f64) -> f64 {
        let (m, c0, inv) = (self.lag, self.destruction, 1.0 / self.substitution);
        let lhs = d.powf(1.0 + inv) * (-c0 * d * d * m).exp();
        let rhs = (1.0 - self.new_data_weight) * self.data_elasticity / (2.0 * c0 * m)
            * self.vintage_decay.powf((1.0 - inv) * m)
            * (-self.market_value_growth * m).exp()
            * m.powf(-inv)
            * (1.0 - (-(c0 * d * d - self.pop_growth) * m).exp())
            * self.composite(self.lagged_stock(d));
        lhs - rhs
    }

    /// Planner condition, left side minus right side.
    pub fn planner_residual(&self, d: f64, prefactor: PlannerPrefactor) -> f64 {
        let (m, delta, inv) = (self.lag, self.vintage_decay, 1.0 / self.substitution);
        let a = self.new_data_weight;
        let scale = match prefactor {
            PlannerPrefactor::Displayed => delta.powf(-m),
            PlannerPrefactor::StockPointMass => delta.powf(m) * d,
            PlannerPrefactor::StockIntegral => {
                if delta == 1.0 {
                    d * m
                } else {
                    d * (delta.powf(m) - 1.0) / delta.ln()
                }
            }
        };
        let rhs = scale * self.privacy_curvature * (1.0 - a) / a
            * delta.powf(-inv * m)
            * (-self.planner_value_growth * m).exp()
            * m.powf(-inv)
            * self.composite(self.lagged_stock(d));
        d.powf(inv) - rhs
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Root {
    pub value: f64,
    pub residual: f64,
    pub in_unit_interval: bool,
    /// The `d = 0` root, which holds only in the limit.
    pub trivial: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixedPointReport {
    pub regime: ResaleRegime,
    pub destruction: f64,
    /// Ascending; the trivial root comes first when included.
    pub roots: Vec<Root>,
    pub brackets: Vec<(f64, f64)>,
    pub trivial_root_included: bool,
}

impl FixedPointReport {
    /// Largest nontrivial root.
    pub fn main_root(&self) -> Option<f64> {
        self.roots.iter().filter(|r| !r.trivial).map(|r| r.value).next_back()
    }
}

/// Search settings shared by both conditions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RootSearch {
    pub upper: f64,
    pub pieces: usize,
}

impl Default for RootSearch {
    fn default() -> Self {
        RootSearch {
            upper: 10.0,
            pieces: 4000,
        }
    }
}

const XTOL: f64 = 1e-14;

fn solve(
    regime: ResaleRegime,
    destruction: f64,
    f: impl Fn(f64) -> f64,
    search: &RootSearch,
) -> Result<FixedPointReport> {
    let lo = search.upper / search.pieces as f64 * 1e-3;
    let brackets = scan_brackets(&f, lo, search.upper, search.pieces);
    let mut roots = vec![Root {
        value: 0.0,
        residual: 0.0,
        in_unit_interval: true,
        trivial: true,
    }];
    for &(a, b) in &brackets {
        let x = if a == b { a } else { brent(&f, a, b, XTOL, 200)? };
        roots.push(Root {
            value: x,
            residual: f(x).abs(),
            in_unit_interval: (0.0..=1.0).contains(&x),
            trivial: false,
        });
    }
    Ok(FixedPointReport {
        regime,
        destruction,
        roots,
        brackets,
        trivial_root_included: true,
    })
}

pub fn fixed_point_decentralized(prob: &ResaleProblem, search: &RootSearch) -> Result<FixedPointReport> {
    if !(prob.destruction > 0.0) {
        return Err(Error::Validation(format!(
            "market resale condition needs c0 > 0, got {}",
            prob.destruction
        )));
    }
    solve(
        ResaleRegime::Decentralized,
        prob.destruction,
        |d| prob.market_residual(d),
        search,
    )
}

pub fn fixed_point_planner(
    prob: &ResaleProblem,
    prefactor: PlannerPrefactor,
    search: &RootSearch,
) -> Result<FixedPointReport> {
    solve(
        ResaleRegime::Planner,
        prob.destruction,
        |d| prob.planner_residual(d, prefactor),
        search,
    )
}

/// Nontrivial roots from the plain grid-and-bisection scanner, for cross-checking.
pub fn oracle_roots(prob: &ResaleProblem, regime: ResaleRegime, prefactor: PlannerPrefactor, step: f64, upper: f64) -> Vec<f64> {
    match regime {
        ResaleRegime::Decentralized => {
            brute_force_roots(|d| prob.market_residual(d), step, upper, step)
        }
        ResaleRegime::Planner => {
            brute_force_roots(|d| prob.planner_residual(d, prefactor), step, upper, step)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrefactorOutcome {
    pub prefactor: PlannerPrefactor,
    pub root: Option<f64>,
    pub matches: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrefactorSurvey {
    pub reference: f64,
    pub tolerance: f64,
    pub outcomes: Vec<PrefactorOutcome>,
    /// First variant, in declaration order, whose root is within tolerance.
    pub matched: Option<PlannerPrefactor>,
}

/// Solve the planner condition under every prefactor and report which lands within
/// `tolerance` of `reference`.
pub fn planner_prefactor_survey(
    prob: &ResaleProblem,
    reference: f64,
    tolerance: f64,
    search: &RootSearch,
) -> Result<PrefactorSurvey> {
    let mut outcomes = Vec::new();
    for v in PlannerPrefactor::ALL {
        let root = fixed_point_planner(prob, v, search)?.main_root();
        outcomes.push(PrefactorOutcome {
            prefactor: v,
            root,
            matches: root.is_some_and(|r| (r - reference).abs() <= tolerance),
        });
    }
    let matched = outcomes.iter().find(|o| o.matches).map(|o| o.prefactor);
    Ok(PrefactorSurvey {
        reference,
        tolerance,
        outcomes,
        matched,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Crossover {
    pub destruction: f64,
    pub planner_root: f64,
}

fn market_root(prob: &ResaleProblem, c0: f64, search: &RootSearch) -> Result<f64> {
    fixed_point_decentralized(&prob.with_destruction(c0), search)?
        .main_root()
        .ok_or_else(|| Error::NonConvergence(format!("no market resale root at c0 = {c0}")))
}

/// Destruction intensity at which the market's resale proportion drops below the
/// planner's.
pub fn creative_destruction_crossover(
    prob: &ResaleProblem,
    range: (f64, f64),
    prefactor: PlannerPrefactor,
    search: &RootSearch,
) -> Result<Crossover> {
    let planner_root = fixed_point_planner(prob, prefactor, search)?
        .main_root()
        .ok_or_else(|| Error::NonConvergence("no planner resale root".into()))?;
    let (mut lo, mut hi) = range;
    let gap = |c0: f64| market_root(prob, c0, search).map(|r| r - planner_root);
    let (glo, ghi) = (gap(lo)?, gap(hi)?);
    if !(glo > 0.0 && ghi < 0.0) {
        return Err(Error::NonConvergence(format!(
            "no crossover in [{lo}, {hi}]: market minus planner root is {glo} and {ghi}"
        )));
    }
    while hi - lo > 1e-10 * hi.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if gap(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Crossover {
        destruction: hi,
        planner_root,
    })
}

/// Market and planner reports for each destruction intensity, in input order.
pub fn resale_table(
    prob: &ResaleProblem,
    destruction: &[f64],
    prefactor: PlannerPrefactor,
    search: &RootSearch,
) -> Result<Vec<(FixedPointReport, FixedPointReport)>> {
    destruction
        .par_iter()
        .map(|&c0| {
            let pr = prob.with_destruction(c0);
            Ok((
                fixed_point_decentralized(&pr, search)?,
                fixed_point_planner(&pr, prefactor, search)?,
            ))
        })
        .collect()
}
