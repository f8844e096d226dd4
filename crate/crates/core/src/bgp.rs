//! Closed-form balanced growth path: rates, labor shares, misallocation and
//! ownership variants.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{validate_params, ModelParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Regime {
    DecentralizedConsumerOwned,
    Planner,
    FirmOwned,
    FirmOwnedConstrained,
    ConsumerOwnedConstrained,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BgpSolution {
    /// Common growth rate of consumption, output and varieties.
    pub growth: f64,
    /// Growth rate of per-capita data provision.
    pub data_growth: f64,
    /// Growth rate of the shadow price of technology.
    pub shadow_growth: f64,
    pub interest_rate: f64,
    pub regime: Regime,
    pub constraint_binding: bool,
    pub feasible: bool,
}

fn denominator(p: &ModelParams) -> f64 {
    (1.0 - p.spillover) * p.privacy_curvature - p.data_elasticity * (1.0 - p.inv_ies)
}

fn shadow_growth(p: &ModelParams, growth: f64) -> f64 {
    let (sigma, xi, zeta) = (p.privacy_curvature, p.data_elasticity, p.spillover);
    (sigma * (1.0 - zeta) - xi) / xi * growth - sigma / xi * p.pop_growth
}

pub fn bgp_decentralized(p: &ModelParams) -> Result<BgpSolution> {
    let den = denominator(p);
    if den <= 0.0 {
        return Err(Error::domain(
            "bgp_decentralized",
            format!("growth denominator (1-zeta)sigma - xi(1-gamma) = {den} is not positive"),
        ));
    }
    let n = p.pop_growth;
    let growth = p.privacy_curvature * n / den;
    Ok(BgpSolution {
        growth,
        data_growth: (1.0 - p.inv_ies) * n / den,
        shadow_growth: shadow_growth(p, growth),
        interest_rate: p.inv_ies * growth + p.discount,
        regime: Regime::DecentralizedConsumerOwned,
        constraint_binding: false,
        feasible: true,
    })
}

/// Upper bound on the planner's growth rate.
pub fn planner_growth_cap(p: &ModelParams) -> Result<f64> {
    let (sigma, xi) = (p.privacy_curvature, p.data_elasticity);
    if sigma <= xi {
        return Err(Error::domain(
            "planner_growth_cap",
            format!("need sigma > xi, got sigma = {sigma}, xi = {xi}"),
        ));
    }
    Ok((p.pop_growth + xi * p.discount / (sigma - xi)) / (1.0 - p.spillover))
}

/// Planner rates. They coincide with the market rates unless the growth cap binds,
/// which can only happen for inverse IES below one.
pub fn bgp_planner(p: &ModelParams) -> Result<BgpSolution> {
    let base = bgp_decentralized(p)?;
    let cap = planner_growth_cap(p)?;
    let mut sol = BgpSolution {
        regime: Regime::Planner,
        ..base
    };
    if base.growth > cap {
        let g = cap;
        sol.growth = g;
        sol.data_growth = ((1.0 - p.spillover) * g - p.pop_growth) / p.data_elasticity;
        sol.shadow_growth = shadow_growth(p, g);
        sol.interest_rate = p.inv_ies * g + p.discount;
        sol.constraint_binding = true;
    }
    Ok(sol)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LaborShares {
    /// Share of labor in R&D.
    pub rd_share: f64,
    /// Ratio of production to R&D labor.
    pub theta: f64,
    pub regime: Regime,
    /// False when theta is negative or not finite.
    pub feasible: bool,
}

impl LaborShares {
    fn new(theta: f64, regime: Regime) -> Self {
        LaborShares {
            rd_share: 1.0 / (1.0 + theta),
            theta,
            regime,
            feasible: theta.is_finite() && theta >= 0.0,
        }
    }
}

pub fn labor_share_decentralized(p: &ModelParams) -> Result<LaborShares> {
    let sol = bgp_decentralized(p)?;
    let g = sol.growth;
    if p.pop_growth == 0.0 {
        // R&D labor vanishes in the zero-growth limit
        return Ok(LaborShares {
            rd_share: 0.0,
            theta: f64::INFINITY,
            regime: sol.regime,
            feasible: true,
        });
    }
    if g <= 0.0 {
        return Err(Error::domain(
            "labor_share_decentralized",
            format!("growth rate {g} is not positive"),
        ));
    }
    let theta = (g * p.inv_ies + p.discount - p.pop_growth)
        / (g * (1.0 - p.data_elasticity) * (1.0 - p.labor_elasticity));
    Ok(LaborShares::new(theta, sol.regime))
}

pub fn labor_share_planner(p: &ModelParams) -> Result<LaborShares> {
    let sol = bgp_planner(p)?;
    let g = sol.growth;
    if g <= 0.0 {
        return Err(Error::domain(
            "labor_share_planner",
            format!("growth rate {g} is not positive"),
        ));
    }
    let (n, rho, sigma, xi, zeta) = (
        p.pop_growth,
        p.discount,
        p.privacy_curvature,
        p.data_elasticity,
        p.spillover,
    );
    let scale = xi * (1.0 - xi);
    let theta = ((sigma - xi) * n + xi * rho) / (scale * g) - (sigma - xi) * (1.0 - zeta) / scale;
    Ok(LaborShares::new(theta, sol.regime))
}

/// How much more data the market uses than the planner at equal technology and
/// population.
pub fn data_overuse_ratio(p: &ModelParams) -> Result<f64> {
    let planner = labor_share_planner(p)?;
    let market = labor_share_decentralized(p)?;
    let xi = p.data_elasticity;
    Ok((planner.rd_share / market.rd_share).powf((1.0 - xi) / xi))
}

/// Ratio of labor income to data income at R&D labor share `rd_share`.
pub fn labor_income_share(p: &ModelParams, rd_share: f64) -> Result<f64> {
    if !(rd_share > 0.0 && rd_share <= 1.0) {
        return Err(Error::domain(
            "labor_income_share",
            format!("R&D share must lie in (0, 1], got {rd_share}"),
        ));
    }
    let xi = p.data_elasticity;
    Ok((1.0 - xi) / xi / rd_share)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MisallocationCell {
    pub xi: f64,
    pub zeta: f64,
    pub sigma: f64,
    pub rd_share_planner: f64,
    pub rd_share_decentralized: f64,
    pub gap: f64,
    pub overuse_ratio: f64,
    pub feasible: bool,
    pub violations: Vec<String>,
}

/// Grid axes; each is swept in the given order.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct GridSpec {
    pub xi: Vec<f64>,
    pub zeta: Vec<f64>,
    pub sigma: Vec<f64>,
}

/// Evenly spaced points from `lo` to `hi` inclusive. The count is rounded so that
/// float drift in `step` does not drop the last point.
pub fn grid_axis(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || hi < lo {
        return Err(Error::Validation(format!(
            "bad axis: lo = {lo}, hi = {hi}, step = {step}"
        )));
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize;
    Ok((0..=count).map(|i| lo + step * i as f64).collect())
}

/// Fraction of neighbouring feasible cells along each axis that move in the
/// expected direction: gap up in sigma, up in xi, down in zeta.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapMonotonicity {
    pub sigma_increasing: f64,
    pub xi_increasing: f64,
    pub zeta_decreasing: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridReport {
    pub cells: Vec<MisallocationCell>,
    pub monotonicity: GapMonotonicity,
}

fn grid_cell(base: &ModelParams, xi: f64, zeta: f64, sigma: f64) -> MisallocationCell {
    let p = ModelParams {
        data_elasticity: xi,
        spillover: zeta,
        privacy_curvature: sigma,
        ..*base
    };
    let report = validate_params(&p);
    let mut violations: Vec<String> = report.violated.iter().map(|v| v.name.to_string()).collect();
    let shares = labor_share_planner(&p).and_then(|s| Ok((s, labor_share_decentralized(&p)?)));
    let (planner, market) = match shares {
        Ok(pair) => pair,
        Err(e) => {
            violations.push(e.to_string());
            return MisallocationCell {
                xi,
                zeta,
                sigma,
                rd_share_planner: f64::NAN,
                rd_share_decentralized: f64::NAN,
                gap: f64::NAN,
                overuse_ratio: f64::NAN,
                feasible: false,
                violations,
            };
        }
    };
    if !planner.feasible {
        violations.push("planner_share_negative".into());
    }
    if !market.feasible {
        violations.push("market_share_negative".into());
    }
    MisallocationCell {
        xi,
        zeta,
        sigma,
        rd_share_planner: planner.rd_share,
        rd_share_decentralized: market.rd_share,
        gap: planner.rd_share - market.rd_share,
        overuse_ratio: (planner.rd_share / market.rd_share).powf((1.0 - xi) / xi),
        feasible: violations.is_empty(),
        violations,
    }
}

fn share_moving(pairs: impl Iterator<Item = (f64, f64)>, up: bool) -> f64 {
    let (mut good, mut total) = (0usize, 0usize);
    for (a, b) in pairs {
        total += 1;
        if (up && b > a) || (!up && b < a) {
            good += 1;
        }
    }
    if total == 0 {
        f64::NAN
    } else {
        good as f64 / total as f64
    }
}

/// One cell per grid point, ordered by sigma, then xi, then zeta.
pub fn misallocation_grid(p: &ModelParams, grid: &GridSpec) -> GridReport {
    let coords: Vec<(f64, f64, f64)> = grid
        .sigma
        .iter()
        .flat_map(|&s| {
            grid.xi
                .iter()
                .flat_map(move |&x| grid.zeta.iter().map(move |&z| (s, x, z)))
        })
        .collect();
    let cells: Vec<MisallocationCell> = coords
        .par_iter()
        .map(|&(s, x, z)| grid_cell(p, x, z, s))
        .collect();

    let (ns, nx, nz) = (grid.sigma.len(), grid.xi.len(), grid.zeta.len());
    let at = |i: usize, j: usize, k: usize| &cells[(i * nx + j) * nz + k];
    let gaps = |a: &MisallocationCell, b: &MisallocationCell| {
        (a.feasible && b.feasible).then_some((a.gap, b.gap))
    };
    let mut by_sigma = Vec::new();
    let mut by_xi = Vec::new();
    let mut by_zeta = Vec::new();
    for i in 0..ns {
        for j in 0..nx {
            for k in 0..nz {
                if i + 1 < ns {
                    by_sigma.extend(gaps(at(i, j, k), at(i + 1, j, k)));
                }
                if j + 1 < nx {
                    by_xi.extend(gaps(at(i, j, k), at(i, j + 1, k)));
                }
                if k + 1 < nz {
                    by_zeta.extend(gaps(at(i, j, k), at(i, j, k + 1)));
                }
            }
        }
    }
    GridReport {
        monotonicity: GapMonotonicity {
            sigma_increasing: share_moving(by_sigma.into_iter(), true),
            xi_increasing: share_moving(by_xi.into_iter(), true),
            zeta_decreasing: share_moving(by_zeta.into_iter(), false),
        },
        cells,
    }
}

/// Rates when firms own the data and pay a convex processing cost.
pub fn bgp_firm_ownership(p: &ModelParams) -> Result<BgpSolution> {
    let (n, xi, zeta, phi) = (
        p.pop_growth,
        p.data_elasticity,
        p.spillover,
        p.processing_exponent,
    );
    if !(p.processing_scale > 0.0 && phi > 1.0) {
        return Err(Error::domain(
            "bgp_firm_ownership",
            format!(
                "need theta > 0 and phi_cost > 1, got theta = {}, phi_cost = {phi}",
                p.processing_scale
            ),
        ));
    }
    let sol = |growth: f64, data_growth: f64, regime, feasible| BgpSolution {
        growth,
        data_growth,
        shadow_growth: shadow_growth(p, growth),
        interest_rate: p.inv_ies * growth + p.discount,
        regime,
        constraint_binding: regime == Regime::FirmOwnedConstrained,
        feasible,
    };
    if 2.0 - zeta <= xi + phi {
        let den = phi * (1.0 - zeta) - xi;
        let feasible = den > 0.0;
        Ok(sol(
            (xi + phi) * n / den,
            (2.0 - zeta) * n / den,
            Regime::FirmOwned,
            feasible,
        ))
    } else {
        let den = 1.0 - zeta - xi;
        let g = n / den;
        Ok(sol(g, g, Regime::FirmOwnedConstrained, den > 0.0))
    }
}

/// Slack below which the data-provision constraint binds on the market path.
pub fn binding_slack_threshold(p: &ModelParams) -> Result<f64> {
    let base = bgp_decentralized(p)?;
    Ok(base.data_growth - base.growth)
}

/// Market rates with the data-provision constraint at slack `s`.
pub fn bgp_consumer_constrained(p: &ModelParams) -> Result<BgpSolution> {
    let base = bgp_decentralized(p)?;
    let s = p.data_slack;
    if s >= base.data_growth - base.growth {
        return Ok(base);
    }
    let den = 1.0 - p.spillover - p.data_elasticity;
    let growth = (p.data_elasticity * s + p.pop_growth) / den;
    Ok(BgpSolution {
        growth,
        data_growth: growth + s,
        shadow_growth: shadow_growth(p, growth),
        interest_rate: p.inv_ies * growth + p.discount,
        regime: Regime::ConsumerOwnedConstrained,
        constraint_binding: true,
        feasible: den > 0.0,
    })
}

/// Whether a positive processing cost under consumer ownership leaves the
/// baseline rates unchanged.
pub fn processing_cost_is_neutral(p: &ModelParams) -> bool {
    let (sigma, xi, zeta, phi) = (
        p.privacy_curvature,
        p.data_elasticity,
        p.spillover,
        p.processing_exponent,
    );
    sigma * (2.0 - zeta) + (xi + phi) * (p.inv_ies - 1.0) > 0.0
}

/// Consumer ownership with a processing cost. Outside the neutral region the rates
/// have no closed form and an error is returned.
pub fn bgp_consumer_owned(p: &ModelParams) -> Result<BgpSolution> {
    if p.processing_scale == 0.0 || processing_cost_is_neutral(p) {
        bgp_decentralized(p)
    } else {
        Err(Error::domain(
            "bgp_consumer_owned",
            "processing cost is not neutral for these parameters",
        ))
    }
}
