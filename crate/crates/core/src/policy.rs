//! Optimal R&D wage and profit subsidies, and the data-tax neutrality check.

use serde::Serialize;

use crate::bgp::{bgp_decentralized, labor_share_decentralized, labor_share_planner};
use crate::error::{Error, Result};
use crate::model::ModelParams;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PolicyRates {
    /// Gross subsidy multiplying the R&D wage.
    pub tau_labor: f64,
    /// Gross subsidy multiplying intermediate profits.
    pub tau_profit: f64,
    pub labor_valid: bool,
    pub profit_valid: bool,
    pub valid: bool,
    /// Labor subsidy from the unscaled closed form
    /// `(1-beta)[...]/(gamma g + rho - n)`, kept for comparison; it is off from the
    /// share-matching rate by a factor `xi`.
    pub tau_labor_unscaled: f64,
}

struct SubsidyTerms {
    /// `(sigma - xi)n + xi rho - (sigma - xi)(1 - zeta)g`
    planner: f64,
    /// `gamma g + rho - n`
    market: f64,
}

fn subsidy_terms(p: &ModelParams) -> Result<SubsidyTerms> {
    let (sigma, xi) = (p.privacy_curvature, p.data_elasticity);
    if sigma <= xi {
        return Err(Error::domain(
            "subsidy",
            format!("need sigma > xi, got sigma = {sigma}, xi = {xi}"),
        ));
    }
    let g = bgp_decentralized(p)?.growth;
    if g <= 0.0 {
        return Err(Error::domain("subsidy", format!("growth rate {g} is not positive")));
    }
    let (n, rho, zeta) = (p.pop_growth, p.discount, p.spillover);
    Ok(SubsidyTerms {
        planner: (sigma - xi) * n + xi * rho - (sigma - xi) * (1.0 - zeta) * g,
        market: p.inv_ies * g + rho - n,
    })
}

fn rates(p: &ModelParams) -> Result<PolicyRates> {
    let t = subsidy_terms(p)?;
    let one_minus_beta = 1.0 - p.labor_elasticity;
    let xi = p.data_elasticity;
    let tau_labor = one_minus_beta * t.planner / (xi * t.market);
    let tau_profit = xi * t.market / (one_minus_beta * t.planner);
    let labor_valid = tau_labor > 0.0 && tau_labor < 1.0;
    let profit_valid = tau_profit > 1.0;
    Ok(PolicyRates {
        tau_labor,
        tau_profit,
        labor_valid,
        profit_valid,
        valid: labor_valid && profit_valid,
        tau_labor_unscaled: one_minus_beta * t.planner / t.market,
    })
}

/// Wage subsidy that brings the market's R&D share up to the planner's.
pub fn optimal_labor_subsidy(p: &ModelParams) -> Result<PolicyRates> {
    rates(p)
}

/// Profit subsidy with the same effect; the reciprocal of the wage subsidy.
pub fn optimal_profit_subsidy(p: &ModelParams) -> Result<PolicyRates> {
    rates(p)
}

/// Production-to-R&D labor ratio in the market when R&D wages are multiplied by `tau`.
pub fn subsidized_theta(p: &ModelParams, tau: f64) -> Result<f64> {
    let g = bgp_decentralized(p)?.growth;
    Ok(tau * (p.inv_ies + (p.discount - p.pop_growth) / g)
        / ((1.0 - p.data_elasticity) * (1.0 - p.labor_elasticity)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PolicyReport {
    pub rates: PolicyRates,
    pub theta_subsidized: f64,
    pub theta_planner: f64,
    /// Planner R&D share minus the subsidized market share.
    pub share_gap_after_subsidy: f64,
}

pub fn policy_report(p: &ModelParams) -> Result<PolicyReport> {
    let r = optimal_labor_subsidy(p)?;
    let theta_subsidized = subsidized_theta(p, r.tau_labor)?;
    let planner = labor_share_planner(p)?;
    Ok(PolicyReport {
        rates: r,
        theta_subsidized,
        theta_planner: planner.theta,
        share_gap_after_subsidy: planner.rd_share - 1.0 / (1.0 + theta_subsidized),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DataTaxRow {
    pub tax_rate: f64,
    pub growth: f64,
    pub data_growth: f64,
    pub rd_share: f64,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DataTaxReport {
    pub rows: Vec<DataTaxRow>,
    pub max_deviation: f64,
    /// Tax growth the untaxed BGP rates would require; zero means a constant tax.
    pub required_tax_growth: f64,
}

/// Growth rates from the taxed free-entry system when the tax grows at `tax_growth`.
pub fn taxed_growth_rates(p: &ModelParams, tax_growth: f64) -> Result<(f64, f64)> {
    let (n, gamma, sigma, xi, zeta) = (
        p.pop_growth,
        p.inv_ies,
        p.privacy_curvature,
        p.data_elasticity,
        p.spillover,
    );
    // (zeta-1) g + xi g_phi = -n
    // (zeta-gamma) g + (xi-sigma) g_phi = tax_growth - n
    let (a11, a12, b1) = (zeta - 1.0, xi, -n);
    let (a21, a22, b2) = (zeta - gamma, xi - sigma, tax_growth - n);
    let det = a11 * a22 - a12 * a21;
    if det.abs() < 1e-14 {
        return Err(Error::domain("taxed_growth_rates", "singular growth system"));
    }
    Ok(((b1 * a22 - a12 * b2) / det, (a11 * b2 - a21 * b1) / det))
}

/// Constant data taxes leave the BGP rates and the market R&D share unchanged.
/// The tax level only enters through the constant product `tax * N / (phi * p_phi)`,
/// so each row recomputes the rates with zero tax growth.
pub fn data_tax_neutrality_check(p: &ModelParams, tax_rates: &[f64]) -> Result<DataTaxReport> {
    let base = bgp_decentralized(p)?;
    let base_share = labor_share_decentralized(p)?.rd_share;
    let mut rows = Vec::new();
    for &tax in tax_rates {
        if !(tax > 0.0) {
            return Err(Error::Validation(format!("data tax rate {tax} must be positive")));
        }
        let (g, gp) = taxed_growth_rates(p, 0.0)?;
        let theta = (p.inv_ies * g + p.discount - p.pop_growth)
            / (g * (1.0 - p.data_elasticity) * (1.0 - p.labor_elasticity));
        let share = 1.0 / (1.0 + theta);
        let deviation = (g - base.growth)
            .abs()
            .max((gp - base.data_growth).abs())
            .max((share - base_share).abs());
        rows.push(DataTaxRow {
            tax_rate: tax,
            growth: g,
            data_growth: gp,
            rd_share: share,
            deviation,
        });
    }
    let required_tax_growth = (p.spillover - p.inv_ies) * base.growth
        + (p.data_elasticity - p.privacy_curvature) * base.data_growth
        + p.pop_growth;
    Ok(DataTaxReport {
        max_deviation: rows.iter().map(|r| r.deviation).fold(0.0, f64::max),
        rows,
        required_tax_growth,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn default_subsidies() {
        let p = ModelParams::default();
        let r = optimal_labor_subsidy(&p).unwrap();
        assert_abs_diff_eq!(r.tau_labor_unscaled, 0.116519174041, epsilon = 1e-11);
        assert_abs_diff_eq!(r.tau_labor, 0.233038348083, epsilon = 1e-11);
        assert_abs_diff_eq!(r.tau_labor * r.tau_profit, 1.0, epsilon = 1e-12);
        assert!(r.valid);
    }

    #[test]
    fn subsidy_closes_the_share_gap() {
        let rep = policy_report(&ModelParams::default()).unwrap();
        assert_abs_diff_eq!(rep.theta_subsidized, rep.theta_planner, epsilon = 1e-10);
        assert_abs_diff_eq!(rep.share_gap_after_subsidy, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn constant_taxes_are_neutral() {
        let r = data_tax_neutrality_check(&ModelParams::default(), &[0.5, 1.0, 2.0]).unwrap();
        assert!(r.max_deviation <= 1e-12);
        assert!(r.required_tax_growth.abs() <= 1e-15);
    }

    #[test]
    fn growing_tax_shifts_growth() {
        let p = ModelParams::default();
        let (g, _) = taxed_growth_rates(&p, 0.01).unwrap();
        assert!((g - bgp_decentralized(&p).unwrap().growth).abs() > 1e-4);
    }
}
