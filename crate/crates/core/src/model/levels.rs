use serde::Serialize;

use super::ModelParams;
use crate::error::{Error, Result};

/// Prices and quantities on the balanced growth path at a given technology level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BgpLevels {
    pub price: f64,
    pub quantity: f64,
    pub profit: f64,
    pub wage: f64,
    pub output: f64,
    pub patent_value: f64,
}

/// Levels for `varieties` intermediate goods and `production_labor` workers in
/// final-good production, discounting profits at `rate`.
pub fn bgp_levels(
    p: &ModelParams,
    varieties: f64,
    production_labor: f64,
    rate: f64,
) -> Result<BgpLevels> {
    if varieties <= 0.0 || production_labor <= 0.0 {
        return Err(Error::domain(
            "bgp_levels",
            format!("need N > 0 and L_E > 0, got N = {varieties}, L_E = {production_labor}"),
        ));
    }
    if rate <= p.pop_growth {
        return Err(Error::domain(
            "bgp_levels",
            format!("interest rate {rate} must exceed n = {}", p.pop_growth),
        ));
    }
    let beta = p.labor_elasticity;
    let psi = p.marginal_cost;
    let base = (1.0 - beta).powi(2) / psi;
    let profit =
        psi.powf(1.0 - 1.0 / beta) * beta / (1.0 - beta).powf(1.0 - 2.0 / beta) * production_labor;
    Ok(BgpLevels {
        price: psi / (1.0 - beta),
        quantity: base.powf(1.0 / beta) * production_labor,
        profit,
        wage: beta * base.powf(1.0 / beta - 1.0) * varieties,
        output: base.powf(1.0 / beta - 1.0) * varieties * production_labor,
        patent_value: profit / (rate - p.pop_growth),
    })
}
