use serde::Serialize;

use crate::bgp::bgp_decentralized;
use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::ode::rk4_step;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AccumulationSample {
    pub time: f64,
    pub stock: f64,
    pub stock_growth: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AccumulationReport {
    pub data_growth: f64,
    pub depreciation: f64,
    pub samples: Vec<AccumulationSample>,
    /// `|g_Phi(T) - g_phi*|` at the horizon.
    pub final_gap: f64,
    /// Closed-form bound on the same gap.
    pub predicted_gap: f64,
    /// False when `g_phi* + kappa <= 0`, where the stock never settles into a fixed
    /// ratio with the flow.
    pub stable_ratio: bool,
}

/// Simulate a data stock fed by a flow growing at the BGP rate and depreciating at
/// `depreciation`, starting from `initial_stock` (flow normalized to 1 at t = 0).
pub fn accumulation_equivalence(
    p: &ModelParams,
    depreciation: f64,
    horizon: f64,
    dt: f64,
    initial_stock: f64,
) -> Result<AccumulationReport> {
    if depreciation < 0.0 || !(horizon > 0.0) || !(dt > 0.0) || !(initial_stock > 0.0) {
        return Err(Error::Validation(format!(
            "accumulation needs kappa >= 0, horizon > 0, dt > 0, stock > 0; got {depreciation}, {horizon}, {dt}, {initial_stock}"
        )));
    }
    let g = bgp_decentralized(p)?.data_growth;
    let kappa = depreciation;
    let mut f = |t: f64, y: &[f64; 1]| Ok::<_, Error>([(g * t).exp() - kappa * y[0]]);
    let growth = |t: f64, stock: f64| (g * t).exp() / stock - kappa;

    let steps = (horizon / dt).round() as usize;
    let mut samples = Vec::with_capacity(steps + 1);
    let mut y = [initial_stock];
    for i in 0..=steps {
        let t = i as f64 * dt;
        let sg = growth(t, y[0]);
        samples.push(AccumulationSample {
            time: t,
            stock: y[0],
            stock_growth: sg,
            gap: (sg - g).abs(),
        });
        if i < steps {
            y = rk4_step(&mut f, t, &y, dt)?;
        }
    }
    let rate = g + kappa;
    let predicted_gap = if rate > 0.0 {
        let ratio_start = rate * initial_stock - 1.0;
        let t = steps as f64 * dt;
        let e = ratio_start * (-rate * t).exp();
        (rate * e / (1.0 + e)).abs()
    } else {
        f64::INFINITY
    };
    Ok(AccumulationReport {
        data_growth: g,
        depreciation: kappa,
        final_gap: samples.last().map(|s| s.gap).unwrap_or(f64::NAN),
        predicted_gap,
        samples,
        stable_ratio: rate > 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn converges_at_defaults() {
        let r = accumulation_equivalence(&ModelParams::default(), 0.1, 500.0, 0.1, 1.0).unwrap();
        assert!(r.final_gap <= 1e-6);
        assert!(r.stable_ratio);
    }

    #[test]
    fn starting_on_the_ratio_stays_there() {
        let p = ModelParams::default();
        let g = bgp_decentralized(&p).unwrap().data_growth;
        let r = accumulation_equivalence(&p, 0.1, 50.0, 0.1, 1.0 / (g + 0.1)).unwrap();
        assert!(r.samples.iter().all(|s| s.gap < 1e-9));
    }

    #[test]
    fn no_depreciation_with_shrinking_flow_is_flagged() {
        let r = accumulation_equivalence(&ModelParams::default(), 0.0, 10.0, 0.1, 1.0).unwrap();
        assert!(!r.stable_ratio);
    }
}
