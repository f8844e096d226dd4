use serde::Serialize;

use crate::bgp::{bgp_planner, labor_share_planner};
use crate::error::{Error, Result};
use crate::model::{validate_params, ModelParams};

/// Planner state on the transition path.
///
/// The R&D labor share is carried instead of the production share so that paths
/// starting with almost all labor in production keep full precision.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransitionState {
    pub time: f64,
    pub variety_growth: f64,
    pub shadow_growth: f64,
    pub rd_share: f64,
}

impl TransitionState {
    pub fn production_share(&self) -> f64 {
        1.0 - self.rd_share
    }

    pub(crate) fn vector(&self) -> [f64; 3] {
        [self.variety_growth, self.shadow_growth, self.rd_share]
    }

    pub(crate) fn from_vector(time: f64, y: &[f64; 3]) -> Self {
        TransitionState {
            time,
            variety_growth: y[0],
            shadow_growth: y[1],
            rd_share: y[2],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum DataRegime {
    Unconstrained,
    /// Data provision grows exactly at consumption growth plus the slack.
    Binding(f64),
}

/// Time derivatives of the state and the rates that go with them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Flow {
    pub d_variety_growth: f64,
    pub d_shadow_growth: f64,
    pub d_production_share: f64,
    pub data_growth: f64,
    pub consumption_growth: f64,
    pub binding: bool,
}

impl Flow {
    /// Derivative of the integrated vector `(g_N, g_mu, l_R)`.
    pub(crate) fn vector(&self) -> [f64; 3] {
        [
            self.d_variety_growth,
            self.d_shadow_growth,
            -self.d_production_share,
        ]
    }
}

const SINGULAR: f64 = 1e-14;

/// Right-hand side of the planner's transition system. Marginal cost is taken at the
/// normalization psi = 1 - beta, under which it drops out.
pub fn ode_rhs(state: &TransitionState, p: &ModelParams, regime: DataRegime) -> Result<Flow> {
    let (n, rho, gamma, sigma, xi, zeta) = (
        p.pop_growth,
        p.discount,
        p.inv_ies,
        p.privacy_curvature,
        p.data_elasticity,
        p.spillover,
    );
    let g = state.variety_growth;
    let mu = state.shadow_growth;
    let rd = state.rd_share;
    let prod = state.production_share();
    let singular = |term| Error::SingularDenominator {
        term,
        g_n: g,
        g_mu: mu,
        l_e: prod,
    };
    if !(rd > 0.0 && prod > 0.0) {
        return Err(singular("labor shares"));
    }
    let gap = sigma - xi;
    if gap.abs() < SINGULAR {
        return Err(singular("sigma - xi"));
    }

    let (d_prod, data_growth, consumption_growth, binding) = match regime {
        DataRegime::Unconstrained => {
            let k = xi / gap;
            let num = (gamma + zeta - 1.0 + xi * zeta / gap) * g + (1.0 + k) * (mu + n);
            let bracket = xi * (1.0 - xi) / gap - xi;
            if bracket.abs() < SINGULAR {
                return Err(singular("labor-share bracket"));
            }
            let den = bracket / rd - gamma / prod;
            if den.abs() < SINGULAR {
                return Err(singular("labor-share denominator"));
            }
            let d_prod = num / den;
            let data_growth = (mu + zeta * g - (1.0 - xi) * d_prod / rd + n) / gap;
            (d_prod, data_growth, g + d_prod / prod, false)
        }
        DataRegime::Binding(slack) => {
            let num = (gamma + zeta + xi - 1.0) * g + mu + xi * slack + n;
            let den = -(gamma + xi) / prod - xi / rd;
            if den.abs() < SINGULAR {
                return Err(singular("binding labor-share denominator"));
            }
            let d_prod = num / den;
            let consumption = g + d_prod / prod;
            (d_prod, consumption + slack, consumption, true)
        }
    };

    let frontier = (zeta - 1.0) * g + xi * data_growth + n;
    let d_shadow = (mu - rho + n)
        * (frontier
            + xi * d_prod / rd
            + (1.0 - xi - zeta) * d_prod / (zeta * rd + (1.0 - xi) * prod));
    let d_growth = g * (frontier - (1.0 - xi) * d_prod / rd);
    Ok(Flow {
        d_variety_growth: d_growth,
        d_shadow_growth: d_shadow,
        d_production_share: d_prod,
        data_growth,
        consumption_growth,
        binding,
    })
}

/// Flow under slack `slack`: binding whenever the unconstrained data growth would
/// exceed consumption growth plus the slack. Infinite slack never binds.
pub fn flow_with_slack(state: &TransitionState, p: &ModelParams, slack: f64) -> Result<Flow> {
    let free = ode_rhs(state, p, DataRegime::Unconstrained)?;
    if slack.is_finite() && free.data_growth > free.consumption_growth + slack {
        ode_rhs(state, p, DataRegime::Binding(slack))
    } else {
        Ok(free)
    }
}

/// Planner steady state: BGP growth, shadow-price growth and R&D share.
pub fn steady_state(p: &ModelParams) -> Result<TransitionState> {
    validate_params(p).into_result()?;
    let bgp = bgp_planner(p)?;
    let shares = labor_share_planner(p)?;
    if !shares.feasible {
        return Err(Error::domain(
            "steady_state",
            format!("planner R&D share infeasible (theta = {})", shares.theta),
        ));
    }
    Ok(TransitionState {
        time: 0.0,
        variety_growth: bgp.growth,
        shadow_growth: bgp.shadow_growth,
        rd_share: shares.rd_share,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn steady_state_is_fixed_point() {
        let p = ModelParams::default();
        let ss = steady_state(&p).unwrap();
        assert_abs_diff_eq!(ss.production_share(), 0.797979797980, epsilon = 1e-11);
        let f = ode_rhs(&ss, &p, DataRegime::Unconstrained).unwrap();
        for d in f.vector() {
            assert!(d.abs() < 1e-12, "{f:?}");
        }
        assert_abs_diff_eq!(f.data_growth, -0.4 / 13.0, epsilon = 1e-12);
        assert_abs_diff_eq!(f.consumption_growth, 0.4 / 13.0, epsilon = 1e-12);
    }

    #[test]
    fn binding_tracks_consumption() {
        let p = ModelParams::default();
        let st = TransitionState {
            time: 0.0,
            variety_growth: 0.001,
            shadow_growth: -0.0769,
            rd_share: 0.05,
        };
        let f = ode_rhs(&st, &p, DataRegime::Binding(0.0)).unwrap();
        assert_eq!(f.data_growth, f.consumption_growth);
        assert!(f.binding);
    }

    #[test]
    fn low_growth_state_is_finite() {
        let p = ModelParams::default();
        let st = TransitionState {
            time: 0.0,
            variety_growth: 0.001,
            shadow_growth: -1.0 / 13.0,
            rd_share: 0.05,
        };
        let f = ode_rhs(&st, &p, DataRegime::Unconstrained).unwrap();
        assert!(f.vector().iter().all(|d| d.is_finite()));
    }

    #[test]
    fn zero_population_growth_has_no_steady_state() {
        let p = ModelParams {
            pop_growth: 0.0,
            ..Default::default()
        };
        assert!(steady_state(&p).is_err());
    }

    #[test]
    fn singular_share_is_reported() {
        let p = ModelParams::default();
        let st = TransitionState {
            time: 0.0,
            variety_growth: 0.01,
            shadow_growth: -0.07,
            rd_share: 0.0,
        };
        assert!(matches!(
            ode_rhs(&st, &p, DataRegime::Unconstrained),
            Err(Error::SingularDenominator { .. })
        ));
    }
}
