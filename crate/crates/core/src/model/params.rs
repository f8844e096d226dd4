use serde::Serialize;

use crate::error::{Error, Result};

/// Structural parameters of the economy plus the resale block.
///
/// `data_slack` is the tightness of the data-provision constraint; `f64::INFINITY`
/// switches the constraint off.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelParams {
    pub pop_growth: f64,
    pub discount: f64,
    pub inv_ies: f64,
    pub privacy_curvature: f64,
    pub data_elasticity: f64,
    pub spillover: f64,
    pub labor_elasticity: f64,
    pub marginal_cost: f64,
    pub innovation_productivity: f64,
    pub data_slack: f64,
    pub processing_scale: f64,
    pub processing_exponent: f64,
    pub new_data_weight: f64,
    pub substitution: f64,
    pub destruction: f64,
    pub resale_lag: f64,
    pub vintage_decay: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        let labor_elasticity = 2.0 / 3.0;
        ModelParams {
            pop_growth: 0.02,
            discount: 0.03,
            inv_ies: 2.5,
            privacy_curvature: 1.5,
            data_elasticity: 0.5,
            spillover: 0.85,
            labor_elasticity,
            marginal_cost: 1.0 - labor_elasticity,
            innovation_productivity: 1.0,
            data_slack: 0.0,
            processing_scale: 0.0,
            processing_exponent: 2.0,
            new_data_weight: 0.5,
            substitution: 50.0,
            destruction: 0.2,
            resale_lag: 1.0,
            vintage_decay: 0.9,
        }
    }
}

/// Config keys in canonical order. These are also the names used in manifests.
pub const PARAM_KEYS: [&str; 17] = [
    "n", "rho", "gamma", "sigma", "xi", "zeta", "beta", "psi", "eta", "s", "theta", "phi_cost",
    "alpha", "epsilon", "c0", "lag", "delta",
];

impl ModelParams {
    fn slot(&mut self, key: &str) -> Option<&mut f64> {
        Some(match key {
            "n" => &mut self.pop_growth,
            "rho" => &mut self.discount,
            "gamma" => &mut self.inv_ies,
            "sigma" => &mut self.privacy_curvature,
            "xi" => &mut self.data_elasticity,
            "zeta" => &mut self.spillover,
            "beta" => &mut self.labor_elasticity,
            "psi" => &mut self.marginal_cost,
            "eta" => &mut self.innovation_productivity,
            "s" => &mut self.data_slack,
            "theta" => &mut self.processing_scale,
            "phi_cost" => &mut self.processing_exponent,
            "alpha" => &mut self.new_data_weight,
            "epsilon" => &mut self.substitution,
            "c0" => &mut self.destruction,
            "lag" => &mut self.resale_lag,
            "delta" => &mut self.vintage_decay,
            _ => return None,
        })
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        let mut copy = *self;
        copy.slot(key).map(|v| *v)
    }

    /// Set one parameter from its config spelling. `s` also accepts `unbounded`.
    pub fn set(&mut self, key: &str, raw: &str) -> Result<()> {
        let value = parse_value(key, raw)?;
        match self.slot(key) {
            Some(slot) => {
                *slot = value;
                Ok(())
            }
            None => Err(Error::UnknownKey {
                section: "params".into(),
                key: key.into(),
            }),
        }
    }

    /// All parameters as `(key, value)` strings that `set` parses back exactly.
    pub fn to_pairs(&self) -> Vec<(&'static str, String)> {
        PARAM_KEYS
            .iter()
            .map(|&k| (k, format_value(self.get(k).unwrap())))
            .collect()
    }

    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> Result<Self> {
        let mut p = ModelParams::default();
        for (k, v) in pairs {
            p.set(k, v)?;
        }
        Ok(p)
    }

    pub fn slack_is_unbounded(&self) -> bool {
        self.data_slack == f64::INFINITY
    }
}

fn parse_value(key: &str, raw: &str) -> Result<f64> {
    let raw = raw.trim();
    if raw == "unbounded" {
        return if key == "s" {
            Ok(f64::INFINITY)
        } else {
            Err(Error::Validation(format!("`{key}` cannot be unbounded")))
        };
    }
    let v: f64 = raw
        .parse()
        .map_err(|_| Error::Validation(format!("`{key}`: cannot parse `{raw}` as a number")))?;
    if !v.is_finite() {
        return Err(Error::Validation(format!("`{key}` must be finite")));
    }
    Ok(v)
}

/// Shortest representation that round-trips; infinity prints as `unbounded`.
pub fn format_value(v: f64) -> String {
    if v == f64::INFINITY {
        "unbounded".into()
    } else {
        format!("{v:?}")
    }
}

/// One named condition and the numbers behind it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub name: &'static str,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub violated: Vec<Violation>,
    /// Conditions that do not block a run but are worth reporting.
    pub warnings: Vec<Violation>,
}

impl ValidationReport {
    pub fn into_result(self) -> Result<()> {
        if self.valid {
            Ok(())
        } else {
            let names: Vec<String> = self
                .violated
                .iter()
                .map(|v| format!("{} ({})", v.name, v.detail))
                .collect();
            Err(Error::Validation(names.join("; ")))
        }
    }
}

/// Upper bound on the spillover for a balanced growth path to exist.
pub fn spillover_bound(p: &ModelParams) -> f64 {
    let (n, rho, gamma, sigma, xi) = (
        p.pop_growth,
        p.discount,
        p.inv_ies,
        p.privacy_curvature,
        p.data_elasticity,
    );
    if gamma >= 1.0 {
        1.0 - (xi / sigma) * (1.0 - gamma)
    } else {
        1.0 - (1.0 - gamma) * (n / rho + xi / sigma)
    }
}

pub fn validate_params(p: &ModelParams) -> ValidationReport {
    let mut violated = Vec::new();
    let mut warnings = Vec::new();
    let mut check = |ok: bool, name: &'static str, detail: String| {
        if !ok {
            violated.push(Violation { name, detail });
        }
    };
    let open_unit = |x: f64| x > 0.0 && x < 1.0;

    check(p.pop_growth > 0.0, "n_positive", format!("n = {}", p.pop_growth));
    check(
        p.discount > p.pop_growth,
        "rho_above_n",
        format!("rho = {}, n = {}", p.discount, p.pop_growth),
    );
    check(p.inv_ies > 0.0, "gamma_positive", format!("gamma = {}", p.inv_ies));
    check(
        p.privacy_curvature > 1.0,
        "sigma_above_one",
        format!("sigma = {}", p.privacy_curvature),
    );
    check(
        open_unit(p.data_elasticity),
        "xi_in_unit_interval",
        format!("xi = {}", p.data_elasticity),
    );
    check(
        open_unit(p.spillover),
        "zeta_in_unit_interval",
        format!("zeta = {}", p.spillover),
    );
    check(
        open_unit(p.labor_elasticity),
        "beta_in_unit_interval",
        format!("beta = {}", p.labor_elasticity),
    );
    check(p.marginal_cost > 0.0, "psi_positive", format!("psi = {}", p.marginal_cost));
    check(
        p.innovation_productivity > 0.0,
        "eta_positive",
        format!("eta = {}", p.innovation_productivity),
    );
    check(
        p.processing_scale >= 0.0,
        "theta_nonnegative",
        format!("theta = {}", p.processing_scale),
    );
    check(
        p.processing_scale == 0.0 || p.processing_exponent > 1.0,
        "phi_cost_above_one",
        format!("phi_cost = {}", p.processing_exponent),
    );
    check(
        open_unit(p.new_data_weight),
        "alpha_in_unit_interval",
        format!("alpha = {}", p.new_data_weight),
    );
    check(p.substitution > 1.0, "epsilon_above_one", format!("epsilon = {}", p.substitution));
    check(p.destruction >= 0.0, "c0_nonnegative", format!("c0 = {}", p.destruction));
    check(p.resale_lag > 0.0, "lag_positive", format!("lag = {}", p.resale_lag));
    check(
        p.vintage_decay > 0.0 && p.vintage_decay <= 1.0,
        "delta_in_unit_interval",
        format!("delta = {}", p.vintage_decay),
    );

    let bound = spillover_bound(p);
    check(
        p.spillover < bound,
        "bgp_existence",
        format!("need zeta < {bound}, zeta = {}", p.spillover),
    );

    // the planner's growth bound only matters below unit inverse IES
    if violated.is_empty() && p.inv_ies < 1.0 {
        let sigma = p.privacy_curvature;
        let xi = p.data_elasticity;
        let den = (1.0 - p.spillover) * sigma - xi * (1.0 - p.inv_ies);
        let g = sigma * p.pop_growth / den;
        let cap = (p.pop_growth + xi * p.discount / (sigma - xi)) / (1.0 - p.spillover);
        if g > cap {
            warnings.push(Violation {
                name: "planner_growth_bound",
                detail: format!("g* = {g} exceeds {cap}"),
            });
        }
    }

    ValidationReport {
        valid: violated.is_empty(),
        violated,
        warnings,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let r = validate_params(&ModelParams::default());
        assert!(r.valid, "{r:?}");
    }

    #[test]
    fn spillover_at_one_is_rejected() {
        let p = ModelParams {
            spillover: 1.0,
            ..Default::default()
        };
        let r = validate_params(&p);
        assert!(!r.valid);
        assert!(r.violated.iter().any(|v| v.name == "zeta_in_unit_interval"));
    }

    #[test]
    fn zero_spillover_is_rejected() {
        let p = ModelParams {
            spillover: 0.0,
            ..Default::default()
        };
        assert!(!validate_params(&p).valid);
    }

    #[test]
    fn low_inv_ies_bound() {
        let p = ModelParams {
            inv_ies: 0.5,
            spillover: 0.99,
            ..Default::default()
        };
        assert!((spillover_bound(&p) - 0.5).abs() < 1e-12);
        assert!(!validate_params(&p).valid);
    }

    #[test]
    fn pairs_round_trip() {
        let p = ModelParams {
            data_slack: f64::INFINITY,
            spillover: 0.1 + 0.2,
            ..Default::default()
        };
        let pairs = p.to_pairs();
        let q = ModelParams::from_pairs(pairs.iter().map(|(k, v)| (*k, v.as_str()))).unwrap();
        assert_eq!(p, q);
        assert_eq!(pairs[9].1, "unbounded");
    }

    #[test]
    fn unknown_key_is_named() {
        let err = ModelParams::default().set("omega", "1").unwrap_err();
        assert!(err.to_string().contains("omega"));
    }
}
