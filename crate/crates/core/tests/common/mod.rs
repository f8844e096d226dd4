#![allow(dead_code)]

use growthlab::ModelParams;
use num::{BigRational, One, ToPrimitive};

/// Exact rational evaluation of the closed-form BGP quantities.
pub struct Exact {
    pub growth: f64,
    pub data_growth: f64,
    pub shadow_growth: f64,
    pub theta_market: f64,
    pub theta_planner: f64,
    pub share_market: f64,
    pub share_planner: f64,
}

fn q(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite")
}

fn frac(a: i64, b: i64) -> BigRational {
    BigRational::new(a.into(), b.into())
}

pub fn exact_from(
    n: BigRational,
    rho: BigRational,
    gamma: BigRational,
    sigma: BigRational,
    xi: BigRational,
    zeta: BigRational,
    beta: BigRational,
) -> Exact {
    let one = BigRational::one();
    let den = (&one - &zeta) * &sigma - &xi * (&one - &gamma);
    let g = &sigma * &n / &den;
    let gp = (&one - &gamma) * &n / &den;
    let gm = (&sigma * (&one - &zeta) - &xi) / &xi * &g - &sigma / &xi * &n;
    let theta_d = (&gamma * &g + &rho - &n) / (&g * (&one - &xi) * (&one - &beta));
    let scale = &xi * (&one - &xi);
    let theta_s = ((&sigma - &xi) * &n + &xi * &rho) / (&scale * &g)
        - (&sigma - &xi) * (&one - &zeta) / &scale;
    let s_d = &one / (&one + &theta_d);
    let s_s = &one / (&one + &theta_s);
    let f = |x: &BigRational| x.to_f64().unwrap();
    Exact {
        growth: f(&g),
        data_growth: f(&gp),
        shadow_growth: f(&gm),
        theta_market: f(&theta_d),
        theta_planner: f(&theta_s),
        share_market: f(&s_d),
        share_planner: f(&s_s),
    }
}

/// Oracle at the default calibration, with every input written as a fraction.
pub fn exact_defaults() -> Exact {
    exact_from(
        frac(1, 50),
        frac(3, 100),
        frac(5, 2),
        frac(3, 2),
        frac(1, 2),
        frac(17, 20),
        frac(2, 3),
    )
}

/// Oracle at arbitrary parameters (inputs taken as their exact binary values).
pub fn exact(p: &ModelParams) -> Exact {
    exact_from(
        q(p.pop_growth),
        q(p.discount),
        q(p.inv_ies),
        q(p.privacy_curvature),
        q(p.data_elasticity),
        q(p.spillover),
        q(p.labor_elasticity),
    )
}
