use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    pub config: &'static str,
}

macro_rules! sigma_preset {
    ($name:literal, $sigma:literal) => {
        Preset {
            name: $name,
            description: concat!(
                "transition paths with and without the data constraint (s = 0), sigma = ",
                $sigma
            ),
            config: concat!(
                "[params]\nsigma = ",
                $sigma,
                "\ns = 0\n\n[experiment]\nkind = transition\nruns = both\ndt = 0.1\nhorizon = 1000\n",
                "perturbation_scale = 1e-6\ntarget_growth = 1e-4\ntolerance = 1e-6\n\n[output]\ndir = ",
                $name,
                "\n"
            ),
        }
    };
}

pub const PRESETS: &[Preset] = &[
    Preset {
        name: "bgp-defaults",
        description: "balanced growth rates for every ownership variant at the default parameters",
        config: "[experiment]\nkind = bgp\n\n[output]\ndir = bgp-defaults\n",
    },
    Preset {
        name: "figure1-grid",
        description: "R&D labor gap between planner and market over xi, zeta and sigma in {1.5, 2.5}",
        config: "[experiment]\nkind = grid\nxi_min = 0.3\nxi_max = 0.8\nxi_step = 0.05\n\
                 zeta_min = 0.5\nzeta_max = 0.95\nzeta_step = 0.05\nsigma_values = 1.5, 2.5\n\n\
                 [output]\ndir = figure1-grid\n",
    },
    sigma_preset!("figure2-sigma1.5", "1.5"),
    sigma_preset!("figure2-sigma2.0", "2.0"),
    sigma_preset!("figure2-sigma2.5", "2.5"),
    sigma_preset!("figure2-sigma3.0", "3.0"),
    Preset {
        name: "figure3-trap",
        description: "arrival at the BGP from low and advanced starts under s in {0, 0.078, unbounded}",
        config: "[experiment]\nkind = trap\nstarts = 1e-20, 1e-4, 1e-2\ns_values = 0, 0.078, unbounded\n\
                 dt = 0.1\nhorizon = 5000\nperturbation_scale = 1e-6\ntolerance = 1e-6\n\
                 share_margin = 1e-30\ngrowth_floor = 1e-30\n\n[output]\ndir = figure3-trap\n",
    },
    Preset {
        name: "figureEC3-levels",
        description: "flow and cumulative data provision along the transition, sigma = 1.5",
        config: "[params]\ns = 0\n\n[experiment]\nkind = transition\nruns = both\ndt = 0.1\nhorizon = 1000\n\
                 target_growth = 1e-4\n\n[output]\ndir = figureEC3-levels\n\
                 columns = t,g_phi,phi_level,phi_cumulative,binding\n",
    },
    Preset {
        name: "policy-subsidies",
        description: "optimal R&D wage and profit subsidies and the constant data-tax check",
        config: "[experiment]\nkind = policy\ntax_rates = 0.5, 1, 2\n\n[output]\ndir = policy-subsidies\n",
    },
    Preset {
        name: "nonrivalry-table",
        description: "resale proportions for market and planner at c0 in {0.2, 4, 14} and the crossover",
        config: "[experiment]\nkind = nonrivalry\nc0_values = 0.2, 4, 14\nd_max = 10\n\
                 planner_prefactor = auto\ncrossover_min = 4\ncrossover_max = 30\n\n\
                 [output]\ndir = nonrivalry-table\n",
    },
    Preset {
        name: "accumulation-check",
        description: "growth of a depreciating data stock against the BGP data growth, kappa = 0.1",
        config: "[experiment]\nkind = accumulation\nkappa = 0.1\nhorizon = 500\ndt = 0.1\n\n\
                 [output]\ndir = accumulation-check\n",
    },
];

pub fn list_presets() -> &'static [Preset] {
    PRESETS
}

pub fn find_preset(name: &str) -> Result<&'static Preset> {
    PRESETS
        .iter()
        .find(|p| p.name == name)
        .ok_or_else(|| Error::UnknownPreset(name.to_string()))
}
