//! Parameters, validation and balanced-growth levels.

mod levels;
mod params;

pub use levels::{bgp_levels, BgpLevels};
pub use params::{
    format_value, spillover_bound, validate_params, ModelParams, ValidationReport, Violation,
    PARAM_KEYS,
};
