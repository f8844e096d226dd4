//! Numerical toolkit for a growth model in which consumers supply data to
//! innovators and dislike doing so.
//!
//! The crate covers the closed-form balanced growth path ([`bgp`]), the planner's
//! transition by reverse shooting ([`transition`]), subsidy and tax policy
//! ([`policy`]), historical-data resale and data accumulation ([`nonrivalry`]) and
//! the scenario runner behind the `growthlab` command ([`scenario`]).

// `!(x > 0.0)` is used on purpose so that NaN fails range checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bgp;
pub mod error;
pub mod model;
pub mod nonrivalry;
pub mod ode;
pub mod policy;
pub mod rootfind;
pub mod scenario;
pub mod transition;

pub use error::{Error, Result};
pub use model::{validate_params, ModelParams, ValidationReport};

/// Crate version recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
