//! Historical-data resale between incumbents and entrants, and the data-stock
//! accumulation check.

mod accumulation;
mod resale;

pub use accumulation::{accumulation_equivalence, AccumulationReport, AccumulationSample};
pub use resale::{
    creative_destruction_crossover, fixed_point_decentralized, fixed_point_planner, oracle_roots,
    planner_prefactor_survey, resale_table, Crossover, FixedPointReport, PlannerPrefactor,
    PrefactorOutcome, PrefactorSurvey, ResaleProblem, ResaleRegime, Root, RootSearch,
};
