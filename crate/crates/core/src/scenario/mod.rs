//! Scenario files, presets and the artifacts a run writes.

mod config;
mod presets;
mod run;
mod table;

pub use config::{Experiment, NonrivalryOptions, ScenarioConfig, TransitionRuns};
pub use presets::{find_preset, list_presets, Preset, PRESETS};
pub use run::{
    compute_artifacts, grid_table, manifest, manifest_params, output_root, policy_table,
    run_config, run_preset, run_scenario, sha256_hex, trajectory_table, Artifact, RunOutcome,
    OUTPUT_ROOT_VAR,
};
pub use table::{emit_plot_data, format_number, Cell, Table};
