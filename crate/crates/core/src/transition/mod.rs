//! Planner transition dynamics by reverse shooting.

mod shooting;
mod system;
mod trap;

pub use shooting::{
    arrival_time, integrate_backward, solve_transition, Candidate, ShootingConfig,
    ShootingDiagnostics, Trajectory, TrajectorySample,
};
pub use system::{flow_with_slack, ode_rhs, steady_state, DataRegime, Flow, TransitionState};
pub use trap::{growth_trap_experiment, CatchUp, TrapDelay, TrapReport, TrapRun, ARRIVAL_BAND};
