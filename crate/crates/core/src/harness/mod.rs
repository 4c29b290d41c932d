//! Scenario generators, the experiment runner, the brute-force grid oracle,
//! CSV/SVG export, run configuration and the property suite.

pub mod config;
pub mod export;
pub mod grid;
pub mod runner;
pub mod scenarios;
pub mod verify;

pub use config::RunOptions;
pub use export::{export_csv, render_chart, render_svg, write_csv};
pub use grid::{grid_argmin_oracle, grid_minimum, SlotObjective};
pub use runner::{run_experiment, run_many, run_scenario, Algorithm, LearnerSpec, RunConfig};
pub use scenarios::{comparator_sequence, scenario_costs, RandomSpec, Scenario, ScenarioId};
