//! Experiment harness: discrete rearrangement inequalities, monotone sweeps,
//! disc bounds, and scans of open conjectures. Every experiment returns an
//! [`ExperimentReport`] that is reproducible from its parameters and seeds.

mod fk;
mod flow;
mod placement;
mod report;
mod riesz;
mod sweeps;

pub use fk::{domain_monotonicity_check, reverse_fk_polarization, reverse_fk_schwarz, sandwich_check, FkGap};
pub use flow::{conjecture_scan, polarization_flow, ConjectureKind, ScanConfig};
pub use placement::{Placement, SweepOptions, DEFAULT_EXPERIMENT_CAP};
pub use report::{monotone_verdict, Direction, ExperimentReport, Verdict, REPORT_SCHEMA_VERSION, STRICT_FACTOR};
pub use riesz::{check_riesz_polarization, pair_energy, random_case, riesz_suite, RIESZ_TOL};
pub use sweeps::{
    annulus_sweep, dumbbell, dumbbell_sweep, obstacle_sweep, two_ball_sweep, two_balls, ObstacleFamily,
};
