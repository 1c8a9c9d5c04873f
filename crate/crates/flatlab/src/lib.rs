//! Experiment driver behind the `flatlab` command: pushes of twist tori by the geodesic
//! flow, measured through a proxy coordinate on the stratum, with deterministic reports.

pub mod cli;
pub mod config;
pub mod error;
pub mod experiments;
pub mod proxy;
pub mod report;
pub mod surfaces;

pub use config::ExperimentConfig;
pub use error::{HarnessError, Result};
pub use experiments::{
    run_banach_average, run_density_experiment, run_full_support_probe, run_horocycle_baseline, BanachReport,
    BanachRequest, DensityReport, SupportReport,
};
pub use surfaces::SurfaceRef;
