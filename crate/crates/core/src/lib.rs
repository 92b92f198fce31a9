//! Fractional and multifractional Brownian motion synthesis, and Hurst index
//! estimation with the increment ratio statistic (IRS).
//!
//! ```
//! use irs_hurst::{estimate_global, simulate_fbm, Filter};
//!
//! let path = simulate_fbm(0.7, 4096, 42).unwrap();
//! let report = estimate_global(&path, &Filter::binomial(2), 0.05).unwrap();
//! let h = report.estimates[0].h_hat;
//! assert!((h - 0.7).abs() < 0.1);
//! ```

pub mod error;
pub mod estimation;
pub mod exec;
pub mod filters;
pub mod harness;
pub mod io;
pub mod irs;
pub mod seed;
pub mod stats;
pub mod synthesis;
pub mod theory;

pub use error::{Error, Result};
pub use estimation::{estimate_global, estimate_gqv, estimate_local, Estimate, EstimationReport, IrsEstimator, Method};
pub use exec::Execution;
pub use filters::Filter;
pub use harness::{run_clt_check, run_fbm_table, run_mbm_table, CltReport, ExperimentConfig, MonteCarloReport, Scenario};
pub use irs::{increments, irs, localized_irs, psi, IncrementSeries, LocalIrs, LocalWindow};
pub use synthesis::{
    simulate_fbm, simulate_fbm_cholesky, simulate_mbm, BuiltinHurst, HurstFunction, Provenance, SamplePath,
};
pub use theory::{lambda0, lambda_a, lambda_a_inverse, rho_a_closed, rho_a_general, sigma2_mc, Sigma2Table};
