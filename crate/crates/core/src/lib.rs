//! Preferential-attachment measurement on temporal networks.
//!
//! The crate measures how new nodes attach to existing ones as a function of
//! degree, coreness, or both, fits the resulting cumulative attachment curves,
//! and ships a growth simulator with planted kernels to validate the
//! measurement end to end.

pub mod error;
pub mod fitting;
pub mod growth_sim;
pub mod kcore;
pub mod pa_measure;
pub mod pipeline;
pub mod tables;
pub mod temporal_graph;

pub use error::{Error, Result};
pub use fitting::{FitOptions, FitOutcome, FitPoint, FitResult, Model};
pub use growth_sim::{simulate, KernelMode, KernelSpec, SimConfig};
pub use kcore::{core_decomposition, shell_stats, CorenessMap, ShellStats};
pub use pa_measure::{measure_coreness_pa, measure_degree_pa, measure_hybrid, AttachmentStats, HybridStats};
pub use pipeline::{analyze_schedule, analyze_window, ExponentKind, ExponentSeries, FitPlan, WindowSchedule};
pub use temporal_graph::{DegreeMode, NodeId, Snapshot, TemporalNetwork, TimeUnit, Timestamp};
