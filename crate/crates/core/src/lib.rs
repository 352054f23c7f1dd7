//! Lattice discretizations `f_{h,q}(x) = [f(x)]_{h,q}` of maps on compact
//! domains, classification of dynamically robust offsets, and Monte Carlo
//! estimators for the measure of the robust offset set.
//!
//! The crate is `no_std` and needs only `alloc`. Parallel sampling is
//! delegated to a [`measure::SampleExecutor`] supplied by the caller.
#![no_std]

extern crate alloc;

pub mod dynamics;
pub mod error;
pub mod lattice;
pub mod maps;
pub mod measure;
pub mod rng;

pub use dynamics::{
    analyze_cycles, discretize, fixed_points, k_of, proposition1_check, robustness_verdict,
    tarski_iterate, CycleReport, DiscretizedSystem, RobustnessReason, RobustnessVerdict, Successor,
};
pub use error::{Error, Result};
pub use lattice::{
    compute_extent, enumerate_domain, order_bounds, round_to_lattice, scalar_round, DomainSpec,
    ExtentReport, GridContext, LatticeIndex, Membership, OrderBounds,
};
pub use maps::{builtin_map, check_margin, check_monotone, check_self_mapping, ConditionVerdict, MapSpec, Witness};
pub use measure::{
    bounds_report, estimate_k_integral, estimate_near_fixed_measure, estimate_vs, q_grid_scan,
    BoundReport, MeasureEstimate, SampleExecutor, Sequential,
};
