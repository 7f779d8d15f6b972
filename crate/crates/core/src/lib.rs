//! Stochastic matching models: items of finitely many classes arrive one by
//! one and leave in pairs along the edges of a matching graph, the pairing
//! picked by a policy. This crate provides the graph-structural stability
//! conditions and their decision procedures, the matching policies, seeded
//! simulation of the buffer chain, and exact drift-based classification of
//! the reduced chains, including the closed-form stability regions of the
//! two reference priority policies and the five-cycle instability
//! construction.
//!
//! ```
//! use matching_model::model::presets;
//! use matching_model::{ncond, ChainClass, ReducedPolicy};
//!
//! let g = presets::example1_graph();
//! let mu = presets::preset("example1").unwrap().mu.unwrap();
//!
//! // The structural conditions hold for the bundled law, with margin 1/10.
//! let verdict = ncond::ncond_bruteforce(&g, &mu).unwrap();
//! assert!(verdict.holds);
//!
//! // Priority policy B is stable at this law; policy A is not.
//! let b = matching_model::classify_model(ReducedPolicy::B, &mu).unwrap();
//! assert_eq!(b.overall, ChainClass::Ergodic);
//! let a = matching_model::classify_model(ReducedPolicy::A, &mu).unwrap();
//! assert_eq!(a.overall, ChainClass::Transient);
//! ```

pub mod drift;
pub mod graph;
pub mod measure;
pub mod model;
pub mod ncond;
pub mod policy;
pub mod scalar;
pub mod sim;

pub use drift::{
    build_axis_chain_u2, build_cycle5_chain, build_reduced_chain, classify_model,
    derive_reduced_chain, drifts, fmm_classify, region_sweep, stab_region_closed_form,
    stationary_truncated_birth_death, stationary_truncated_quadrant, verify_l_eta,
    verify_lyapunov_linear, BirthDeathChain, ChainClass, DriftError, DriftProfile, ModelStability,
    QuadrantWalk, ReducedPolicy, StabilityVerdict,
};
pub use graph::{GraphClassification, GraphError, MatchingGraph, VertexSet};
pub use measure::{MeasureError, ProbabilityVector};
pub use model::{load_model, parse_model, ModelError, ModelFile};
pub use ncond::{
    find_ncond_witness, ncond_bruteforce, ncond_flow, ncond_half, NcondError, NcondVerdict,
};
pub use policy::{BufferState, MatchingPolicy, PolicyError};
pub use scalar::{Scalar, Sign};
pub use sim::{
    classify_empirical, growth_rate_fit, simulate, EmpiricalConfig, EmpiricalVerdict,
    SimulationConfig, SimulationResult,
};
