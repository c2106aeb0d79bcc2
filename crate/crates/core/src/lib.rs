//! A two-player fusion game between a sensor that can verify outsourced
//! computation only statistically and an attacker that controls the
//! computer's output.
//!
//! The crate provides the game itself, iterated best response, closed-form
//! equilibria, the analytic convergence conditions and a parallel parameter
//! sweep that checks those conditions against simulation.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the `*64`
//! aliases below fix the scalar to `f64`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod convergence;
pub mod equilibrium;
pub mod error;
pub mod game;
pub mod geometry;
pub mod ibr;
mod sampling;
pub mod scalar;
pub mod sweep;

pub use convergence::{
    assumption1_holds, collinear, evaluate_predicates, lemma1_bound_check, necessary_region_union,
    projection_bound, required_epsilon, strong_sufficient, strong_sufficient_equal_means,
    sufficient_region_intersection, weak_necessary, weak_necessary_equal_means, MismatchBudget,
    NecessaryRegion, NecessaryReport, PredicateReport, ProjectionBound, SufficientRegion,
    SufficientReport, ZetaSet, ZetaShape,
};
pub use equilibrium::{
    mixed_equilibria, verify_nash, zero_equilibrium, zero_equilibrium_exists,
    zero_equilibrium_slack, Candidate, CandidateVerdict, Equilibrium, EquilibriumKind,
    MixedQuadratic,
};
pub use error::{Error, Result};
pub use game::{fuse, FusionWeight, GameParams, RegionLabel};
pub use geometry::{
    in_closed_half_plane, project, project_onto_affine_hull, projection_norm, HalfPlane, Side,
    Vector,
};
pub use ibr::{
    ibr_run, is_nontrivial_init, sample_initial_conditions, sample_initial_conditions_with_rng,
    IbrConfig, IbrOutcome, IbrStep, IbrTrace, OutcomeKind,
};
pub use scalar::Scalar;

pub type Vector64 = Vector<f64>;
pub type GameParams64 = GameParams<f64>;
pub type FusionWeight64 = FusionWeight<f64>;
pub type IbrConfig64 = IbrConfig<f64>;
pub type IbrTrace64 = IbrTrace<f64>;
pub type Equilibrium64 = Equilibrium<f64>;
pub type PredicateReport64 = PredicateReport<f64>;
