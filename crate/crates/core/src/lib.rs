//! Locally convex cones, their neighborhood topologies, and Hyers–Ulam
//! stabilization of approximately quadratic maps between them.
//!
//! * [`cone`]: the cone trait, concrete cones and the axiom checker.
//! * [`topology`]: neighborhood scales, memberships, closure, boundedness
//!   and the uc-cone gauge.
//! * [`stability`]: the residual check, Hyers iteration, certificates,
//!   quadratic-law and uniqueness checks, and the normed-space verifier.
//! * [`lab`]: seeded quadratic forms, bounded noise, sweeps and reports.
//! * [`samples`]: deterministic dyadic sample sets on `ℝᵈ`.

pub mod cone;
pub mod lab;
pub mod samples;
pub mod stability;
pub mod topology;

pub use cone::laws::{
    check_cone_axioms, check_order_laws, AxiomReport, LawEntry, LawReport, LawSamples,
};
pub use cone::{
    Cone, ConeError, Euclidean, ExtendedReal, ExtendedReals, FunctionCone, FunctionElement,
    NonnegExtendedReals, TwoPoint, TwoPointPathology, VectorElement,
};
pub use stability::{
    banach_case_verify, hyers_iterate, min_lambda, quad_residual, stabilize, tail_bound,
    uniqueness_crosscheck, verify_quadratic_laws, ApproxQuadraticMap, BanachOptions, BanachReport,
    EvalError, HyersCertificate, StabilityError, StabilizationResult, StabilizeOptions,
    StructuredSamples,
};
pub use topology::{
    gauge, in_lower, in_symmetric, in_upper, NeighborhoodScale, NormedCone, TopologyError,
};
