//! Exact-arithmetic flat geometry for Weierstrass Prym eigenforms in genus
//! three.
//!
//! The crate builds the prototypical translation surfaces attached to real
//! quadratic discriminants, decomposes them into cylinders in any rational
//! direction of Q(√D) by exact separatrix tracing, constructs the affine
//! multitwists of parabolic directions, and computes the permutations these
//! twists induce on the three regular fixed points of the Prym involution.
//! On top of that sit the two obstruction invariants (torus projections of
//! the fixed points for square-tiled surfaces, and the fractional-part
//! partition in the non-arithmetic case) and a verification driver that
//! sweeps discriminant ranges and compares the computed permutation groups
//! against the expected classification.
//!
//! All arithmetic is exact: coordinates are elements of Q(√D) with
//! arbitrary-precision rational coefficients, and every geometric predicate
//! reduces to integer sign tests.

pub mod cylinders;
pub mod geom;
pub mod invariants;
pub mod permgroup;
pub mod prototypes;
pub mod qfield;
pub mod surface;
pub mod twists;
pub mod verify;

pub use cylinders::{cylinder_decomposition, moduli_ratios, CylinderDecomposition, Direction};
pub use geom::{Mat2, V2};
pub use permgroup::{classify, closure, MarkedPermutation, SubgroupClass};
pub use prototypes::{
    aux_prototypes, locus_status, predicted_group, reduced_prototypes, same_component,
    ComponentTag, LocusStatus, Model, PredictedGroup, Prototype,
};
pub use qfield::{lambda, OrderBasis, QuadNum, Rat, Sign};
pub use surface::{
    apply_matrix, build_surface, prym_fixed_points, validate_surface, PointOnSurface,
    SurfaceSpec, TranslationSurface,
};
pub use twists::{multitwist, pq_decompose, twist_permutation, Multitwist, PQDecomposition};
pub use verify::{appendix_a_check, compute_group, verify_range, Report, VerifyOptions};
