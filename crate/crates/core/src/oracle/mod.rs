//! Exact reflection-representation engine.
//!
//! Every combinatorial move of the library can be checked here against an
//! honest matrix computation: orders of products, longest elements, centers,
//! reflection tests and relation checks for candidate automorphisms.

pub mod automorphism;
pub mod continuation;
pub mod cyclotomic;
pub mod matrix;
pub mod rep;
pub mod scalar;
pub mod sharp;

use thiserror::Error;

use crate::classify::ClassifyError;
use crate::diagram::DiagramError;

pub use automorphism::{
    build_angle_deformation, build_local_automorphism, build_transvection, verify_images,
    AutomorphismSpec,
};
pub use continuation::{
    finite_continuation, graph_factors, is_graph_factor, odd_data, FiniteContinuation, OddData,
};
pub use cyclotomic::{CycNumber, CyclotomicField, DEFAULT_MAX_MODULUS};
pub use matrix::Matrix;
pub use rep::{GeometricRep, GroupElement, GroupEnumeration, ProductOrder, DEFAULT_BOUND, DEFAULT_ENUMERATION_CAP};
pub use scalar::{RepScalar, FLOAT_TOLERANCE};
pub use sharp::{is_sharp_angled_pair, SharpAngled};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("cyclotomic modulus {modulus} exceeds the limit {limit}; raise max_modulus to allow it")]
    ModulusTooLarge { modulus: u32, limit: u32 },
    #[error("element is not a reflection")]
    NotAReflection,
    #[error("vertex set is not spherical")]
    NotSpherical,
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("vertex set does not belong to this diagram")]
    ForeignVertexSet,
    #[error("representation check failed: {0}")]
    RepresentationCheck(String),
    #[error("element is not central in the parabolic subgroup")]
    NotCentral,
    #[error("vertex set is not a graph factor")]
    NotGraphFactor,
    #[error("image of `{0}` is not supported in the graph factor")]
    ImageOutsideFactor(String),
    #[error("diagram contains a subdiagram of type {0}; the formula does not apply")]
    PreconditionViolated(String),
    #[error("angle-deformation hypothesis fails: Y_s and Y_t meet in {0:?}")]
    ChainsIntersect(Vec<String>),
    #[error("conjugated generator does not generate the same dihedral subgroup")]
    NotDihedralGenerator,
    #[error("label between `{0}` and `{1}` is infinite")]
    InfiniteLabel(String, String),
    #[error("relation check failed: {0}")]
    RelationFailed(String),
    #[error("order could not be determined within the bound")]
    OrderUnknown,
}

impl From<ClassifyError> for OracleError {
    fn from(e: ClassifyError) -> Self {
        match e {
            ClassifyError::NotSpherical => OracleError::NotSpherical,
            _ => OracleError::ForeignVertexSet,
        }
    }
}

impl From<DiagramError> for OracleError {
    fn from(e: DiagramError) -> Self {
        match e {
            DiagramError::UnknownVertex(v) => OracleError::UnknownVertex(v),
            _ => OracleError::ForeignVertexSet,
        }
    }
}
