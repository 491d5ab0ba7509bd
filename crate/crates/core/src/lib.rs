//! Isomorphism of finitely generated Coxeter groups.
//!
//! Diagrams are rewritten by two kinds of moves: reductions along
//! pseudo-transpositions, and twists along admissible pairs. Two groups are
//! compared by reducing both diagrams and searching the twist class of one
//! for the other. Every move can be checked against an exact computation in
//! the geometric representation ([`oracle`]).

pub mod canon;
pub mod classify;
pub mod diagram;
pub mod explorer;
pub mod moves;
pub mod oracle;

pub use canon::{canonical_form, find_isomorphism, DiagramIso};
pub use classify::{
    is_spherical, opposition_involution, recognize_irreducible, ClassifyError, Family, Opposition,
    SphericalType,
};
pub use diagram::{parse_diagram, CoxeterMatrix, DiagramError, Label, VertexSet};
pub use explorer::{
    decide_isomorphism, twist_class, twist_equivalent, Answer, AnswerClass, Certificate, Equivalence,
    TwistClass, Verdict, DEFAULT_CAP,
};
pub use moves::{
    admissible_pairs, apply_reduction, apply_twist, pseudo_transpositions, reduced_reduction,
    verify_twist, AdmissiblePair, MoveError, MoveOptions, MoveRecord, PseudoTransposition,
};
pub use oracle::{CycNumber, GeometricRep, GroupElement, OracleError, ProductOrder};

/// Representation over exact cyclotomic numbers.
pub type ExactRep = GeometricRep<CycNumber>;
/// Representation over `f64`, for quick approximate checks.
pub type FloatRep = GeometricRep<f64>;
pub type ExactElement = GroupElement<CycNumber>;
pub type FloatElement = GroupElement<f64>;
