//! Model IR and builders for dynamic workforce scheduling.
//!
//! A [`ModelIr`] holds parameters, families of bounded integer variables,
//! named groups of linear constraints and an objective. The three built-in
//! models (gig scheduling, nurse scheduling and the small static nurse model)
//! are built from [`Instance`] data by [`build_model`]. Constraint patches are
//! spliced in with [`apply_patch`].
//!
//! Everything is generic over the integer [`Scalar`] type; the aliases below
//! fix it to `i64`, which is what the rest of the workspace uses.

pub mod assignment;
pub mod build;
pub mod checkers;
mod error;
pub mod evaluate;
pub mod instance;
pub mod model;
pub mod num;
pub mod patch;

pub use assignment::{hamming_distance, Assignment, FamilyValues};
pub use build::{build_model, UNASSIGNED_PENALTY};
pub use error::ModelError;
pub use evaluate::{evaluate_assignment, group_verdicts, EvalReport, Violation};
pub use instance::{Instance, ProblemKind, Value};
pub use model::{
    ConstraintGroup, FamilyRef, LinearConstraint, LinearExpr, ModelIr, Objective, Param, ParamValue,
    Relation, Sense, VarId, VarKind, VariableFamily,
};
pub use num::Scalar;
pub use patch::{apply_patch, GroundedPatch};

/// The workspace-wide scalar.
pub type Int = i64;
pub type Model = ModelIr<Int>;
pub type Schedule = Assignment<Int>;
pub type Constraint = LinearConstraint<Int>;
pub type Patch = GroundedPatch<Int>;
pub type Report = EvalReport<Int>;
pub type Cells = FamilyValues<Int>;
