//! Multi-result supercompilation for a small first-order functional language.
//!
//! The pipeline is:
//!
//! 1. [`lang`] parses programs and provides the term operations (substitution,
//!    renaming detection, homeomorphic embedding, fresh names).
//! 2. [`driving`] computes single-step and multi-result driving steps. The
//!    multi-result variant offers duplication-avoiding `let` generalizations
//!    alongside plain driving.
//! 3. [`mrsc`] builds a lazy graph ([`GraphSet`]) describing every
//!    configuration graph reachable by choosing among the alternatives.
//! 4. [`graphs`] expands, counts and measures configuration graphs, and
//!    [`queries`] picks distinguished graphs (first, last, smallest, largest)
//!    without enumerating the lazy graph.
//! 5. [`residual`] turns one configuration graph back into a program.
//!
//! [`interp`] is a call-by-name evaluator used to check that residual
//! programs agree with their sources, and [`check`] packages that comparison.

pub mod check;
pub mod corpus;
pub mod driving;
pub mod graphs;
pub mod interp;
pub mod lang;
pub mod mrsc;
pub mod queries;
pub mod residual;

pub use driving::{DriveStep, Driver, DrivingError, MultiStep};
pub use graphs::{ConfGraph, GraphNode, SizeMode};
pub use interp::{EvalError, Fuel, Value};
pub use lang::{Expr, FunDef, Pattern, Program, Renaming};
pub use mrsc::{GraphSet, MrscError, Supercompiler};
pub use queries::QueryResult;
pub use residual::{ResidualError, ResidualProgram};

