//! The object language: syntax, concrete syntax, and term operations.

mod embed;
mod names;
mod parse;
mod subst;
mod syntax;

pub use embed::embeds;
pub use names::NameSupply;
pub use parse::{parse_expression, parse_program, parse_source, ParseError, Source};
pub use subst::{bind, match_renaming, match_var_map, substitute, Renaming, Subst};
pub use syntax::{Clause, Expr, FunDef, Pattern, Program, ProgramError};
