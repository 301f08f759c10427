//! The bundled example programs.

use crate::lang::{parse_source, Expr, Program};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Example {
    /// Short identifier, also the file stem under `corpus/`.
    pub id: &'static str,
    /// Display name used in reports.
    pub name: &'static str,
    pub source: &'static str,
}

pub const DOUBLE_APPEND: Example = Example {
    id: "double_append",
    name: "double append",
    source: include_str!("../corpus/double_append.sc"),
};

pub const KMP: Example = Example {
    id: "kmp",
    name: "KMP test",
    source: include_str!("../corpus/kmp.sc"),
};

pub const EQBOOL_SYM: Example = Example {
    id: "eqbool_sym",
    name: "eqBool symmetry",
    source: include_str!("../corpus/eqbool_sym.sc"),
};

pub const EXP_GROWTH: Example = Example {
    id: "exp_growth",
    name: "exp growth",
    source: include_str!("../corpus/exp_growth.sc"),
};

pub const ALL: [Example; 4] = [DOUBLE_APPEND, KMP, EQBOOL_SYM, EXP_GROWTH];

impl Example {
    pub fn by_id(id: &str) -> Option<Example> {
        ALL.into_iter().find(|e| e.id == id)
    }

    /// The program and its root expression. Bundled sources always parse.
    pub fn load(&self) -> (Program, Expr) {
        let src = parse_source(self.source).expect("bundled example parses");
        (src.program, src.expression.expect("bundled example has an expression"))
    }
}
