use std::collections::{HashMap, HashSet};
use std::fmt;

use thiserror::Error;

/// An object-language expression.
///
/// Constructor names start with an uppercase letter, function and variable
/// names with a lowercase one. Nothing below enforces that; the parser does.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Expr {
    Var(String),
    Ctr(String, Vec<Expr>),
    Call(String, Vec<Expr>),
}

impl Expr {
    pub fn var(name: impl Into<String>) -> Expr {
        Expr::Var(name.into())
    }

    pub fn ctr(name: impl Into<String>, args: Vec<Expr>) -> Expr {
        Expr::Ctr(name.into(), args)
    }

    pub fn call(name: impl Into<String>, args: Vec<Expr>) -> Expr {
        Expr::Call(name.into(), args)
    }

    pub fn as_var(&self) -> Option<&str> {
        match self {
            Expr::Var(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Expr::Var(_))
    }

    pub fn args(&self) -> &[Expr] {
        match self {
            Expr::Var(_) => &[],
            Expr::Ctr(_, args) | Expr::Call(_, args) => args,
        }
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        1 + self.args().iter().map(Expr::size).sum::<usize>()
    }

    /// Variables in order of first occurrence (left to right, depth first).
    pub fn vars(&self) -> Vec<String> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        self.collect_vars(&mut seen, &mut out);
        out
    }

    fn collect_vars(&self, seen: &mut HashSet<String>, out: &mut Vec<String>) {
        match self {
            Expr::Var(v) => {
                if seen.insert(v.clone()) {
                    out.push(v.clone());
                }
            }
            Expr::Ctr(_, args) | Expr::Call(_, args) => {
                for a in args {
                    a.collect_vars(seen, out);
                }
            }
        }
    }

    pub fn occurrences(&self, var: &str) -> usize {
        match self {
            Expr::Var(v) => usize::from(v == var),
            Expr::Ctr(_, args) | Expr::Call(_, args) => {
                args.iter().map(|a| a.occurrences(var)).sum()
            }
        }
    }

    pub fn is_closed(&self) -> bool {
        match self {
            Expr::Var(_) => false,
            Expr::Ctr(_, args) | Expr::Call(_, args) => args.iter().all(Expr::is_closed),
        }
    }

    /// Visits every function call in the expression, outermost first.
    pub fn for_each_call<'a>(&'a self, f: &mut impl FnMut(&'a str, &'a [Expr])) {
        match self {
            Expr::Var(_) => {}
            Expr::Ctr(_, args) => args.iter().for_each(|a| a.for_each_call(f)),
            Expr::Call(name, args) => {
                f(name, args);
                args.iter().for_each(|a| a.for_each_call(f));
            }
        }
    }

    /// Visits every constructor application with its arity.
    pub fn for_each_ctr<'a>(&'a self, f: &mut impl FnMut(&'a str, usize)) {
        match self {
            Expr::Var(_) => {}
            Expr::Ctr(name, args) => {
                f(name, args.len());
                args.iter().for_each(|a| a.for_each_ctr(f));
            }
            Expr::Call(_, args) => args.iter().for_each(|a| a.for_each_ctr(f)),
        }
    }
}

fn write_args<T: fmt::Display>(f: &mut fmt::Formatter<'_>, args: &[T]) -> fmt::Result {
    f.write_str("(")?;
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{a}")?;
    }
    f.write_str(")")
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Var(v) => f.write_str(v),
            Expr::Ctr(name, args) | Expr::Call(name, args) => {
                f.write_str(name)?;
                write_args(f, args)
            }
        }
    }
}

/// A flat constructor pattern `C(x1, ..., xn)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Pattern {
    pub ctr: String,
    pub vars: Vec<String>,
}

impl Pattern {
    pub fn new(ctr: impl Into<String>, vars: Vec<String>) -> Pattern {
        Pattern {
            ctr: ctr.into(),
            vars,
        }
    }

    pub fn to_expr(&self) -> Expr {
        Expr::Ctr(
            self.ctr.clone(),
            self.vars.iter().cloned().map(Expr::Var).collect(),
        )
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.ctr)?;
        write_args(f, &self.vars)
    }
}

/// One clause of a pattern-matching definition: `g(p, y1, ..., ym) = body`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clause {
    pub pattern: Pattern,
    pub params: Vec<String>,
    pub body: Expr,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FunDef {
    Ordinary {
        name: String,
        params: Vec<String>,
        body: Expr,
    },
    Matching {
        name: String,
        clauses: Vec<Clause>,
    },
}

impl FunDef {
    pub fn name(&self) -> &str {
        match self {
            FunDef::Ordinary { name, .. } | FunDef::Matching { name, .. } => name,
        }
    }

    pub fn arity(&self) -> usize {
        match self {
            FunDef::Ordinary { params, .. } => params.len(),
            FunDef::Matching { clauses, .. } => 1 + clauses[0].params.len(),
        }
    }

    pub fn clause_for(&self, ctr: &str) -> Option<&Clause> {
        match self {
            FunDef::Ordinary { .. } => None,
            FunDef::Matching { clauses, .. } => clauses.iter().find(|c| c.pattern.ctr == ctr),
        }
    }

    /// Number of AST nodes: one per definition head plus its bodies.
    pub fn size(&self) -> usize {
        match self {
            FunDef::Ordinary { body, .. } => 1 + body.size(),
            FunDef::Matching { clauses, .. } => {
                clauses.iter().map(|c| 1 + c.body.size()).sum()
            }
        }
    }
}

impl fmt::Display for FunDef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunDef::Ordinary { name, params, body } => {
                f.write_str(name)?;
                write_args(f, params)?;
                write!(f, " = {body};")
            }
            FunDef::Matching { name, clauses } => {
                for (i, c) in clauses.iter().enumerate() {
                    if i > 0 {
                        writeln!(f)?;
                    }
                    write!(f, "{name}({}", c.pattern)?;
                    for p in &c.params {
                        write!(f, ", {p}")?;
                    }
                    write!(f, ") = {};", c.body)?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProgramError {
    #[error("function `{0}` is defined more than once")]
    DuplicateDefinition(String),
    #[error("function `{function}` has more than one clause for constructor `{ctr}`")]
    OverlappingClauses { function: String, ctr: String },
    #[error("clauses of `{0}` take different numbers of arguments")]
    InconsistentArity(String),
    #[error("variable `{var}` is bound twice in a clause of `{function}`")]
    DuplicateVariable { function: String, var: String },
    #[error("variable `{var}` is free in the body of `{function}`")]
    UnboundVariable { function: String, var: String },
    #[error("call to undefined function `{0}`")]
    UnknownFunction(String),
    #[error("`{function}` takes {expected} arguments but is called with {found}")]
    ArityMismatch {
        function: String,
        expected: usize,
        found: usize,
    },
}

/// A set of function definitions, at most one per name.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Program {
    defs: Vec<FunDef>,
    index: HashMap<String, usize>,
}

impl Program {
    /// Builds a program and checks the well-formedness conditions: unique
    /// names, non-overlapping clauses of equal arity, bound body variables,
    /// and resolving calls with matching arity.
    pub fn new(defs: Vec<FunDef>) -> Result<Program, ProgramError> {
        let mut index = HashMap::new();
        for (i, d) in defs.iter().enumerate() {
            if index.insert(d.name().to_string(), i).is_some() {
                return Err(ProgramError::DuplicateDefinition(d.name().to_string()));
            }
        }
        let program = Program { defs, index };
        for d in &program.defs {
            program.check_def(d)?;
        }
        Ok(program)
    }

    fn check_def(&self, d: &FunDef) -> Result<(), ProgramError> {
        let function = d.name().to_string();
        let check_binders = |binders: &[&String], body: &Expr| -> Result<(), ProgramError> {
            let mut seen = HashSet::new();
            for b in binders {
                if !seen.insert(b.as_str()) {
                    return Err(ProgramError::DuplicateVariable {
                        function: function.clone(),
                        var: (*b).clone(),
                    });
                }
            }
            if let Some(v) = body.vars().into_iter().find(|v| !seen.contains(v.as_str())) {
                return Err(ProgramError::UnboundVariable {
                    function: function.clone(),
                    var: v,
                });
            }
            self.check_expr(body)
        };
        match d {
            FunDef::Ordinary { params, body, .. } => {
                check_binders(&params.iter().collect::<Vec<_>>(), body)
            }
            FunDef::Matching { clauses, .. } => {
                let arity = clauses[0].params.len();
                let mut ctrs = HashSet::new();
                for c in clauses {
                    if c.params.len() != arity {
                        return Err(ProgramError::InconsistentArity(function.clone()));
                    }
                    if !ctrs.insert(c.pattern.ctr.as_str()) {
                        return Err(ProgramError::OverlappingClauses {
                            function: function.clone(),
                            ctr: c.pattern.ctr.clone(),
                        });
                    }
                    let binders: Vec<&String> = c.pattern.vars.iter().chain(&c.params).collect();
                    check_binders(&binders, &c.body)?;
                }
                Ok(())
            }
        }
    }

    /// Checks that every call in `e` names a definition of this program with
    /// the right number of arguments.
    pub fn check_expr(&self, e: &Expr) -> Result<(), ProgramError> {
        let mut err = None;
        e.for_each_call(&mut |name, args| {
            if err.is_some() {
                return;
            }
            match self.get(name) {
                None => err = Some(ProgramError::UnknownFunction(name.to_string())),
                Some(d) if d.arity() != args.len() => {
                    err = Some(ProgramError::ArityMismatch {
                        function: name.to_string(),
                        expected: d.arity(),
                        found: args.len(),
                    })
                }
                Some(_) => {}
            }
        });
        err.map_or(Ok(()), Err)
    }

    pub fn get(&self, name: &str) -> Option<&FunDef> {
        self.index.get(name).map(|&i| &self.defs[i])
    }

    pub fn defs(&self) -> &[FunDef] {
        &self.defs
    }

    pub fn is_empty(&self) -> bool {
        self.defs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.defs.len()
    }

    /// Total AST node count over all definitions.
    pub fn size(&self) -> usize {
        self.defs.iter().map(FunDef::size).sum()
    }

    /// Every identifier mentioned anywhere in the program.
    pub fn identifiers(&self) -> HashSet<String> {
        let mut out = HashSet::new();
        let add_expr = |e: &Expr, out: &mut HashSet<String>| {
            out.extend(e.vars());
            e.for_each_call(&mut |n, _| {
                out.insert(n.to_string());
            });
        };
        for d in &self.defs {
            out.insert(d.name().to_string());
            match d {
                FunDef::Ordinary { params, body, .. } => {
                    out.extend(params.iter().cloned());
                    add_expr(body, &mut out);
                }
                FunDef::Matching { clauses, .. } => {
                    for c in clauses {
                        out.extend(c.pattern.vars.iter().cloned());
                        out.extend(c.params.iter().cloned());
                        add_expr(&c.body, &mut out);
                    }
                }
            }
        }
        out
    }

    /// Constructors (with arities) that occur in patterns or bodies, sorted
    /// by name.
    pub fn constructors(&self) -> Vec<(String, usize)> {
        let mut out: HashMap<String, usize> = HashMap::new();
        for d in &self.defs {
            match d {
                FunDef::Ordinary { body, .. } => body.for_each_ctr(&mut |n, a| {
                    out.insert(n.to_string(), a);
                }),
                FunDef::Matching { clauses, .. } => {
                    for c in clauses {
                        out.insert(c.pattern.ctr.clone(), c.pattern.vars.len());
                        c.body.for_each_ctr(&mut |n, a| {
                            out.insert(n.to_string(), a);
                        });
                    }
                }
            }
        }
        let mut v: Vec<_> = out.into_iter().collect();
        v.sort();
        v
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.defs {
            writeln!(f, "{d}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(s: &str) -> Expr {
        Expr::var(s)
    }

    #[test]
    fn vars_in_first_occurrence_order() {
        let e = Expr::call("f", vec![v("b"), Expr::ctr("C", vec![v("a"), v("b")]), v("c")]);
        assert_eq!(e.vars(), vec!["b", "a", "c"]);
        assert_eq!(e.occurrences("b"), 2);
    }

    #[test]
    fn display_uses_parens_for_nullary() {
        let e = Expr::ctr("Cons", vec![Expr::ctr("A", vec![]), Expr::ctr("Nil", vec![])]);
        assert_eq!(e.to_string(), "Cons(A(), Nil())");
    }

    #[test]
    fn rejects_unbound_body_variable() {
        let d = FunDef::Ordinary {
            name: "f".into(),
            params: vec!["x".into()],
            body: v("y"),
        };
        assert_eq!(
            Program::new(vec![d]),
            Err(ProgramError::UnboundVariable {
                function: "f".into(),
                var: "y".into()
            })
        );
    }

    #[test]
    fn rejects_unknown_call() {
        let d = FunDef::Ordinary {
            name: "f".into(),
            params: vec![],
            body: Expr::call("g", vec![]),
        };
        assert_eq!(
            Program::new(vec![d]),
            Err(ProgramError::UnknownFunction("g".into()))
        );
    }
}
