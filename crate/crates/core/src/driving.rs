//! Single-step driving and multi-result driving.
//!
//! Multi-result driving returns the plain driving step together with `let`
//! generalizations wherever unfolding could copy an argument expression. The
//! generalization alternatives always come first, so graphs enumerated
//! earlier carry more generalizations.

use thiserror::Error;

use crate::lang::{bind, substitute, Clause, Expr, FunDef, NameSupply, Pattern, Program};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DrivingError {
    #[error("call to undefined function `{0}`")]
    UnknownFunction(String),
    #[error("`{function}` has no clause for constructor `{ctr}`")]
    NoClause { function: String, ctr: String },
    #[error("`{function}` takes {expected} arguments but is called with {found}")]
    ArityMismatch {
        function: String,
        expected: usize,
        found: usize,
    },
}

/// Result of one step of ordinary driving.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DriveStep {
    None,
    Con(String, Vec<Expr>),
    Unfold(Expr),
    Cases(String, Vec<(Pattern, Expr)>),
}

/// One alternative produced by multi-result driving.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MultiStep {
    Leaf(Expr),
    Con(String, Vec<Expr>),
    Unfold(Expr),
    Cases(String, Vec<(Pattern, Expr)>),
    /// `let v1 = e1; ...; vn = en in body`
    Let(Vec<(String, Expr)>, Expr),
}

impl MultiStep {
    /// Configurations that still need to be developed, in the order used for
    /// graph children. For `Let` the body comes first, then the bindings.
    pub fn sub_exprs(&self) -> Vec<&Expr> {
        match self {
            MultiStep::Leaf(_) => vec![],
            MultiStep::Con(_, args) => args.iter().collect(),
            MultiStep::Unfold(e) => vec![e],
            MultiStep::Cases(_, branches) => branches.iter().map(|(_, e)| e).collect(),
            MultiStep::Let(binds, body) => {
                std::iter::once(body).chain(binds.iter().map(|(_, e)| e)).collect()
            }
        }
    }

    pub fn is_cases(&self) -> bool {
        matches!(self, MultiStep::Cases(..))
    }

    pub fn is_let(&self) -> bool {
        matches!(self, MultiStep::Let(..))
    }

    /// The single-result step this alternative corresponds to, if it is not a
    /// generalization.
    pub fn to_drive_step(&self) -> Option<DriveStep> {
        match self {
            MultiStep::Leaf(_) => Some(DriveStep::None),
            MultiStep::Con(c, args) => Some(DriveStep::Con(c.clone(), args.clone())),
            MultiStep::Unfold(e) => Some(DriveStep::Unfold(e.clone())),
            MultiStep::Cases(x, bs) => Some(DriveStep::Cases(x.clone(), bs.clone())),
            MultiStep::Let(..) => None,
        }
    }
}

/// The context `g(•, e1, ..., en)` of a call whose first argument is itself a
/// call.
struct Context<'a> {
    function: &'a str,
    rest: &'a [Expr],
}

impl Context<'_> {
    fn plug(&self, hole: Expr) -> Expr {
        let mut args = Vec::with_capacity(self.rest.len() + 1);
        args.push(hole);
        args.extend(self.rest.iter().cloned());
        Expr::Call(self.function.to_string(), args)
    }

    /// Plugs a case branch, propagating `x = pattern` into the context too.
    fn plug_branch(&self, x: &str, pattern: &Pattern, hole: Expr) -> Expr {
        let info = bind(&[x.to_string()], [pattern.to_expr()]);
        let mut args = Vec::with_capacity(self.rest.len() + 1);
        args.push(hole);
        args.extend(self.rest.iter().map(|e| substitute(e, &info)));
        Expr::Call(self.function.to_string(), args)
    }

    fn map_step(&self, step: DriveStep) -> DriveStep {
        match step {
            DriveStep::Unfold(e) => DriveStep::Unfold(self.plug(e)),
            DriveStep::Cases(x, bs) => {
                let bs = bs.into_iter().map(|(p, e)| {
                    let e = self.plug_branch(&x, &p, e);
                    (p, e)
                });
                DriveStep::Cases(x.clone(), bs.collect())
            }
            // A call never drives to a variable or a constructor.
            other => other,
        }
    }

    fn map_multi(&self, step: MultiStep) -> MultiStep {
        match step {
            MultiStep::Unfold(e) => MultiStep::Unfold(self.plug(e)),
            MultiStep::Cases(x, bs) => {
                let bs = bs.into_iter().map(|(p, e)| {
                    let e = self.plug_branch(&x, &p, e);
                    (p, e)
                });
                MultiStep::Cases(x.clone(), bs.collect())
            }
            MultiStep::Let(binds, body) => MultiStep::Let(binds, self.plug(body)),
            other => other,
        }
    }
}

/// Driving over a fixed program with a shared fresh-name supply.
pub struct Driver<'p> {
    program: &'p Program,
    names: NameSupply,
}

impl<'p> Driver<'p> {
    /// A driver whose fresh names avoid every identifier of `program` and
    /// `root`.
    pub fn new(program: &'p Program, root: &Expr) -> Driver<'p> {
        let mut taken = program.identifiers();
        taken.extend(root.vars());
        Driver {
            program,
            names: NameSupply::new(taken),
        }
    }

    pub fn program(&self) -> &'p Program {
        self.program
    }

    pub fn fresh(&mut self, hint: &str) -> String {
        self.names.fresh(hint)
    }

    fn lookup(&self, name: &str, args: &[Expr]) -> Result<&'p FunDef, DrivingError> {
        let def = self
            .program
            .get(name)
            .ok_or_else(|| DrivingError::UnknownFunction(name.to_string()))?;
        if def.arity() != args.len() {
            return Err(DrivingError::ArityMismatch {
                function: name.to_string(),
                expected: def.arity(),
                found: args.len(),
            });
        }
        Ok(def)
    }

    fn clause<'d>(def: &'d FunDef, ctr: &str) -> Result<&'d Clause, DrivingError> {
        def.clause_for(ctr).ok_or_else(|| DrivingError::NoClause {
            function: def.name().to_string(),
            ctr: ctr.to_string(),
        })
    }

    /// Positive information propagation for one clause of a match on the
    /// variable `x`: the clause's pattern variables are renamed apart, its
    /// parameters are bound to `extra_args`, and `x` is replaced by the
    /// renamed pattern throughout.
    pub fn propagate(&mut self, x: &str, clause: &Clause, extra_args: &[Expr]) -> (Pattern, Expr) {
        let fresh: Vec<String> = clause.pattern.vars.iter().map(|v| self.fresh(v)).collect();
        let pattern = Pattern::new(clause.pattern.ctr.clone(), fresh);
        let info = bind(&[x.to_string()], [pattern.to_expr()]);
        let extra = extra_args.iter().map(|e| substitute(e, &info));
        let pattern_vars = pattern.vars.iter().cloned().map(Expr::Var);
        let s = bind(
            clause.pattern.vars.iter().chain(&clause.params),
            pattern_vars.chain(extra),
        );
        (pattern.clone(), substitute(&clause.body, &s))
    }

    fn cases(&mut self, def: &FunDef, x: &str, rest: &[Expr]) -> Vec<(Pattern, Expr)> {
        match def {
            FunDef::Matching { clauses, .. } => {
                clauses.iter().map(|c| self.propagate(x, c, rest)).collect()
            }
            FunDef::Ordinary { .. } => unreachable!("only matching functions split on a variable"),
        }
    }

    /// One step of ordinary (single-result) driving.
    pub fn drive_step(&mut self, e: &Expr) -> Result<DriveStep, DrivingError> {
        match e {
            Expr::Var(_) => Ok(DriveStep::None),
            Expr::Ctr(c, args) => Ok(DriveStep::Con(c.clone(), args.clone())),
            Expr::Call(f, args) => match self.lookup(f, args)? {
                FunDef::Ordinary { params, body, .. } => {
                    Ok(DriveStep::Unfold(substitute(body, &bind(params, args.iter().cloned()))))
                }
                def @ FunDef::Matching { .. } => match &args[0] {
                    Expr::Ctr(c, ctr_args) => {
                        let clause = Self::clause(def, c)?;
                        let s = bind(
                            clause.pattern.vars.iter().chain(&clause.params),
                            ctr_args.iter().chain(&args[1..]).cloned(),
                        );
                        Ok(DriveStep::Unfold(substitute(&clause.body, &s)))
                    }
                    Expr::Var(x) => Ok(DriveStep::Cases(x.clone(), self.cases(def, x, &args[1..]))),
                    inner @ Expr::Call(..) => {
                        let ctx = Context {
                            function: f,
                            rest: &args[1..],
                        };
                        let step = self.drive_step(inner)?;
                        Ok(ctx.map_step(step))
                    }
                },
            },
        }
    }

    /// All alternatives of one multi-result driving step, generalizations
    /// first.
    pub fn multi_drive_steps(&mut self, e: &Expr) -> Result<Vec<MultiStep>, DrivingError> {
        match e {
            Expr::Var(_) => Ok(vec![MultiStep::Leaf(e.clone())]),
            Expr::Ctr(c, args) => Ok(vec![MultiStep::Con(c.clone(), args.clone())]),
            Expr::Call(f, args) => match self.lookup(f, args)? {
                FunDef::Ordinary { params, body, .. } => {
                    let fresh: Vec<String> = params.iter().map(|p| self.fresh(p)).collect();
                    let general = substitute(body, &bind(params, fresh.iter().cloned().map(Expr::Var)));
                    let binds = fresh.into_iter().zip(args.iter().cloned()).collect();
                    let unfolded = substitute(body, &bind(params, args.iter().cloned()));
                    Ok(vec![MultiStep::Let(binds, general), MultiStep::Unfold(unfolded)])
                }
                def @ FunDef::Matching { .. } => match &args[0] {
                    Expr::Ctr(c, ctr_args) => {
                        let clause = Self::clause(def, c)?;
                        let formals: Vec<&String> =
                            clause.pattern.vars.iter().chain(&clause.params).collect();
                        let actuals: Vec<Expr> = ctr_args.iter().chain(&args[1..]).cloned().collect();
                        let fresh: Vec<String> = formals.iter().map(|p| self.fresh(p)).collect();
                        let general = substitute(
                            &clause.body,
                            &bind(formals.iter().copied(), fresh.iter().cloned().map(Expr::Var)),
                        );
                        let unfolded = substitute(&clause.body, &bind(formals, actuals.iter().cloned()));
                        let binds = fresh.into_iter().zip(actuals).collect();
                        Ok(vec![MultiStep::Let(binds, general), MultiStep::Unfold(unfolded)])
                    }
                    Expr::Var(x) => Ok(vec![MultiStep::Cases(x.clone(), self.cases(def, x, &args[1..]))]),
                    inner @ Expr::Call(..) => {
                        let fresh: Vec<String> = args.iter().map(|_| self.fresh("x")).collect();
                        let general = Expr::Call(f.clone(), fresh.iter().cloned().map(Expr::Var).collect());
                        let binds = fresh.into_iter().zip(args.iter().cloned()).collect();
                        let ctx = Context {
                            function: f,
                            rest: &args[1..],
                        };
                        let mut out = vec![MultiStep::Let(binds, general)];
                        for step in self.multi_drive_steps(inner)? {
                            out.push(ctx.map_multi(step));
                        }
                        Ok(out)
                    }
                },
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{match_renaming, parse_expression, parse_program};

    const APPEND: &str = "append(Nil, ys) = ys; append(Cons(x, xs), ys) = Cons(x, append(xs, ys));";
    const EXP: &str = "g(Nil, y) = y; g(Cons(x, xs), y) = f(g(xs, y)); f(w) = B(w, w);";

    fn e(s: &str) -> Expr {
        parse_expression(s).unwrap()
    }

    fn pat(c: &str, vs: &[&str]) -> Pattern {
        Pattern::new(c, vs.iter().map(|s| s.to_string()).collect())
    }

    fn binds(pairs: &[(&str, &str)]) -> Vec<(String, Expr)> {
        pairs.iter().map(|(v, x)| (v.to_string(), e(x))).collect()
    }

    #[test]
    fn drive_variable_and_known_constructor() {
        let p = parse_program(APPEND).unwrap();
        let mut d = Driver::new(&p, &e("append(xs, ys)"));
        assert_eq!(d.drive_step(&e("x")).unwrap(), DriveStep::None);
        assert_eq!(d.drive_step(&e("append(Nil, ys)")).unwrap(), DriveStep::Unfold(e("ys")));
    }

    #[test]
    fn drive_case_split_propagates() {
        let p = parse_program(APPEND).unwrap();
        let root = e("append(xs, ys)");
        let mut d = Driver::new(&p, &root);
        assert_eq!(
            d.drive_step(&root).unwrap(),
            DriveStep::Cases(
                "xs".into(),
                vec![
                    (pat("Nil", &[]), e("ys")),
                    (pat("Cons", &["x0", "xs0"]), e("Cons(x0, append(xs0, ys))")),
                ]
            )
        );
    }

    #[test]
    fn drive_nested_call_splices_context() {
        let p = parse_program(APPEND).unwrap();
        let root = e("append(append(xs, ys), zs)");
        let mut d = Driver::new(&p, &root);
        assert_eq!(
            d.drive_step(&root).unwrap(),
            DriveStep::Cases(
                "xs".into(),
                vec![
                    (pat("Nil", &[]), e("append(ys, zs)")),
                    (pat("Cons", &["x0", "xs0"]), e("append(Cons(x0, append(xs0, ys)), zs)")),
                ]
            )
        );
    }

    #[test]
    fn propagation_reaches_extra_arguments() {
        let p = parse_program("h(Nil, a) = a; h(Cons(y, ys), a) = Pair(y, a);").unwrap();
        let root = e("h(x, x)");
        let mut d = Driver::new(&p, &root);
        assert_eq!(
            d.drive_step(&root).unwrap(),
            DriveStep::Cases(
                "x".into(),
                vec![
                    (pat("Nil", &[]), e("Nil")),
                    (pat("Cons", &["y0", "ys0"]), e("Pair(y0, Cons(y0, ys0))")),
                ]
            )
        );
    }

    #[test]
    fn propagate_single_clause() {
        let p = parse_program(APPEND).unwrap();
        let mut d = Driver::new(&p, &e("append(xs, ys)"));
        let FunDef::Matching { clauses, .. } = p.get("append").unwrap() else { unreachable!() };
        let (pattern, body) = d.propagate("xs", &clauses[1], &[e("ys")]);
        assert_eq!(pattern, pat("Cons", &["x0", "xs0"]));
        assert_eq!(body, e("Cons(x0, append(xs0, ys))"));
    }

    #[test]
    fn multi_drive_exp_growth_root() {
        let p = parse_program(EXP).unwrap();
        let root = e("g(Cons(A, Nil), z)");
        let mut d = Driver::new(&p, &root);
        assert_eq!(
            d.multi_drive_steps(&root).unwrap(),
            vec![
                MultiStep::Let(binds(&[("x0", "A"), ("xs0", "Nil"), ("y0", "z")]), e("f(g(xs0, y0))")),
                MultiStep::Unfold(e("f(g(Nil, z))")),
            ]
        );
        assert_eq!(
            d.multi_drive_steps(&e("f(g(xs0, y0))")).unwrap(),
            vec![
                MultiStep::Let(binds(&[("w0", "g(xs0, y0)")]), e("B(w0, w0)")),
                MultiStep::Unfold(e("B(g(xs0, y0), g(xs0, y0))")),
            ]
        );
        // Counters are shared by the whole run, so the split continues from x0/xs0.
        let split = d.multi_drive_steps(&e("g(xs0, y0)")).unwrap();
        assert_eq!(
            split,
            vec![MultiStep::Cases(
                "xs0".into(),
                vec![
                    (pat("Nil", &[]), e("y0")),
                    (pat("Cons", &["x1", "xs1"]), e("f(g(xs1, y0))")),
                ]
            )]
        );
    }

    #[test]
    fn multi_drive_trivial_cases() {
        let p = parse_program(EXP).unwrap();
        let mut d = Driver::new(&p, &e("x"));
        assert_eq!(d.multi_drive_steps(&e("x")).unwrap(), vec![MultiStep::Leaf(e("x"))]);
        assert_eq!(
            d.multi_drive_steps(&e("C(a, f(b))")).unwrap(),
            vec![MultiStep::Con("C".into(), vec![e("a"), e("f(b)")])]
        );
    }

    #[test]
    fn multi_drive_nested_call_generalizes_outer_call_first() {
        let p = parse_program(APPEND).unwrap();
        let root = e("append(append(xs, ys), zs)");
        let mut d = Driver::new(&p, &root);
        let steps = d.multi_drive_steps(&root).unwrap();
        assert_eq!(steps.len(), 2);
        assert_eq!(
            steps[0],
            MultiStep::Let(binds(&[("x0", "append(xs, ys)"), ("x1", "zs")]), e("append(x0, x1)"))
        );
        assert!(steps[1].is_cases());
    }

    #[test]
    fn sub_exprs_put_let_body_first() {
        let step = MultiStep::Let(binds(&[("x0", "A"), ("xs0", "Nil"), ("y0", "z")]), e("f(g(xs0, y0))"));
        let subs: Vec<Expr> = step.sub_exprs().into_iter().cloned().collect();
        assert_eq!(subs, vec![e("f(g(xs0, y0))"), e("A"), e("Nil"), e("z")]);
        assert!(MultiStep::Leaf(e("x")).sub_exprs().is_empty());
        let con = MultiStep::Con("B".into(), vec![e("w0"), e("w0")]);
        assert_eq!(con.sub_exprs(), vec![&e("w0"), &e("w0")]);
    }

    #[test]
    fn missing_clause_is_an_error() {
        let p = parse_program("not(True) = False;").unwrap();
        let mut d = Driver::new(&p, &e("x"));
        assert_eq!(
            d.drive_step(&e("not(False)")),
            Err(DrivingError::NoClause {
                function: "not".into(),
                ctr: "False".into()
            })
        );
    }

    fn step_as_expr(s: &DriveStep) -> Expr {
        match s {
            DriveStep::None => Expr::ctr("None", vec![]),
            DriveStep::Con(c, args) => Expr::ctr("Con", vec![Expr::ctr(c.clone(), args.clone())]),
            DriveStep::Unfold(e) => Expr::ctr("Unfold", vec![e.clone()]),
            DriveStep::Cases(x, bs) => {
                let mut args = vec![Expr::var(x.clone())];
                for (p, e) in bs {
                    args.push(p.to_expr());
                    args.push(e.clone());
                }
                Expr::ctr("Cases", args)
            }
        }
    }

    #[test]
    fn multi_driving_extends_driving() {
        let p = parse_program(&format!("{APPEND} {EXP}")).unwrap();
        for src in [
            "x",
            "Cons(x, xs)",
            "append(xs, ys)",
            "append(append(xs, ys), zs)",
            "append(Cons(A, xs), ys)",
            "f(g(xs, y))",
            "g(f(g(xs, y)), z)",
        ] {
            let c = e(src);
            let mut d1 = Driver::new(&p, &c);
            let mut d2 = Driver::new(&p, &c);
            let single = d1.drive_step(&c).unwrap();
            let multi = d2.multi_drive_steps(&c).unwrap();
            let last = multi.last().unwrap().to_drive_step().unwrap();
            assert!(
                match_renaming(&step_as_expr(&single), &step_as_expr(&last)).is_some(),
                "{src}: {single:?} vs {last:?}"
            );
        }
    }
}
