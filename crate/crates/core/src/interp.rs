//! Call-by-name reference evaluator.
//!
//! Ordinary calls substitute their argument expressions unevaluated; matching
//! calls force only the head constructor of their first argument. Once the
//! root has a head constructor its arguments are normalized in turn, so the
//! result is a complete [`Value`].

use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::lang::{bind, substitute, Expr, FunDef, Program};

/// A ground constructor tree.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Value {
    pub ctr: String,
    pub args: Vec<Value>,
}

impl Value {
    pub fn new(ctr: impl Into<String>, args: Vec<Value>) -> Value {
        Value { ctr: ctr.into(), args }
    }

    pub fn atom(ctr: impl Into<String>) -> Value {
        Value::new(ctr, Vec::new())
    }

    /// Number of constructor nodes.
    pub fn size(&self) -> usize {
        1 + self.args.iter().map(Value::size).sum::<usize>()
    }

    /// Number of nodes labelled `ctr`.
    pub fn count(&self, ctr: &str) -> usize {
        usize::from(self.ctr == ctr) + self.args.iter().map(|a| a.count(ctr)).sum::<usize>()
    }

    /// Number of occurrences of `sub` as a subtree.
    pub fn occurrences(&self, sub: &Value) -> usize {
        if self == sub {
            1
        } else {
            self.args.iter().map(|a| a.occurrences(sub)).sum()
        }
    }

    pub fn to_expr(&self) -> Expr {
        Expr::ctr(self.ctr.clone(), self.args.iter().map(Value::to_expr).collect())
    }

    /// The value of a closed constructor expression.
    pub fn from_expr(e: &Expr) -> Option<Value> {
        match e {
            Expr::Ctr(c, args) => Some(Value::new(c.clone(), args.iter().map(Value::from_expr).collect::<Option<_>>()?)),
            _ => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.ctr)?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            for (i, a) in self.args.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{a}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

/// Upper bound on function unfoldings for one evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Fuel {
    pub max_unfolds: u64,
}

impl Fuel {
    pub const DEFAULT: Fuel = Fuel { max_unfolds: 100_000 };

    pub fn new(max_unfolds: u64) -> Fuel {
        Fuel { max_unfolds }
    }
}

impl Default for Fuel {
    fn default() -> Self {
        Fuel::DEFAULT
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("ran out of fuel after {0} unfoldings")]
    Timeout(u64),
    #[error("no clause of `{function}` matches constructor `{ctr}`")]
    Stuck { function: String, ctr: String },
    #[error("call to undefined function `{0}`")]
    UnknownFunction(String),
    #[error("`{function}` expects {expected} arguments, got {found}")]
    ArityMismatch { function: String, expected: usize, found: usize },
    #[error("free variable `{0}` reached evaluation")]
    FreeVariable(String),
}

/// A value together with the number of unfoldings spent computing it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Evaluation {
    pub value: Value,
    pub unfolds: u64,
}

/// Evaluates the closed expression `e` to its full normal form.
pub fn eval(program: &Program, e: &Expr, fuel: Fuel) -> Result<Value, EvalError> {
    eval_with_stats(program, e, fuel).map(|r| r.value)
}

/// Like [`eval`], also reporting how many unfoldings were performed.
pub fn eval_with_stats(program: &Program, e: &Expr, fuel: Fuel) -> Result<Evaluation, EvalError> {
    let mut m = Machine {
        program,
        fuel: fuel.max_unfolds,
        unfolds: 0,
    };
    let value = m.normalize(e.clone())?;
    Ok(Evaluation {
        value,
        unfolds: m.unfolds,
    })
}

struct Machine<'p> {
    program: &'p Program,
    fuel: u64,
    unfolds: u64,
}

impl Machine<'_> {
    fn normalize(&mut self, e: Expr) -> Result<Value, EvalError> {
        let (ctr, args) = self.whnf(e)?;
        let args = args.into_iter().map(|a| self.normalize(a)).collect::<Result<_, _>>()?;
        Ok(Value { ctr, args })
    }

    /// Reduces `e` until its head is a constructor.
    fn whnf(&mut self, mut e: Expr) -> Result<(String, Vec<Expr>), EvalError> {
        loop {
            let (name, mut args) = match e {
                Expr::Ctr(c, args) => return Ok((c, args)),
                Expr::Var(v) => return Err(EvalError::FreeVariable(v)),
                Expr::Call(name, args) => (name, args),
            };
            let def = self
                .program
                .get(&name)
                .ok_or_else(|| EvalError::UnknownFunction(name.clone()))?;
            if def.arity() != args.len() {
                return Err(EvalError::ArityMismatch {
                    function: name,
                    expected: def.arity(),
                    found: args.len(),
                });
            }
            if self.unfolds == self.fuel {
                return Err(EvalError::Timeout(self.unfolds));
            }
            self.unfolds += 1;
            e = match def {
                FunDef::Ordinary { params, body, .. } => substitute(body, &bind(params, args)),
                FunDef::Matching { .. } => {
                    let rest = args.split_off(1);
                    let scrutinee = args.pop().expect("matching functions take an argument");
                    let (ctr, fields) = self.whnf(scrutinee)?;
                    let clause = def.clause_for(&ctr).ok_or_else(|| EvalError::Stuck {
                        function: name.clone(),
                        ctr: ctr.clone(),
                    })?;
                    let mut s = bind(&clause.pattern.vars, fields);
                    s.extend(bind(&clause.params, rest));
                    substitute(&clause.body, &s)
                }
            };
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SignatureError {
    #[error("size bound must be at least 1")]
    ZeroBound,
    #[error("signature has no nullary constructor")]
    NoNullary,
}

/// A random value over `signature` with at most `size_bound` nodes,
/// determined by `seed`.
pub fn random_value(signature: &[(String, usize)], size_bound: usize, seed: u64) -> Result<Value, SignatureError> {
    random_value_with(signature, size_bound, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// [`random_value`] drawing from a caller-supplied generator.
pub fn random_value_with<R: Rng + ?Sized>(
    signature: &[(String, usize)],
    size_bound: usize,
    rng: &mut R,
) -> Result<Value, SignatureError> {
    if size_bound == 0 {
        return Err(SignatureError::ZeroBound);
    }
    if !signature.iter().any(|(_, k)| *k == 0) {
        return Err(SignatureError::NoNullary);
    }
    Ok(grow((), size_bound, rng, &mut |(), budget, rng| {
        let fitting: Vec<&(String, usize)> = signature.iter().filter(|(_, k)| *k < budget).collect();
        let (c, k) = fitting.choose(rng).expect("a nullary constructor always fits");
        (c.clone(), vec![(); *k])
    }))
}

/// Builds a tree of sort `sort` with at most `budget` nodes. `pick` chooses a
/// constructor of the sort that fits in the budget it is given and returns
/// its name with the sorts of its arguments. Arguments are generated left to
/// right, each leaving one node for every argument after it.
pub(crate) fn grow<S, R: Rng + ?Sized>(
    sort: S,
    budget: usize,
    rng: &mut R,
    pick: &mut impl FnMut(S, usize, &mut R) -> (String, Vec<S>),
) -> Value {
    let (ctr, sorts) = pick(sort, budget, rng);
    let mut left = budget - 1;
    let k = sorts.len();
    let mut args = Vec::with_capacity(k);
    for (i, s) in sorts.into_iter().enumerate() {
        let share = rng.gen_range(1..=left - (k - i - 1));
        let v = grow(s, share, rng, pick);
        left -= v.size();
        args.push(v);
    }
    Value { ctr, args }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{parse_expression, parse_program};

    const APPEND: &str = "append(Nil, ys) = ys; append(Cons(x, xs), ys) = Cons(x, append(xs, ys));";

    fn run(src: &str, e: &str) -> Result<Value, EvalError> {
        eval(&parse_program(src).unwrap(), &parse_expression(e).unwrap(), Fuel::default())
    }

    #[test]
    fn append_two_singletons() {
        let v = run(APPEND, "append(Cons(A, Nil), Cons(B, Nil))").unwrap();
        assert_eq!(v.to_string(), "Cons(A, Cons(B, Nil))");
    }

    #[test]
    fn values_evaluate_to_themselves() {
        assert_eq!(run("", "Cons(A, Nil)").unwrap().to_string(), "Cons(A, Nil)");
    }

    #[test]
    fn arguments_are_passed_unevaluated() {
        // `loop` never terminates, but `k` ignores its second argument.
        let src = "k(x, y) = x; loop(x) = loop(x);";
        assert_eq!(run(src, "k(A, loop(B))").unwrap(), Value::atom("A"));
        assert_eq!(run(src, "loop(B)"), Err(EvalError::Timeout(100_000)));
    }

    #[test]
    fn missing_clause_is_stuck() {
        let err = run(APPEND, "append(A, Nil)").unwrap_err();
        assert!(matches!(err, EvalError::Stuck { ref function, ref ctr } if function == "append" && ctr == "A"));
    }

    #[test]
    fn free_variables_are_rejected() {
        assert_eq!(run(APPEND, "append(xs, Nil)"), Err(EvalError::FreeVariable("xs".into())));
    }

    #[test]
    fn unfold_count() {
        let p = parse_program(APPEND).unwrap();
        let e = parse_expression("append(Cons(A, Cons(A, Nil)), Nil)").unwrap();
        assert_eq!(eval_with_stats(&p, &e, Fuel::default()).unwrap().unfolds, 3);
        assert_eq!(eval(&p, &e, Fuel::new(2)), Err(EvalError::Timeout(2)));
    }

    fn sig(items: &[(&str, usize)]) -> Vec<(String, usize)> {
        items.iter().map(|(c, k)| (c.to_string(), *k)).collect()
    }

    #[test]
    fn random_values_respect_bound_and_seed() {
        let s = sig(&[("Nil", 0), ("Cons", 2), ("A", 0), ("B", 0)]);
        for seed in 0..200 {
            for bound in 1..10 {
                let v = random_value(&s, bound, seed).unwrap();
                assert!(v.size() <= bound);
                assert_eq!(v, random_value(&s, bound, seed).unwrap());
            }
            assert!(random_value(&s, 1, seed).unwrap().args.is_empty());
        }
    }

    #[test]
    fn random_value_errors() {
        assert_eq!(random_value(&sig(&[("A", 0)]), 0, 0), Err(SignatureError::ZeroBound));
        assert_eq!(random_value(&sig(&[("S", 1)]), 5, 0), Err(SignatureError::NoNullary));
        let b = sig(&[("True", 0), ("False", 0)]);
        let seen: std::collections::HashSet<_> = (0..50).map(|s| random_value(&b, 7, s).unwrap().ctr).collect();
        assert_eq!(seen.len(), 2);
    }
}
