//! Differential testing of a residual program against its source.
//!
//! The object language is untyped, so drawing inputs from every constructor
//! would mostly produce ill-sorted terms on which both programs get stuck.
//! [`Sorts`] recovers a monomorphic sort for each root variable by unifying
//! the positions constructors and functions are used in, and inputs are drawn
//! per sort.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::interp::{eval_with_stats, grow, EvalError, Fuel, Value};
use crate::lang::{Expr, FunDef, Program};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Slot {
    CtrResult(String, usize),
    CtrArg(String, usize, usize),
    FunResult(String),
    FunParam(String, usize),
}

/// Sorts of a program's positions, as classes of a union-find structure.
#[derive(Clone, Debug)]
pub struct Sorts {
    parent: Vec<usize>,
    slots: HashMap<Slot, usize>,
    root_vars: HashMap<String, usize>,
    /// Constructors (name, arity) per class representative.
    members: HashMap<usize, BTreeSet<(String, usize)>>,
    /// Atom used for sorts without a nullary constructor.
    filler: String,
}

impl Sorts {
    pub fn infer(program: &Program, root: &Expr) -> Sorts {
        let mut s = Sorts {
            parent: Vec::new(),
            slots: HashMap::new(),
            root_vars: HashMap::new(),
            members: HashMap::new(),
            filler: String::new(),
        };
        for def in program.defs() {
            let f = def.name().to_string();
            match def {
                FunDef::Ordinary { params, body, .. } => {
                    let env = params
                        .iter()
                        .enumerate()
                        .map(|(i, p)| (p.clone(), s.slot(Slot::FunParam(f.clone(), i))))
                        .collect();
                    let t = s.expr(body, &env);
                    let r = s.slot(Slot::FunResult(f.clone()));
                    s.union(t, r);
                }
                FunDef::Matching { clauses, .. } => {
                    for c in clauses {
                        let k = c.pattern.vars.len();
                        let scrutinee = s.slot(Slot::FunParam(f.clone(), 0));
                        let ctr = s.slot(Slot::CtrResult(c.pattern.ctr.clone(), k));
                        s.union(scrutinee, ctr);
                        let mut env = HashMap::new();
                        for (j, v) in c.pattern.vars.iter().enumerate() {
                            env.insert(v.clone(), s.slot(Slot::CtrArg(c.pattern.ctr.clone(), k, j)));
                        }
                        for (i, p) in c.params.iter().enumerate() {
                            env.insert(p.clone(), s.slot(Slot::FunParam(f.clone(), i + 1)));
                        }
                        let t = s.expr(&c.body, &env);
                        let r = s.slot(Slot::FunResult(f.clone()));
                        s.union(t, r);
                    }
                }
            }
        }
        let mut env = HashMap::new();
        for v in root.vars() {
            let id = s.fresh();
            env.insert(v, id);
        }
        s.expr(root, &env);
        s.root_vars = env;

        let ctrs: Vec<(String, usize)> = s
            .slots
            .keys()
            .filter_map(|k| match k {
                Slot::CtrResult(c, n) => Some((c.clone(), *n)),
                _ => None,
            })
            .collect();
        for (c, n) in &ctrs {
            let id = s.slots[&Slot::CtrResult(c.clone(), *n)];
            let rep = s.find(id);
            s.members.entry(rep).or_default().insert((c.clone(), *n));
        }
        let taken: BTreeSet<&str> = ctrs.iter().map(|(c, _)| c.as_str()).collect();
        let mut filler = "Z".to_string();
        let mut i = 0;
        while taken.contains(filler.as_str()) {
            filler = format!("Z{i}");
            i += 1;
        }
        s.filler = filler;
        s
    }

    fn fresh(&mut self) -> usize {
        self.parent.push(self.parent.len());
        self.parent.len() - 1
    }

    fn slot(&mut self, slot: Slot) -> usize {
        if let Some(&id) = self.slots.get(&slot) {
            return id;
        }
        let id = self.fresh();
        self.slots.insert(slot, id);
        id
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn find_const(&self, mut x: usize) -> usize {
        while self.parent[x] != x {
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.parent[a] = b;
        }
    }

    fn expr(&mut self, e: &Expr, env: &HashMap<String, usize>) -> usize {
        match e {
            Expr::Var(v) => env[v],
            Expr::Ctr(c, args) => {
                for (i, a) in args.iter().enumerate() {
                    let t = self.expr(a, env);
                    let slot = self.slot(Slot::CtrArg(c.clone(), args.len(), i));
                    self.union(t, slot);
                }
                self.slot(Slot::CtrResult(c.clone(), args.len()))
            }
            Expr::Call(f, args) => {
                for (i, a) in args.iter().enumerate() {
                    let t = self.expr(a, env);
                    let slot = self.slot(Slot::FunParam(f.clone(), i));
                    self.union(t, slot);
                }
                self.slot(Slot::FunResult(f.clone()))
            }
        }
    }

    /// Constructors that may appear at the root of values for `var`, or
    /// `None` if `var` is not a root variable.
    pub fn constructors_of(&self, var: &str) -> Option<Vec<(String, usize)>> {
        let id = *self.root_vars.get(var)?;
        Some(self.class_members(id))
    }

    fn class_members(&self, id: usize) -> Vec<(String, usize)> {
        let rep = self.find_const(id);
        let mut out: Vec<(String, usize)> = self.members.get(&rep).into_iter().flatten().cloned().collect();
        if !out.iter().any(|(_, n)| *n == 0) {
            out.push((self.filler.clone(), 0));
        }
        out
    }

    /// A random value of `var`'s sort with at most `size_bound` nodes.
    pub fn random_input(&self, var: &str, size_bound: usize, rng: &mut ChaCha8Rng) -> Option<Value> {
        let id = *self.root_vars.get(var)?;
        let bound = size_bound.max(1);
        Some(grow(id, bound, rng, &mut |class, budget, rng| {
            let options: Vec<(String, usize)> =
                self.class_members(class).into_iter().filter(|(_, n)| *n < budget).collect();
            let (c, n) = options.choose(rng).expect("a nullary constructor always fits").clone();
            let args = (0..n)
                .map(|i| {
                    self.slots
                        .get(&Slot::CtrArg(c.clone(), n, i))
                        .copied()
                        .expect("constructor argument slots exist")
                })
                .collect();
            (c, args)
        }))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CheckConfig {
    pub trials: usize,
    pub size_bound: usize,
    pub fuel: Fuel,
    pub seed: u64,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            trials: 100,
            size_bound: 8,
            fuel: Fuel::DEFAULT,
            seed: 0,
        }
    }
}

/// Inputs on which the two programs disagree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub inputs: Vec<(String, Value)>,
    pub original: Result<Value, EvalError>,
    pub residual: Result<Value, EvalError>,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |r: &Result<Value, EvalError>| match r {
            Ok(v) => v.to_string(),
            Err(e) => format!("error: {e}"),
        };
        let inputs: Vec<String> = self.inputs.iter().map(|(v, x)| format!("{v} = {x}")).collect();
        write!(
            f,
            "[{}] original: {}; residual: {}",
            inputs.join(", "),
            show(&self.original),
            show(&self.residual)
        )
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CheckReport {
    pub trials: usize,
    /// Trials where both sides produced the same value.
    pub agreed: usize,
    /// Trials where neither side produced a value, or one ran out of fuel.
    pub inconclusive: usize,
    /// Unfoldings spent by each side over the agreeing trials.
    pub original_unfolds: u64,
    pub residual_unfolds: u64,
    pub counterexamples: Vec<Counterexample>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed() { "pass" } else { "FAIL" };
        write!(
            f,
            "{verdict}: {} trials, {} agreed, {} inconclusive, {} counterexamples",
            self.trials,
            self.agreed,
            self.inconclusive,
            self.counterexamples.len()
        )?;
        for c in &self.counterexamples {
            write!(f, "\n  {c}")?;
        }
        Ok(())
    }
}

/// Evaluates both roots on `config.trials` random instantiations of the
/// original root's variables. A trial is a counterexample when both sides
/// produce different values, when one side produces a value and the other
/// gets stuck, or when the residual fails for a reason other than fuel or a
/// stuck match the original shares.
pub fn check_equivalence(
    original: &Program,
    original_root: &Expr,
    residual: &Program,
    residual_root: &Expr,
    config: &CheckConfig,
) -> CheckReport {
    let sorts = Sorts::infer(original, original_root);
    let vars = original_root.vars();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut report = CheckReport {
        trials: config.trials,
        ..CheckReport::default()
    };
    for _ in 0..config.trials {
        let inputs: Vec<(String, Value)> = vars
            .iter()
            .map(|v| {
                let value = sorts.random_input(v, config.size_bound, &mut rng).expect("root variable");
                (v.clone(), value)
            })
            .collect();
        let subst = inputs.iter().map(|(v, x)| (v.clone(), x.to_expr())).collect();
        let a = eval_with_stats(original, &crate::lang::substitute(original_root, &subst), config.fuel);
        let b = eval_with_stats(residual, &crate::lang::substitute(residual_root, &subst), config.fuel);
        let bad = match (&a, &b) {
            (Ok(x), Ok(y)) => {
                if x.value == y.value {
                    report.agreed += 1;
                    report.original_unfolds += x.unfolds;
                    report.residual_unfolds += y.unfolds;
                    false
                } else {
                    true
                }
            }
            (Ok(_), Err(EvalError::Timeout(_))) | (Err(EvalError::Timeout(_)), Ok(_)) => {
                report.inconclusive += 1;
                false
            }
            (Ok(_), Err(_)) => true,
            (Err(e), Ok(_)) => matches!(e, EvalError::Stuck { .. }),
            (Err(_), Err(e)) => {
                report.inconclusive += 1;
                !matches!(e, EvalError::Timeout(_) | EvalError::Stuck { .. })
            }
        };
        if bad {
            report.counterexamples.push(Counterexample {
                inputs,
                original: a.map(|r| r.value),
                residual: b.map(|r| r.value),
            });
        }
    }
    report
}
