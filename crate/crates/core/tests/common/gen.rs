//! Random well-formed programs.

use mrsc::lang::{Clause, Expr, FunDef, Pattern, Program};
use rand::seq::SliceRandom;
use rand::Rng;

#[derive(Clone, Copy, Debug)]
pub struct Limits {
    pub constructors: usize,
    pub functions: usize,
    pub depth: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            constructors: 6,
            functions: 5,
            depth: 4,
        }
    }
}

pub const LEAF: f64 = 0.5;

struct Sig {
    ctrs: Vec<(String, usize)>,
    funs: Vec<(String, usize)>,
}

fn expr<R: Rng>(sig: &Sig, vars: &[String], depth: usize, rng: &mut R) -> Expr {
    let leaf = depth == 0 || rng.gen_bool(LEAF);
    if leaf {
        if !vars.is_empty() && rng.gen_bool(0.7) {
            return Expr::var(vars.choose(rng).unwrap().clone());
        }
        let nullary: Vec<_> = sig.ctrs.iter().filter(|(_, k)| *k == 0).collect();
        return Expr::ctr(nullary.choose(rng).unwrap().0.clone(), vec![]);
    }
    let (name, arity, is_call) = if rng.gen_bool(0.5) {
        let (c, k) = sig.ctrs.choose(rng).unwrap();
        (c.clone(), *k, false)
    } else {
        let (f, k) = sig.funs.choose(rng).unwrap();
        (f.clone(), *k, true)
    };
    let args = (0..arity).map(|_| expr(sig, vars, depth - 1, rng)).collect();
    if is_call {
        Expr::call(name, args)
    } else {
        Expr::ctr(name, args)
    }
}

/// A program plus a root call of its first function on distinct variables.
pub fn random_program<R: Rng>(limits: Limits, rng: &mut R) -> (Program, Expr) {
    let nctrs = rng.gen_range(1..=limits.constructors);
    let mut ctrs: Vec<(String, usize)> = (0..nctrs).map(|i| (format!("C{i}"), rng.gen_range(0..=2))).collect();
    ctrs[0].1 = 0;
    let nfuns = rng.gen_range(1..=limits.functions);
    // Matching functions have arity >= 1.
    let kinds: Vec<bool> = (0..nfuns).map(|_| rng.gen_bool(0.6)).collect();
    let funs: Vec<(String, usize)> = kinds
        .iter()
        .enumerate()
        .map(|(i, &m)| (format!("f{i}"), rng.gen_range(usize::from(m)..=3)))
        .collect();
    let sig = Sig { ctrs, funs };
    let mut defs = Vec::new();
    for (i, &matching) in kinds.iter().enumerate() {
        let (name, arity) = sig.funs[i].clone();
        if matching {
            let params: Vec<String> = (1..arity).map(|j| format!("y{j}")).collect();
            // Exhaustive over the whole signature: the language has no
            // datatype declarations to narrow it.
            let clauses = sig
                .ctrs
                .iter()
                .map(|(c, k)| {
                    let pvars: Vec<String> = (0..*k).map(|j| format!("x{j}")).collect();
                    let scope: Vec<String> = pvars.iter().chain(&params).cloned().collect();
                    Clause {
                        pattern: Pattern::new(c.clone(), pvars),
                        params: params.clone(),
                        body: expr(&sig, &scope, rng.gen_range(1..=limits.depth), rng),
                    }
                })
                .collect();
            defs.push(FunDef::Matching { name, clauses });
        } else {
            let params: Vec<String> = (0..arity).map(|j| format!("y{j}")).collect();
            let body = expr(&sig, &params, rng.gen_range(1..=limits.depth), rng);
            defs.push(FunDef::Ordinary { name, params, body });
        }
    }
    let program = Program::new(defs).expect("generated program is well formed");
    let root = Expr::call("f0", (0..sig.funs[0].1).map(|i| Expr::var(format!("v{i}"))).collect());
    (program, root)
}
