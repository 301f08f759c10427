use std::collections::HashMap;
use std::fmt;

use super::syntax::Expr;

pub type Subst = HashMap<String, Expr>;

/// Simultaneous substitution. Expressions have no binders, so there is no
/// capture to avoid.
pub fn substitute(e: &Expr, subst: &Subst) -> Expr {
    match e {
        Expr::Var(v) => subst.get(v).cloned().unwrap_or_else(|| e.clone()),
        Expr::Ctr(n, args) => Expr::Ctr(n.clone(), args.iter().map(|a| substitute(a, subst)).collect()),
        Expr::Call(n, args) => Expr::Call(n.clone(), args.iter().map(|a| substitute(a, subst)).collect()),
    }
}

/// Builds a substitution from parallel lists of variables and expressions.
pub fn bind<'a>(vars: impl IntoIterator<Item = &'a String>, exprs: impl IntoIterator<Item = Expr>) -> Subst {
    vars.into_iter().cloned().zip(exprs).collect()
}

/// An injective variable-to-variable mapping, kept in the order its pairs
/// were discovered.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Renaming {
    pairs: Vec<(String, String)>,
}

impl Renaming {
    pub fn new(pairs: Vec<(String, String)>) -> Renaming {
        Renaming { pairs }
    }

    pub fn pairs(&self) -> &[(String, String)] {
        &self.pairs
    }

    pub fn get(&self, var: &str) -> Option<&str> {
        self.pairs.iter().find(|(from, _)| from == var).map(|(_, to)| to.as_str())
    }

    pub fn is_identity(&self) -> bool {
        self.pairs.iter().all(|(a, b)| a == b)
    }

    pub fn to_subst(&self) -> Subst {
        self.pairs
            .iter()
            .map(|(a, b)| (a.clone(), Expr::Var(b.clone())))
            .collect()
    }
}

impl fmt::Display for Renaming {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (a, b)) in self.pairs.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}->{b}")?;
        }
        f.write_str("}")
    }
}

/// Finds the injective renaming `r` with `substitute(upper, r) == lower`.
pub fn match_renaming(upper: &Expr, lower: &Expr) -> Option<Renaming> {
    match_vars(upper, lower, true)
}

/// Like [`match_renaming`] but lets several variables of `upper` map to the
/// same variable of `lower`, so `f(x, y)` matches `f(z, z)`. The result is
/// still a function on `upper`'s variables. Folding uses this form: a call to
/// the function introduced for `upper` may repeat an argument.
pub fn match_var_map(upper: &Expr, lower: &Expr) -> Option<Renaming> {
    match_vars(upper, lower, false)
}

/// Same constructors and calls in the same places, ignoring variable names.
fn same_shape(u: &Expr, l: &Expr) -> bool {
    match (u, l) {
        (Expr::Var(_), Expr::Var(_)) => true,
        (Expr::Ctr(n1, a1), Expr::Ctr(n2, a2)) | (Expr::Call(n1, a1), Expr::Call(n2, a2)) => {
            n1 == n2 && a1.len() == a2.len() && a1.iter().zip(a2).all(|(x, y)| same_shape(x, y))
        }
        _ => false,
    }
}

fn match_vars(upper: &Expr, lower: &Expr, injective: bool) -> Option<Renaming> {
    if !same_shape(upper, lower) {
        return None;
    }
    // Configurations have few variables; a list beats hashing.
    let mut map: Vec<(&str, &str)> = Vec::new();
    let mut stack = vec![(upper, lower)];
    while let Some((u, l)) = stack.pop() {
        match (u, l) {
            (Expr::Var(a), Expr::Var(b)) => {
                if let Some(&(_, seen)) = map.iter().find(|(x, _)| x == a) {
                    if seen != b {
                        return None;
                    }
                    continue;
                }
                if injective && map.iter().any(|(_, y)| y == b) {
                    return None;
                }
                map.push((a, b));
            }
            (Expr::Ctr(_, a1), Expr::Ctr(_, a2)) | (Expr::Call(_, a1), Expr::Call(_, a2)) => {
                stack.extend(a1.iter().zip(a2).rev());
            }
            _ => unreachable!("shapes were checked"),
        }
    }
    Some(Renaming {
        pairs: map.into_iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse_expression as p;

    #[test]
    fn substitution_is_simultaneous() {
        let s = bind(&["x".to_string(), "y".to_string()], vec![p("y").unwrap(), p("x").unwrap()]);
        assert_eq!(substitute(&p("Pair(x, y)").unwrap(), &s), p("Pair(y, x)").unwrap());
    }

    #[test]
    fn single_replacement() {
        let s = bind(&["xs".to_string()], vec![p("Nil").unwrap()]);
        assert_eq!(substitute(&p("append(xs, ys)").unwrap(), &s), p("append(Nil, ys)").unwrap());
    }

    #[test]
    fn unfolding_append_clause() {
        let vars = ["x", "xs", "ys"].map(String::from);
        let s = bind(&vars, vec![p("A").unwrap(), p("Nil").unwrap(), p("z").unwrap()]);
        assert_eq!(
            substitute(&p("Cons(x, append(xs, ys))").unwrap(), &s),
            p("Cons(A, append(Nil, z))").unwrap()
        );
    }

    #[test]
    fn renaming_found() {
        let r = match_renaming(&p("f(g(xs0, y0))").unwrap(), &p("f(g(xs1, y0))").unwrap()).unwrap();
        assert_eq!(r.get("xs0"), Some("xs1"));
        assert_eq!(r.get("y0"), Some("y0"));
        assert_eq!(r.pairs().len(), 2);
        let r = match_renaming(&p("x").unwrap(), &p("x").unwrap()).unwrap();
        assert!(r.is_identity());
    }

    #[test]
    fn var_map_may_merge_variables() {
        let r = match_var_map(&p("Pair(x, y)").unwrap(), &p("Pair(z, z)").unwrap()).unwrap();
        assert_eq!(r.pairs(), &[("x".to_string(), "z".to_string()), ("y".to_string(), "z".to_string())]);
        assert_eq!(match_var_map(&p("Pair(z, z)").unwrap(), &p("Pair(x, y)").unwrap()), None);
        assert_eq!(match_var_map(&p("f(x)").unwrap(), &p("f(Nil)").unwrap()), None);
    }

    #[test]
    fn renaming_must_be_injective_and_functional() {
        assert_eq!(match_renaming(&p("Pair(x, y)").unwrap(), &p("Pair(z, z)").unwrap()), None);
        assert_eq!(match_renaming(&p("Pair(z, z)").unwrap(), &p("Pair(x, y)").unwrap()), None);
        assert_eq!(match_renaming(&p("append(xs, ys)").unwrap(), &p("append(Nil, ys)").unwrap()), None);
        assert_eq!(match_renaming(&p("f(x)").unwrap(), &p("g(x)").unwrap()), None);
    }
}
