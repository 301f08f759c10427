//! Turning one configuration graph back into a program.
//!
//! 1. [`graph_to_ext`] reads the graph as an expression with `case` and `let`,
//!    introducing a recursive function for every node some fold points to.
//! 2. [`lift_case_let`] replaces each `case` and `let` by a call to a new
//!    top-level function, much like lambda lifting.
//! 3. [`cleanup`] inlines trivial lets and merges duplicate definitions.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use thiserror::Error;

use crate::graphs::{ConfGraph, GraphNode};
use crate::lang::{substitute, Clause, Expr, FunDef, Pattern, Program, ProgramError, Subst};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ResidualError {
    #[error("fold at depth {depth} points {back} levels up")]
    UnresolvedFold { back: usize, depth: usize },
    #[error("residual root mentions `{0}`, which is not a variable of the original configuration")]
    ForeignVariable(String),
    #[error("generated program is malformed: {0}")]
    Invalid(#[from] ProgramError),
}

/// Object-language expressions extended with `case` and `let`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExtExpr {
    Var(String),
    Ctr(String, Vec<ExtExpr>),
    Call(String, Vec<ExtExpr>),
    Case(Box<ExtExpr>, Vec<(Pattern, ExtExpr)>),
    Let(Vec<(String, ExtExpr)>, Box<ExtExpr>),
}

impl ExtExpr {
    fn from_expr(e: &Expr) -> ExtExpr {
        match e {
            Expr::Var(v) => ExtExpr::Var(v.clone()),
            Expr::Ctr(c, args) => ExtExpr::Ctr(c.clone(), args.iter().map(ExtExpr::from_expr).collect()),
            Expr::Call(f, args) => ExtExpr::Call(f.clone(), args.iter().map(ExtExpr::from_expr).collect()),
        }
    }
}

impl fmt::Display for ExtExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn list(f: &mut fmt::Formatter<'_>, head: &str, args: &[ExtExpr]) -> fmt::Result {
            write!(f, "{head}(")?;
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{a}")?;
            }
            f.write_str(")")
        }
        match self {
            ExtExpr::Var(v) => f.write_str(v),
            ExtExpr::Ctr(n, args) | ExtExpr::Call(n, args) => list(f, n, args),
            ExtExpr::Case(scrut, branches) => {
                write!(f, "case {scrut} of {{")?;
                for (i, (p, b)) in branches.iter().enumerate() {
                    let sep = if i > 0 { ";" } else { "" };
                    write!(f, "{sep} {p} -> {b}")?;
                }
                f.write_str(" }")
            }
            ExtExpr::Let(binds, body) => {
                f.write_str("let ")?;
                for (i, (v, e)) in binds.iter().enumerate() {
                    let sep = if i > 0 { ", " } else { "" };
                    write!(f, "{sep}{v} = {e}")?;
                }
                write!(f, " in {body}")
            }
        }
    }
}

/// A function introduced for a fold target.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtDef {
    pub name: String,
    pub params: Vec<String>,
    pub body: ExtExpr,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtProgram {
    pub defs: Vec<ExtDef>,
    pub root: ExtExpr,
}

fn path_name(path: &[usize]) -> String {
    let parts: Vec<String> = path.iter().map(usize::to_string).collect();
    format!("f_{}", parts.join("_"))
}

/// Reads `g` as an extended expression. Fold targets become functions over
/// their configuration's variables; unfold nodes are transparent.
pub fn graph_to_ext(g: &ConfGraph, original_conf: &Expr) -> Result<ExtProgram, ResidualError> {
    fn targets(g: &ConfGraph, path: &mut Vec<usize>, found: &mut HashSet<Vec<usize>>) -> Result<(), ResidualError> {
        if let GraphNode::Fold(back, _) = g.node {
            if back == 0 || back > path.len() {
                return Err(ResidualError::UnresolvedFold { back, depth: path.len() });
            }
            found.insert(path[..path.len() - back].to_vec());
        }
        for (i, c) in g.children().into_iter().enumerate() {
            path.push(i);
            targets(c, path, found)?;
            path.pop();
        }
        Ok(())
    }

    struct Ctx<'g> {
        targets: HashSet<Vec<usize>>,
        ancestors: Vec<&'g Expr>,
        path: Vec<usize>,
        defs: Vec<ExtDef>,
    }

    fn child<'g>(cx: &mut Ctx<'g>, parent: &'g ConfGraph, i: usize, g: &'g ConfGraph) -> ExtExpr {
        cx.ancestors.push(&parent.conf);
        cx.path.push(i);
        let e = node(cx, g);
        cx.path.pop();
        cx.ancestors.pop();
        e
    }

    fn node<'g>(cx: &mut Ctx<'g>, g: &'g ConfGraph) -> ExtExpr {
        if cx.targets.contains(&cx.path) {
            let name = path_name(&cx.path);
            let params = g.conf.vars();
            let slot = cx.defs.len();
            cx.defs.push(ExtDef {
                name: name.clone(),
                params: params.clone(),
                body: ExtExpr::Var(String::new()),
            });
            cx.defs[slot].body = body(cx, g);
            return ExtExpr::Call(name, params.into_iter().map(ExtExpr::Var).collect());
        }
        body(cx, g)
    }

    fn body<'g>(cx: &mut Ctx<'g>, g: &'g ConfGraph) -> ExtExpr {
        match &g.node {
            GraphNode::Leaf => ExtExpr::from_expr(&g.conf),
            GraphNode::Con(c, kids) => ExtExpr::Ctr(
                c.clone(),
                kids.iter().enumerate().map(|(i, k)| child(cx, g, i, k)).collect(),
            ),
            GraphNode::Unfold(k) => child(cx, g, 0, k),
            GraphNode::Cases(x, branches) => ExtExpr::Case(
                Box::new(ExtExpr::Var(x.clone())),
                branches
                    .iter()
                    .enumerate()
                    .map(|(i, (p, k))| (p.clone(), child(cx, g, i, k)))
                    .collect(),
            ),
            GraphNode::Fold(back, renaming) => {
                let depth = cx.path.len();
                let target = &cx.path[..depth - back];
                let upper = cx.ancestors[depth - back];
                let args = upper
                    .vars()
                    .into_iter()
                    .map(|v| ExtExpr::Var(renaming.get(&v).map_or(v.clone(), str::to_string)))
                    .collect();
                ExtExpr::Call(path_name(target), args)
            }
            GraphNode::Let(binds, b) => {
                let body = child(cx, g, 0, b);
                let binds = binds
                    .iter()
                    .enumerate()
                    .map(|(i, (v, k))| (v.clone(), child(cx, g, i + 1, k)))
                    .collect();
                ExtExpr::Let(binds, Box::new(body))
            }
        }
    }

    let mut found = HashSet::new();
    targets(g, &mut Vec::new(), &mut found)?;
    let mut cx = Ctx {
        targets: found,
        ancestors: Vec::new(),
        path: Vec::new(),
        defs: Vec::new(),
    };
    let root = node(&mut cx, g);
    let allowed: HashSet<String> = original_conf.vars().into_iter().collect();
    if let Some(v) = g.conf.vars().into_iter().find(|v| !allowed.contains(v)) {
        return Err(ResidualError::ForeignVariable(v));
    }
    Ok(ExtProgram { defs: cx.defs, root })
}

/// How a residual definition came about; cleanup treats let functions
/// specially.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DefKind {
    Fold,
    Case,
    /// A lifted `let`; its first `bindings` parameters are the bound variables.
    Let { bindings: usize },
}

/// A residual program: generated definitions and the root expression.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidualProgram {
    pub defs: Vec<FunDef>,
    pub root: Expr,
    pub kinds: BTreeMap<String, DefKind>,
}

impl ResidualProgram {
    /// Validates the definitions as a program.
    pub fn program(&self) -> Result<Program, ProgramError> {
        Program::new(self.defs.clone())
    }

    /// AST node count of definitions and root together.
    pub fn size(&self) -> usize {
        self.defs.iter().map(FunDef::size).sum::<usize>() + self.root.size()
    }

    /// Whether any source function other than the generated ones is called.
    pub fn calls(&self, name: &str) -> bool {
        let mut hit = false;
        let mut look = |e: &Expr| e.for_each_call(&mut |f, _| hit |= f == name);
        look(&self.root);
        for d in &self.defs {
            for b in bodies(d) {
                look(b);
            }
        }
        hit
    }

    fn index(&self, name: &str) -> Option<usize> {
        self.defs.iter().position(|d| d.name() == name)
    }
}

impl fmt::Display for ResidualProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.defs {
            writeln!(f, "{d}")?;
        }
        write!(f, "expression: {}", self.root)
    }
}

fn bodies(d: &FunDef) -> Vec<&Expr> {
    match d {
        FunDef::Ordinary { body, .. } => vec![body],
        FunDef::Matching { clauses, .. } => clauses.iter().map(|c| &c.body).collect(),
    }
}

fn bodies_mut(d: &mut FunDef) -> Vec<&mut Expr> {
    match d {
        FunDef::Ordinary { body, .. } => vec![body],
        FunDef::Matching { clauses, .. } => clauses.iter_mut().map(|c| &mut c.body).collect(),
    }
}

/// Variables of `e` in first-occurrence order, skipping `bound`.
fn free_vars<'a>(es: impl IntoIterator<Item = &'a Expr>, bound: &[String]) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for e in es {
        for v in e.vars() {
            if !bound.contains(&v) && !out.contains(&v) {
                out.push(v);
            }
        }
    }
    out
}

/// Replaces every `case` and `let` by a call to a new definition named after
/// the enclosing function (`main` outside any).
pub fn lift_case_let(ext: &ExtProgram) -> ResidualProgram {
    struct Lifter {
        owner: String,
        cases: usize,
        lets: usize,
        defs: Vec<Option<FunDef>>,
        kinds: BTreeMap<String, DefKind>,
    }

    impl Lifter {
        fn lift(&mut self, e: &ExtExpr) -> Expr {
            match e {
                ExtExpr::Var(v) => Expr::Var(v.clone()),
                ExtExpr::Ctr(c, args) => Expr::Ctr(c.clone(), args.iter().map(|a| self.lift(a)).collect()),
                ExtExpr::Call(f, args) => Expr::Call(f.clone(), args.iter().map(|a| self.lift(a)).collect()),
                ExtExpr::Case(scrut, branches) => {
                    let name = format!("{}_case{}", self.owner, self.cases);
                    self.cases += 1;
                    let slot = self.reserve();
                    let scrut = self.lift(scrut);
                    let lifted: Vec<(Pattern, Expr)> =
                        branches.iter().map(|(p, b)| (p.clone(), self.lift(b))).collect();
                    let mut others: Vec<String> = Vec::new();
                    for (p, b) in &lifted {
                        for v in free_vars([b], &p.vars) {
                            if !others.contains(&v) {
                                others.push(v);
                            }
                        }
                    }
                    let clauses = lifted
                        .into_iter()
                        .map(|(pattern, body)| Clause {
                            pattern,
                            params: others.clone(),
                            body,
                        })
                        .collect();
                    self.fill(slot, FunDef::Matching { name: name.clone(), clauses }, DefKind::Case);
                    let args = std::iter::once(scrut).chain(others.into_iter().map(Expr::Var)).collect();
                    Expr::Call(name, args)
                }
                ExtExpr::Let(binds, body) => {
                    let name = format!("{}_let{}", self.owner, self.lets);
                    self.lets += 1;
                    let slot = self.reserve();
                    let body = self.lift(body);
                    let bound: Vec<String> = binds.iter().map(|(v, _)| v.clone()).collect();
                    let values: Vec<Expr> = binds.iter().map(|(_, b)| self.lift(b)).collect();
                    let others = free_vars([&body], &bound);
                    let params = bound.iter().cloned().chain(others.iter().cloned()).collect();
                    let kind = DefKind::Let { bindings: bound.len() };
                    self.fill(slot, FunDef::Ordinary { name: name.clone(), params, body }, kind);
                    let args = values.into_iter().chain(others.into_iter().map(Expr::Var)).collect();
                    Expr::Call(name, args)
                }
            }
        }

        fn reserve(&mut self) -> usize {
            self.defs.push(None);
            self.defs.len() - 1
        }

        fn fill(&mut self, slot: usize, def: FunDef, kind: DefKind) {
            self.kinds.insert(def.name().to_string(), kind);
            self.defs[slot] = Some(def);
        }

        fn enter(&mut self, owner: &str) {
            self.owner = owner.to_string();
            self.cases = 0;
            self.lets = 0;
        }
    }

    let mut l = Lifter {
        owner: String::new(),
        cases: 0,
        lets: 0,
        defs: Vec::new(),
        kinds: BTreeMap::new(),
    };
    for d in &ext.defs {
        l.enter(&d.name);
        let slot = l.reserve();
        let body = l.lift(&d.body);
        l.fill(
            slot,
            FunDef::Ordinary {
                name: d.name.clone(),
                params: d.params.clone(),
                body,
            },
            DefKind::Fold,
        );
    }
    l.enter("main");
    let root = l.lift(&ext.root);
    ResidualProgram {
        defs: l.defs.into_iter().map(|d| d.expect("every reserved slot is filled")).collect(),
        root,
        kinds: l.kinds,
    }
}

/// Rewrites every call to `name` in `e` with `f`.
fn rewrite_calls(e: &mut Expr, name: &str, f: &mut impl FnMut(&[Expr]) -> Expr) {
    match e {
        Expr::Var(_) => {}
        Expr::Ctr(_, args) => args.iter_mut().for_each(|a| rewrite_calls(a, name, f)),
        Expr::Call(g, args) => {
            args.iter_mut().for_each(|a| rewrite_calls(a, name, f));
            if g == name {
                *e = f(args);
            }
        }
    }
}

fn call_sites(rp: &ResidualProgram, name: &str) -> Vec<Vec<Expr>> {
    let mut sites = Vec::new();
    let mut look = |e: &Expr| {
        e.for_each_call(&mut |f, args| {
            if f == name {
                sites.push(args.to_vec());
            }
        })
    };
    look(&rp.root);
    for d in &rp.defs {
        for b in bodies(d) {
            look(b);
        }
    }
    sites
}

fn rewrite_everywhere(rp: &mut ResidualProgram, name: &str, f: &mut impl FnMut(&[Expr]) -> Expr) {
    rewrite_calls(&mut rp.root, name, f);
    for d in &mut rp.defs {
        for b in bodies_mut(d) {
            rewrite_calls(b, name, f);
        }
    }
}

/// Tries to eliminate binding `i` of the let function at `idx`, which has a
/// single call site. Returns the rewritten program if that does not make it
/// larger.
fn drop_binding(rp: &ResidualProgram, idx: usize, i: usize) -> Option<ResidualProgram> {
    let FunDef::Ordinary { name, params, body } = &rp.defs[idx] else {
        return None;
    };
    let Some(&DefKind::Let { bindings }) = rp.kinds.get(name) else {
        return None;
    };
    let sites = call_sites(rp, name);
    let [args] = sites.as_slice() else {
        return None;
    };
    let value = &args[i];
    if !value.is_var() && body.occurrences(&params[i]) > 1 {
        return None;
    }
    let mut next = rp.clone();
    let name = name.clone();
    if bindings == 1 {
        // The last binding goes: inline the whole function at its call site.
        let body = body.clone();
        let params = params.clone();
        next.defs.remove(idx);
        next.kinds.remove(&name);
        rewrite_everywhere(&mut next, &name, &mut |args| {
            let s: Subst = params.iter().cloned().zip(args.iter().cloned()).collect();
            substitute(&body, &s)
        });
    } else {
        // Caller variables in the inlined value become parameters, reusing
        // an existing one when the caller already passes that variable.
        let mut rename = Subst::new();
        let mut extra: Vec<(String, String)> = Vec::new();
        for v in value.vars() {
            let existing = params
                .iter()
                .zip(args)
                .skip(bindings)
                .find(|(_, a)| a.as_var() == Some(v.as_str()))
                .map(|(p, _)| p.clone());
            let local = existing.unwrap_or_else(|| {
                let mut fresh = v.clone();
                while params.contains(&fresh) || extra.iter().any(|(l, _)| *l == fresh) {
                    fresh.push('\'');
                }
                extra.push((fresh.clone(), v.clone()));
                fresh
            });
            rename.insert(v, Expr::Var(local));
        }
        let mut s = Subst::new();
        s.insert(params[i].clone(), substitute(value, &rename));
        let new_body = substitute(body, &s);
        let mut kept: Vec<String> = params[..bindings].to_vec();
        kept.remove(i);
        let mut arg_of: HashMap<String, Expr> = params.iter().cloned().zip(args.iter().cloned()).collect();
        arg_of.extend(extra.into_iter().map(|(l, v)| (l, Expr::Var(v))));
        let others = free_vars([&new_body], &kept);
        let new_params: Vec<String> = kept.iter().chain(&others).cloned().collect();
        let new_args: Vec<Expr> = new_params.iter().map(|p| arg_of[p].clone()).collect();
        next.defs[idx] = FunDef::Ordinary {
            name: name.clone(),
            params: new_params,
            body: new_body,
        };
        next.kinds.insert(name.clone(), DefKind::Let { bindings: bindings - 1 });
        rewrite_everywhere(&mut next, &name, &mut |_| Expr::Call(name.clone(), new_args.clone()));
    }
    (next.size() <= rp.size()).then_some(next)
}

/// Inlines let functions with no bindings left at their call sites.
fn drop_empty_let(rp: &ResidualProgram, idx: usize) -> Option<ResidualProgram> {
    let name = rp.defs[idx].name();
    if rp.kinds.get(name) != Some(&DefKind::Let { bindings: 0 }) || call_sites(rp, name).len() != 1 {
        return None;
    }
    let FunDef::Ordinary { name, params, body } = rp.defs[idx].clone() else {
        return None;
    };
    let mut next = rp.clone();
    next.defs.remove(idx);
    next.kinds.remove(&name);
    rewrite_everywhere(&mut next, &name, &mut |args| {
        let s: Subst = params.iter().cloned().zip(args.iter().cloned()).collect();
        substitute(&body, &s)
    });
    (next.size() <= rp.size()).then_some(next)
}

fn remove_trivial_lets(mut rp: ResidualProgram) -> ResidualProgram {
    // A rewrite can turn call arguments elsewhere into variables, so sweep
    // until a full pass changes nothing.
    loop {
        let mut changed = false;
        let mut idx = 0;
        while idx < rp.defs.len() {
            if let Some(next) = drop_empty_let(&rp, idx) {
                rp = next;
                changed = true;
                continue;
            }
            let bindings = match rp.kinds.get(rp.defs[idx].name()) {
                Some(DefKind::Let { bindings }) => *bindings,
                _ => 0,
            };
            match (0..bindings).find_map(|i| drop_binding(&rp, idx, i)) {
                Some(next) => {
                    rp = next;
                    changed = true;
                }
                None => idx += 1,
            }
        }
        if !changed {
            return rp;
        }
    }
}

/// A definition with its variables numbered by binding position and calls to
/// generated functions replaced by their current class.
fn signature(d: &FunDef, class: &HashMap<String, usize>) -> String {
    fn expr(e: &Expr, vars: &HashMap<&str, usize>, class: &HashMap<String, usize>, out: &mut String) {
        match e {
            Expr::Var(v) => out.push_str(&format!("v{}", vars[v.as_str()])),
            Expr::Ctr(n, args) | Expr::Call(n, args) => {
                match (e, class.get(n)) {
                    (Expr::Call(..), Some(k)) => out.push_str(&format!("#{k}")),
                    (Expr::Call(..), None) => out.push_str(&format!("!{n}")),
                    _ => out.push_str(n),
                }
                out.push('(');
                for a in args {
                    expr(a, vars, class, out);
                    out.push(',');
                }
                out.push(')');
            }
        }
    }
    let mut out = String::new();
    match d {
        FunDef::Ordinary { params, body, .. } => {
            let vars = params.iter().enumerate().map(|(i, p)| (p.as_str(), i)).collect();
            out.push_str(&format!("O{}=", params.len()));
            expr(body, &vars, class, &mut out);
        }
        FunDef::Matching { clauses, .. } => {
            let mut sorted: Vec<&Clause> = clauses.iter().collect();
            sorted.sort_by(|a, b| a.pattern.ctr.cmp(&b.pattern.ctr));
            out.push('M');
            for c in sorted {
                let vars = c
                    .pattern
                    .vars
                    .iter()
                    .chain(&c.params)
                    .enumerate()
                    .map(|(i, p)| (p.as_str(), i))
                    .collect();
                out.push_str(&format!("|{}/{}/{}=", c.pattern.ctr, c.pattern.vars.len(), c.params.len()));
                expr(&c.body, &vars, class, &mut out);
            }
        }
    }
    out
}

/// Merges generated definitions that are equal up to consistent renaming of
/// generated names, including mutually recursive groups.
fn merge_duplicates(mut rp: ResidualProgram) -> ResidualProgram {
    let names: Vec<String> = rp
        .defs
        .iter()
        .map(|d| d.name().to_string())
        .filter(|n| rp.kinds.contains_key(n))
        .collect();
    let mut class: HashMap<String, usize> = names.iter().map(|n| (n.clone(), 0)).collect();
    let mut classes = 1;
    loop {
        let mut ids: HashMap<(usize, String), usize> = HashMap::new();
        let mut next = HashMap::new();
        for n in &names {
            let sig = signature(&rp.defs[rp.index(n).expect("listed")], &class);
            let fresh = ids.len();
            let id = *ids.entry((class[n], sig)).or_insert(fresh);
            next.insert(n.clone(), id);
        }
        let count = ids.len();
        class = next;
        if count == classes {
            break;
        }
        classes = count;
    }
    let mut representative: HashMap<usize, String> = HashMap::new();
    let mut target: HashMap<String, String> = HashMap::new();
    for n in &names {
        let rep = representative.entry(class[n]).or_insert_with(|| n.clone());
        if rep != n {
            target.insert(n.clone(), rep.clone());
        }
    }
    if target.is_empty() {
        return rp;
    }
    rp.defs.retain(|d| !target.contains_key(d.name()));
    rp.kinds.retain(|n, _| !target.contains_key(n));
    fn retarget(e: &mut Expr, target: &HashMap<String, String>) {
        match e {
            Expr::Var(_) => {}
            Expr::Ctr(_, args) => args.iter_mut().for_each(|a| retarget(a, target)),
            Expr::Call(f, args) => {
                if let Some(t) = target.get(f) {
                    *f = t.clone();
                }
                args.iter_mut().for_each(|a| retarget(a, target));
            }
        }
    }
    retarget(&mut rp.root, &target);
    for d in &mut rp.defs {
        for b in bodies_mut(d) {
            retarget(b, &target);
        }
    }
    rp
}

/// Removes trivial lets (bound to a variable or used once) and merges
/// duplicate generated definitions. Never makes the program larger.
pub fn cleanup(rp: &ResidualProgram) -> ResidualProgram {
    merge_duplicates(remove_trivial_lets(rp.clone()))
}

/// The full pipeline: extraction, lifting, cleanup.
pub fn residualize(g: &ConfGraph, original_conf: &Expr) -> Result<ResidualProgram, ResidualError> {
    let rp = cleanup(&lift_case_let(&graph_to_ext(g, original_conf)?));
    rp.program()?;
    Ok(rp)
}

/// Whether `a` and `b` are equal up to a bijection on defined function
/// names, renaming of parameters and pattern variables, and the order of
/// definitions and clauses. Free variables of the roots must agree.
pub fn alpha_equivalent(a: &Program, a_root: &Expr, b: &Program, b_root: &Expr) -> bool {
    struct Iso<'a> {
        a: &'a Program,
        b: &'a Program,
        fwd: HashMap<&'a str, &'a str>,
        bwd: HashMap<&'a str, &'a str>,
        pending: Vec<(&'a str, &'a str)>,
    }

    impl<'a> Iso<'a> {
        fn link(&mut self, f: &'a str, g: &'a str) -> bool {
            match (self.a.get(f).is_some(), self.b.get(g).is_some()) {
                (false, false) => return f == g,
                (true, true) => {}
                _ => return false,
            }
            match (self.fwd.get(f), self.bwd.get(g)) {
                (Some(&g2), _) => g2 == g,
                (None, Some(_)) => false,
                (None, None) => {
                    self.fwd.insert(f, g);
                    self.bwd.insert(g, f);
                    self.pending.push((f, g));
                    true
                }
            }
        }

        fn expr(&mut self, x: &'a Expr, y: &'a Expr, vars: &mut HashMap<&'a str, &'a str>) -> bool {
            match (x, y) {
                (Expr::Var(v), Expr::Var(w)) => match vars.get(v.as_str()) {
                    Some(&m) => m == w,
                    None => v == w && !vars.values().any(|&m| m == w),
                },
                (Expr::Ctr(c, xs), Expr::Ctr(d, ys)) => {
                    c == d && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| self.expr(x, y, vars))
                }
                (Expr::Call(f, xs), Expr::Call(g, ys)) => {
                    xs.len() == ys.len() && self.link(f, g) && xs.iter().zip(ys).all(|(x, y)| self.expr(x, y, vars))
                }
                _ => false,
            }
        }

        /// Pairs up binders positionally; both sides must be distinct.
        fn binders(xs: Vec<&'a str>, ys: Vec<&'a str>) -> Option<HashMap<&'a str, &'a str>> {
            let distinct = |v: &[&str]| v.iter().collect::<HashSet<_>>().len() == v.len();
            (xs.len() == ys.len() && distinct(&xs) && distinct(&ys)).then(|| xs.into_iter().zip(ys).collect())
        }

        fn def(&mut self, f: &'a str, g: &'a str) -> bool {
            let (a, b): (&'a Program, &'a Program) = (self.a, self.b);
            let names = |v: &'a [String]| v.iter().map(String::as_str);
            match (a.get(f).expect("linked"), b.get(g).expect("linked")) {
                (FunDef::Ordinary { params: p, body: x, .. }, FunDef::Ordinary { params: q, body: y, .. }) => {
                    match Iso::binders(names(p).collect(), names(q).collect()) {
                        Some(mut vars) => self.expr(x, y, &mut vars),
                        None => false,
                    }
                }
                (FunDef::Matching { clauses: cs, .. }, FunDef::Matching { clauses: ds, .. }) => {
                    cs.len() == ds.len()
                        && cs.iter().all(|c| {
                            let Some(d) = ds.iter().find(|d| d.pattern.ctr == c.pattern.ctr) else {
                                return false;
                            };
                            if c.pattern.vars.len() != d.pattern.vars.len() {
                                return false;
                            }
                            let xs = names(&c.pattern.vars).chain(names(&c.params)).collect();
                            let ys = names(&d.pattern.vars).chain(names(&d.params)).collect();
                            match Iso::binders(xs, ys) {
                                Some(mut vars) => self.expr(&c.body, &d.body, &mut vars),
                                None => false,
                            }
                        })
                }
                _ => false,
            }
        }
    }

    let mut iso = Iso {
        a,
        b,
        fwd: HashMap::new(),
        bwd: HashMap::new(),
        pending: Vec::new(),
    };
    if !iso.expr(a_root, b_root, &mut HashMap::new()) {
        return false;
    }
    while let Some((f, g)) = iso.pending.pop() {
        if !iso.def(f, g) {
            return false;
        }
    }
    iso.fwd.len() == a.len() && iso.bwd.len() == b.len()
}
