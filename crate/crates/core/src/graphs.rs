//! Configuration graphs: expansion of a lazy graph, counting, and sizes.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::driving::MultiStep;
use crate::lang::{Expr, Pattern, Renaming};
use crate::mrsc::GraphSet;

/// One configuration graph. Every node remembers its configuration; fold
/// nodes point to an ancestor by relative distance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfGraph {
    pub conf: Expr,
    pub node: GraphNode,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GraphNode {
    /// A variable that cannot be driven further.
    Leaf,
    Con(String, Vec<ConfGraph>),
    Unfold(Box<ConfGraph>),
    Cases(String, Vec<(Pattern, ConfGraph)>),
    Fold(usize, Renaming),
    Let(Vec<(String, ConfGraph)>, Box<ConfGraph>),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum SizeMode {
    /// Every node counts 1.
    #[default]
    Standard,
    /// Unfold nodes count 0; they vanish during residualization.
    SkipUnfold,
}

impl SizeMode {
    pub fn node_cost(self, step: &MultiStep) -> usize {
        match (self, step) {
            (SizeMode::SkipUnfold, MultiStep::Unfold(_)) => 0,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("step has {expected} sub-expressions but {found} subgraphs were given")]
pub struct ArityError {
    pub expected: usize,
    pub found: usize,
}

/// Assembles a graph node from a driving step and the graphs of its
/// sub-expressions (ordered as [`MultiStep::sub_exprs`]).
pub fn build_graph(step: &MultiStep, conf: &Expr, children: Vec<ConfGraph>) -> Result<ConfGraph, ArityError> {
    let expected = step.sub_exprs().len();
    if expected != children.len() {
        return Err(ArityError {
            expected,
            found: children.len(),
        });
    }
    let node = match step {
        MultiStep::Leaf(_) => GraphNode::Leaf,
        MultiStep::Con(c, _) => GraphNode::Con(c.clone(), children),
        MultiStep::Unfold(_) => GraphNode::Unfold(Box::new(children.into_iter().next().unwrap())),
        MultiStep::Cases(x, branches) => GraphNode::Cases(
            x.clone(),
            branches.iter().map(|(p, _)| p.clone()).zip(children).collect(),
        ),
        MultiStep::Let(binds, _) => {
            let mut it = children.into_iter();
            let body = it.next().unwrap();
            GraphNode::Let(binds.iter().map(|(v, _)| v.clone()).zip(it).collect(), Box::new(body))
        }
    };
    Ok(ConfGraph {
        conf: conf.clone(),
        node,
    })
}

impl ConfGraph {
    pub fn fold(conf: Expr, back: usize, renaming: Renaming) -> ConfGraph {
        ConfGraph {
            conf,
            node: GraphNode::Fold(back, renaming),
        }
    }

    /// Child graphs in the same order as the step's sub-expressions.
    pub fn children(&self) -> Vec<&ConfGraph> {
        match &self.node {
            GraphNode::Leaf | GraphNode::Fold(..) => vec![],
            GraphNode::Con(_, cs) => cs.iter().collect(),
            GraphNode::Unfold(c) => vec![c],
            GraphNode::Cases(_, bs) => bs.iter().map(|(_, c)| c).collect(),
            GraphNode::Let(binds, body) => std::iter::once(&**body).chain(binds.iter().map(|(_, c)| c)).collect(),
        }
    }

    pub fn size(&self, mode: SizeMode) -> usize {
        graph_size(self, mode)
    }

    /// Checks that every fold points to a proper ancestor.
    pub fn folds_resolve(&self) -> bool {
        fn go(g: &ConfGraph, depth: usize) -> bool {
            match &g.node {
                GraphNode::Fold(back, _) => *back >= 1 && *back <= depth,
                _ => g.children().into_iter().all(|c| go(c, depth + 1)),
            }
        }
        go(self, 0)
    }
}

pub fn graph_size(g: &ConfGraph, mode: SizeMode) -> usize {
    let own = match (&g.node, mode) {
        (GraphNode::Unfold(_), SizeMode::SkipUnfold) => 0,
        _ => 1,
    };
    own + g.children().into_iter().map(|c| graph_size(c, mode)).sum::<usize>()
}

/// Number of graphs `gs` expands to.
pub fn count_graphs(gs: &GraphSet) -> BigUint {
    match gs {
        GraphSet::None => BigUint::zero(),
        GraphSet::Fold { .. } => BigUint::one(),
        GraphSet::Build { alts, .. } => alts
            .iter()
            .map(|a| a.children.iter().map(count_graphs).fold(BigUint::one(), |acc, c| acc * c))
            .sum(),
    }
}

/// Lazily expands a lazy graph into its configuration graphs: alternatives
/// in order, each as the cartesian product of its children with the
/// leftmost child most significant.
pub fn gset2graphs(gs: &GraphSet) -> Graphs<'_> {
    Graphs::new(gs)
}

pub struct Graphs<'a> {
    gs: &'a GraphSet,
    state: State<'a>,
}

enum State<'a> {
    Start,
    Alt(usize, Product<'a>),
    Done,
}

struct Product<'a> {
    children: &'a [GraphSet],
    iters: Vec<Graphs<'a>>,
    current: Vec<ConfGraph>,
    started: bool,
}

impl<'a> Product<'a> {
    fn new(children: &'a [GraphSet]) -> Self {
        Product {
            children,
            iters: Vec::new(),
            current: Vec::new(),
            started: false,
        }
    }

    fn next(&mut self) -> Option<Vec<ConfGraph>> {
        if !self.started {
            self.started = true;
            for c in self.children {
                let mut it = Graphs::new(c);
                self.current.push(it.next()?);
                self.iters.push(it);
            }
            return Some(self.current.clone());
        }
        let mut i = self.children.len();
        while i > 0 {
            i -= 1;
            if let Some(g) = self.iters[i].next() {
                self.current[i] = g;
                for j in i + 1..self.children.len() {
                    let mut it = Graphs::new(&self.children[j]);
                    self.current[j] = it.next().expect("non-empty child expands again");
                    self.iters[j] = it;
                }
                return Some(self.current.clone());
            }
        }
        None
    }
}

impl<'a> Graphs<'a> {
    fn new(gs: &'a GraphSet) -> Self {
        Graphs { gs, state: State::Start }
    }
}

impl Iterator for Graphs<'_> {
    type Item = ConfGraph;

    fn next(&mut self) -> Option<ConfGraph> {
        loop {
            match (&mut self.state, self.gs) {
                (State::Done, _) | (_, GraphSet::None) => return None,
                (State::Start, GraphSet::Fold { conf, back, renaming }) => {
                    self.state = State::Done;
                    return Some(ConfGraph::fold(conf.clone(), *back, renaming.clone()));
                }
                (State::Start, GraphSet::Build { alts, .. }) => {
                    self.state = match alts.first() {
                        Some(a) => State::Alt(0, Product::new(&a.children)),
                        None => State::Done,
                    };
                }
                (State::Alt(i, prod), GraphSet::Build { conf, alts }) => {
                    if let Some(children) = prod.next() {
                        let g = build_graph(&alts[*i].step, conf, children).expect("lazy graph arity");
                        return Some(g);
                    }
                    let next = *i + 1;
                    self.state = match alts.get(next) {
                        Some(a) => State::Alt(next, Product::new(&a.children)),
                        None => State::Done,
                    };
                }
                (State::Alt(..), GraphSet::Fold { .. }) => unreachable!(),
            }
        }
    }
}

impl fmt::Display for ConfGraph {
    /// Indented dump, one node per line.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(g: &ConfGraph, label: &str, depth: usize, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            let pad = "  ".repeat(depth);
            match &g.node {
                GraphNode::Leaf => writeln!(f, "{pad}{label}leaf {}", g.conf),
                GraphNode::Con(c, cs) => {
                    writeln!(f, "{pad}{label}con {c}")?;
                    cs.iter().try_for_each(|c| go(c, "", depth + 1, f))
                }
                GraphNode::Unfold(c) => {
                    writeln!(f, "{pad}{label}unfold {}", g.conf)?;
                    go(c, "", depth + 1, f)
                }
                GraphNode::Cases(x, bs) => {
                    writeln!(f, "{pad}{label}cases {x}")?;
                    bs.iter().try_for_each(|(p, c)| go(c, &format!("{p} => "), depth + 1, f))
                }
                GraphNode::Fold(back, r) => writeln!(f, "{pad}{label}fold ^{back} {r} {}", g.conf),
                GraphNode::Let(binds, body) => {
                    writeln!(f, "{pad}{label}let {}", g.conf)?;
                    for (v, c) in binds {
                        go(c, &format!("{v} = "), depth + 1, f)?;
                    }
                    go(body, "in ", depth + 1, f)
                }
            }
        }
        go(self, "", 0, f)
    }
}
