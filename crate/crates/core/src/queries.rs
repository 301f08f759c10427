//! Extraction of distinguished graphs from a lazy graph without enumerating
//! it. Each query is one bottom-up pass over the lazy graph.
//!
//! Children of an alternative are chosen independently, so the best sum over
//! the cartesian product is the sum of the children's bests.

use std::collections::HashMap;

use crate::graphs::{build_graph, ConfGraph, SizeMode};
use crate::mrsc::{Alternative, GraphSet};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QueryResult {
    pub size: usize,
    pub graph: ConfGraph,
}

fn is_viable(alt: &Alternative) -> bool {
    alt.children.iter().all(|c| !matches!(c, GraphSet::None))
}

/// Element 0 of the expansion: the earliest viable alternative, built from
/// each child's first graph.
pub fn first_graph(gs: &GraphSet) -> Option<ConfGraph> {
    extreme(gs, false, &mut HashMap::new())
}

/// The final element of the expansion.
pub fn last_graph(gs: &GraphSet) -> Option<ConfGraph> {
    extreme(gs, true, &mut HashMap::new())
}

/// Whether a set expands to at least one graph, memoized by node address.
fn nonempty(gs: &GraphSet, memo: &mut HashMap<*const GraphSet, bool>) -> bool {
    let key = gs as *const GraphSet;
    if let Some(&b) = memo.get(&key) {
        return b;
    }
    let b = match gs {
        GraphSet::None => false,
        GraphSet::Fold { .. } => true,
        GraphSet::Build { alts, .. } => alts
            .iter()
            .any(|a| is_viable(a) && a.children.iter().all(|c| nonempty(c, memo))),
    };
    memo.insert(key, b);
    b
}

fn extreme(gs: &GraphSet, last: bool, memo: &mut HashMap<*const GraphSet, bool>) -> Option<ConfGraph> {
    match gs {
        GraphSet::None => None,
        GraphSet::Fold { conf, back, renaming } => Some(ConfGraph::fold(conf.clone(), *back, renaming.clone())),
        GraphSet::Build { conf, alts } => {
            let mut order: Box<dyn Iterator<Item = &Alternative>> = if last {
                Box::new(alts.iter().rev())
            } else {
                Box::new(alts.iter())
            };
            let alt = order.find(|a| a.children.iter().all(|c| nonempty(c, memo)))?;
            let children = alt
                .children
                .iter()
                .map(|c| extreme(c, last, memo))
                .collect::<Option<Vec<_>>>()?;
            Some(build_graph(&alt.step, conf, children).expect("lazy graph arity"))
        }
    }
}

#[derive(Clone, Copy)]
enum Goal {
    Min,
    Max,
}

impl Goal {
    fn better(self, candidate: usize, incumbent: usize) -> bool {
        match self {
            Goal::Min => candidate < incumbent,
            Goal::Max => candidate > incumbent,
        }
    }
}

/// Optimal size per node and the alternative achieving it.
type SizeMemo = HashMap<*const GraphSet, Option<(usize, usize)>>;

fn optimal(gs: &GraphSet, goal: Goal, mode: SizeMode, memo: &mut SizeMemo) -> Option<(usize, usize)> {
    let key = gs as *const GraphSet;
    if let Some(&r) = memo.get(&key) {
        return r;
    }
    let r = match gs {
        GraphSet::None => None,
        GraphSet::Fold { .. } => Some((1, 0)),
        GraphSet::Build { alts, .. } => {
            let mut best: Option<(usize, usize)> = None;
            for (i, alt) in alts.iter().enumerate() {
                let mut total = mode.node_cost(&alt.step);
                let mut viable = true;
                for c in &alt.children {
                    match optimal(c, goal, mode, memo) {
                        Some((s, _)) => total += s,
                        None => {
                            viable = false;
                            break;
                        }
                    }
                }
                if viable && best.is_none_or(|(b, _)| goal.better(total, b)) {
                    best = Some((total, i));
                }
            }
            best
        }
    };
    memo.insert(key, r);
    r
}

fn witness(gs: &GraphSet, memo: &SizeMemo) -> ConfGraph {
    match gs {
        GraphSet::None => unreachable!("witness requested for an empty set"),
        GraphSet::Fold { conf, back, renaming } => ConfGraph::fold(conf.clone(), *back, renaming.clone()),
        GraphSet::Build { conf, alts } => {
            let (_, i) = memo[&(gs as *const GraphSet)].expect("optimal alternative");
            let alt = &alts[i];
            let children = alt.children.iter().map(|c| witness(c, memo)).collect();
            build_graph(&alt.step, conf, children).expect("lazy graph arity")
        }
    }
}

fn query(gs: &GraphSet, goal: Goal, mode: SizeMode) -> Option<QueryResult> {
    let mut memo = SizeMemo::new();
    let (size, _) = optimal(gs, goal, mode, &mut memo)?;
    Some(QueryResult {
        size,
        graph: witness(gs, &memo),
    })
}

/// A graph of minimum size; ties go to the earliest alternative.
pub fn min_size_graph(gs: &GraphSet, mode: SizeMode) -> Option<QueryResult> {
    query(gs, Goal::Min, mode)
}

/// A graph of maximum size; ties go to the earliest alternative.
pub fn max_size_graph(gs: &GraphSet, mode: SizeMode) -> Option<QueryResult> {
    query(gs, Goal::Max, mode)
}

/// Sizes of the first, last, smallest and largest graphs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SizeSummary {
    pub first: usize,
    pub last: usize,
    pub min: usize,
    pub max: usize,
}

/// All four size statistics in one mode; `None` if the set is empty.
pub fn size_summary(gs: &GraphSet, mode: SizeMode) -> Option<SizeSummary> {
    Some(SizeSummary {
        first: first_graph(gs)?.size(mode),
        last: last_graph(gs)?.size(mode),
        min: min_size_graph(gs, mode)?.size,
        max: max_size_graph(gs, mode)?.size,
    })
}
