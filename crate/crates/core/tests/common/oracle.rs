//! Brute-force reference for the lazy-graph queries.

use mrsc::graphs::{build_graph, ConfGraph, GraphNode};
use mrsc::{GraphSet, SizeMode};

/// Every graph in expansion order: alternatives in order, children as a
/// cartesian product with the leftmost child most significant.
pub fn expand(gs: &GraphSet) -> Vec<ConfGraph> {
    match gs {
        GraphSet::None => vec![],
        GraphSet::Fold { conf, back, renaming } => vec![ConfGraph::fold(conf.clone(), *back, renaming.clone())],
        GraphSet::Build { conf, alts } => {
            let mut out = Vec::new();
            for alt in alts {
                let mut combos: Vec<Vec<ConfGraph>> = vec![vec![]];
                for child in &alt.children {
                    let options = expand(child);
                    combos = combos
                        .into_iter()
                        .flat_map(|prefix| {
                            options.iter().map(move |g| {
                                let mut p = prefix.clone();
                                p.push(g.clone());
                                p
                            })
                        })
                        .collect();
                }
                for children in combos {
                    out.push(build_graph(&alt.step, conf, children).unwrap());
                }
            }
            out
        }
    }
}

pub fn size(g: &ConfGraph, mode: SizeMode) -> usize {
    let own = match (&g.node, mode) {
        (GraphNode::Unfold(_), SizeMode::SkipUnfold) => 0,
        _ => 1,
    };
    let kids: usize = match &g.node {
        GraphNode::Leaf | GraphNode::Fold(..) => 0,
        GraphNode::Con(_, cs) => cs.iter().map(|c| size(c, mode)).sum(),
        GraphNode::Unfold(c) => size(c, mode),
        GraphNode::Cases(_, bs) => bs.iter().map(|(_, c)| size(c, mode)).sum(),
        GraphNode::Let(bs, body) => size(body, mode) + bs.iter().map(|(_, c)| size(c, mode)).sum::<usize>(),
    };
    own + kids
}

