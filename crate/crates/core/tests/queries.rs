//! Queries checked against brute-force enumeration written independently of
//! the library's own expansion.

mod common;

use common::oracle::{expand, size};
use mrsc::graphs::{count_graphs, gset2graphs, ConfGraph};
use mrsc::lang::{parse_expression, parse_program};
use mrsc::mrsc::mrscp;
use mrsc::queries::{first_graph, last_graph, max_size_graph, min_size_graph, size_summary};
use mrsc::{corpus, GraphSet, SizeMode};
use num_traits::ToPrimitive;

fn check_against_enumeration(name: &str, gs: &GraphSet) {
    let all = expand(gs);
    if all.is_empty() {
        assert_eq!(count_graphs(gs).to_usize(), Some(0), "{name}");
        assert!(first_graph(gs).is_none() && last_graph(gs).is_none(), "{name}");
        assert!(min_size_graph(gs, SizeMode::Standard).is_none(), "{name}");
        return;
    }
    assert_eq!(count_graphs(gs).to_usize(), Some(all.len()), "{name}: count");
    let lazy: Vec<ConfGraph> = gset2graphs(gs).collect();
    assert_eq!(lazy, all, "{name}: expansion order");
    assert_eq!(first_graph(gs).as_ref(), all.first(), "{name}: first");
    assert_eq!(last_graph(gs).as_ref(), all.last(), "{name}: last");
    for mode in [SizeMode::Standard, SizeMode::SkipUnfold] {
        let sizes: Vec<usize> = all.iter().map(|g| size(g, mode)).collect();
        let lo = *sizes.iter().min().unwrap();
        let hi = *sizes.iter().max().unwrap();
        let min = min_size_graph(gs, mode).unwrap();
        let max = max_size_graph(gs, mode).unwrap();
        assert_eq!((min.size, max.size), (lo, hi), "{name} {mode:?}");
        assert_eq!(size(&min.graph, mode), lo);
        assert_eq!(size(&max.graph, mode), hi);
        // Ties go to the earliest graph in expansion order.
        assert_eq!(Some(&min.graph), all.iter().find(|g| size(g, mode) == lo), "{name} {mode:?} min tie");
        assert_eq!(Some(&max.graph), all.iter().find(|g| size(g, mode) == hi), "{name} {mode:?} max tie");
        let s = size_summary(gs, mode).unwrap();
        assert_eq!((s.first, s.last, s.min, s.max), (sizes[0], *sizes.last().unwrap(), lo, hi));
    }
}

#[test]
fn small_corpus_queries_match_enumeration() {
    let mut covered = Vec::new();
    for ex in corpus::ALL {
        let (_, _, gs) = common::graph_set(&ex);
        if count_graphs(&gs).to_u64().is_some_and(|n| n <= 100_000) {
            check_against_enumeration(ex.name, &gs);
            covered.push(ex.id);
        }
    }
    assert!(covered.contains(&"double_append") && covered.contains(&"exp_growth"), "{covered:?}");
}

#[test]
fn varied_programs_match_enumeration() {
    let cases = [
        ("add(Z, y) = y; add(S(x), y) = S(add(x, y));", "add(add(a, b), c)"),
        // The accumulator grows on every step and nothing can be generalized.
        ("rev(Nil, acc) = acc; rev(Cons(x, xs), acc) = rev(xs, Cons(x, acc));", "rev(xs, Nil)"),
        ("rev(Nil, acc) = acc; rev(Cons(x, xs), acc) = rev(xs, Cons(x, acc));", "rev(rev(xs, Nil), Nil)"),
        ("dup(x) = P(x, x); id(x) = x;", "dup(id(dup(y)))"),
        ("not(T) = F; not(F) = T; nn(x) = not(not(x));", "nn(nn(b))"),
        ("k(x, y) = x; loop(x) = loop(S(x));", "k(A, loop(Z))"),
    ];
    for (src, root) in cases {
        let p = parse_program(src).unwrap();
        let e = parse_expression(root).unwrap();
        let gs = mrscp(&p, &e).unwrap();
        if count_graphs(&gs).to_u64().is_some_and(|n| n <= 100_000) {
            check_against_enumeration(root, &gs);
        }
    }
}

#[test]
fn empty_sets_have_no_extremes() {
    let gs = GraphSet::None;
    assert!(first_graph(&gs).is_none());
    assert!(min_size_graph(&gs, SizeMode::Standard).is_none());
    assert_eq!(gset2graphs(&gs).count(), 0);
}
