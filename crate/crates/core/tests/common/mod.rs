#![allow(dead_code)]

pub mod gen;
pub mod oracle;

use mrsc::graphs::ConfGraph;
use mrsc::lang::{parse_source, Expr, Program};
use mrsc::mrsc::mrscp;
use mrsc::queries::{first_graph, last_graph, max_size_graph, min_size_graph};
use mrsc::residual::{residualize, ResidualProgram};
use mrsc::{corpus, GraphSet, SizeMode};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pick {
    First,
    Last,
    Min(SizeMode),
    Max(SizeMode),
}

impl Pick {
    pub const ALL: [Pick; 6] = [
        Pick::First,
        Pick::Last,
        Pick::Min(SizeMode::Standard),
        Pick::Max(SizeMode::Standard),
        Pick::Min(SizeMode::SkipUnfold),
        Pick::Max(SizeMode::SkipUnfold),
    ];

    pub fn graph(self, gs: &GraphSet) -> ConfGraph {
        match self {
            Pick::First => first_graph(gs),
            Pick::Last => last_graph(gs),
            Pick::Min(m) => min_size_graph(gs, m).map(|r| r.graph),
            Pick::Max(m) => max_size_graph(gs, m).map(|r| r.graph),
        }
        .expect("non-empty graph set")
    }
}

pub fn graph_set(example: &corpus::Example) -> (Program, Expr, GraphSet) {
    let (p, e) = example.load();
    let gs = mrscp(&p, &e).expect("corpus example supercompiles");
    (p, e, gs)
}

pub fn residual(example: &corpus::Example, pick: Pick) -> (Program, Expr, ResidualProgram) {
    let (p, e, gs) = graph_set(example);
    let r = residualize(&pick.graph(&gs), &e).expect("residualizes");
    (p, e, r)
}

/// Parses a program printed in the `f(C(), )` style, where empty argument
/// lists keep their parentheses and pattern clauses may end in a comma.
pub fn parse_printed(text: &str) -> (Program, Expr) {
    let src = parse_source(&text.replace(", )", ")")).expect("printed program parses");
    (src.program, src.expression.expect("printed program has an expression"))
}

/// Runs `f` on a thread with a large stack; deep KMP graphs recurse far.
pub fn with_stack<T: Send + 'static>(f: impl FnOnce() -> T + Send + 'static) -> T {
    std::thread::Builder::new()
        .stack_size(256 << 20)
        .spawn(f)
        .expect("spawn")
        .join()
        .expect("worker thread panicked")
}
