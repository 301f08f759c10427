//! Construction of the lazy graph of all supercompilation results.
//!
//! A configuration folds to the most recent ancestor it is a renaming of.
//! Otherwise it is multi-driven; if any alternative splits on a variable the
//! step is *global* and is checked by the whistle against every global
//! ancestor, else it is *local* and checked against the innermost run of local
//! ancestors. A blown whistle yields an empty set instead of a
//! generalization.

use std::fmt;

use thiserror::Error;

use crate::driving::{Driver, DrivingError, MultiStep};
use crate::lang::{embeds, match_var_map, Expr, Program, Renaming};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MrscError {
    #[error(transparent)]
    Driving(#[from] DrivingError),
    #[error("configuration depth exceeded the cap of {0}")]
    DepthCap(usize),
    #[error("supercompilation exceeded the budget of {0} steps")]
    StepBudget(u64),
}

/// A compact description of a set of configuration graphs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GraphSet {
    /// The whistle blew: no graphs.
    None,
    /// Fold to the ancestor `back` levels up, which is `conf` up to `renaming`
    /// (ancestor variable -> this node's variable).
    Fold {
        conf: Expr,
        back: usize,
        renaming: Renaming,
    },
    /// Alternative developments of `conf`.
    Build { conf: Expr, alts: Vec<Alternative> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alternative {
    pub step: MultiStep,
    /// One graph set per element of `step.sub_exprs()`.
    pub children: Vec<GraphSet>,
}

impl GraphSet {
    pub fn conf(&self) -> Option<&Expr> {
        match self {
            GraphSet::None => None,
            GraphSet::Fold { conf, .. } | GraphSet::Build { conf, .. } => Some(conf),
        }
    }

    /// Number of nodes in the lazy graph itself.
    pub fn node_count(&self) -> usize {
        match self {
            GraphSet::None | GraphSet::Fold { .. } => 1,
            GraphSet::Build { alts, .. } => {
                1 + alts
                    .iter()
                    .flat_map(|a| &a.children)
                    .map(GraphSet::node_count)
                    .sum::<usize>()
            }
        }
    }

    /// Checks the structural invariants: every fold names a proper ancestor
    /// whose configuration it renames, children match the step's
    /// sub-expressions, and multi-alternative nodes lead with a `let`.
    pub fn validate(&self) -> Result<(), String> {
        fn go<'a>(gs: &'a GraphSet, path: &mut Vec<&'a Expr>) -> Result<(), String> {
            match gs {
                GraphSet::None => Ok(()),
                GraphSet::Fold {
                    conf,
                    back,
                    renaming,
                } => {
                    if *back == 0 || *back > path.len() {
                        return Err(format!("fold of {conf} points {back} levels up from depth {}", path.len()));
                    }
                    let upper = path[path.len() - back];
                    match match_var_map(upper, conf) {
                        Some(r) if r == *renaming => Ok(()),
                        _ => Err(format!("fold of {conf} to {upper} is not witnessed by {renaming}")),
                    }
                }
                GraphSet::Build { conf, alts } => {
                    if alts.is_empty() {
                        return Err(format!("{conf} has no alternatives"));
                    }
                    if alts.len() > 1 && !alts[0].step.is_let() {
                        return Err(format!("first of several alternatives of {conf} is not a let"));
                    }
                    path.push(conf);
                    for alt in alts {
                        let subs = alt.step.sub_exprs();
                        if subs.len() != alt.children.len() {
                            return Err(format!("{conf}: {} children for {} sub-expressions", alt.children.len(), subs.len()));
                        }
                        for (sub, child) in subs.into_iter().zip(&alt.children) {
                            if let Some(c) = child.conf() {
                                if c != sub {
                                    return Err(format!("child {c} does not match sub-expression {sub}"));
                                }
                            }
                            go(child, path)?;
                        }
                    }
                    path.pop();
                    Ok(())
                }
            }
        }
        go(self, &mut Vec::new())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HistoryKind {
    Local,
    Global,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HistoryEntry {
    pub kind: HistoryKind,
    pub level: usize,
    pub conf: Expr,
}

/// Finds the most recent history entry that `conf` is a variable renaming of
/// (several ancestor variables may map to one), returning the distance to it
/// and the renaming. `history` is ordered oldest first.
pub fn fold_check(history: &[HistoryEntry], level: usize, conf: &Expr) -> Option<(usize, Renaming)> {
    history
        .iter()
        .rev()
        .find_map(|h| match_var_map(&h.conf, conf).map(|r| (level - h.level, r)))
}

/// True if some configuration in `relevant` embeds into `conf`.
pub fn whistle_check<'a>(relevant: impl IntoIterator<Item = &'a HistoryEntry>, conf: &Expr) -> bool {
    relevant.into_iter().any(|h| embeds(&h.conf, conf))
}

/// The part of the history the whistle inspects for a step of kind `kind`:
/// every global entry, or the most recent run of local entries.
pub fn relevant_history(history: &[HistoryEntry], kind: HistoryKind) -> Vec<&HistoryEntry> {
    match kind {
        HistoryKind::Global => history.iter().filter(|h| h.kind == HistoryKind::Global).collect(),
        HistoryKind::Local => history
            .iter()
            .rev()
            .take_while(|h| h.kind == HistoryKind::Local)
            .collect(),
    }
}

/// One supercompilation run over a program.
pub struct Supercompiler<'p> {
    driver: Driver<'p>,
    max_depth: Option<usize>,
    step_budget: Option<u64>,
    steps: u64,
    /// When false, subtrees are visited but not kept.
    keep: bool,
}

impl<'p> Supercompiler<'p> {
    pub fn new(program: &'p Program, root: &Expr) -> Supercompiler<'p> {
        Supercompiler {
            driver: Driver::new(program, root),
            max_depth: None,
            step_budget: None,
            steps: 0,
            keep: true,
        }
    }

    /// Abort with [`MrscError::DepthCap`] when a path grows longer than `depth`.
    pub fn max_depth(mut self, depth: Option<usize>) -> Self {
        self.max_depth = depth;
        self
    }

    /// Abort with [`MrscError::StepBudget`] after `steps` configurations.
    pub fn step_budget(mut self, steps: Option<u64>) -> Self {
        self.step_budget = steps;
        self
    }

    /// Configurations visited so far.
    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn run(&mut self, conf: &Expr) -> Result<GraphSet, MrscError> {
        self.keep = true;
        let mut history = Vec::new();
        self.build(&mut history, 0, conf)
    }

    /// Performs the same traversal as [`run`](Self::run) without keeping the
    /// lazy graph, returning the number of configurations it would contain.
    /// Memory stays proportional to the depth.
    pub fn count(&mut self, conf: &Expr) -> Result<u64, MrscError> {
        self.keep = false;
        let before = self.steps;
        let mut history = Vec::new();
        self.build(&mut history, 0, conf)?;
        Ok(self.steps - before)
    }

    fn build(&mut self, history: &mut Vec<HistoryEntry>, level: usize, conf: &Expr) -> Result<GraphSet, MrscError> {
        self.steps += 1;
        if let Some(budget) = self.step_budget {
            if self.steps > budget {
                return Err(MrscError::StepBudget(budget));
            }
        }
        if let Some((back, renaming)) = fold_check(history, level, conf) {
            return Ok(GraphSet::Fold {
                conf: conf.clone(),
                back,
                renaming,
            });
        }
        if self.max_depth.is_some_and(|d| level > d) {
            return Err(MrscError::DepthCap(self.max_depth.unwrap_or_default()));
        }
        let steps = self.driver.multi_drive_steps(conf)?;
        let kind = if steps.iter().any(MultiStep::is_cases) {
            HistoryKind::Global
        } else {
            HistoryKind::Local
        };
        if whistle_check(relevant_history(history, kind), conf) {
            return Ok(GraphSet::None);
        }
        history.push(HistoryEntry {
            kind,
            level,
            conf: conf.clone(),
        });
        let mut alts = Vec::with_capacity(steps.len());
        for step in steps {
            let mut children = Vec::new();
            for sub in step.sub_exprs() {
                match self.build(history, level + 1, sub) {
                    Ok(gs) if self.keep => children.push(gs),
                    Ok(_) => {}
                    Err(e) => {
                        history.pop();
                        return Err(e);
                    }
                }
            }
            if self.keep {
                alts.push(Alternative { step, children });
            }
        }
        history.pop();
        Ok(GraphSet::Build {
            conf: conf.clone(),
            alts,
        })
    }
}

/// Builds the lazy graph of `conf` over `program`.
pub fn mrscp(program: &Program, conf: &Expr) -> Result<GraphSet, MrscError> {
    Supercompiler::new(program, conf).run(conf)
}

impl fmt::Display for GraphSet {
    /// Indented dump, one node per line.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(gs: &GraphSet, depth: usize, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            let pad = "  ".repeat(depth);
            match gs {
                GraphSet::None => writeln!(f, "{pad}none"),
                GraphSet::Fold { conf, back, renaming } => {
                    writeln!(f, "{pad}fold {conf} ^{back} {renaming}")
                }
                GraphSet::Build { conf, alts } => {
                    writeln!(f, "{pad}build {conf}")?;
                    for (i, alt) in alts.iter().enumerate() {
                        let tag = match &alt.step {
                            MultiStep::Leaf(_) => "leaf".to_string(),
                            MultiStep::Con(c, _) => format!("con {c}"),
                            MultiStep::Unfold(_) => "unfold".to_string(),
                            MultiStep::Cases(x, _) => format!("cases {x}"),
                            MultiStep::Let(binds, _) => {
                                let vs: Vec<&str> = binds.iter().map(|(v, _)| v.as_str()).collect();
                                format!("let {}", vs.join(", "))
                            }
                        };
                        writeln!(f, "{pad} #{i} {tag}")?;
                        for c in &alt.children {
                            go(c, depth + 2, f)?;
                        }
                    }
                    Ok(())
                }
            }
        }
        go(self, 0, f)
    }
}
