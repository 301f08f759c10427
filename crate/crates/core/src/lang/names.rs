use std::collections::{HashMap, HashSet};

/// Deterministic supply of fresh variable names of the form `<hint><n>`.
///
/// Each hint has its own counter, so the first request for `x` yields `x0`
/// and the next `x1`. Names already taken (program identifiers, variables of
/// the initial configuration, earlier results) are skipped.
#[derive(Clone, Debug, Default)]
pub struct NameSupply {
    taken: HashSet<String>,
    counters: HashMap<String, usize>,
}

impl NameSupply {
    pub fn new(taken: impl IntoIterator<Item = String>) -> NameSupply {
        NameSupply {
            taken: taken.into_iter().collect(),
            counters: HashMap::new(),
        }
    }

    pub fn reserve(&mut self, name: impl Into<String>) {
        self.taken.insert(name.into());
    }

    pub fn fresh(&mut self, hint: &str) -> String {
        if !self.counters.contains_key(hint) {
            self.counters.insert(hint.to_string(), 0);
        }
        let counter = self.counters.get_mut(hint).expect("inserted above");
        loop {
            let candidate = format!("{hint}{counter}");
            *counter += 1;
            if self.taken.insert(candidate.clone()) {
                return candidate;
            }
        }
    }
}
