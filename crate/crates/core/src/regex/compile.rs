use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use super::{AutomatonSystem, RegexAst};
use crate::digraph::{Digraph, VertexSet};

#[derive(Default)]
struct Nfa {
    epsilon: Vec<Vec<usize>>,
    symbol: Vec<Vec<(char, usize)>>,
}

impl Nfa {
    fn add_state(&mut self) -> usize {
        self.epsilon.push(Vec::new());
        self.symbol.push(Vec::new());
        self.epsilon.len() - 1
    }

    /// Thompson construction; returns the fragment's (start, accept).
    fn build(&mut self, ast: &RegexAst) -> (usize, usize) {
        match ast {
            RegexAst::Literal(c) => {
                let s = self.add_state();
                let t = self.add_state();
                self.symbol[s].push((*c, t));
                (s, t)
            }
            RegexAst::Concat(items) => {
                let mut iter = items.iter();
                let (start, mut accept) = self.build(iter.next().expect("non-empty concat"));
                for item in iter {
                    let (s, t) = self.build(item);
                    self.epsilon[accept].push(s);
                    accept = t;
                }
                (start, accept)
            }
            RegexAst::Alternation(items) => {
                let s = self.add_state();
                let t = self.add_state();
                for item in items {
                    let (is, it) = self.build(item);
                    self.epsilon[s].push(is);
                    self.epsilon[it].push(t);
                }
                (s, t)
            }
            RegexAst::Star(inner) => {
                let s = self.add_state();
                let t = self.add_state();
                let (is, it) = self.build(inner);
                self.epsilon[s].extend([is, t]);
                self.epsilon[it].extend([is, t]);
                (s, t)
            }
        }
    }

    /// Epsilon closure by depth-first search.
    fn closure(&self, seeds: impl IntoIterator<Item = usize>) -> BTreeSet<usize> {
        let mut seen = BTreeSet::new();
        let mut stack: Vec<usize> = seeds.into_iter().collect();
        while let Some(s) = stack.pop() {
            if seen.insert(s) {
                stack.extend(self.epsilon[s].iter().copied().filter(|t| !seen.contains(t)));
            }
        }
        seen
    }
}

/// Compiles to a DFA-backed counting system (not minimized).
///
/// DFA states are numbered in discovery order of the subset construction,
/// starting from the closure of the NFA start state. The empty subset is
/// never materialized, so there is no dead state.
pub fn compile(ast: &RegexAst) -> AutomatonSystem {
    let mut nfa = Nfa::default();
    let (start, accept) = nfa.build(ast);
    let alphabet = ast.alphabet();

    let initial = nfa.closure([start]);
    let mut index: HashMap<BTreeSet<usize>, usize> = HashMap::from([(initial.clone(), 0)]);
    let mut subsets = vec![initial.clone()];
    let mut queue = VecDeque::from([initial]);
    let mut arcs: BTreeMap<(usize, usize), u64> = BTreeMap::new();

    while let Some(subset) = queue.pop_front() {
        let from = index[&subset];
        for &c in &alphabet {
            let moved = subset
                .iter()
                .flat_map(|&s| nfa.symbol[s].iter().filter(move |(sym, _)| *sym == c))
                .map(|&(_, t)| t);
            let target = nfa.closure(moved);
            if target.is_empty() {
                continue;
            }
            let to = match index.get(&target) {
                Some(&i) => i,
                None => {
                    let i = subsets.len();
                    index.insert(target.clone(), i);
                    subsets.push(target.clone());
                    queue.push_back(target);
                    i
                }
            };
            *arcs.entry((from, to)).or_default() += 1;
        }
    }

    let n = subsets.len();
    let arcs: Vec<(usize, usize, u64)> = arcs.into_iter().map(|((u, v), m)| (u, v, m)).collect();
    let digraph = Digraph::new(n, &arcs).expect("subset construction yields valid arcs");
    let accepting: VertexSet = subsets
        .iter()
        .enumerate()
        .filter_map(|(i, s)| s.contains(&accept).then_some(i))
        .collect();
    AutomatonSystem::new(digraph, [0].into_iter().collect(), accepting)
        .expect("states are in range")
}
