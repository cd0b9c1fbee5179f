use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::digraph::{Digraph, VertexSet};
use crate::error::{Error, Result};

/// The counting system `(v_I, A, v_F)` of a regular language:
/// `f(m) = v_Iᵀ Aᵐ v_F` words of length `m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AutomatonSystem {
    pub digraph: Digraph,
    pub initial: VertexSet,
    pub accepting: VertexSet,
}

/// On-disk DFA description, 1-indexed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DfaJson {
    pub n: usize,
    pub initial: Vec<usize>,
    #[serde(rename = "final")]
    pub accepting: Vec<usize>,
    pub arcs: Vec<(usize, usize, u64)>,
}

impl AutomatonSystem {
    pub fn new(digraph: Digraph, initial: VertexSet, accepting: VertexSet) -> Result<Self> {
        let n = digraph.n();
        if let Some(v) = initial.iter().chain(&accepting).find(|&&v| v >= n) {
            return Err(Error::input(format!("state {} outside 1..{n}", v + 1)));
        }
        Ok(AutomatonSystem {
            digraph,
            initial,
            accepting,
        })
    }

    /// One state, no arcs, nothing initial or final: `f ≡ 0`.
    pub fn zero() -> Self {
        AutomatonSystem {
            digraph: Digraph::new(1, &[]).unwrap(),
            initial: VertexSet::new(),
            accepting: VertexSet::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.digraph.n()
    }

    pub fn initial_vector(&self) -> Vec<f64> {
        indicator(&self.initial, self.n())
    }

    pub fn final_vector(&self) -> Vec<f64> {
        indicator(&self.accepting, self.n())
    }

    /// Exact `v_Iᵀ Aᵐ v_F` by the walk-count oracle.
    pub fn structure_function(&self, m: usize) -> BigInt {
        self.digraph
            .count_walks(&self.initial, &self.accepting, m)
            .expect("system sets are validated at construction")
    }

    /// Restricts to states reached from `I` that also reach `F`, keeping
    /// their relative order. An empty result becomes [`AutomatonSystem::zero`].
    pub fn trim(&self) -> AutomatonSystem {
        let (_, from_initial) = self.digraph.reach_sets(&self.initial).unwrap();
        let (to_final, _) = self.digraph.reach_sets(&self.accepting).unwrap();
        let keep: Vec<usize> = from_initial.intersection(&to_final).copied().collect();
        if keep.is_empty() {
            return AutomatonSystem::zero();
        }
        let renumber = |set: &VertexSet| -> VertexSet {
            keep.iter()
                .enumerate()
                .filter_map(|(i, v)| set.contains(v).then_some(i))
                .collect()
        };
        let adjacency = self.digraph.adjacency().submatrix(&keep);
        AutomatonSystem {
            digraph: Digraph::from_adjacency(adjacency).unwrap(),
            initial: renumber(&self.initial),
            accepting: renumber(&self.accepting),
        }
    }

    pub fn to_dfa_json(&self) -> DfaJson {
        DfaJson {
            n: self.n(),
            initial: self.initial.iter().map(|v| v + 1).collect(),
            accepting: self.accepting.iter().map(|v| v + 1).collect(),
            arcs: self
                .digraph
                .arcs()
                .map(|(u, v, m)| (u + 1, v + 1, m.to_u64().expect("multiplicity fits in u64")))
                .collect(),
        }
    }

    pub fn from_dfa_json(dfa: &DfaJson) -> Result<Self> {
        let zero_based = |ids: &[usize], what: &str| -> Result<VertexSet> {
            ids.iter()
                .map(|&v| {
                    if v == 0 || v > dfa.n {
                        Err(Error::input(format!("{what} state {v} outside 1..{}", dfa.n)))
                    } else {
                        Ok(v - 1)
                    }
                })
                .collect()
        };
        let mut arcs = Vec::with_capacity(dfa.arcs.len());
        for &(u, v, m) in &dfa.arcs {
            if u == 0 || v == 0 || u > dfa.n || v > dfa.n {
                return Err(Error::input(format!(
                    "arc ({u}, {v}) has an endpoint outside 1..{}",
                    dfa.n
                )));
            }
            arcs.push((u - 1, v - 1, m));
        }
        let digraph = Digraph::new(dfa.n, &arcs)?;
        AutomatonSystem::new(
            digraph,
            zero_based(&dfa.initial, "initial")?,
            zero_based(&dfa.accepting, "final")?,
        )
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let dfa: DfaJson = serde_json::from_str(text)?;
        Self::from_dfa_json(&dfa)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_dfa_json()).expect("DFA JSON serializes")
    }
}

fn indicator(set: &VertexSet, n: usize) -> Vec<f64> {
    (0..n).map(|v| if set.contains(&v) { 1.0 } else { 0.0 }).collect()
}
