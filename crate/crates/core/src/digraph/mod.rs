//! Directed multigraphs, their adjacency matrices, and the combinatorial
//! walk-count oracle.
//!
//! Vertices are `0..n` throughout the library. The text format (see
//! [`Digraph::from_text`]) is 1-indexed.

mod int_matrix;
mod text;

use std::collections::{BTreeSet, BinaryHeap, VecDeque};
use std::cmp::Reverse;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

pub use int_matrix::IntMatrix;

use crate::error::{Error, Result};

pub type VertexSet = BTreeSet<usize>;

/// A directed multigraph on vertices `0..n`. Arc multiplicities live in a
/// dense adjacency matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Digraph {
    adjacency: IntMatrix,
}

/// Irreducible (strongly connected) components in Frobenius normal form
/// order: no walk leads from a later component to an earlier one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentPartition {
    pub components: Vec<VertexSet>,
    pub component_of: Vec<usize>,
}

/// Period of an irreducible component and its cyclic classes. Every arc
/// inside the component goes from `classes[i]` to `classes[(i + 1) % period]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeriodStructure {
    pub period: usize,
    pub classes: Vec<VertexSet>,
}

impl Digraph {
    /// Builds a digraph from `(u, v, multiplicity)` arcs. Repeated pairs add up.
    pub fn new(n: usize, arcs: &[(usize, usize, u64)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::input("a digraph needs at least one vertex"));
        }
        let mut adjacency = IntMatrix::zeros(n);
        for &(u, v, mult) in arcs {
            if u >= n || v >= n {
                return Err(Error::input(format!(
                    "arc ({}, {}) has an endpoint outside 1..{}",
                    u + 1,
                    v + 1,
                    n
                )));
            }
            if mult == 0 {
                return Err(Error::input(format!(
                    "arc ({}, {}) has multiplicity 0",
                    u + 1,
                    v + 1
                )));
            }
            let cur = adjacency.get(u, v) + BigInt::from(mult);
            adjacency.set(u, v, cur);
        }
        Ok(Digraph { adjacency })
    }

    /// Digraph whose arc multiplicities are the entries of `adjacency`.
    pub fn from_adjacency(adjacency: IntMatrix) -> Result<Self> {
        if adjacency.n() == 0 {
            return Err(Error::input("a digraph needs at least one vertex"));
        }
        if !adjacency.is_nonnegative() {
            return Err(Error::input("adjacency matrices must be nonnegative"));
        }
        Ok(Digraph { adjacency })
    }

    pub fn n(&self) -> usize {
        self.adjacency.n()
    }

    pub fn adjacency(&self) -> &IntMatrix {
        &self.adjacency
    }

    pub fn adjacency_matrix(&self) -> IntMatrix {
        self.adjacency.clone()
    }

    pub fn multiplicity(&self, u: usize, v: usize) -> &BigInt {
        self.adjacency.get(u, v)
    }

    /// All arcs as `(u, v, multiplicity)` in row-major order.
    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize, &BigInt)> + '_ {
        let n = self.n();
        (0..n).flat_map(move |u| {
            (0..n).filter_map(move |v| {
                let m = self.adjacency.get(u, v);
                (!m.is_zero()).then_some((u, v, m))
            })
        })
    }

    pub fn successors(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        self.adjacency
            .row(u)
            .iter()
            .enumerate()
            .filter_map(|(v, m)| (!m.is_zero()).then_some(v))
    }

    pub fn predecessors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n()).filter(move |&u| !self.adjacency.get(u, v).is_zero())
    }

    fn check_set(&self, set: &VertexSet) -> Result<()> {
        match set.iter().find(|&&v| v >= self.n()) {
            Some(v) => Err(Error::input(format!(
                "vertex {} outside 1..{}",
                v + 1,
                self.n()
            ))),
            None => Ok(()),
        }
    }

    /// Exact number of `(S, T)`-walks of length `m`.
    ///
    /// Dynamic programming over arc multiplicities; never touches the
    /// eigenstructure, so it serves as the oracle for closed forms.
    pub fn count_walks(&self, from: &VertexSet, to: &VertexSet, m: usize) -> Result<BigInt> {
        self.check_set(from)?;
        self.check_set(to)?;
        let indicator = |s: &VertexSet| -> Vec<BigInt> {
            (0..self.n())
                .map(|v| if s.contains(&v) { BigInt::from(1) } else { BigInt::zero() })
                .collect()
        };
        Ok(self.count_weighted_walks(&indicator(from), &indicator(to), m))
    }

    /// `w_Lᵀ Aᵐ w_R` for integer weight vectors, by the same walk DP.
    pub fn count_weighted_walks(&self, left: &[BigInt], right: &[BigInt], m: usize) -> BigInt {
        let n = self.n();
        assert_eq!(left.len(), n);
        assert_eq!(right.len(), n);
        let mut current = left.to_vec();
        for _ in 0..m {
            let mut next = vec![BigInt::zero(); n];
            for (u, weight) in current.iter().enumerate() {
                if weight.is_zero() {
                    continue;
                }
                for (v, mult) in self.adjacency.row(u).iter().enumerate() {
                    if !mult.is_zero() {
                        next[v] += weight * mult;
                    }
                }
            }
            current = next;
        }
        current.iter().zip(right).map(|(a, b)| a * b).sum()
    }

    /// Strongly connected components, topologically ordered; incomparable
    /// components are ordered by their smallest vertex.
    pub fn irreducible_components(&self) -> ComponentPartition {
        let n = self.n();
        let raw = tarjan(self);
        let mut component_of = vec![usize::MAX; n];
        for (c, comp) in raw.iter().enumerate() {
            for &v in comp {
                component_of[v] = c;
            }
        }
        let k = raw.len();
        let mut out_edges: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); k];
        let mut indegree = vec![0usize; k];
        for (u, v, _) in self.arcs() {
            let (cu, cv) = (component_of[u], component_of[v]);
            if cu != cv && out_edges[cu].insert(cv) {
                indegree[cv] += 1;
            }
        }
        let min_vertex: Vec<usize> = raw.iter().map(|c| *c.iter().min().unwrap()).collect();
        let mut ready: BinaryHeap<Reverse<(usize, usize)>> = (0..k)
            .filter(|&c| indegree[c] == 0)
            .map(|c| Reverse((min_vertex[c], c)))
            .collect();
        let mut order = Vec::with_capacity(k);
        while let Some(Reverse((_, c))) = ready.pop() {
            order.push(c);
            for &d in &out_edges[c] {
                indegree[d] -= 1;
                if indegree[d] == 0 {
                    ready.push(Reverse((min_vertex[d], d)));
                }
            }
        }
        let mut rank = vec![0; k];
        for (pos, &c) in order.iter().enumerate() {
            rank[c] = pos;
        }
        let components: Vec<VertexSet> = order
            .iter()
            .map(|&c| raw[c].iter().copied().collect())
            .collect();
        let component_of = component_of.into_iter().map(|c| rank[c]).collect();
        ComponentPartition {
            components,
            component_of,
        }
    }

    /// Period and cyclic classes of an irreducible component.
    ///
    /// The period is the gcd of `level(u) + 1 - level(v)` over arcs inside
    /// the component, with BFS levels rooted at its smallest vertex; class
    /// `P_0` therefore holds that vertex.
    pub fn period(&self, component: &VertexSet) -> Result<PeriodStructure> {
        self.check_set(component)?;
        let root = *component
            .iter()
            .next()
            .ok_or_else(|| Error::input("empty component"))?;
        let partition = self.irreducible_components();
        let c = partition.component_of[root];
        if &partition.components[c] != component {
            return Err(Error::input(
                "vertex set is not an irreducible component",
            ));
        }

        let mut level: Vec<Option<usize>> = vec![None; self.n()];
        level[root] = Some(0);
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            let lu = level[u].unwrap();
            for v in self.successors(u).filter(|v| component.contains(v)) {
                if level[v].is_none() {
                    level[v] = Some(lu + 1);
                    queue.push_back(v);
                }
            }
        }

        let mut g: i64 = 0;
        let mut has_arc = false;
        for &u in component {
            for v in self.successors(u).filter(|v| component.contains(v)) {
                has_arc = true;
                let diff = level[u].unwrap() as i64 + 1 - level[v].unwrap() as i64;
                g = g.gcd(&diff);
            }
        }
        if !has_arc {
            return Err(Error::Precondition(format!(
                "component {} has no closed walk: aperiodicity undefined",
                fmt_set(component)
            )));
        }
        let period = g as usize;
        let mut classes = vec![VertexSet::new(); period];
        for &v in component {
            classes[level[v].unwrap() % period].insert(v);
        }
        Ok(PeriodStructure { period, classes })
    }

    /// The `r`-th power: arcs correspond to length-`r` walks.
    pub fn power(&self, r: u32) -> Digraph {
        Digraph {
            adjacency: self.adjacency.pow(r),
        }
    }

    /// `(reaching, reached)`: vertices with a walk into `set`, and vertices
    /// reachable from `set`. Length-0 walks count, so `set` is in both.
    pub fn reach_sets(&self, set: &VertexSet) -> Result<(VertexSet, VertexSet)> {
        self.check_set(set)?;
        let reached = self.closure(set, |g, v| g.successors(v).collect());
        let reaching = self.closure(set, |g, v| g.predecessors(v).collect());
        Ok((reaching, reached))
    }

    fn closure(&self, start: &VertexSet, next: impl Fn(&Self, usize) -> Vec<usize>) -> VertexSet {
        let mut seen = start.clone();
        let mut stack: Vec<usize> = start.iter().copied().collect();
        while let Some(u) = stack.pop() {
            for v in next(self, u) {
                if seen.insert(v) {
                    stack.push(v);
                }
            }
        }
        seen
    }

    /// Shortest walk from `from` to any vertex satisfying `target`, as a
    /// vertex sequence (a single vertex when `from` already qualifies).
    pub fn shortest_walk(
        &self,
        from: usize,
        target: impl Fn(usize) -> bool,
        reverse: bool,
    ) -> Option<Vec<usize>> {
        let mut parent: Vec<Option<usize>> = vec![None; self.n()];
        let mut seen = vec![false; self.n()];
        seen[from] = true;
        let mut queue = VecDeque::from([from]);
        while let Some(u) = queue.pop_front() {
            if target(u) {
                let mut path = vec![u];
                let mut cur = u;
                while let Some(p) = parent[cur] {
                    path.push(p);
                    cur = p;
                }
                if !reverse {
                    path.reverse();
                }
                return Some(path);
            }
            let next: Vec<usize> = if reverse {
                self.predecessors(u).collect()
            } else {
                self.successors(u).collect()
            };
            for v in next {
                if !seen[v] {
                    seen[v] = true;
                    parent[v] = Some(u);
                    queue.push_back(v);
                }
            }
        }
        None
    }

    /// Sub-digraph induced on `set` (mask semantics: vertex count unchanged).
    pub fn mask(&self, set: &VertexSet) -> Digraph {
        Digraph {
            adjacency: self.adjacency.mask(set),
        }
    }

    pub fn spectral_radius_bound(&self) -> f64 {
        (0..self.n())
            .map(|u| {
                self.adjacency
                    .row(u)
                    .iter()
                    .map(|x| x.to_f64().unwrap_or(f64::INFINITY))
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }
}

impl ComponentPartition {
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Whether a walk leads from component `a` to component `b` (`a == b`
    /// counts).
    pub fn component_reaches(&self, graph: &Digraph, a: usize, b: usize) -> bool {
        let (_, reached) = graph
            .reach_sets(&self.components[a])
            .expect("components hold valid vertices");
        self.components[b].iter().any(|v| reached.contains(v))
    }
}

/// Formats a vertex set 1-indexed, e.g. `{1, 3}`.
pub fn fmt_set(set: &VertexSet) -> String {
    let items: Vec<String> = set.iter().map(|v| (v + 1).to_string()).collect();
    format!("{{{}}}", items.join(", "))
}

/// Iterative Tarjan; components come out in reverse topological order.
fn tarjan(graph: &Digraph) -> Vec<Vec<usize>> {
    let n = graph.n();
    let adj: Vec<Vec<usize>> = (0..n).map(|u| graph.successors(u).collect()).collect();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comps = Vec::new();
    let mut counter = 0;

    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&mut (v, ref mut next)) = call.last_mut() {
            if *next < adj[v].len() {
                let w = adj[v][*next];
                *next += 1;
                if index[w] == usize::MAX {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    comps.push(comp);
                }
            }
        }
    }
    comps
}
