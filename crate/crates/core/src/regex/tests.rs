use std::collections::{BTreeSet, HashMap};

use num_bigint::BigInt;
use proptest::prelude::*;

use super::*;
use crate::digraph::{Digraph, VertexSet};

const TWO_BS: &str = "a*ba*b(a|b)*";
const MIXED_INDEX: &str = "(a|b)*(d(e|f)*|c(d(e|f|g|h))*)";
const PERIODIC: &str = "(a(b|c)*)|(((b|c)(a|b))*(b|c|d))";

fn lit(c: char) -> RegexAst {
    RegexAst::Literal(c)
}

fn star(r: RegexAst) -> RegexAst {
    RegexAst::Star(Box::new(r))
}

#[test]
fn parses_concatenation_with_stars() {
    let ast = parse_regex(TWO_BS).unwrap();
    let expected = RegexAst::Concat(vec![
        star(lit('a')),
        lit('b'),
        star(lit('a')),
        lit('b'),
        star(RegexAst::Alternation(vec![lit('a'), lit('b')])),
    ]);
    assert_eq!(ast, expected);
}

#[test]
fn parses_starred_group_of_alternations() {
    let ast = parse_regex("((b|c)(a|b))*(b|c|d)").unwrap();
    let bc = RegexAst::Alternation(vec![lit('b'), lit('c')]);
    let ab = RegexAst::Alternation(vec![lit('a'), lit('b')]);
    let bcd = RegexAst::Alternation(vec![lit('b'), lit('c'), lit('d')]);
    assert_eq!(ast, RegexAst::Concat(vec![star(RegexAst::Concat(vec![bc, ab])), bcd]));
}

#[test]
fn syntax_errors_carry_positions() {
    let pos = |e: &str| match parse_regex(e) {
        Err(crate::Error::Syntax { position, .. }) => position,
        other => panic!("{e:?} should fail, got {other:?}"),
    };
    assert_eq!(pos("a|"), 2);
    assert_eq!(pos(""), 0);
    assert_eq!(pos("(ab"), 3);
    assert_eq!(pos("ab)"), 2);
    assert_eq!(pos("*a"), 0);
    assert_eq!(pos("a+"), 1);
    assert_eq!(pos("a?"), 1);
    assert_eq!(pos("[ab]"), 0);
    assert_eq!(pos("()"), 1);
    assert_eq!(pos("a1"), 1);
}

#[test]
fn two_bs_structure_function() {
    let sys = compile(&parse_regex(TWO_BS).unwrap());
    assert_eq!(sys.structure_function(5), BigInt::from(26));
    let values: Vec<BigInt> = (0..3).map(|m| sys.structure_function(m)).collect();
    assert_eq!(values, vec![BigInt::from(0), BigInt::from(0), BigInt::from(1)]);
    assert_eq!(sys.structure_function(10), BigInt::from(1013));
}

#[test]
fn all_binary_words() {
    let sys = compile(&parse_regex("(a|b)*").unwrap());
    for m in 0..=10 {
        assert_eq!(sys.structure_function(m), BigInt::from(1u64 << m));
    }
}

#[test]
fn compiled_examples_match_hand_built_systems() {
    let hand = |text: &str, initial: &[usize], fin: &[usize]| {
        AutomatonSystem::new(
            Digraph::from_text(text).unwrap(),
            initial.iter().map(|v| v - 1).collect(),
            fin.iter().map(|v| v - 1).collect(),
        )
        .unwrap()
    };
    let cases = [
        (TWO_BS, hand(crate::digraph::tests::TWO_BS, &[1], &[3])),
        (MIXED_INDEX, hand(crate::digraph::tests::MIXED_INDEX, &[1], &[2, 3])),
        (PERIODIC, hand(crate::digraph::tests::PERIODIC, &[1], &[2, 3, 5])),
    ];
    for (expr, system) in cases {
        let compiled = compile(&parse_regex(expr).unwrap());
        for m in 0..=15 {
            assert_eq!(compiled.structure_function(m), system.structure_function(m), "{expr} m={m}");
        }
    }
}

#[test]
fn periodic_example_matches_derivative_oracle() {
    let ast = parse_regex(PERIODIC).unwrap();
    let sys = compile(&ast);
    let mut oracle = DerivativeOracle::new(&ast);
    let counts = oracle.count_by_length(15);
    for m in 0..=15 {
        assert_eq!(sys.structure_function(m), BigInt::from(counts[m]), "m={m}");
    }
}

#[test]
fn compile_is_deterministic() {
    for expr in [TWO_BS, MIXED_INDEX, PERIODIC] {
        let ast = parse_regex(expr).unwrap();
        assert_eq!(compile(&ast), compile(&ast));
    }
}

#[test]
fn empty_word_counts_iff_initial_is_final() {
    let sys = compile(&parse_regex("a*").unwrap());
    assert_eq!(sys.structure_function(0), BigInt::from(1));
    let sys = compile(&parse_regex("ab").unwrap());
    assert_eq!(sys.structure_function(0), BigInt::from(0));
}

#[test]
fn trim_removes_useless_states() {
    // state 3 is unreachable, state 4 is a dead end
    let g = Digraph::new(4, &[(0, 1, 1), (1, 1, 2), (2, 1, 1), (0, 3, 1), (3, 3, 1)]).unwrap();
    let sys = AutomatonSystem::new(g, [0].into(), [1].into()).unwrap();
    let trimmed = sys.trim();
    assert_eq!(trimmed.n(), 2);
    for m in 0..=10 {
        assert_eq!(trimmed.structure_function(m), sys.structure_function(m));
    }
}

#[test]
fn trim_keeps_already_trimmed_system() {
    let sys = compile(&parse_regex(TWO_BS).unwrap());
    assert_eq!(sys.trim(), sys);
}

#[test]
fn trim_of_empty_initial_set_is_zero_system() {
    let g = Digraph::new(2, &[(0, 1, 1)]).unwrap();
    let sys = AutomatonSystem::new(g, VertexSet::new(), [1].into()).unwrap();
    let trimmed = sys.trim();
    assert_eq!(trimmed, AutomatonSystem::zero());
    for m in 0..5 {
        assert_eq!(trimmed.structure_function(m), BigInt::from(0));
    }
}

#[test]
fn dfa_json_round_trip_and_validation() {
    let sys = compile(&parse_regex(PERIODIC).unwrap());
    let json = sys.to_json();
    assert_eq!(AutomatonSystem::from_json(&json).unwrap(), sys);
    let raw = r#"{"n": 2, "initial": [1], "final": [2], "arcs": [[1, 2, 1], [2, 2, 3]]}"#;
    let parsed = AutomatonSystem::from_json(raw).unwrap();
    assert_eq!(parsed.structure_function(3), BigInt::from(9));
    let bad = r#"{"n": 2, "initial": [1], "final": [2], "arcs": [[1, 99, 1]]}"#;
    assert!(matches!(AutomatonSystem::from_json(bad), Err(crate::Error::InvalidInput(_))));
    assert!(matches!(AutomatonSystem::from_json("{"), Err(crate::Error::Json(_))));
}

/// Brzozowski-derivative automaton, independent of the Thompson/subset path.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Re {
    Empty,
    Eps,
    Lit(char),
    Cat(Box<Re>, Box<Re>),
    Alt(BTreeSet<Re>),
    Star(Box<Re>),
}

fn cat(a: Re, b: Re) -> Re {
    match (a, b) {
        (Re::Empty, _) | (_, Re::Empty) => Re::Empty,
        (Re::Eps, b) => b,
        (a, Re::Eps) => a,
        (Re::Cat(x, y), b) => cat(*x, cat(*y, b)),
        (a, b) => Re::Cat(Box::new(a), Box::new(b)),
    }
}

fn alt(a: Re, b: Re) -> Re {
    let mut items = BTreeSet::new();
    for r in [a, b] {
        match r {
            Re::Empty => {}
            Re::Alt(inner) => items.extend(inner),
            other => {
                items.insert(other);
            }
        }
    }
    match items.len() {
        0 => Re::Empty,
        1 => items.into_iter().next().unwrap(),
        _ => Re::Alt(items),
    }
}

fn re_star(r: Re) -> Re {
    match r {
        Re::Empty | Re::Eps => Re::Eps,
        s @ Re::Star(_) => s,
        r => Re::Star(Box::new(r)),
    }
}

fn from_ast(ast: &RegexAst) -> Re {
    match ast {
        RegexAst::Literal(c) => Re::Lit(*c),
        RegexAst::Concat(items) => items.iter().rev().fold(Re::Eps, |acc, r| cat(from_ast(r), acc)),
        RegexAst::Alternation(items) => items.iter().fold(Re::Empty, |acc, r| alt(acc, from_ast(r))),
        RegexAst::Star(inner) => re_star(from_ast(inner)),
    }
}

fn nullable(r: &Re) -> bool {
    match r {
        Re::Empty | Re::Lit(_) => false,
        Re::Eps | Re::Star(_) => true,
        Re::Cat(a, b) => nullable(a) && nullable(b),
        Re::Alt(items) => items.iter().any(nullable),
    }
}

fn derive(r: &Re, c: char) -> Re {
    match r {
        Re::Empty | Re::Eps => Re::Empty,
        Re::Lit(d) => if *d == c { Re::Eps } else { Re::Empty },
        Re::Cat(a, b) => {
            let left = cat(derive(a, c), (**b).clone());
            if nullable(a) { alt(left, derive(b, c)) } else { left }
        }
        Re::Alt(items) => items.iter().fold(Re::Empty, |acc, x| alt(acc, derive(x, c))),
        Re::Star(inner) => cat(derive(inner, c), r.clone()),
    }
}

struct DerivativeOracle {
    alphabet: Vec<char>,
    states: Vec<Re>,
    ids: HashMap<Re, usize>,
    table: Vec<Vec<usize>>,
    accepting: Vec<bool>,
}

impl DerivativeOracle {
    fn new(ast: &RegexAst) -> Self {
        let mut o = DerivativeOracle {
            alphabet: ast.alphabet(),
            states: Vec::new(),
            ids: HashMap::new(),
            table: Vec::new(),
            accepting: Vec::new(),
        };
        o.intern(from_ast(ast));
        let mut i = 0;
        while i < o.states.len() {
            let row: Vec<usize> = o
                .alphabet
                .clone()
                .into_iter()
                .map(|c| {
                    let d = derive(&o.states[i], c);
                    o.intern(d)
                })
                .collect();
            o.table.push(row);
            i += 1;
        }
        o
    }

    fn intern(&mut self, r: Re) -> usize {
        if let Some(&id) = self.ids.get(&r) {
            return id;
        }
        let id = self.states.len();
        self.accepting.push(nullable(&r));
        self.ids.insert(r.clone(), id);
        self.states.push(r);
        id
    }

    fn count_by_length(&mut self, max_len: usize) -> Vec<u64> {
        let mut counts = vec![0u64; max_len + 1];
        let mut current: HashMap<usize, u64> = HashMap::from([(0, 1)]);
        for count in counts.iter_mut() {
            *count = current.iter().filter(|(s, _)| self.accepting[**s]).map(|(_, c)| c).sum();
            let mut next = HashMap::new();
            for (&s, &c) in &current {
                for &t in &self.table[s] {
                    *next.entry(t).or_insert(0) += c;
                }
            }
            current = next;
        }
        counts
    }

    /// Enumerates every word of length ≤ `max_len` and tests membership.
    fn enumerate(&self, max_len: usize) -> Vec<u64> {
        fn walk(o: &DerivativeOracle, state: usize, depth: usize, max: usize, out: &mut [u64]) {
            if o.accepting[state] {
                out[depth] += 1;
            }
            if depth < max {
                for &t in &o.table[state] {
                    walk(o, t, depth + 1, max, out);
                }
            }
        }
        let mut out = vec![0; max_len + 1];
        walk(self, 0, 0, max_len, &mut out);
        out
    }
}

fn arb_regex(alphabet: usize) -> impl Strategy<Value = RegexAst> {
    let leaf = (0..alphabet).prop_map(|i| RegexAst::Literal((b'a' + i as u8) as char));
    leaf.prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 2..4).prop_map(RegexAst::Concat),
            prop::collection::vec(inner.clone(), 2..4).prop_map(RegexAst::Alternation),
            inner.prop_map(|r| RegexAst::Star(Box::new(r))),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn compiled_counts_match_word_enumeration(ast in (1usize..=3).prop_flat_map(arb_regex)) {
        let printed = ast.to_string();
        let reparsed = parse_regex(&printed).unwrap();
        let sys = compile(&reparsed);
        let oracle = DerivativeOracle::new(&ast);
        let counts = oracle.enumerate(12);
        let trimmed = sys.trim();
        for (m, &count) in counts.iter().enumerate() {
            prop_assert_eq!(sys.structure_function(m), BigInt::from(count), "{} m={}", printed, m);
            prop_assert_eq!(trimmed.structure_function(m), BigInt::from(count));
        }
    }
}
