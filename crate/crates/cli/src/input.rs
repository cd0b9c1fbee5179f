use std::fs;

use clap::{ArgGroup, Args};
use walkcount::digraph::{Digraph, VertexSet};
use walkcount::regex::{compile, parse_regex, AutomatonSystem};
use walkcount::{Error, Result};

#[derive(Args, Debug, Clone)]
#[command(group(ArgGroup::new("source").required(true).args(["regex", "digraph", "dfa"])))]
pub struct InputArgs {
    /// Regular expression over single-character literals.
    #[arg(long)]
    pub regex: Option<String>,
    /// Digraph text file; all vertices are initial and final unless overridden.
    #[arg(long)]
    pub digraph: Option<String>,
    /// DFA JSON file (`n`, `initial`, `final`, `arcs`, 1-indexed).
    #[arg(long)]
    pub dfa: Option<String>,
    /// Initial vertex set, comma separated, 1-indexed.
    #[arg(long)]
    pub from: Option<String>,
    /// Final vertex set, comma separated, 1-indexed.
    #[arg(long)]
    pub to: Option<String>,
}

/// Where the system came from, for reports.
#[derive(Clone, Debug)]
pub struct Source {
    pub kind: &'static str,
    pub value: String,
}

fn read(path: &str) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("cannot read {path}: {e}")))
}

/// Parse `"1,3, 4"` into a 0-based set checked against `n`.
pub fn parse_set(text: &str, n: usize) -> Result<VertexSet> {
    let mut set = VertexSet::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let v: usize = item
            .parse()
            .map_err(|_| Error::InvalidInput(format!("bad vertex '{item}'")))?;
        if v == 0 || v > n {
            return Err(Error::InvalidInput(format!("vertex {v} outside 1..{n}")));
        }
        set.insert(v - 1);
    }
    Ok(set)
}

impl InputArgs {
    pub fn load(&self) -> Result<(AutomatonSystem, Source)> {
        let (sys, source) = if let Some(expr) = &self.regex {
            let sys = compile(&parse_regex(expr)?);
            (sys, Source { kind: "regex", value: expr.clone() })
        } else if let Some(path) = &self.digraph {
            let graph = Digraph::from_text(&read(path)?)?;
            let all: VertexSet = (0..graph.n()).collect();
            let sys = AutomatonSystem::new(graph, all.clone(), all)?;
            (sys, Source { kind: "digraph", value: path.clone() })
        } else if let Some(path) = &self.dfa {
            let sys = AutomatonSystem::from_json(&read(path)?)?;
            (sys, Source { kind: "dfa", value: path.clone() })
        } else {
            return Err(Error::InvalidInput("no input given".into()));
        };
        let n = sys.n();
        let initial = match &self.from {
            Some(text) => parse_set(text, n)?,
            None => sys.initial.clone(),
        };
        let accepting = match &self.to {
            Some(text) => parse_set(text, n)?,
            None => sys.accepting.clone(),
        };
        Ok((AutomatonSystem::new(sys.digraph, initial, accepting)?, source))
    }
}
