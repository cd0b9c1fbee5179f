use std::fmt::Write;

use num_traits::One;

use super::Digraph;
use crate::error::{Error, Result};

impl Digraph {
    /// Parses the line-oriented digraph format:
    ///
    /// ```text
    /// # comment
    /// digraph 3
    /// 1 2
    /// 3 3 2
    /// ```
    ///
    /// Vertices are 1-indexed; a missing multiplicity means 1.
    pub fn from_text(text: &str) -> Result<Digraph> {
        let mut n: Option<usize> = None;
        let mut arcs = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = lineno + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let fields: Vec<&str> = content.split_whitespace().collect();
            let Some(n) = n else {
                if fields.len() != 2 || fields[0] != "digraph" {
                    return Err(Error::Parse {
                        line,
                        message: "expected header `digraph <n>`".into(),
                    });
                }
                let count = parse_num(fields[1], line)?;
                if count == 0 {
                    return Err(Error::Parse {
                        line,
                        message: "vertex count must be positive".into(),
                    });
                }
                n = Some(count as usize);
                continue;
            };
            if !(2..=3).contains(&fields.len()) {
                return Err(Error::Parse {
                    line,
                    message: "expected `u v [mult]`".into(),
                });
            }
            let u = parse_num(fields[0], line)? as usize;
            let v = parse_num(fields[1], line)? as usize;
            let mult = match fields.get(2) {
                Some(m) => parse_num(m, line)?,
                None => 1,
            };
            if u == 0 || v == 0 || u > n || v > n {
                return Err(Error::input(format!(
                    "line {line}: arc ({u}, {v}) has an endpoint outside 1..{n}"
                )));
            }
            if mult == 0 {
                return Err(Error::input(format!("line {line}: multiplicity must be positive")));
            }
            arcs.push((u - 1, v - 1, mult));
        }
        let n = n.ok_or(Error::Parse {
            line: 0,
            message: "missing `digraph <n>` header".into(),
        })?;
        Digraph::new(n, &arcs)
    }

    /// Canonical text form: header, then arcs in row-major order, omitting
    /// multiplicity 1.
    pub fn to_text(&self) -> String {
        let mut out = format!("digraph {}\n", self.n());
        for (u, v, mult) in self.arcs() {
            if mult.is_one() {
                writeln!(out, "{} {}", u + 1, v + 1).unwrap();
            } else {
                writeln!(out, "{} {} {}", u + 1, v + 1, mult).unwrap();
            }
        }
        out
    }
}

fn parse_num(field: &str, line: usize) -> Result<u64> {
    field.parse::<u64>().map_err(|_| Error::Parse {
        line,
        message: format!("`{field}` is not a nonnegative integer"),
    })
}
