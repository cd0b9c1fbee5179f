//! Regular expressions over ASCII letters and their counting systems.
//!
//! Grammar (`*` binds tightest, then concatenation, then `|`):
//!
//! ```text
//! alt    := concat ('|' concat)*
//! concat := repeat+
//! repeat := atom '*'*
//! atom   := letter | '(' alt ')'
//! ```
//!
//! Other regex features (`+`, `?`, classes, anchors, escapes) are rejected.

mod compile;
mod system;

use std::fmt;

pub use compile::compile;
pub use system::{AutomatonSystem, DfaJson};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RegexAst {
    Literal(char),
    Concat(Vec<RegexAst>),
    Alternation(Vec<RegexAst>),
    Star(Box<RegexAst>),
}

impl RegexAst {
    /// Letters occurring in the expression, sorted.
    pub fn alphabet(&self) -> Vec<char> {
        let mut out = Vec::new();
        self.collect_letters(&mut out);
        out.sort_unstable();
        out.dedup();
        out
    }

    fn collect_letters(&self, out: &mut Vec<char>) {
        match self {
            RegexAst::Literal(c) => out.push(*c),
            RegexAst::Concat(items) | RegexAst::Alternation(items) => {
                items.iter().for_each(|r| r.collect_letters(out))
            }
            RegexAst::Star(inner) => inner.collect_letters(out),
        }
    }
}

impl fmt::Display for RegexAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RegexAst::Literal(c) => write!(f, "{c}"),
            RegexAst::Concat(items) => {
                for item in items {
                    match item {
                        RegexAst::Alternation(_) => write!(f, "({item})")?,
                        _ => write!(f, "{item}")?,
                    }
                }
                Ok(())
            }
            RegexAst::Alternation(items) => {
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str("|")?;
                    }
                    write!(f, "{item}")?;
                }
                Ok(())
            }
            RegexAst::Star(inner) => match **inner {
                RegexAst::Literal(_) | RegexAst::Star(_) => write!(f, "{inner}*"),
                _ => write!(f, "({inner})*"),
            },
        }
    }
}

pub fn parse_regex(expr: &str) -> Result<RegexAst> {
    let mut parser = Parser {
        chars: expr.chars().collect(),
        pos: 0,
    };
    if parser.chars.is_empty() {
        return Err(syntax(0, "empty expression"));
    }
    let ast = parser.alternation()?;
    match parser.peek() {
        None => Ok(ast),
        Some(')') => Err(syntax(parser.pos, "unbalanced ')'")),
        Some(c) => Err(syntax(parser.pos, format!("unexpected '{c}'"))),
    }
}

fn syntax(position: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        position,
        message: message.into(),
    }
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn alternation(&mut self) -> Result<RegexAst> {
        let mut branches = vec![self.concatenation()?];
        while self.peek() == Some('|') {
            self.pos += 1;
            branches.push(self.concatenation()?);
        }
        Ok(if branches.len() == 1 {
            branches.pop().unwrap()
        } else {
            RegexAst::Alternation(branches)
        })
    }

    fn concatenation(&mut self) -> Result<RegexAst> {
        let mut items = Vec::new();
        while let Some(c) = self.peek() {
            if c == '|' || c == ')' {
                break;
            }
            items.push(self.repetition()?);
        }
        match items.len() {
            0 => Err(syntax(self.pos, "expected an expression")),
            1 => Ok(items.pop().unwrap()),
            _ => Ok(RegexAst::Concat(items)),
        }
    }

    fn repetition(&mut self) -> Result<RegexAst> {
        let mut ast = self.atom()?;
        while self.peek() == Some('*') {
            self.pos += 1;
            ast = RegexAst::Star(Box::new(ast));
        }
        Ok(ast)
    }

    fn atom(&mut self) -> Result<RegexAst> {
        let start = self.pos;
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let inner = self.alternation()?;
                if self.peek() != Some(')') {
                    return Err(syntax(self.pos, format!("unclosed '(' opened at {start}")));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some('*') => Err(syntax(start, "'*' has nothing to repeat")),
            Some(c) if c.is_ascii_alphabetic() => {
                self.pos += 1;
                Ok(RegexAst::Literal(c))
            }
            Some(c @ ('+' | '?' | '[' | ']' | '{' | '}' | '^' | '$' | '.' | '\\')) => {
                Err(syntax(start, format!("unsupported regex feature '{c}'")))
            }
            Some(c) => Err(syntax(start, format!("'{c}' is not an ASCII letter"))),
            None => Err(syntax(start, "unexpected end of expression")),
        }
    }
}

#[cfg(test)]
mod tests;
