//! Text format for models.
//!
//! ```text
//! # comment
//! dim 2
//! states A B
//! trans dAA A add -3 4 A
//! trans dAB A tst B
//! ```
//!
//! An optional `vass` line (before any transition) declares the model
//! test-free; zero-test transitions are then parse errors. Printing is
//! canonical, so parse-print round-trips are byte-identical.

use std::fmt::Write as _;

use thiserror::Error;

use crate::model::{Action, ModelError, Transition, Tvass};
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: {source}")]
    Invalid { line: usize, source: ModelError },
    #[error("{0}")]
    Model(#[from] ModelError),
    #[error("missing `dim` line")]
    MissingDim,
    #[error("missing `states` line")]
    MissingStates,
}

fn syntax(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError::Syntax { line, msg: msg.into() }
}

pub fn parse_model<S: Scalar>(text: &str) -> Result<Tvass<S>, ParseError> {
    let mut dimension: Option<(usize, usize)> = None; // (value, line)
    let mut states: Option<Vec<String>> = None;
    let mut testable = true;
    let mut transitions: Vec<(usize, Transition<S>)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let head = tokens.next().expect("nonempty line");
        match head {
            "dim" => {
                if dimension.is_some() {
                    return Err(syntax(line_no, "duplicate `dim` line"));
                }
                if !transitions.is_empty() {
                    return Err(syntax(line_no, "`dim` must come before transitions"));
                }
                let d: usize = tokens
                    .next()
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| syntax(line_no, "`dim` needs a positive integer"))?;
                if tokens.next().is_some() {
                    return Err(syntax(line_no, "trailing tokens after `dim`"));
                }
                dimension = Some((d, line_no));
            }
            "vass" => {
                if !transitions.is_empty() {
                    return Err(syntax(line_no, "`vass` must come before transitions"));
                }
                testable = false;
            }
            "states" => {
                if states.is_some() {
                    return Err(syntax(line_no, "duplicate `states` line"));
                }
                let list: Vec<String> = tokens.map(|t| t.to_string()).collect();
                if list.is_empty() {
                    return Err(syntax(line_no, "`states` needs at least one state"));
                }
                states = Some(list);
            }
            "trans" => {
                let (d, _) = dimension.ok_or_else(|| syntax(line_no, "`trans` before `dim`"))?;
                if states.is_none() {
                    return Err(syntax(line_no, "`trans` before `states`"));
                }
                let id = tokens
                    .next()
                    .ok_or_else(|| syntax(line_no, "`trans` needs an id"))?
                    .to_string();
                let src = tokens
                    .next()
                    .ok_or_else(|| syntax(line_no, "`trans` needs a source state"))?
                    .to_string();
                let kind = tokens.next().ok_or_else(|| syntax(line_no, "`trans` needs a kind"))?;
                let action = match kind {
                    "tst" => {
                        if !testable {
                            return Err(ParseError::Invalid {
                                line: line_no,
                                source: ModelError::TestNotAllowed(id.clone()),
                            });
                        }
                        Action::Tst
                    }
                    "add" => {
                        let arity = |got: usize| ParseError::Invalid {
                            line: line_no,
                            source: ModelError::ArityMismatch {
                                id: id.clone(),
                                expected: d,
                                got,
                            },
                        };
                        let mut entries = Vec::with_capacity(d);
                        let mut rest = tokens.by_ref().peekable();
                        for _ in 0..d {
                            let tok = match rest.next() {
                                Some(t) => t,
                                None => return Err(arity(entries.len())),
                            };
                            let v = match S::from_str_radix(tok, 10) {
                                Ok(v) => v,
                                // a non-integer final token was the target
                                // state: the vector came up short
                                Err(_) if rest.peek().is_none() => {
                                    return Err(arity(entries.len()))
                                }
                                Err(_) => {
                                    return Err(syntax(line_no, format!("bad integer `{tok}`")))
                                }
                            };
                            entries.push(v);
                        }
                        Action::Add(entries)
                    }
                    other => return Err(syntax(line_no, format!("unknown action `{other}`"))),
                };
                let dst = tokens
                    .next()
                    .ok_or_else(|| syntax(line_no, "`trans` needs a target state"))?
                    .to_string();
                if tokens.next().is_some() {
                    return Err(syntax(line_no, "trailing tokens after transition"));
                }
                transitions.push((line_no, Transition { id, source: src, action, target: dst }));
            }
            other => return Err(syntax(line_no, format!("unknown directive `{other}`"))),
        }
    }

    let (dimension, _) = dimension.ok_or(ParseError::MissingDim)?;
    let states = states.ok_or(ParseError::MissingStates)?;
    // surface the first offending line on validation failures
    let lines: Vec<usize> = transitions.iter().map(|(l, _)| *l).collect();
    let transitions: Vec<Transition<S>> = transitions.into_iter().map(|(_, t)| t).collect();
    Tvass::new(dimension, states, transitions.clone(), testable).map_err(|e| {
        let line = match &e {
            ModelError::DuplicateTransition(id)
            | ModelError::UnknownState { id, .. }
            | ModelError::ArityMismatch { id, .. }
            | ModelError::TestNotAllowed(id) => transitions
                .iter()
                .position(|t| &t.id == id)
                .map(|i| lines[i]),
            _ => None,
        };
        match line {
            Some(line) => ParseError::Invalid { line, source: e },
            None => ParseError::Model(e),
        }
    })
}

pub fn print_model<S: Scalar>(model: &Tvass<S>) -> String {
    let mut out = String::new();
    writeln!(out, "dim {}", model.dimension()).unwrap();
    if !model.testable() {
        writeln!(out, "vass").unwrap();
    }
    writeln!(out, "states {}", model.states().join(" ")).unwrap();
    for t in model.transitions() {
        match &t.action {
            Action::Tst => {
                writeln!(out, "trans {} {} tst {}", t.id, t.source, t.target).unwrap();
            }
            Action::Add(v) => {
                let entries: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                writeln!(out, "trans {} {} add {} {}", t.id, t.source, entries.join(" "), t.target)
                    .unwrap();
            }
        }
    }
    out
}
