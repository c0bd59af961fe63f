//! Parser for the line-oriented STRIPS problem text format.
//!
//! ```text
//! # comment
//! atoms: p q r
//! init: p
//! goal: q
//! action load cost 2
//!   pre: p
//!   add: q
//!   del: p
//! ```
//!
//! `#` starts a comment anywhere on a line. The `atoms:`, `init:` and
//! `goal:` headers are required, in that order. Each action block names
//! an optional non-negative `cost` (default 1) and carries at most one
//! `pre:`, `add:` and `del:` line, in any order. Names are made of
//! letters, digits, `_` and `-`, and live in a single namespace: an
//! action may not reuse an atom name, so every name in an emitted
//! program denotes one thing. The name `__f` is reserved for the
//! sentinel atom of the emitted encodings.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use super::{Action, Atom, StripsProblem};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("{line}:{col}: syntax error: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: duplicate atom `{name}`")]
    DuplicateAtom { line: usize, col: usize, name: String },
    #[error("{line}:{col}: duplicate action `{name}`")]
    DuplicateAction { line: usize, col: usize, name: String },
    #[error("{line}:{col}: action name `{name}` is already an atom name")]
    NameClash { line: usize, col: usize, name: String },
    #[error("{line}:{col}: undeclared atom `{name}`")]
    UndeclaredAtom { line: usize, col: usize, name: String },
    #[error("{line}:{col}: `{name}` is reserved for the sentinel atom of emitted programs")]
    ReservedName { line: usize, col: usize, name: String },
    #[error("{line}:{col}: negative action cost {value}")]
    NegativeCost { line: usize, col: usize, value: i64 },
}

#[derive(Debug, Clone, Copy)]
struct Token<'a> {
    line: usize,
    col: usize,
    text: &'a str,
}

#[derive(Debug, Clone)]
struct Line<'a> {
    number: usize,
    tokens: Vec<Token<'a>>,
}

fn syntax(line: usize, col: usize, msg: impl Into<String>) -> ParseError {
    ParseError::Syntax { line, col, msg: msg.into() }
}

fn is_name(text: &str) -> bool {
    !text.is_empty()
        && text.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

/// Splits the input into significant lines of whitespace-separated
/// tokens, with comments removed. Line and column numbers are 1-based.
fn tokenize(text: &str) -> Vec<Line<'_>> {
    let mut lines = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let body = raw.split('#').next().unwrap_or("");
        let mut tokens = Vec::new();
        let mut col = 0;
        for piece in body.split_inclusive(char::is_whitespace) {
            let token = piece.trim_end_matches(char::is_whitespace);
            if !token.is_empty() {
                tokens.push(Token { line: i + 1, col: col + 1, text: token });
            }
            col += piece.len();
        }
        if !tokens.is_empty() {
            lines.push(Line { number: i + 1, tokens });
        }
    }
    lines
}

struct Parser<'a> {
    lines: Vec<Line<'a>>,
    next: usize,
    atoms: Vec<Atom>,
    atom_index: BTreeMap<&'a str, usize>,
    actions: Vec<Action>,
    action_names: BTreeSet<&'a str>,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Parser {
            lines: tokenize(text),
            next: 0,
            atoms: Vec::new(),
            atom_index: BTreeMap::new(),
            actions: Vec::new(),
            action_names: BTreeSet::new(),
        }
    }

    fn peek(&self) -> Option<&Line<'a>> {
        self.lines.get(self.next)
    }

    fn end_position(&self) -> (usize, usize) {
        match self.lines.last() {
            Some(line) => (line.number + 1, 1),
            None => (1, 1),
        }
    }

    fn take_header_line(&mut self, header: &str) -> Result<Line<'a>, ParseError> {
        match self.lines.get(self.next) {
            Some(line) if line.tokens[0].text == header => {
                self.next += 1;
                Ok(line.clone())
            }
            Some(line) => {
                let t = &line.tokens[0];
                Err(syntax(t.line, t.col, format!("expected `{header}`, found `{}`", t.text)))
            }
            None => {
                let (line, col) = self.end_position();
                Err(syntax(line, col, format!("unexpected end of input: expected `{header}`")))
            }
        }
    }

    fn declare_atoms(&mut self, tokens: &[Token<'a>]) -> Result<(), ParseError> {
        for t in tokens {
            if !is_name(t.text) {
                return Err(syntax(t.line, t.col, format!("malformed atom name `{}`", t.text)));
            }
            if t.text == crate::emit::SENTINEL_NAME {
                return Err(ParseError::ReservedName {
                    line: t.line,
                    col: t.col,
                    name: t.text.to_string(),
                });
            }
            if self.atom_index.contains_key(t.text) {
                return Err(ParseError::DuplicateAtom {
                    line: t.line,
                    col: t.col,
                    name: t.text.to_string(),
                });
            }
            let index = self.atoms.len();
            self.atom_index.insert(t.text, index);
            self.atoms.push(Atom { name: t.text.to_string(), index });
        }
        Ok(())
    }

    fn atom_set(&self, tokens: &[Token<'a>]) -> Result<BTreeSet<usize>, ParseError> {
        let mut set = BTreeSet::new();
        for t in tokens {
            if !is_name(t.text) {
                return Err(syntax(t.line, t.col, format!("malformed atom name `{}`", t.text)));
            }
            match self.atom_index.get(t.text) {
                Some(&index) => {
                    set.insert(index);
                }
                None => {
                    return Err(ParseError::UndeclaredAtom {
                        line: t.line,
                        col: t.col,
                        name: t.text.to_string(),
                    })
                }
            }
        }
        Ok(set)
    }

    fn parse_action_header(&mut self, line: &Line<'a>) -> Result<(Token<'a>, u32), ParseError> {
        let name = match line.tokens.get(1) {
            Some(t) if is_name(t.text) => *t,
            Some(t) => {
                return Err(syntax(t.line, t.col, format!("malformed action name `{}`", t.text)))
            }
            None => {
                let t = &line.tokens[0];
                return Err(syntax(t.line, t.col + t.text.len(), "missing action name"));
            }
        };
        if name.text == crate::emit::SENTINEL_NAME {
            return Err(ParseError::ReservedName {
                line: name.line,
                col: name.col,
                name: name.text.to_string(),
            });
        }
        if self.atom_index.contains_key(name.text) {
            return Err(ParseError::NameClash {
                line: name.line,
                col: name.col,
                name: name.text.to_string(),
            });
        }
        if !self.action_names.insert(name.text) {
            return Err(ParseError::DuplicateAction {
                line: name.line,
                col: name.col,
                name: name.text.to_string(),
            });
        }
        let cost = match line.tokens.get(2) {
            None => 1,
            Some(t) if t.text == "cost" => {
                let value = match line.tokens.get(3) {
                    Some(v) => v,
                    None => {
                        return Err(syntax(t.line, t.col + t.text.len(), "missing cost value"))
                    }
                };
                let parsed: i64 = value.text.parse().map_err(|_| {
                    syntax(value.line, value.col, format!("malformed cost `{}`", value.text))
                })?;
                if parsed < 0 {
                    return Err(ParseError::NegativeCost {
                        line: value.line,
                        col: value.col,
                        value: parsed,
                    });
                }
                u32::try_from(parsed).map_err(|_| {
                    syntax(value.line, value.col, format!("cost `{}` is too large", value.text))
                })?
            }
            Some(t) => {
                return Err(syntax(t.line, t.col, format!("expected `cost`, found `{}`", t.text)))
            }
        };
        if let Some(t) = line.tokens.get(4) {
            return Err(syntax(t.line, t.col, format!("unexpected token `{}`", t.text)));
        }
        Ok((name, cost))
    }

    fn parse_action(&mut self) -> Result<(), ParseError> {
        let line = self.lines[self.next].clone();
        self.next += 1;
        let (name, cost) = self.parse_action_header(&line)?;

        let mut pre = None;
        let mut add = None;
        let mut del = None;
        while let Some(line) = self.peek().cloned() {
            let head = &line.tokens[0];
            let slot = match head.text {
                "pre:" => &mut pre,
                "add:" => &mut add,
                "del:" => &mut del,
                "action" => break,
                other => {
                    return Err(syntax(
                        head.line,
                        head.col,
                        format!("expected `pre:`, `add:`, `del:` or `action`, found `{other}`"),
                    ))
                }
            };
            if slot.is_some() {
                return Err(syntax(
                    head.line,
                    head.col,
                    format!("repeated `{}` section", head.text),
                ));
            }
            *slot = Some(self.atom_set(&line.tokens[1..])?);
            self.next += 1;
        }

        self.actions.push(Action {
            name: name.text.to_string(),
            pre: pre.unwrap_or_default(),
            add: add.unwrap_or_default(),
            del: del.unwrap_or_default(),
            cost,
        });
        Ok(())
    }

    fn parse(mut self) -> Result<StripsProblem, ParseError> {
        let atoms_line = self.take_header_line("atoms:")?;
        self.declare_atoms(&atoms_line.tokens[1..])?;
        let init_line = self.take_header_line("init:")?;
        let init = self.atom_set(&init_line.tokens[1..])?;
        let goal_line = self.take_header_line("goal:")?;
        let goal = self.atom_set(&goal_line.tokens[1..])?;

        while let Some(line) = self.peek() {
            let head = &line.tokens[0];
            if head.text != "action" {
                return Err(syntax(
                    head.line,
                    head.col,
                    format!("expected `action`, found `{}`", head.text),
                ));
            }
            self.parse_action()?;
        }

        Ok(StripsProblem { atoms: self.atoms, init, goal, actions: self.actions })
    }
}

/// Parses a problem from its text form.
pub fn parse_problem(text: &str) -> Result<StripsProblem, ParseError> {
    Parser::new(text).parse()
}

#[cfg(test)]
mod tests {
    use super::*;

    const CODEP: &str = "atoms: p q\ninit:\ngoal: p\n\
                         action a\n  pre: p\n  add: q\n\
                         action b\n  pre: q\n  add: p\n";

    #[test]
    fn parses_codep() {
        let problem = parse_problem(CODEP).unwrap();
        assert_eq!(problem.atoms.len(), 2);
        assert_eq!(problem.atoms[0].name, "p");
        assert!(problem.init.is_empty());
        assert_eq!(problem.goal, BTreeSet::from([0]));
        assert_eq!(problem.actions.len(), 2);
        assert_eq!(problem.actions[0].name, "a");
        assert_eq!(problem.actions[0].pre, BTreeSet::from([0]));
        assert_eq!(problem.actions[0].add, BTreeSet::from([1]));
        assert_eq!(problem.actions[0].cost, 1);
    }

    #[test]
    fn parses_problem_without_actions() {
        let problem = parse_problem("atoms: p q\ninit: p\ngoal:\n").unwrap();
        assert!(problem.actions.is_empty());
        assert!(problem.goal.is_empty());
        assert_eq!(problem.init, BTreeSet::from([0]));
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let text = "# a puzzle\n\natoms: p q # two atoms\n\ninit:\ngoal: q\n\
                    action go cost 3 # expensive\n  add: q # done\n";
        let problem = parse_problem(text).unwrap();
        assert_eq!(problem.actions[0].cost, 3);
        assert_eq!(problem.actions[0].add, BTreeSet::from([1]));
    }

    #[test]
    fn cost_defaults_to_one() {
        let problem = parse_problem("atoms: p\ninit:\ngoal:\naction a\n  add: p\n").unwrap();
        assert_eq!(problem.actions[0].cost, 1);
    }

    #[test]
    fn sections_may_come_in_any_order() {
        let text = "atoms: p q\ninit:\ngoal:\naction a\n  add: q\n  pre: p\n";
        let problem = parse_problem(text).unwrap();
        assert_eq!(problem.actions[0].pre, BTreeSet::from([0]));
        assert_eq!(problem.actions[0].add, BTreeSet::from([1]));
    }

    #[test]
    fn rejects_undeclared_atom_by_name() {
        let err = parse_problem("atoms: p\ninit:\ngoal: r\n").unwrap_err();
        assert_eq!(
            err,
            ParseError::UndeclaredAtom { line: 3, col: 7, name: "r".to_string() }
        );
    }

    #[test]
    fn rejects_duplicate_atom() {
        let err = parse_problem("atoms: p p\ninit:\ngoal:\n").unwrap_err();
        assert!(matches!(err, ParseError::DuplicateAtom { name, .. } if name == "p"));
    }

    #[test]
    fn rejects_duplicate_action() {
        let text = "atoms: p\ninit:\ngoal:\naction a\naction a\n";
        let err = parse_problem(text).unwrap_err();
        assert!(matches!(err, ParseError::DuplicateAction { name, line: 5, .. } if name == "a"));
    }

    #[test]
    fn rejects_action_named_like_an_atom() {
        let err = parse_problem("atoms: p\ninit:\ngoal:\naction p\n").unwrap_err();
        assert!(matches!(err, ParseError::NameClash { name, .. } if name == "p"));
    }

    #[test]
    fn rejects_the_reserved_sentinel_name() {
        let err = parse_problem("atoms: __f\ninit:\ngoal:\n").unwrap_err();
        assert!(matches!(err, ParseError::ReservedName { name, .. } if name == "__f"));
        let err = parse_problem("atoms: p\ninit:\ngoal:\naction __f\n").unwrap_err();
        assert!(matches!(err, ParseError::ReservedName { line: 4, .. }));
    }

    #[test]
    fn rejects_negative_cost() {
        let err =
            parse_problem("atoms: p\ninit:\ngoal:\naction a cost -2\n").unwrap_err();
        assert_eq!(err, ParseError::NegativeCost { line: 4, col: 15, value: -2 });
    }

    #[test]
    fn rejects_missing_headers() {
        let err = parse_problem("goal: p\n").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { line: 1, col: 1, .. }));
        let err = parse_problem("atoms: p\n").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { line: 2, .. }));
    }

    #[test]
    fn rejects_repeated_section() {
        let text = "atoms: p\ninit:\ngoal:\naction a\n  add: p\n  add: p\n";
        let err = parse_problem(text).unwrap_err();
        assert!(matches!(err, ParseError::Syntax { line: 6, msg, .. } if msg.contains("repeated")));
    }

    #[test]
    fn rejects_malformed_name() {
        let err = parse_problem("atoms: p,q\ninit:\ngoal:\n").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { line: 1, col: 8, .. }));
    }

    #[test]
    fn syntax_error_reports_line_and_column() {
        let err = parse_problem("atoms: p\ninit:\ngoal:\n  pre: p\n").unwrap_err();
        assert_eq!(
            err,
            ParseError::Syntax {
                line: 4,
                col: 3,
                msg: "expected `action`, found `pre:`".to_string()
            }
        );
    }
}
