//! Serialization of ground programs: readable ASP text and the smodels
//! numeric interchange format, plus readers for round-trip and
//! cross-format validation.
//!
//! Atom names come from the source problem: fluents and actions render
//! verbatim, support atoms as `ws(action,fluent)`, dependency atoms as
//! `dep(fluent,fluent)`, and the sentinel as [`SENTINEL_NAME`]. The
//! problem parser keeps this naming injective by reserving the sentinel
//! name and refusing action names that shadow atom names.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::program::{LogicProgram, ProgAtom, RuleKind};
use crate::strips::RelaxedProblem;

/// Rendered name of the sentinel atom.
pub const SENTINEL_NAME: &str = "__f";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EmitError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: atom number {number} is not in the symbol table")]
    UnknownAtomNumber { line: usize, number: u64 },
    #[error("unexpected end of input: expected {expected}")]
    Truncated { expected: &'static str },
}

fn syntax(line: usize, msg: impl Into<String>) -> EmitError {
    EmitError::Syntax { line, msg: msg.into() }
}

pub fn render_atom(atom: ProgAtom, problem: &RelaxedProblem) -> String {
    match atom {
        ProgAtom::Fluent(p) => problem.atom_name(p as usize).to_string(),
        ProgAtom::Action(a) => problem.action_name(a as usize).to_string(),
        ProgAtom::Support(a, p) => format!(
            "ws({},{})",
            problem.action_name(a as usize),
            problem.atom_name(p as usize)
        ),
        ProgAtom::Dep(p, q) => format!(
            "dep({},{})",
            problem.atom_name(p as usize),
            problem.atom_name(q as usize)
        ),
        ProgAtom::Sentinel => SENTINEL_NAME.to_string(),
    }
}

/// Maps a rendered name back to its structured atom; `None` when the
/// name denotes nothing in this problem.
pub fn parse_atom_name(name: &str, problem: &RelaxedProblem) -> Option<ProgAtom> {
    if name == SENTINEL_NAME {
        return Some(ProgAtom::Sentinel);
    }
    if let Some(args) = name.strip_prefix("ws(").and_then(|r| r.strip_suffix(')')) {
        let (a, p) = args.split_once(',')?;
        return Some(ProgAtom::Support(
            problem.action_index(a)? as u32,
            problem.atom_index(p)? as u32,
        ));
    }
    if let Some(args) = name.strip_prefix("dep(").and_then(|r| r.strip_suffix(')')) {
        let (p, q) = args.split_once(',')?;
        return Some(ProgAtom::Dep(
            problem.atom_index(p)? as u32,
            problem.atom_index(q)? as u32,
        ));
    }
    if let Some(p) = problem.atom_index(name) {
        return Some(ProgAtom::Fluent(p as u32));
    }
    if let Some(a) = problem.action_index(name) {
        return Some(ProgAtom::Action(a as u32));
    }
    None
}

/// Handle-ordered atom names of one emitted program. Entry `i` names
/// handle `i`; numeric output writes `i + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SymbolTable {
    names: Vec<String>,
}

impl SymbolTable {
    pub fn of_program(program: &LogicProgram, problem: &RelaxedProblem) -> SymbolTable {
        SymbolTable {
            names: program.atoms().iter().map(|&a| render_atom(a, problem)).collect(),
        }
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// The `.sym` file body: `number name` per line.
    pub fn lines(&self) -> String {
        let mut out = String::new();
        for (i, name) in self.names.iter().enumerate() {
            out.push_str(&format!("{} {}\n", i + 1, name));
        }
        out
    }

    fn numbering(&self) -> BTreeMap<&str, usize> {
        self.names.iter().enumerate().map(|(i, n)| (n.as_str(), i + 1)).collect()
    }
}

/// A rule at the level of rendered names.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct NamedRule {
    pub choice: bool,
    pub head: String,
    pub pos: Vec<String>,
    pub neg: Vec<String>,
}

/// A program at the level of rendered names. Every name occurring in a
/// rule or objective entry must be listed in `symbols`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedProgram {
    pub symbols: SymbolTable,
    pub rules: Vec<NamedRule>,
    pub minimize: Vec<(String, u64)>,
}

pub fn render_program(program: &LogicProgram, problem: &RelaxedProblem) -> NamedProgram {
    let rules = program
        .rules()
        .iter()
        .map(|r| NamedRule {
            choice: r.kind == RuleKind::Choice,
            head: render_atom(r.head, problem),
            pos: r.pos.iter().map(|&a| render_atom(a, problem)).collect(),
            neg: r.neg.iter().map(|&a| render_atom(a, problem)).collect(),
        })
        .collect();
    let minimize = program
        .minimize()
        .iter()
        .map(|&(a, w)| (render_atom(a, problem), w))
        .collect();
    NamedProgram { symbols: SymbolTable::of_program(program, problem), rules, minimize }
}

/// Order-insensitive view for cross-format comparison: rules as a sorted
/// multiset with sorted bodies, and the objective sorted by atom.
pub fn canonical_form(program: &NamedProgram) -> (Vec<NamedRule>, Vec<(String, u64)>) {
    let mut rules: Vec<NamedRule> = program
        .rules
        .iter()
        .map(|r| {
            let mut r = r.clone();
            r.pos.sort();
            r.neg.sort();
            r
        })
        .collect();
    rules.sort();
    let mut minimize = program.minimize.clone();
    minimize.sort();
    (rules, minimize)
}

pub fn write_text(program: &NamedProgram) -> String {
    let mut out = String::new();
    for rule in &program.rules {
        if rule.choice {
            out.push_str(&format!("{{{}}}", rule.head));
        } else {
            out.push_str(&rule.head);
        }
        let body: Vec<String> = rule
            .pos
            .iter()
            .cloned()
            .chain(rule.neg.iter().map(|n| format!("not {n}")))
            .collect();
        if !body.is_empty() {
            out.push_str(&format!(" :- {}", body.join(", ")));
        }
        out.push_str(".\n");
    }
    if !program.minimize.is_empty() {
        let elems: Vec<String> =
            program.minimize.iter().map(|(a, w)| format!("{w},{a} : {a}")).collect();
        out.push_str(&format!("#minimize {{ {} }}.\n", elems.join(" ; ")));
    }
    out
}

pub fn write_smodels(program: &NamedProgram) -> String {
    let numbering = program.symbols.numbering();
    let num = |name: &str| -> usize {
        *numbering.get(name).unwrap_or_else(|| panic!("`{name}` missing from symbol table"))
    };
    let mut out = String::new();
    for rule in &program.rules {
        let mut fields: Vec<usize> = if rule.choice { vec![3, 1] } else { vec![1] };
        fields.push(num(&rule.head));
        fields.push(rule.pos.len() + rule.neg.len());
        fields.push(rule.neg.len());
        fields.extend(rule.neg.iter().map(|n| num(n)));
        fields.extend(rule.pos.iter().map(|n| num(n)));
        out.push_str(&join_numbers(&fields));
        out.push('\n');
    }
    if !program.minimize.is_empty() {
        let mut fields: Vec<usize> = vec![6, 0, program.minimize.len(), 0];
        fields.extend(program.minimize.iter().map(|(a, _)| num(a)));
        fields.extend(program.minimize.iter().map(|&(_, w)| w as usize));
        out.push_str(&join_numbers(&fields));
        out.push('\n');
    }
    out.push_str("0\n");
    out.push_str(&program.symbols.lines());
    out.push_str("0\nB+\n0\nB-\n0\n1\n");
    out
}

fn join_numbers(fields: &[usize]) -> String {
    fields.iter().map(usize::to_string).collect::<Vec<_>>().join(" ")
}

pub fn emit_text(program: &LogicProgram, problem: &RelaxedProblem) -> String {
    write_text(&render_program(program, problem))
}

pub fn emit_smodels(program: &LogicProgram, problem: &RelaxedProblem) -> String {
    write_smodels(&render_program(program, problem))
}

/// Splits at top-level occurrences of `sep`, treating parentheses as
/// nesting (atom arguments contain commas).
fn split_top(s: &str, sep: char) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0usize;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            c if c == sep && depth == 0 => {
                parts.push(&s[start..i]);
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    parts.push(&s[start..]);
    parts
}

fn parse_rule_line(line_no: usize, line: &str) -> Result<NamedRule, EmitError> {
    let stripped = line
        .strip_suffix('.')
        .ok_or_else(|| syntax(line_no, "rule does not end with `.`"))?;
    let (head_part, body_part) = match stripped.split_once(":-") {
        Some((h, b)) => (h.trim(), Some(b.trim())),
        None => (stripped.trim(), None),
    };
    let (choice, head) = match head_part.strip_prefix('{').and_then(|h| h.strip_suffix('}')) {
        Some(h) => (true, h.trim().to_string()),
        None => (false, head_part.to_string()),
    };
    if head.is_empty() {
        return Err(syntax(line_no, "empty rule head"));
    }
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    if let Some(body) = body_part {
        for lit in split_top(body, ',') {
            let lit = lit.trim();
            if lit.is_empty() {
                return Err(syntax(line_no, "empty body literal"));
            }
            match lit.strip_prefix("not ") {
                Some(n) => neg.push(n.trim().to_string()),
                None => pos.push(lit.to_string()),
            }
        }
    }
    Ok(NamedRule { choice, head, pos, neg })
}

fn parse_minimize_line(line_no: usize, rest: &str) -> Result<Vec<(String, u64)>, EmitError> {
    let inner = rest
        .trim()
        .strip_prefix('{')
        .and_then(|r| r.strip_suffix("}."))
        .ok_or_else(|| syntax(line_no, "malformed minimize statement"))?
        .trim();
    if inner.is_empty() {
        return Ok(Vec::new());
    }
    let mut entries = Vec::new();
    for elem in split_top(inner, ';') {
        let (weighted, condition) = elem
            .split_once(':')
            .ok_or_else(|| syntax(line_no, "minimize element lacks a condition"))?;
        let (weight, atom) = weighted
            .trim()
            .split_once(',')
            .ok_or_else(|| syntax(line_no, "minimize element lacks a weight"))?;
        let weight: u64 = weight
            .trim()
            .parse()
            .map_err(|_| syntax(line_no, format!("malformed weight `{}`", weight.trim())))?;
        let atom = atom.trim();
        if atom != condition.trim() {
            return Err(syntax(line_no, "minimize term and condition differ"));
        }
        entries.push((atom.to_string(), weight));
    }
    Ok(entries)
}

/// Symbol table for programs read from text: names in order of first
/// appearance. Numeric re-emission of a text-read program therefore uses
/// appearance order, not the structured handle order of [`render_program`].
fn collect_symbols(rules: &[NamedRule], minimize: &[(String, u64)]) -> SymbolTable {
    let mut names = Vec::new();
    let mut seen = BTreeSet::new();
    let mut add = |name: &String| {
        if seen.insert(name.clone()) {
            names.push(name.clone());
        }
    };
    for rule in rules {
        add(&rule.head);
        rule.pos.iter().for_each(&mut add);
        rule.neg.iter().for_each(&mut add);
    }
    for (name, _) in minimize {
        add(name);
    }
    SymbolTable { names }
}

/// Reads the text format back. `%` starts a comment; the single
/// minimize statement, if present, must come last.
pub fn read_text(text: &str) -> Result<NamedProgram, EmitError> {
    let mut rules = Vec::new();
    let mut minimize = Vec::new();
    let mut seen_minimize = false;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('%').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if seen_minimize {
            return Err(syntax(line_no, "content after the minimize statement"));
        }
        if let Some(rest) = line.strip_prefix("#minimize") {
            minimize = parse_minimize_line(line_no, rest)?;
            seen_minimize = true;
            continue;
        }
        rules.push(parse_rule_line(line_no, line)?);
    }
    let symbols = collect_symbols(&rules, &minimize);
    Ok(NamedProgram { symbols, rules, minimize })
}

struct NumericRule {
    line: usize,
    choice: bool,
    head: u64,
    neg: Vec<u64>,
    pos: Vec<u64>,
}

struct NumberReader<'a> {
    fields: Vec<u64>,
    next: usize,
    line: usize,
    raw: &'a str,
}

impl<'a> NumberReader<'a> {
    fn new(line: usize, raw: &'a str) -> Result<Self, EmitError> {
        let fields = raw
            .split_whitespace()
            .map(|f| f.parse::<u64>())
            .collect::<Result<Vec<u64>, _>>()
            .map_err(|_| syntax(line, format!("malformed numeric line `{raw}`")))?;
        Ok(NumberReader { fields, next: 0, line, raw })
    }

    fn take(&mut self) -> Result<u64, EmitError> {
        let value = self
            .fields
            .get(self.next)
            .copied()
            .ok_or_else(|| syntax(self.line, format!("truncated numeric line `{}`", self.raw)))?;
        self.next += 1;
        Ok(value)
    }

    fn take_many(&mut self, count: u64) -> Result<Vec<u64>, EmitError> {
        (0..count).map(|_| self.take()).collect()
    }

    fn finish(self) -> Result<(), EmitError> {
        if self.next != self.fields.len() {
            return Err(syntax(self.line, format!("trailing fields in `{}`", self.raw)));
        }
        Ok(())
    }
}

/// Reads the smodels numeric format back, resolving numbers through the
/// embedded symbol table.
pub fn read_smodels(text: &str) -> Result<NamedProgram, EmitError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let mut next_line = |expected: &'static str| {
        lines.next().ok_or(EmitError::Truncated { expected })
    };

    let mut numeric_rules = Vec::new();
    let mut numeric_minimize: Option<(usize, Vec<u64>, Vec<u64>)> = None;
    loop {
        let (line_no, raw) = next_line("a rule line or the `0` terminator")?;
        if raw == "0" {
            break;
        }
        let mut reader = NumberReader::new(line_no, raw)?;
        match reader.take()? {
            1 => {
                let head = reader.take()?;
                let nlits = reader.take()?;
                let nneg = reader.take()?;
                if nneg > nlits {
                    return Err(syntax(line_no, "more negative literals than literals"));
                }
                let neg = reader.take_many(nneg)?;
                let pos = reader.take_many(nlits - nneg)?;
                reader.finish()?;
                numeric_rules.push(NumericRule { line: line_no, choice: false, head, neg, pos });
            }
            3 => {
                let heads = reader.take()?;
                if heads != 1 {
                    return Err(syntax(line_no, "only single-head choice rules are supported"));
                }
                let head = reader.take()?;
                let nlits = reader.take()?;
                let nneg = reader.take()?;
                if nneg > nlits {
                    return Err(syntax(line_no, "more negative literals than literals"));
                }
                let neg = reader.take_many(nneg)?;
                let pos = reader.take_many(nlits - nneg)?;
                reader.finish()?;
                numeric_rules.push(NumericRule { line: line_no, choice: true, head, neg, pos });
            }
            6 => {
                if numeric_minimize.is_some() {
                    return Err(syntax(line_no, "multiple minimize rules"));
                }
                if reader.take()? != 0 {
                    return Err(syntax(line_no, "malformed minimize rule"));
                }
                let nlits = reader.take()?;
                let nneg = reader.take()?;
                if nneg != 0 {
                    return Err(syntax(line_no, "negative minimize literals are not supported"));
                }
                let atoms = reader.take_many(nlits)?;
                let weights = reader.take_many(nlits)?;
                reader.finish()?;
                numeric_minimize = Some((line_no, atoms, weights));
            }
            kind => return Err(syntax(line_no, format!("unsupported rule type {kind}"))),
        }
    }

    let mut names: Vec<String> = Vec::new();
    loop {
        let (line_no, raw) = next_line("a symbol line or the `0` terminator")?;
        if raw == "0" {
            break;
        }
        let (number, name) = raw
            .split_once(' ')
            .ok_or_else(|| syntax(line_no, format!("malformed symbol line `{raw}`")))?;
        let number: usize = number
            .parse()
            .map_err(|_| syntax(line_no, format!("malformed atom number `{number}`")))?;
        if number != names.len() + 1 {
            return Err(syntax(line_no, "symbol table numbering is not dense from 1"));
        }
        names.push(name.to_string());
    }

    for (expected, token) in
        [("B+", "`B+`"), ("0", "the positive section terminator"),
         ("B-", "`B-`"), ("0", "the negative section terminator"),
         ("1", "the model count line")]
    {
        let (line_no, raw) = next_line(token)?;
        if raw != expected {
            return Err(syntax(line_no, format!("expected `{expected}`, found `{raw}`")));
        }
    }
    for (line_no, raw) in lines {
        if !raw.is_empty() {
            return Err(syntax(line_no, format!("trailing content `{raw}`")));
        }
    }

    let resolve = |line: usize, number: u64| -> Result<String, EmitError> {
        names
            .get((number as usize).wrapping_sub(1))
            .cloned()
            .ok_or(EmitError::UnknownAtomNumber { line, number })
    };
    let mut rules = Vec::new();
    for rule in numeric_rules {
        rules.push(NamedRule {
            choice: rule.choice,
            head: resolve(rule.line, rule.head)?,
            pos: rule.pos.iter().map(|&n| resolve(rule.line, n)).collect::<Result<_, _>>()?,
            neg: rule.neg.iter().map(|&n| resolve(rule.line, n)).collect::<Result<_, _>>()?,
        });
    }
    let mut minimize = Vec::new();
    if let Some((line_no, atoms, weights)) = numeric_minimize {
        for (atom, weight) in atoms.iter().zip(weights) {
            minimize.push((resolve(line_no, *atom)?, weight));
        }
    }
    Ok(NamedProgram { symbols: SymbolTable { names }, rules, minimize })
}
