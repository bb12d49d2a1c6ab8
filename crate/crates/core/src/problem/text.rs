//! Line-oriented problem text.
//!
//! ```text
//! white: M O^2 | P^3
//! black: M [PO]^2 | O^3
//! ```
//!
//! Inside brackets an alphanumeric run such as `PO` is read as one label per
//! character; labels with other characters (for example `<M,O>` or `a+b`)
//! are taken whole and must be separated by whitespace. An optional
//! `labels:` line declares the alphabet, which then also admits labels that
//! appear in no configuration.

use std::collections::BTreeSet;

use thiserror::Error;

use super::{id_lookup, valid_label_name, Configuration, Constraint, Group, Problem, ProblemError};
use crate::labels::LabelSet;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("line {line}: configuration has degree {found}, expected {expected}")]
    DegreeMismatch { line: usize, expected: usize, found: usize },
    #[error("line {line}, column {col}: unknown label {label:?}")]
    UnknownLabel { line: usize, col: usize, label: String },
    #[error(transparent)]
    Problem(#[from] ProblemError),
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Open,
    Close,
    Caret,
    Bar,
    Word(String),
}

fn tokenize(line: &str, lineno: usize, offset: usize) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<char> = line.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = offset + i + 1;
        match c {
            c if c.is_whitespace() => i += 1,
            '[' => {
                out.push((Tok::Open, col));
                i += 1;
            }
            ']' => {
                out.push((Tok::Close, col));
                i += 1;
            }
            '^' => {
                out.push((Tok::Caret, col));
                i += 1;
            }
            '|' => {
                out.push((Tok::Bar, col));
                i += 1;
            }
            ':' | '"' => {
                return Err(ParseError::Syntax { line: lineno, col, msg: format!("unexpected {c:?}") });
            }
            _ => {
                let start = i;
                while i < chars.len() && !chars[i].is_whitespace() && !"[]^|:\"".contains(chars[i]) {
                    i += 1;
                }
                out.push((Tok::Word(chars[start..i].iter().collect()), col));
            }
        }
    }
    Ok(out)
}

struct RawLabel {
    name: String,
    line: usize,
    col: usize,
}

struct RawGroup {
    members: Vec<RawLabel>,
    exp: u32,
}

type RawConfig = Vec<RawGroup>;

fn parse_confs(toks: &[(Tok, usize)], line: usize, eol_col: usize) -> Result<Vec<RawConfig>, ParseError> {
    let err = |col: usize, msg: &str| ParseError::Syntax { line, col, msg: msg.to_string() };
    let mut confs = Vec::new();
    let mut cur: RawConfig = Vec::new();
    let mut i = 0;
    while i < toks.len() {
        let (tok, col) = &toks[i];
        let members = match tok {
            Tok::Bar => {
                if cur.is_empty() {
                    return Err(err(*col, "empty configuration"));
                }
                confs.push(std::mem::take(&mut cur));
                i += 1;
                continue;
            }
            Tok::Word(w) => {
                i += 1;
                vec![RawLabel { name: w.clone(), line, col: *col }]
            }
            Tok::Open => {
                i += 1;
                let mut members = Vec::new();
                loop {
                    match toks.get(i) {
                        Some((Tok::Word(w), c)) => {
                            if w.len() > 1 && w.chars().all(|ch| ch.is_alphanumeric()) {
                                for (k, ch) in w.chars().enumerate() {
                                    members.push(RawLabel { name: ch.to_string(), line, col: c + k });
                                }
                            } else {
                                members.push(RawLabel { name: w.clone(), line, col: *c });
                            }
                            i += 1;
                        }
                        Some((Tok::Close, c)) => {
                            if members.is_empty() {
                                return Err(err(*c, "empty group"));
                            }
                            i += 1;
                            break;
                        }
                        Some((_, c)) => return Err(err(*c, "expected a label or ']'")),
                        None => return Err(err(eol_col, "unclosed '['")),
                    }
                }
                members
            }
            Tok::Close => return Err(err(*col, "unexpected ']'")),
            Tok::Caret => return Err(err(*col, "exponent without a group")),
        };
        let mut exp = 1;
        if let Some((Tok::Caret, ccol)) = toks.get(i) {
            match toks.get(i + 1) {
                Some((Tok::Word(n), ncol)) => {
                    exp = n.parse::<u32>().map_err(|_| err(*ncol, "exponent must be a positive integer"))?;
                    if exp == 0 {
                        return Err(err(*ncol, "exponent must be at least 1"));
                    }
                    i += 2;
                }
                _ => return Err(err(*ccol, "missing exponent after '^'")),
            }
        }
        cur.push(RawGroup { members, exp });
    }
    if cur.is_empty() {
        return Err(err(eol_col, "empty configuration"));
    }
    confs.push(cur);
    Ok(confs)
}

/// Parses problem text; the alphabet is the set of labels used.
pub fn parse_problem(text: &str) -> Result<Problem, ParseError> {
    parse_inner(text, None)
}

/// Parses problem text against a fixed alphabet; any other label is an
/// error.
pub fn parse_problem_with_alphabet(text: &str, alphabet: &[String]) -> Result<Problem, ParseError> {
    parse_inner(text, Some(alphabet.to_vec()))
}

fn parse_inner(text: &str, fixed: Option<Vec<String>>) -> Result<Problem, ParseError> {
    let mut white: Option<(usize, Vec<RawConfig>)> = None;
    let mut black: Option<(usize, Vec<RawConfig>)> = None;
    let mut declared: Option<Vec<String>> = fixed;
    let mut last_line = 1;

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        last_line = lineno;
        let trimmed = raw.trim_start();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let indent = raw.chars().count() - trimmed.chars().count();
        let Some(colon) = trimmed.find(':') else {
            return Err(ParseError::Syntax { line: lineno, col: indent + 1, msg: "expected 'white:' or 'black:'".into() });
        };
        let key = trimmed[..colon].trim();
        let rest = &trimmed[colon + 1..];
        let offset = indent + trimmed[..=colon].chars().count();
        let eol_col = raw.chars().count() + 1;
        match key {
            "white" | "black" => {
                let slot = if key == "white" { &mut white } else { &mut black };
                if slot.is_some() {
                    return Err(ParseError::Syntax { line: lineno, col: indent + 1, msg: format!("duplicate '{key}:' line") });
                }
                let toks = tokenize(rest, lineno, offset)?;
                *slot = Some((lineno, parse_confs(&toks, lineno, eol_col)?));
            }
            "labels" => {
                let names: Vec<String> = rest.split_whitespace().map(str::to_string).collect();
                if declared.is_none() {
                    declared = Some(names);
                }
            }
            _ => {
                return Err(ParseError::Syntax { line: lineno, col: indent + 1, msg: format!("unknown section {key:?}") });
            }
        }
    }
    let (wl, white) = white.ok_or(ParseError::Syntax { line: last_line, col: 1, msg: "missing 'white:' line".into() })?;
    let (bl, black) = black.ok_or(ParseError::Syntax { line: last_line, col: 1, msg: "missing 'black:' line".into() })?;

    let alphabet: Vec<String> = match declared {
        Some(names) => names,
        None => {
            let used: BTreeSet<&str> = white
                .iter()
                .chain(&black)
                .flatten()
                .flat_map(|g| g.members.iter().map(|m| m.name.as_str()))
                .collect();
            used.into_iter().map(str::to_string).collect()
        }
    };
    let ids = id_lookup(&alphabet);

    let build = |line: usize, confs: &[RawConfig]| -> Result<Constraint, ParseError> {
        let mut configs = Vec::new();
        let mut degree = None;
        for conf in confs {
            let mut groups = Vec::new();
            for g in conf {
                let mut members = LabelSet::EMPTY;
                for m in &g.members {
                    if !valid_label_name(&m.name) {
                        return Err(ParseError::Syntax { line: m.line, col: m.col, msg: format!("invalid label {:?}", m.name) });
                    }
                    let id = ids.get(m.name.as_str()).ok_or_else(|| ParseError::UnknownLabel {
                        line: m.line,
                        col: m.col,
                        label: m.name.clone(),
                    })?;
                    members.insert(*id);
                }
                groups.push(Group::new(members, g.exp));
            }
            let c = Configuration::new(groups)?;
            match degree {
                None => degree = Some(c.degree()),
                Some(d) if d != c.degree() => {
                    return Err(ParseError::DegreeMismatch { line, expected: d, found: c.degree() });
                }
                _ => {}
            }
            configs.push(c);
        }
        Ok(Constraint::new(degree.unwrap_or(1), configs)?)
    };
    let active = build(wl, &white)?;
    let passive = build(bl, &black)?;
    Ok(Problem::new(alphabet, active, passive, None)?)
}

pub(crate) fn format_group(members: LabelSet, names: &[String]) -> String {
    let ms: Vec<&str> = members.iter().map(|i| names[i].as_str()).collect();
    if ms.len() == 1 {
        return ms[0].to_string();
    }
    if ms.iter().all(|m| m.chars().count() == 1) {
        format!("[{}]", ms.concat())
    } else {
        format!("[{}]", ms.join(" "))
    }
}

/// Canonical text. A `labels:` line is emitted only when some label is
/// unused by both constraints.
pub fn format_problem(p: &Problem) -> String {
    use super::Side;
    let mut out = String::new();
    let used = p.active().support().union(p.passive().support());
    if used.len() != p.alphabet().len() {
        out.push_str("labels: ");
        out.push_str(&p.alphabet().join(" "));
        out.push('\n');
    }
    out.push_str("white: ");
    out.push_str(&p.constraint_text(Side::Active));
    out.push_str("\nblack: ");
    out.push_str(&p.constraint_text(Side::Passive));
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::Side;

    #[test]
    fn parses_matching_encoding() {
        let p = parse_problem("white: M O O | P P P\nblack: M [PO] [PO] | O O O").unwrap();
        assert_eq!(p.alphabet().len(), 3);
        assert_eq!((p.active().degree(), p.passive().degree()), (3, 3));
        assert_eq!(p.constraint_text(Side::Active), "M O^2 | P^3");
        assert_eq!(p.constraint_text(Side::Passive), "M [OP]^2 | O^3");
    }

    #[test]
    fn minimal_problem() {
        let p = parse_problem("white: A\nblack: A").unwrap();
        assert_eq!(p.alphabet(), &["A".to_string()]);
        assert_eq!((p.active().degree(), p.passive().degree()), (1, 1));
    }

    #[test]
    fn zero_exponent_is_an_error() {
        let err = parse_problem("white: M O^2 [PO]^0\nblack: M").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { line: 1, col: 19, .. }), "{err:?}");
    }

    #[test]
    fn degree_mismatch() {
        let err = parse_problem("white: M O | P\nblack: O").unwrap_err();
        assert_eq!(err, ParseError::DegreeMismatch { line: 1, expected: 2, found: 1 });
    }

    #[test]
    fn unknown_label_against_declared_alphabet() {
        let err = parse_problem("labels: A B\nwhite: A C\nblack: A B").unwrap_err();
        assert!(matches!(err, ParseError::UnknownLabel { line: 2, col: 10, .. }), "{err:?}");
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let err = parse_problem("white: [M O\nblack: O").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { line: 1, .. }));
        let err = parse_problem("white: M\nblack: ^2").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { line: 2, col: 8, .. }), "{err:?}");
        assert!(parse_problem("white: M").is_err());
    }

    #[test]
    fn set_label_names_round_trip() {
        let text = "white: <M> <O,P>^2\nblack: [<M> <O,P>] <O,P>^2\n";
        let p = parse_problem(text).unwrap();
        assert_eq!(p.alphabet(), &["<M>".to_string(), "<O,P>".to_string()]);
        assert_eq!(parse_problem(&format_problem(&p)).unwrap(), p);
    }

    #[test]
    fn unused_declared_labels_survive_formatting() {
        let p = parse_problem("labels: A B Z\nwhite: A\nblack: [AB]").unwrap();
        assert_eq!(p.alphabet().len(), 3);
        assert_eq!(parse_problem(&format_problem(&p)).unwrap(), p);
    }
}
