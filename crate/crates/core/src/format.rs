//! Line-oriented instance files.
//!
//! ```text
//! # comment (a `#` inside a token is part of the token)
//! @algebra MO2
//! elements 0 1 a a' b b'
//! zero 0
//! one 1
//! leq a 1            # repeatable, closure applied, 0 <= x <= 1 implied
//! ortho a a'         # repeatable, symmetric
//!
//! @hom h
//! from TWO2
//! to MO2
//! kind quantum       # optional: quantum | boolean | monic
//! map x a
//!
//! @site S
//! over MO2
//! object A 0 1 a a'  # a Boolean subalgebra given by its elements
//! arrows inclusions  # inclusions | full
//! ```

use std::collections::HashSet;
use std::fmt::Write as _;
use std::sync::Arc;

use thiserror::Error;

use crate::algebra::{validate_event_algebra, AxiomViolation, EventAlgebra, RawAlgebra};
use crate::morphism::{validate_named_morphism, AlgebraMorphism, MorphismKind, MorphismViolation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{line}:{col}: {message}")]
    Syntax { line: usize, col: usize, message: String },
    #[error("algebra `{name}` (line {line}): {violation}")]
    Axiom { name: String, line: usize, violation: AxiomViolation },
    #[error("hom `{name}` (line {line}): {violation}")]
    Morphism { name: String, line: usize, violation: MorphismViolation },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawHom {
    pub name: String,
    pub from: String,
    pub to: String,
    pub kind: MorphismKind,
    pub map: Vec<(String, String)>,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ArrowRule {
    Inclusions,
    Full,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawSite {
    pub name: String,
    pub over: String,
    pub objects: Vec<(String, Vec<String>)>,
    pub arrows: ArrowRule,
    pub line: usize,
}

/// A parsed and validated document.
#[derive(Debug, Clone, Default)]
pub struct Document {
    pub algebras: Vec<Arc<EventAlgebra>>,
    pub homs: Vec<AlgebraMorphism>,
    pub sites: Vec<RawSite>,
}

impl Document {
    pub fn algebra(&self, name: &str) -> Option<&Arc<EventAlgebra>> {
        self.algebras.iter().find(|a| a.name() == name)
    }
}

enum Section {
    None,
    Algebra { raw: RawAlgebra, line: usize, ids: HashSet<String>, zero: bool, one: bool },
    Hom(RawHom),
    Site(RawSite),
}

struct Token<'a> {
    text: &'a str,
    col: usize,
}

fn tokens(line: &str) -> Vec<Token<'_>> {
    // `#` opens a comment only at the start of a token
    let cut = line
        .char_indices()
        .find(|&(i, c)| c == '#' && line[..i].chars().next_back().is_none_or(char::is_whitespace))
        .map_or(line.len(), |(i, _)| i);
    let body = &line[..cut];
    let mut out = vec![];
    let mut start = None;
    for (i, c) in body.char_indices() {
        match (c.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push(Token { text: &body[s..i], col: body[..s].chars().count() + 1 });
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push(Token { text: &body[s..], col: body[..s].chars().count() + 1 });
    }
    out
}

fn syntax(line: usize, col: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax { line, col, message: message.into() }
}

pub fn parse_document(text: &str) -> Result<Document, ParseError> {
    let mut doc = Document::default();
    let mut section = Section::None;
    let mut last_line = 0;
    for (ln, line) in text.lines().enumerate() {
        let ln = ln + 1;
        last_line = ln;
        let toks = tokens(line);
        let Some(head) = toks.first() else { continue };
        let args = &toks[1..];
        let arity = |n: usize| -> Result<(), ParseError> {
            if args.len() != n {
                let col = args.get(n).map_or(head.col, |t| t.col);
                return Err(syntax(
                    ln,
                    col,
                    format!("`{}` expects {} argument(s), found {}", head.text, n, args.len()),
                ));
            }
            Ok(())
        };
        if head.text.starts_with('@') {
            arity(1)?;
            finish(std::mem::replace(&mut section, Section::None), &mut doc, ln)?;
            let name = args[0].text.to_string();
            section = match head.text {
                "@algebra" => Section::Algebra {
                    raw: RawAlgebra { name, ..Default::default() },
                    line: ln,
                    ids: HashSet::new(),
                    zero: false,
                    one: false,
                },
                "@hom" => Section::Hom(RawHom {
                    name,
                    from: String::new(),
                    to: String::new(),
                    kind: MorphismKind::Quantum,
                    map: vec![],
                    line: ln,
                }),
                "@site" => Section::Site(RawSite {
                    name,
                    over: String::new(),
                    objects: vec![],
                    arrows: ArrowRule::Inclusions,
                    line: ln,
                }),
                other => return Err(syntax(ln, head.col, format!("unknown header `{other}`"))),
            };
            continue;
        }
        match &mut section {
            Section::None => {
                return Err(syntax(ln, head.col, "missing header: expected `@algebra`, `@hom` or `@site`"))
            }
            Section::Algebra { raw, ids, zero, one, .. } => {
                let known = |t: &Token, ids: &HashSet<String>| -> Result<String, ParseError> {
                    if ids.contains(t.text) {
                        Ok(t.text.to_string())
                    } else {
                        Err(syntax(ln, t.col, format!("unknown element `{}`", t.text)))
                    }
                };
                match head.text {
                    "elements" => {
                        for t in args {
                            raw.elements.push(t.text.to_string());
                            ids.insert(t.text.to_string());
                        }
                    }
                    "zero" => {
                        arity(1)?;
                        raw.zero = known(&args[0], ids)?;
                        *zero = true;
                    }
                    "one" => {
                        arity(1)?;
                        raw.one = known(&args[0], ids)?;
                        *one = true;
                    }
                    "leq" | "ortho" => {
                        arity(2)?;
                        let pair = (known(&args[0], ids)?, known(&args[1], ids)?);
                        if head.text == "leq" {
                            raw.leq.push(pair)
                        } else {
                            raw.ortho.push(pair)
                        }
                    }
                    other => return Err(syntax(ln, head.col, format!("unknown algebra directive `{other}`"))),
                }
            }
            Section::Hom(h) => match head.text {
                "from" | "to" => {
                    arity(1)?;
                    if doc.algebra(args[0].text).is_none() {
                        return Err(syntax(ln, args[0].col, format!("unknown algebra `{}`", args[0].text)));
                    }
                    let slot = if head.text == "from" { &mut h.from } else { &mut h.to };
                    *slot = args[0].text.to_string();
                }
                "kind" => {
                    arity(1)?;
                    h.kind = args[0].text.parse().map_err(|m: String| syntax(ln, args[0].col, m))?;
                }
                "map" => {
                    arity(2)?;
                    h.map.push((args[0].text.to_string(), args[1].text.to_string()));
                }
                other => return Err(syntax(ln, head.col, format!("unknown hom directive `{other}`"))),
            },
            Section::Site(s) => match head.text {
                "over" => {
                    arity(1)?;
                    if doc.algebra(args[0].text).is_none() {
                        return Err(syntax(ln, args[0].col, format!("unknown algebra `{}`", args[0].text)));
                    }
                    s.over = args[0].text.to_string();
                }
                "object" => {
                    if args.len() < 3 {
                        return Err(syntax(ln, head.col, "`object` expects a name and at least two elements"));
                    }
                    let over = doc.algebra(&s.over).ok_or_else(|| syntax(ln, head.col, "`object` before `over`"))?;
                    for t in &args[1..] {
                        if over.index_of(t.text).is_err() {
                            return Err(syntax(ln, t.col, format!("unknown element `{}`", t.text)));
                        }
                    }
                    s.objects.push((args[0].text.to_string(), args[1..].iter().map(|t| t.text.to_string()).collect()));
                }
                "arrows" => {
                    arity(1)?;
                    s.arrows = match args[0].text {
                        "inclusions" => ArrowRule::Inclusions,
                        "full" => ArrowRule::Full,
                        other => return Err(syntax(ln, args[0].col, format!("unknown arrow rule `{other}`"))),
                    };
                }
                other => return Err(syntax(ln, head.col, format!("unknown site directive `{other}`"))),
            },
        }
    }
    finish(section, &mut doc, last_line + 1)?;
    if doc.algebras.is_empty() && doc.homs.is_empty() && doc.sites.is_empty() {
        return Err(syntax(1, 1, "missing header: empty document"));
    }
    Ok(doc)
}

fn finish(section: Section, doc: &mut Document, ln: usize) -> Result<(), ParseError> {
    match section {
        Section::None => {}
        Section::Algebra { raw, line, zero, one, .. } => {
            if !zero || !one {
                return Err(syntax(
                    ln,
                    1,
                    format!("algebra `{}` lacks a `{}` line", raw.name, if zero { "one" } else { "zero" }),
                ));
            }
            let alg = validate_event_algebra(&raw).map_err(|violation| ParseError::Axiom {
                name: raw.name.clone(),
                line,
                violation,
            })?;
            doc.algebras.push(Arc::new(alg));
        }
        Section::Hom(h) => {
            let (Some(from), Some(to)) = (doc.algebra(&h.from), doc.algebra(&h.to)) else {
                return Err(syntax(h.line, 1, format!("hom `{}` needs `from` and `to`", h.name)));
            };
            let m = validate_named_morphism(&h.name, from, to, &h.map, h.kind)
                .map_err(|violation| ParseError::Morphism { name: h.name.clone(), line: h.line, violation })?;
            doc.homs.push(m);
        }
        Section::Site(s) => {
            if s.over.is_empty() {
                return Err(syntax(s.line, 1, format!("site `{}` needs `over`", s.name)));
            }
            doc.sites.push(s);
        }
    }
    Ok(())
}

/// First algebra of a document.
pub fn parse_algebra(text: &str) -> Result<EventAlgebra, ParseError> {
    let doc = parse_document(text)?;
    doc.algebras.first().map(|a| (**a).clone()).ok_or_else(|| syntax(1, 1, "missing header: no `@algebra` section"))
}

/// Whitespace inside an identifier would split it into several tokens.
fn token(id: &str) -> String {
    id.split_whitespace().collect::<Vec<_>>().join("_")
}

/// Text form of `l`. Whitespace inside names becomes `_`.
pub fn serialize_algebra(l: &EventAlgebra) -> String {
    let raw = l.to_raw();
    let mut s = String::new();
    writeln!(s, "@algebra {}", token(&raw.name)).unwrap();
    writeln!(s, "elements {}", raw.elements.iter().map(|e| token(e)).collect::<Vec<_>>().join(" ")).unwrap();
    writeln!(s, "zero {}", token(&raw.zero)).unwrap();
    writeln!(s, "one {}", token(&raw.one)).unwrap();
    for (a, b) in &raw.leq {
        writeln!(s, "leq {} {}", token(a), token(b)).unwrap();
    }
    for (a, b) in &raw.ortho {
        writeln!(s, "ortho {} {}", token(a), token(b)).unwrap();
    }
    s
}

pub fn serialize_morphism(h: &AlgebraMorphism) -> String {
    let mut s = String::new();
    writeln!(s, "@hom {}", token(h.name())).unwrap();
    writeln!(s, "from {}", token(h.source().name())).unwrap();
    writeln!(s, "to {}", token(h.target().name())).unwrap();
    writeln!(s, "kind {}", h.kind()).unwrap();
    for (a, b) in h.graph() {
        writeln!(s, "map {} {}", token(&a), token(&b)).unwrap();
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    const MO2: &str = "# two blocks\n@algebra MO2\nelements 0 1 a a' b b'\nzero 0\none 1\northo a a'\northo b b'\n";

    #[test]
    fn parses_and_round_trips() {
        let l = parse_algebra(MO2).unwrap();
        assert_eq!(l.len(), 6);
        assert_eq!(parse_algebra(&serialize_algebra(&l)).unwrap(), l);
    }

    #[test]
    fn unknown_element_in_ortho() {
        let text = MO2.replace("ortho b b'", "ortho b q");
        match parse_algebra(&text).unwrap_err() {
            ParseError::Syntax { line, col, message } => {
                assert_eq!((line, col), (7, 9));
                assert!(message.contains("`q`"));
            }
            e => panic!("{e}"),
        }
    }

    #[test]
    fn empty_document() {
        assert!(matches!(parse_algebra("").unwrap_err(), ParseError::Syntax { line: 1, .. }));
        assert!(matches!(parse_algebra("# nothing\n").unwrap_err(), ParseError::Syntax { .. }));
        assert!(matches!(parse_algebra("elements 0 1\n").unwrap_err(), ParseError::Syntax { line: 1, col: 1, .. }));
    }

    #[test]
    fn axiom_errors_located() {
        let text = MO2.replace("ortho b b'", "ortho b b'\northo a b");
        let e = parse_algebra(&text).unwrap_err();
        assert!(matches!(e, ParseError::Axiom { line: 2, .. }));
    }

    #[test]
    fn hom_section() {
        let text = format!(
            "{MO2}@algebra S\nelements 0 1 x x'\nzero 0\none 1\northo x x'\n@hom h\nfrom S\nto MO2\nmap 0 0\nmap 1 1\nmap x a\nmap x' a'\n"
        );
        let doc = parse_document(&text).unwrap();
        assert_eq!(doc.homs.len(), 1);
        assert_eq!(
            parse_document(&format!(
                "{MO2}@algebra S\nelements 0 1 x x'\nzero 0\none 1\northo x x'\n{}",
                serialize_morphism(&doc.homs[0])
            ))
            .unwrap()
            .homs[0],
            doc.homs[0]
        );
        let bad = text.replace("map x' a'", "map x' b");
        assert!(matches!(parse_document(&bad).unwrap_err(), ParseError::Morphism { .. }));
    }
}
