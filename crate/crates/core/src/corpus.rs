//! Instances bundled with the crate.

use std::sync::Arc;

use crate::algebra::{AxiomViolation, EventAlgebra, RawAlgebra};
use crate::format::{parse_algebra, parse_document, ParseError};

pub const FILES: &[(&str, &str)] = &[
    ("two.qea", include_str!("../corpus/two.qea")),
    ("two2.qea", include_str!("../corpus/two2.qea")),
    ("two3.qea", include_str!("../corpus/two3.qea")),
    ("two4.qea", include_str!("../corpus/two4.qea")),
    ("mo2.qea", include_str!("../corpus/mo2.qea")),
    ("mo3.qea", include_str!("../corpus/mo3.qea")),
    ("greechie_chain.qea", include_str!("../corpus/greechie_chain.qea")),
    ("ks15.qea", include_str!("../corpus/ks15.qea")),
    ("bad_ortho.qea", include_str!("../corpus/bad_ortho.qea")),
    ("order_cycle.qea", include_str!("../corpus/order_cycle.qea")),
    ("degenerate.qea", include_str!("../corpus/degenerate.qea")),
    ("duplicate.qea", include_str!("../corpus/duplicate.qea")),
    ("missing_ortho.qea", include_str!("../corpus/missing_ortho.qea")),
    ("hexagon.qea", include_str!("../corpus/hexagon.qea")),
    ("missing_join.qea", include_str!("../corpus/missing_join.qea")),
];

pub const MANIFEST: &str = include_str!("../corpus/MANIFEST");

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expectation {
    Valid,
    Invalid(String),
    TwoValued(usize),
}

/// `(file, expectation)` lines of the manifest.
pub fn manifest() -> Vec<(String, Expectation)> {
    MANIFEST
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(|l| {
            let f: Vec<&str> = l.split_whitespace().collect();
            let e = match (f[1], f.get(2)) {
                ("valid", _) => Expectation::Valid,
                ("invalid", Some(ax)) => Expectation::Invalid(ax.to_string()),
                ("two-valued", Some(n)) => Expectation::TwoValued(n.parse().expect("manifest count")),
                _ => panic!("bad manifest line `{l}`"),
            };
            (f[0].to_string(), e)
        })
        .collect()
}

pub fn text(file: &str) -> Option<&'static str> {
    FILES.iter().find(|(f, _)| *f == file).map(|(_, t)| *t)
}

/// A bundled valid instance by file name.
pub fn load(file: &str) -> Arc<EventAlgebra> {
    Arc::new(parse_algebra(text(file).unwrap_or_else(|| panic!("no bundled file {file}"))).expect("bundled instance"))
}

/// Validates a bundled file, returning the axiom violation for corrupted ones.
pub fn check(file: &str) -> Result<EventAlgebra, AxiomViolation> {
    match parse_document(text(file).expect("bundled file")) {
        Ok(doc) => Ok((*doc.algebras[0]).clone()),
        Err(ParseError::Axiom { violation, .. }) => Err(violation),
        Err(e) => panic!("{file}: {e}"),
    }
}

/// Names of all valid bundled instances, smallest first.
pub fn valid_files() -> Vec<String> {
    manifest().into_iter().filter(|(_, e)| *e == Expectation::Valid).map(|(f, _)| f).collect()
}

pub fn all_valid() -> Vec<Arc<EventAlgebra>> {
    valid_files().iter().map(|f| load(f)).collect()
}

pub fn raw_of(l: &EventAlgebra) -> RawAlgebra {
    l.to_raw()
}
