//! Quantum homomorphisms between event algebras, their validation and
//! exhaustive enumeration.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

use crate::algebra::EventAlgebra;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MorphismKind {
    Quantum,
    Boolean,
    Monic,
}

impl MorphismKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MorphismKind::Quantum => "quantum-hom",
            MorphismKind::Boolean => "boolean-hom",
            MorphismKind::Monic => "monic",
        }
    }
}

impl fmt::Display for MorphismKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MorphismKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "quantum" | "quantum-hom" => Ok(MorphismKind::Quantum),
            "boolean" | "boolean-hom" => Ok(MorphismKind::Boolean),
            "monic" => Ok(MorphismKind::Monic),
            other => Err(format!("unknown morphism kind `{other}`")),
        }
    }
}

/// Homomorphism conditions, labelled as in the instance-file reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Condition {
    /// `H(1) = 1`
    Unit,
    /// `H(k*) = H(k)*`
    Ortho,
    /// `k <= k'` implies `H(k) <= H(k')`
    Monotone,
    /// orthogonal joins are preserved with equality
    OrthogonalJoin,
    Injective,
    BooleanDomain,
    LatticeOps,
}

impl Condition {
    pub fn id(self) -> &'static str {
        match self {
            Condition::Unit => "a",
            Condition::Ortho => "b",
            Condition::Monotone => "c",
            Condition::OrthogonalJoin => "e",
            Condition::Injective => "injective",
            Condition::BooleanDomain => "boolean-domain",
            Condition::LatticeOps => "lattice-ops",
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MorphismViolation {
    #[error("map is not total: no image for `{0}`")]
    NotTotal(String),
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("condition [{condition}] violated at {witnesses:?}")]
    ConditionViolated { condition: Condition, witnesses: Vec<String> },
}

impl MorphismViolation {
    pub fn condition(&self) -> Option<Condition> {
        match self {
            MorphismViolation::ConditionViolated { condition, .. } => Some(*condition),
            _ => None,
        }
    }
}

/// A certified map between two validated algebras.
#[derive(Clone)]
pub struct AlgebraMorphism {
    name: String,
    source: Arc<EventAlgebra>,
    target: Arc<EventAlgebra>,
    map: Vec<usize>,
    kind: MorphismKind,
}

impl fmt::Debug for AlgebraMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} -> {} [{}] {{", self.name, self.source.name(), self.target.name(), self.kind)?;
        for (x, &y) in self.map.iter().enumerate() {
            write!(f, " {}↦{}", self.source.name_of(x), self.target.name_of(y))?;
        }
        write!(f, " }}")
    }
}

impl PartialEq for AlgebraMorphism {
    fn eq(&self, other: &Self) -> bool {
        self.map == other.map && self.kind == other.kind && self.source == other.source && self.target == other.target
    }
}

impl AlgebraMorphism {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn source(&self) -> &Arc<EventAlgebra> {
        &self.source
    }

    pub fn target(&self) -> &Arc<EventAlgebra> {
        &self.target
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn kind(&self) -> MorphismKind {
        self.kind
    }

    pub fn apply(&self, x: usize) -> usize {
        self.map[x]
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = vec![false; self.target.len()];
        self.map.iter().all(|&y| !std::mem::replace(&mut seen[y], true))
    }

    /// Sorted, deduplicated image.
    pub fn image(&self) -> Vec<usize> {
        let mut v = self.map.clone();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Pairs of element names, in source order.
    pub fn graph(&self) -> Vec<(String, String)> {
        self.map
            .iter()
            .enumerate()
            .map(|(x, &y)| (self.source.name_of(x).to_string(), self.target.name_of(y).to_string()))
            .collect()
    }

    pub fn with_name(mut self, name: &str) -> Self {
        self.name = name.to_string();
        self
    }

    /// `self ∘ inner`, checked as a quantum homomorphism.
    pub fn compose(&self, inner: &AlgebraMorphism) -> Result<AlgebraMorphism, MorphismViolation> {
        let map = inner.map.iter().map(|&x| self.map[x]).collect();
        validate_morphism(
            &format!("{}∘{}", self.name, inner.name),
            &inner.source,
            &self.target,
            map,
            MorphismKind::Quantum,
        )
    }
}

pub fn identity(alg: &Arc<EventAlgebra>) -> AlgebraMorphism {
    AlgebraMorphism {
        name: format!("id_{}", alg.name()),
        source: alg.clone(),
        target: alg.clone(),
        map: alg.elements().collect(),
        kind: MorphismKind::Monic,
    }
}

/// Validates a map given as target indices, one per source element.
pub fn validate_morphism(
    name: &str,
    source: &Arc<EventAlgebra>,
    target: &Arc<EventAlgebra>,
    map: Vec<usize>,
    kind: MorphismKind,
) -> Result<AlgebraMorphism, MorphismViolation> {
    if map.len() != source.len() {
        let missing = source.name_of(map.len().min(source.len().saturating_sub(1)));
        return Err(MorphismViolation::NotTotal(missing.to_string()));
    }
    if let Some(&bad) = map.iter().find(|&&y| y >= target.len()) {
        return Err(MorphismViolation::UnknownElement(bad.to_string()));
    }
    check_conditions(source, target, &map, kind)?;
    Ok(AlgebraMorphism { name: name.to_string(), source: source.clone(), target: target.clone(), map, kind })
}

/// Validates a map given as `(source id, target id)` pairs.
pub fn validate_named_morphism(
    name: &str,
    source: &Arc<EventAlgebra>,
    target: &Arc<EventAlgebra>,
    pairs: &[(String, String)],
    kind: MorphismKind,
) -> Result<AlgebraMorphism, MorphismViolation> {
    let mut map = vec![None; source.len()];
    for (s, t) in pairs {
        let x = source.index_of(s).map_err(|e| MorphismViolation::UnknownElement(e.0))?;
        let y = target.index_of(t).map_err(|e| MorphismViolation::UnknownElement(e.0))?;
        map[x] = Some(y);
    }
    let mut total = Vec::with_capacity(map.len());
    for (x, y) in map.into_iter().enumerate() {
        total.push(y.ok_or_else(|| MorphismViolation::NotTotal(source.name_of(x).to_string()))?);
    }
    validate_morphism(name, source, target, total, kind)
}

fn violated(condition: Condition, witnesses: Vec<&str>) -> MorphismViolation {
    MorphismViolation::ConditionViolated { condition, witnesses: witnesses.into_iter().map(String::from).collect() }
}

pub fn check_conditions(
    s: &EventAlgebra,
    t: &EventAlgebra,
    map: &[usize],
    kind: MorphismKind,
) -> Result<(), MorphismViolation> {
    if map[s.one()] != t.one() {
        return Err(violated(Condition::Unit, vec![s.name_of(s.one())]));
    }
    for x in s.elements() {
        if map[s.ortho(x)] != t.ortho(map[x]) {
            return Err(violated(Condition::Ortho, vec![s.name_of(x), s.name_of(s.ortho(x))]));
        }
    }
    for x in s.elements() {
        for y in s.elements() {
            if s.leq(x, y) && !t.leq(map[x], map[y]) {
                return Err(violated(Condition::Monotone, vec![s.name_of(x), s.name_of(y)]));
            }
        }
    }
    for x in s.elements() {
        for y in (x + 1)..s.len() {
            if s.orthogonal(x, y) {
                let z = s.join(x, y).expect("validated source");
                if t.join(map[x], map[y]) != Some(map[z]) {
                    return Err(violated(Condition::OrthogonalJoin, vec![s.name_of(x), s.name_of(y)]));
                }
            }
        }
    }
    match kind {
        MorphismKind::Quantum => {}
        MorphismKind::Monic => {
            for x in s.elements() {
                for y in (x + 1)..s.len() {
                    if map[x] == map[y] {
                        return Err(violated(Condition::Injective, vec![s.name_of(x), s.name_of(y)]));
                    }
                }
            }
        }
        MorphismKind::Boolean => {
            if !s.is_boolean() {
                return Err(violated(Condition::BooleanDomain, vec![s.name()]));
            }
            if !t.is_boolean() {
                return Err(violated(Condition::BooleanDomain, vec![t.name()]));
            }
            for x in s.elements() {
                for y in s.elements() {
                    let j = s.join(x, y).map(|z| map[z]);
                    let m = s.meet(x, y).map(|z| map[z]);
                    if j != t.join(map[x], map[y]) || m != t.meet(map[x], map[y]) {
                        return Err(violated(Condition::LatticeOps, vec![s.name_of(x), s.name_of(y)]));
                    }
                }
            }
        }
    }
    Ok(())
}

/// Maximal pairwise-orthogonal sets of atoms (the atom sets of blocks).
pub fn maximal_orthogonal_atom_sets(alg: &EventAlgebra) -> Vec<Vec<usize>> {
    let atoms = alg.atoms();
    let k = atoms.len();
    let adj: Vec<Vec<bool>> =
        (0..k).map(|i| (0..k).map(|j| i != j && alg.orthogonal(atoms[i], atoms[j])).collect()).collect();
    let mut out = vec![];
    bron_kerbosch(&adj, vec![], (0..k).collect(), vec![], &mut out);
    let mut sets: Vec<Vec<usize>> =
        out.into_iter().map(|c| c.into_iter().map(|i| atoms[i]).collect::<Vec<_>>()).collect();
    for s in &mut sets {
        s.sort_unstable();
    }
    sets.sort();
    sets
}

fn bron_kerbosch(adj: &[Vec<bool>], r: Vec<usize>, mut p: Vec<usize>, mut x: Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if p.is_empty() {
        if x.is_empty() {
            out.push(r);
        }
        return;
    }
    let pivot = *p.iter().chain(x.iter()).max_by_key(|&&u| p.iter().filter(|&&v| adj[u][v]).count()).unwrap();
    let candidates: Vec<usize> = p.iter().copied().filter(|&v| !adj[pivot][v]).collect();
    for v in candidates {
        let mut r2 = r.clone();
        r2.push(v);
        let p2 = p.iter().copied().filter(|&u| adj[v][u]).collect();
        let x2 = x.iter().copied().filter(|&u| adj[v][u]).collect();
        bron_kerbosch(adj, r2, p2, x2, out);
        p.retain(|&u| u != v);
        x.push(v);
    }
}

/// All morphisms `b -> l` of the given kind, sorted by graph.
///
/// Backtracks over atom images: orthogonal atoms need orthogonal images and
/// every maximal orthogonal atom set must still join to 1. Each complete
/// assignment is extended through atom decompositions and fully checked.
pub fn enumerate_homomorphisms(
    b: &Arc<EventAlgebra>,
    l: &Arc<EventAlgebra>,
    kind: MorphismKind,
) -> Vec<AlgebraMorphism> {
    if kind == MorphismKind::Boolean && (!b.is_boolean() || !l.is_boolean()) {
        return vec![];
    }
    let atoms = b.atoms().to_vec();
    let pos = |a: usize| atoms.iter().position(|&x| x == a).unwrap();
    let cliques: Vec<Vec<usize>> =
        maximal_orthogonal_atom_sets(b).into_iter().map(|c| c.into_iter().map(pos).collect()).collect();
    // atoms visited clique by clique, so cliques close early
    let mut order: Vec<usize> = vec![];
    let mut left: Vec<&Vec<usize>> = cliques.iter().collect();
    while !left.is_empty() {
        let (i, _) = left
            .iter()
            .enumerate()
            .max_by_key(|(_, c)| (c.iter().filter(|p| order.contains(p)).count(), std::cmp::Reverse(c.len())))
            .unwrap();
        for &p in left.swap_remove(i) {
            if !order.contains(&p) {
                order.push(p);
            }
        }
    }
    let rest: Vec<usize> = (0..atoms.len()).filter(|p| !order.contains(p)).collect();
    order.extend(rest);
    let rank: Vec<usize> = (0..atoms.len()).map(|p| order.iter().position(|&q| q == p).unwrap()).collect();
    // cliques indexed by the rank of their last atom
    let mut closing: Vec<Vec<usize>> = vec![vec![]; atoms.len()];
    for (ci, c) in cliques.iter().enumerate() {
        closing[c.iter().map(|&p| rank[p]).max().unwrap()].push(ci);
    }
    let decomposition: Vec<Vec<usize>> =
        b.elements().map(|x| b.atom_decomposition(x).into_iter().map(pos).collect()).collect();
    let mut maps = vec![];
    let mut img = vec![0usize; atoms.len()];
    let ctx = Search {
        b,
        l,
        kind,
        atoms: &atoms,
        order: &order,
        cliques: &cliques,
        closing: &closing,
        decomposition: &decomposition,
    };
    ctx.search(0, &mut img, &mut maps);
    maps.sort();
    maps.dedup();
    maps.into_iter()
        .enumerate()
        .map(|(i, map)| AlgebraMorphism {
            name: format!("{}→{}#{}", b.name(), l.name(), i),
            source: b.clone(),
            target: l.clone(),
            map,
            kind,
        })
        .collect()
}

struct Search<'a> {
    b: &'a EventAlgebra,
    l: &'a EventAlgebra,
    kind: MorphismKind,
    atoms: &'a [usize],
    order: &'a [usize],
    cliques: &'a [Vec<usize>],
    closing: &'a [Vec<usize>],
    decomposition: &'a [Vec<usize>],
}

impl Search<'_> {
    fn search(&self, k: usize, img: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k == self.atoms.len() {
            if let Some(map) = self.extend(img) {
                if check_conditions(self.b, self.l, &map, self.kind).is_ok() {
                    out.push(map);
                }
            }
            return;
        }
        'cand: for y in self.l.elements() {
            let i = self.order[k];
            let done = &self.order[..k];
            if self.kind == MorphismKind::Monic && (y == self.l.zero() || done.iter().any(|&j| img[j] == y)) {
                continue;
            }
            for &j in done {
                if self.b.orthogonal(self.atoms[i], self.atoms[j]) && !self.l.orthogonal(y, img[j]) {
                    continue 'cand;
                }
            }
            img[i] = y;
            for &ci in &self.closing[k] {
                if self.l.join_all(self.cliques[ci].iter().map(|&p| img[p])) != Some(self.l.one()) {
                    continue 'cand;
                }
            }
            self.search(k + 1, img, out);
        }
    }

    fn extend(&self, img: &[usize]) -> Option<Vec<usize>> {
        self.b.elements().map(|x| self.l.join_all(self.decomposition[x].iter().map(|&p| img[p]))).collect()
    }
}

/// Homomorphisms into the two-element Boolean algebra.
pub fn two_valued_homomorphisms(l: &Arc<EventAlgebra>) -> Vec<AlgebraMorphism> {
    enumerate_homomorphisms(l, &Arc::new(crate::algebra::two()), MorphismKind::Quantum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{validate_event_algebra, RawAlgebra};

    fn alg(name: &str, elems: &str, ortho: &[(&str, &str)], leq: &[(&str, &str)]) -> Arc<EventAlgebra> {
        Arc::new(
            validate_event_algebra(&RawAlgebra {
                name: name.into(),
                elements: elems.split_whitespace().map(String::from).collect(),
                zero: "0".into(),
                one: "1".into(),
                leq: leq.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
                ortho: ortho.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
            })
            .unwrap(),
        )
    }

    fn mo2() -> Arc<EventAlgebra> {
        alg("MO2", "0 1 a a' b b'", &[("a", "a'"), ("b", "b'")], &[])
    }

    fn sq() -> Arc<EventAlgebra> {
        alg("2^2", "0 1 x x'", &[("x", "x'")], &[])
    }

    fn pairs(p: &[(&str, &str)]) -> Vec<(String, String)> {
        p.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
    }

    #[test]
    fn identity_is_monic() {
        let m = mo2();
        let id = identity(&m);
        assert!(validate_morphism("id", &m, &m, id.map().to_vec(), MorphismKind::Monic).is_ok());
    }

    #[test]
    fn named_maps() {
        let (s, t) = (sq(), mo2());
        let good = pairs(&[("0", "0"), ("1", "1"), ("x", "a"), ("x'", "a'")]);
        assert!(validate_named_morphism("h", &s, &t, &good, MorphismKind::Quantum).is_ok());
        let bad = pairs(&[("0", "0"), ("1", "1"), ("x", "a"), ("x'", "b")]);
        let e = validate_named_morphism("h", &s, &t, &bad, MorphismKind::Quantum).unwrap_err();
        assert_eq!(e.condition(), Some(Condition::Ortho));
        let partial = pairs(&[("0", "0"), ("1", "1"), ("x", "a")]);
        assert_eq!(
            validate_named_morphism("h", &s, &t, &partial, MorphismKind::Quantum).unwrap_err(),
            MorphismViolation::NotTotal("x'".into())
        );
    }

    #[test]
    fn counts() {
        let two = Arc::new(crate::algebra::two());
        assert_eq!(enumerate_homomorphisms(&sq(), &mo2(), MorphismKind::Quantum).len(), 6);
        assert_eq!(enumerate_homomorphisms(&sq(), &two, MorphismKind::Quantum).len(), 2);
        assert_eq!(two_valued_homomorphisms(&mo2()).len(), 4);
        assert_eq!(enumerate_homomorphisms(&sq(), &mo2(), MorphismKind::Monic).len(), 4);
        assert!(enumerate_homomorphisms(&sq(), &mo2(), MorphismKind::Boolean).is_empty());
    }

    #[test]
    fn block_atom_sets_of_mo2() {
        let m = mo2();
        assert_eq!(maximal_orthogonal_atom_sets(&m).len(), 2);
    }
}
