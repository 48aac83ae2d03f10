//! Finite quantum event algebras: orthomodular orthoposets with 0, 1 and an
//! involutive, order-reversing orthocomplement.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

/// Unvalidated description of an algebra, as read from an instance file.
///
/// `zero <= x <= one` is implied for every element, so files only list the
/// interesting order pairs. `ortho` pairs are symmetric.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RawAlgebra {
    pub name: String,
    pub elements: Vec<String>,
    pub zero: String,
    pub one: String,
    pub leq: Vec<(String, String)>,
    pub ortho: Vec<(String, String)>,
}

/// First axiom violated by a candidate algebra, with witnesses.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AxiomViolation {
    #[error("degenerate algebra: zero and one coincide")]
    DegenerateAlgebra,
    #[error("duplicate element `{0}`")]
    DuplicateElement(String),
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("order cycle: `{0}` <= `{1}` <= `{0}`")]
    OrderCycle(String, String),
    #[error("`{0}` has no orthocomplement")]
    OrthoMissing(String),
    #[error("ortho not involutive: `{0}` is paired with `{1}` and `{2}`")]
    OrthoNotInvolutive(String, String, String),
    #[error("ortho of zero is `{0}`, not one")]
    OrthoZeroNotOne(String),
    #[error("ortho not order reversing on `{0}` <= `{1}`")]
    OrthoNotOrderReversing(String, String),
    #[error("`{0}` joined with its orthocomplement is not one")]
    ComplementJoinNotOne(String),
    #[error("orthogonal pair `{0}`, `{1}` has no join")]
    MissingOrthogonalJoin(String, String),
    #[error("orthogonal family `{0}`, `{1}`, `{2}` has no well-defined join")]
    OrthogonalFamilyJoin(String, String, String),
    #[error("comparable pair `{0}` <= `{1}` is not compatible")]
    NotOrthomodular(String, String),
}

impl AxiomViolation {
    /// Short stable identifier of the violated axiom.
    pub fn axiom(&self) -> &'static str {
        match self {
            AxiomViolation::DegenerateAlgebra => "degenerate",
            AxiomViolation::DuplicateElement(_) => "duplicate-element",
            AxiomViolation::UnknownElement(_) => "unknown-element",
            AxiomViolation::OrderCycle(..) => "order-antisymmetry",
            AxiomViolation::OrthoMissing(_) => "ortho-total",
            AxiomViolation::OrthoNotInvolutive(..) => "ortho-involutive",
            AxiomViolation::OrthoZeroNotOne(_) => "ortho-zero",
            AxiomViolation::OrthoNotOrderReversing(..) => "ortho-order-reversing",
            AxiomViolation::ComplementJoinNotOne(_) => "complement-join",
            AxiomViolation::MissingOrthogonalJoin(..) => "orthogonal-join",
            AxiomViolation::OrthogonalFamilyJoin(..) => "orthogonal-family",
            AxiomViolation::NotOrthomodular(..) => "orthomodular",
        }
    }

    pub fn witnesses(&self) -> Vec<String> {
        match self {
            AxiomViolation::DegenerateAlgebra => vec![],
            AxiomViolation::DuplicateElement(a)
            | AxiomViolation::UnknownElement(a)
            | AxiomViolation::OrthoMissing(a)
            | AxiomViolation::OrthoZeroNotOne(a)
            | AxiomViolation::ComplementJoinNotOne(a) => vec![a.clone()],
            AxiomViolation::OrderCycle(a, b)
            | AxiomViolation::OrthoNotOrderReversing(a, b)
            | AxiomViolation::MissingOrthogonalJoin(a, b)
            | AxiomViolation::NotOrthomodular(a, b) => vec![a.clone(), b.clone()],
            AxiomViolation::OrthoNotInvolutive(a, b, c) | AxiomViolation::OrthogonalFamilyJoin(a, b, c) => {
                vec![a.clone(), b.clone(), c.clone()]
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("element `{0}` not found")]
pub struct ElementNotFound(pub String);

/// A validated finite quantum event algebra.
///
/// Elements are stored sorted by id and addressed by index.
#[derive(Clone, PartialEq, Eq)]
pub struct EventAlgebra {
    name: String,
    names: Vec<String>,
    index: HashMap<String, usize>,
    leq: Vec<bool>,
    ortho: Vec<usize>,
    zero: usize,
    one: usize,
    join: Vec<Option<usize>>,
    meet: Vec<Option<usize>>,
    boolean: bool,
    atoms: Vec<usize>,
}

impl fmt::Debug for EventAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EventAlgebra")
            .field("name", &self.name)
            .field("elements", &self.names)
            .field("boolean", &self.boolean)
            .finish()
    }
}

/// Validated structure described by indices, used by constructions that
/// already work with element positions (colimits, subalgebras).
#[derive(Debug, Clone)]
pub struct AlgebraParts {
    pub name: String,
    pub names: Vec<String>,
    pub leq: Vec<(usize, usize)>,
    pub ortho: Vec<usize>,
    pub zero: usize,
    pub one: usize,
}

pub fn validate_event_algebra(raw: &RawAlgebra) -> Result<EventAlgebra, AxiomViolation> {
    let mut seen = BTreeSet::new();
    for e in &raw.elements {
        if !seen.insert(e.as_str()) {
            return Err(AxiomViolation::DuplicateElement(e.clone()));
        }
    }
    let mut names: Vec<String> = raw.elements.clone();
    names.sort();
    let index: HashMap<String, usize> = names.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect();
    let lookup = |s: &String| index.get(s).copied().ok_or_else(|| AxiomViolation::UnknownElement(s.clone()));
    let zero = lookup(&raw.zero)?;
    let one = lookup(&raw.one)?;
    if zero == one || names.len() < 2 {
        return Err(AxiomViolation::DegenerateAlgebra);
    }
    let mut leq = Vec::with_capacity(raw.leq.len());
    for (a, b) in &raw.leq {
        leq.push((lookup(a)?, lookup(b)?));
    }
    let n = names.len();
    let mut partner: Vec<Option<usize>> = vec![None; n];
    let mut pairs = Vec::with_capacity(raw.ortho.len());
    for (a, b) in &raw.ortho {
        pairs.push((lookup(a)?, lookup(b)?));
    }
    if !pairs.iter().any(|&(a, b)| a == zero || b == zero || a == one || b == one) {
        pairs.push((zero, one));
    }
    for (a, b) in pairs {
        for (x, y) in [(a, b), (b, a)] {
            match partner[x] {
                Some(p) if p != y => {
                    return Err(AxiomViolation::OrthoNotInvolutive(
                        names[x].clone(),
                        names[p].clone(),
                        names[y].clone(),
                    ))
                }
                _ => partner[x] = Some(y),
            }
        }
    }
    let mut ortho = Vec::with_capacity(n);
    for (i, p) in partner.iter().enumerate() {
        match p {
            Some(p) => ortho.push(*p),
            None => return Err(AxiomViolation::OrthoMissing(names[i].clone())),
        }
    }
    EventAlgebra::from_parts(AlgebraParts { name: raw.name.clone(), names, leq, ortho, zero, one })
}

impl EventAlgebra {
    /// Validates an algebra given by indices. Names must be sorted and unique.
    pub fn from_parts(parts: AlgebraParts) -> Result<EventAlgebra, AxiomViolation> {
        let AlgebraParts { name, names, leq: pairs, ortho, zero, one } = parts;
        let n = names.len();
        if zero == one || n < 2 {
            return Err(AxiomViolation::DegenerateAlgebra);
        }
        let mut leq = vec![false; n * n];
        for i in 0..n {
            leq[i * n + i] = true;
            leq[zero * n + i] = true;
            leq[i * n + one] = true;
        }
        for &(a, b) in &pairs {
            leq[a * n + b] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if leq[i * n + k] {
                    for j in 0..n {
                        if leq[k * n + j] {
                            leq[i * n + j] = true;
                        }
                    }
                }
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if leq[i * n + j] && leq[j * n + i] {
                    return Err(AxiomViolation::OrderCycle(names[i].clone(), names[j].clone()));
                }
            }
        }
        for i in 0..n {
            if ortho[ortho[i]] != i {
                return Err(AxiomViolation::OrthoNotInvolutive(
                    names[i].clone(),
                    names[ortho[i]].clone(),
                    names[ortho[ortho[i]]].clone(),
                ));
            }
        }
        if ortho[zero] != one {
            return Err(AxiomViolation::OrthoZeroNotOne(names[ortho[zero]].clone()));
        }
        for i in 0..n {
            for j in 0..n {
                if leq[i * n + j] && !leq[ortho[j] * n + ortho[i]] {
                    return Err(AxiomViolation::OrthoNotOrderReversing(names[i].clone(), names[j].clone()));
                }
            }
        }
        let mut alg = EventAlgebra {
            name,
            index: names.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect(),
            names,
            leq,
            ortho,
            zero,
            one,
            join: vec![None; n * n],
            meet: vec![None; n * n],
            boolean: false,
            atoms: vec![],
        };
        alg.compute_bounds();
        for x in 0..n {
            if alg.join(x, alg.ortho[x]) != Some(one) {
                return Err(AxiomViolation::ComplementJoinNotOne(alg.names[x].clone()));
            }
        }
        for x in 0..n {
            for y in (x + 1)..n {
                if alg.orthogonal(x, y) && alg.join(x, y).is_none() {
                    return Err(AxiomViolation::MissingOrthogonalJoin(alg.names[x].clone(), alg.names[y].clone()));
                }
            }
        }
        alg.check_orthogonal_triples()?;
        for x in 0..n {
            for y in 0..n {
                if x != y && alg.leq(x, y) && !alg.compatible_idx(x, y) {
                    return Err(AxiomViolation::NotOrthomodular(alg.names[x].clone(), alg.names[y].clone()));
                }
            }
        }
        alg.atoms = (0..n).filter(|&x| x != zero && (0..n).all(|z| z == zero || z == x || !alg.leq(z, x))).collect();
        alg.boolean = alg.check_boolean();
        Ok(alg)
    }

    fn compute_bounds(&mut self) {
        let n = self.len();
        for x in 0..n {
            for y in x..n {
                let j = self.least(|z| self.leq(x, z) && self.leq(y, z));
                let m = self.greatest(|z| self.leq(z, x) && self.leq(z, y));
                self.join[x * n + y] = j;
                self.join[y * n + x] = j;
                self.meet[x * n + y] = m;
                self.meet[y * n + x] = m;
            }
        }
    }

    fn least(&self, pred: impl Fn(usize) -> bool) -> Option<usize> {
        let bounds: Vec<usize> = (0..self.len()).filter(|&z| pred(z)).collect();
        let mut c = *bounds.first()?;
        for &u in &bounds {
            if self.leq(u, c) {
                c = u;
            }
        }
        bounds.iter().all(|&u| self.leq(c, u)).then_some(c)
    }

    fn greatest(&self, pred: impl Fn(usize) -> bool) -> Option<usize> {
        let bounds: Vec<usize> = (0..self.len()).filter(|&z| pred(z)).collect();
        let mut c = *bounds.first()?;
        for &u in &bounds {
            if self.leq(c, u) {
                c = u;
            }
        }
        bounds.iter().all(|&u| self.leq(u, c)).then_some(c)
    }

    // Finite families: pairs plus associativity on triples.
    fn check_orthogonal_triples(&self) -> Result<(), AxiomViolation> {
        let n = self.len();
        let nz: Vec<usize> = (0..n).filter(|&x| x != self.zero).collect();
        for (i, &x) in nz.iter().enumerate() {
            for &y in &nz[i + 1..] {
                if !self.orthogonal(x, y) {
                    continue;
                }
                let xy = self.join(x, y).expect("orthogonal join checked");
                for &z in nz.iter().filter(|&&z| z > y) {
                    if !self.orthogonal(x, z) || !self.orthogonal(y, z) {
                        continue;
                    }
                    let witness = || {
                        AxiomViolation::OrthogonalFamilyJoin(
                            self.names[x].clone(),
                            self.names[y].clone(),
                            self.names[z].clone(),
                        )
                    };
                    if !self.orthogonal(xy, z) {
                        return Err(witness());
                    }
                    let yz = self.join(y, z).expect("orthogonal join checked");
                    if self.join(xy, z) != self.join(x, yz) {
                        return Err(witness());
                    }
                }
            }
        }
        Ok(())
    }

    fn check_boolean(&self) -> bool {
        let n = self.len();
        if self.join.iter().any(Option::is_none) || self.meet.iter().any(Option::is_none) {
            return false;
        }
        for x in 0..n {
            if self.meet(x, self.ortho[x]) != Some(self.zero) {
                return false;
            }
            for y in 0..n {
                let Some(xy) = self.meet(x, y) else { return false };
                for z in 0..n {
                    let yz = self.join(y, z).unwrap();
                    let lhs = self.meet(x, yz).unwrap();
                    let rhs = self.join(xy, self.meet(x, z).unwrap()).unwrap();
                    if lhs != rhs {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Unvalidated copy with two orthocomplements swapped, for fault injection.
    pub fn with_swapped_ortho(&self, x: usize, y: usize) -> EventAlgebra {
        let mut c = self.clone();
        let (ox, oy) = (c.ortho[x], c.ortho[y]);
        c.ortho[x] = oy;
        c.ortho[y] = ox;
        c.ortho[oy] = x;
        c.ortho[ox] = y;
        c.name = format!("{}~", c.name);
        c
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name_of(&self, x: usize) -> &str {
        &self.names[x]
    }

    pub fn index_of(&self, id: &str) -> Result<usize, ElementNotFound> {
        self.index.get(id).copied().ok_or_else(|| ElementNotFound(id.to_string()))
    }

    pub fn zero(&self) -> usize {
        self.zero
    }

    pub fn one(&self) -> usize {
        self.one
    }

    pub fn ortho(&self, x: usize) -> usize {
        self.ortho[x]
    }

    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.leq[x * self.names.len() + y]
    }

    pub fn join(&self, x: usize, y: usize) -> Option<usize> {
        self.join[x * self.names.len() + y]
    }

    pub fn meet(&self, x: usize, y: usize) -> Option<usize> {
        self.meet[x * self.names.len() + y]
    }

    /// `x <= ortho(y)`.
    pub fn orthogonal(&self, x: usize, y: usize) -> bool {
        self.leq(x, self.ortho[y])
    }

    pub fn is_boolean(&self) -> bool {
        self.boolean
    }

    pub fn atoms(&self) -> &[usize] {
        &self.atoms
    }

    /// Join of a pairwise orthogonal family.
    pub fn join_all(&self, xs: impl IntoIterator<Item = usize>) -> Option<usize> {
        xs.into_iter().try_fold(self.zero, |acc, x| self.join(acc, x))
    }

    /// Covering pairs `(x, y)`: `x < y` with nothing strictly between.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut out = vec![];
        for x in 0..n {
            for y in 0..n {
                if x != y && self.leq(x, y) && !(0..n).any(|z| z != x && z != y && self.leq(x, z) && self.leq(z, y)) {
                    out.push((x, y));
                }
            }
        }
        out
    }

    /// A maximal orthogonal set of atoms below `x`; its join is `x`.
    pub fn atom_decomposition(&self, x: usize) -> Vec<usize> {
        let mut d: Vec<usize> = vec![];
        for &a in &self.atoms {
            if self.leq(a, x) && d.iter().all(|&b| self.orthogonal(a, b)) {
                d.push(a);
            }
        }
        d
    }

    pub fn compatible(&self, l: &str, m: &str) -> Result<bool, ElementNotFound> {
        Ok(self.compatible_idx(self.index_of(l)?, self.index_of(m)?))
    }

    /// True iff the closure of `{l, l*, m, m*}` under existing meets, joins and
    /// ortho is a Boolean algebra in the induced order.
    pub fn compatible_idx(&self, l: usize, m: usize) -> bool {
        let set = self.lattice_closure(&[l, m]);
        self.is_boolean_subset(&set)
    }

    fn lattice_closure(&self, seeds: &[usize]) -> Vec<usize> {
        let n = self.len();
        let mut member = vec![false; n];
        let mut items = vec![];
        let push = |x: usize, member: &mut Vec<bool>, items: &mut Vec<usize>| {
            if !member[x] {
                member[x] = true;
                items.push(x);
            }
        };
        for &s in seeds.iter().chain([self.zero, self.one].iter()) {
            push(s, &mut member, &mut items);
            push(self.ortho[s], &mut member, &mut items);
        }
        let mut i = 0;
        while i < items.len() {
            let x = items[i];
            for j in 0..=i {
                let y = items[j];
                for z in [self.join(x, y), self.meet(x, y)].into_iter().flatten() {
                    push(z, &mut member, &mut items);
                    push(self.ortho[z], &mut member, &mut items);
                }
            }
            i += 1;
        }
        items.sort_unstable();
        items
    }

    /// Whether `set`, with the induced order and ortho, is a Boolean algebra.
    pub fn is_boolean_subset(&self, set: &[usize]) -> bool {
        let k = set.len();
        let pos = |x: usize| set.iter().position(|&y| y == x);
        if pos(self.zero).is_none() || pos(self.one).is_none() || set.iter().any(|&x| pos(self.ortho[x]).is_none()) {
            return false;
        }
        let mut join = vec![0usize; k * k];
        let mut meet = vec![0usize; k * k];
        for i in 0..k {
            for j in 0..k {
                let (x, y) = (set[i], set[j]);
                let ub: Vec<usize> = (0..k).filter(|&u| self.leq(x, set[u]) && self.leq(y, set[u])).collect();
                let lb: Vec<usize> = (0..k).filter(|&u| self.leq(set[u], x) && self.leq(set[u], y)).collect();
                let Some(&j0) = ub.iter().find(|&&u| ub.iter().all(|&v| self.leq(set[u], set[v]))) else {
                    return false;
                };
                let Some(&m0) = lb.iter().find(|&&u| lb.iter().all(|&v| self.leq(set[v], set[u]))) else {
                    return false;
                };
                join[i * k + j] = j0;
                meet[i * k + j] = m0;
            }
        }
        let zero = pos(self.zero).unwrap();
        let one = pos(self.one).unwrap();
        for i in 0..k {
            let o = pos(self.ortho[set[i]]).unwrap();
            if join[i * k + o] != one || meet[i * k + o] != zero {
                return false;
            }
            for j in 0..k {
                for l in 0..k {
                    let lhs = meet[i * k + join[j * k + l]];
                    let rhs = join[meet[i * k + j] * k + meet[i * k + l]];
                    if lhs != rhs {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Smallest subset containing 0, 1 and `seeds`, closed under ortho and
    /// joins of orthogonal pairs.
    pub fn subalgebra_closure(&self, seeds: &[usize]) -> Vec<usize> {
        let n = self.len();
        let mut member = vec![false; n];
        let mut items = vec![];
        for &s in seeds.iter().chain([self.zero, self.one].iter()) {
            for x in [s, self.ortho[s]] {
                if !member[x] {
                    member[x] = true;
                    items.push(x);
                }
            }
        }
        let mut i = 0;
        while i < items.len() {
            let x = items[i];
            for j in 0..=i {
                let y = items[j];
                if self.orthogonal(x, y) {
                    let z = self.join(x, y).expect("validated algebra has orthogonal joins");
                    for w in [z, self.ortho[z]] {
                        if !member[w] {
                            member[w] = true;
                            items.push(w);
                        }
                    }
                }
            }
            i += 1;
        }
        items.sort_unstable();
        items
    }

    /// Induced algebra on a subset (same element ids).
    pub fn induced(&self, subset: &[usize], name: &str) -> Result<EventAlgebra, AxiomViolation> {
        let mut sorted = subset.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        let pos: HashMap<usize, usize> = sorted.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        let find = |x: usize| pos.get(&x).copied().ok_or_else(|| AxiomViolation::OrthoMissing(self.names[x].clone()));
        let zero = pos
            .get(&self.zero)
            .copied()
            .ok_or_else(|| AxiomViolation::UnknownElement(self.names[self.zero].clone()))?;
        let one =
            pos.get(&self.one).copied().ok_or_else(|| AxiomViolation::UnknownElement(self.names[self.one].clone()))?;
        let mut ortho = Vec::with_capacity(sorted.len());
        for &x in &sorted {
            ortho.push(find(self.ortho[x]).map_err(|_| AxiomViolation::OrthoMissing(self.names[x].clone()))?);
        }
        let mut leq = vec![];
        for (i, &x) in sorted.iter().enumerate() {
            for (j, &y) in sorted.iter().enumerate() {
                if i != j && self.leq(x, y) {
                    leq.push((i, j));
                }
            }
        }
        EventAlgebra::from_parts(AlgebraParts {
            name: name.to_string(),
            names: sorted.iter().map(|&x| self.names[x].clone()).collect(),
            leq,
            ortho,
            zero,
            one,
        })
    }

    /// Raw description listing covering pairs and each ortho pair once.
    pub fn to_raw(&self) -> RawAlgebra {
        let leq = self.covers().into_iter().filter(|&(x, y)| x != self.zero && y != self.one);
        RawAlgebra {
            name: self.name.clone(),
            elements: self.names.clone(),
            zero: self.names[self.zero].clone(),
            one: self.names[self.one].clone(),
            leq: leq.map(|(x, y)| (self.names[x].clone(), self.names[y].clone())).collect(),
            ortho: self
                .elements()
                .filter(|&x| x <= self.ortho[x])
                .map(|x| (self.names[x].clone(), self.names[self.ortho[x]].clone()))
                .collect(),
        }
    }

    pub fn renamed(&self, name: &str) -> EventAlgebra {
        let mut c = self.clone();
        c.name = name.to_string();
        c
    }
}

/// The two-element Boolean algebra `{0, 1}`.
pub fn two() -> EventAlgebra {
    validate_event_algebra(&RawAlgebra {
        name: "2".into(),
        elements: vec!["0".into(), "1".into()],
        zero: "0".into(),
        one: "1".into(),
        leq: vec![],
        ortho: vec![],
    })
    .expect("2 is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn raw(name: &str, elems: &str, leq: &[(&str, &str)], ortho: &[(&str, &str)]) -> RawAlgebra {
        RawAlgebra {
            name: name.into(),
            elements: elems.split_whitespace().map(String::from).collect(),
            zero: "0".into(),
            one: "1".into(),
            leq: leq.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
            ortho: ortho.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
        }
    }

    fn mo2() -> RawAlgebra {
        raw("MO2", "0 1 a a' b b'", &[], &[("a", "a'"), ("b", "b'")])
    }

    #[test]
    fn four_element_boolean() {
        let l = validate_event_algebra(&raw("2^2", "0 x x' 1", &[], &[("x", "x'")])).unwrap();
        assert!(l.is_boolean());
        assert_eq!(l.atoms().len(), 2);
    }

    #[test]
    fn mo2_valid_not_boolean() {
        let l = validate_event_algebra(&mo2()).unwrap();
        assert!(!l.is_boolean());
        assert!(l.compatible("a", "a'").unwrap());
        assert!(!l.compatible("a", "b").unwrap());
        assert_eq!(l.compatible("a", "zz"), Err(ElementNotFound("zz".into())));
    }

    #[test]
    fn distributivity_fails_on_a_b_bp() {
        let l = validate_event_algebra(&mo2()).unwrap();
        let (a, b, bp) = (l.index_of("a").unwrap(), l.index_of("b").unwrap(), l.index_of("b'").unwrap());
        let lhs = l.meet(a, l.join(b, bp).unwrap()).unwrap();
        let rhs = l.join(l.meet(a, b).unwrap(), l.meet(a, bp).unwrap()).unwrap();
        assert_ne!(lhs, rhs);
    }

    #[test]
    fn corrupted_ortho_rejected() {
        let mut r = mo2();
        r.ortho.push(("a".into(), "b".into()));
        let e = validate_event_algebra(&r).unwrap_err();
        assert_eq!(e.axiom(), "ortho-involutive");
        assert_eq!(e.witnesses(), vec!["a", "a'", "b"]);
    }

    #[test]
    fn basic_rejections() {
        let dup = raw("d", "0 1 a a", &[], &[("a", "a")]);
        assert_eq!(validate_event_algebra(&dup).unwrap_err(), AxiomViolation::DuplicateElement("a".into()));
        let mut deg = raw("d", "0", &[], &[]);
        deg.one = "0".into();
        assert_eq!(validate_event_algebra(&deg).unwrap_err(), AxiomViolation::DegenerateAlgebra);
        let cyc = raw("c", "0 1 a a' b b'", &[("a", "b"), ("b", "a")], &[("a", "a'"), ("b", "b'")]);
        assert_eq!(validate_event_algebra(&cyc).unwrap_err().axiom(), "order-antisymmetry");
        let miss = raw("m", "0 1 a a' b", &[], &[("a", "a'")]);
        assert_eq!(validate_event_algebra(&miss).unwrap_err(), AxiomViolation::OrthoMissing("b".into()));
    }

    #[test]
    fn hexagon_is_not_orthomodular() {
        let o6 = raw("O6", "0 1 a a' b b'", &[("a", "b"), ("b'", "a'")], &[("a", "a'"), ("b", "b'")]);
        assert_eq!(validate_event_algebra(&o6).unwrap_err().axiom(), "orthomodular");
    }

    #[test]
    fn subalgebra_and_induced() {
        let l = validate_event_algebra(&mo2()).unwrap();
        let a = l.index_of("a").unwrap();
        let s = l.subalgebra_closure(&[a]);
        assert_eq!(s.len(), 4);
        let sub = l.induced(&s, "blk").unwrap();
        assert!(sub.is_boolean());
        assert_eq!(sub.names(), &["0", "1", "a", "a'"]);
    }

    #[test]
    fn raw_round_trip() {
        let l = validate_event_algebra(&mo2()).unwrap();
        assert_eq!(validate_event_algebra(&l.to_raw()).unwrap(), l);
    }
}
