//! Colimit of a presheaf against the coefficient functor: pairs
//! `(section, element)` glued along restrictions.

use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

use crate::algebra::{AlgebraParts, EventAlgebra};
use crate::site::Presheaf;

/// A pair `(object, section, element)`.
pub type Pair = (usize, usize, usize);

#[derive(Debug, Clone, Error)]
pub enum ColimitError {
    #[error("presheaf has no sections; the colimit carrier is empty")]
    EmptyCarrier,
    #[error("quotient is not a quantum event algebra: {axiom} fails at {witnesses:?}")]
    StructureFailure { axiom: String, witnesses: Vec<String>, quotient: Box<Quotient> },
}

impl ColimitError {
    pub fn axiom(&self) -> Option<&str> {
        match self {
            ColimitError::EmptyCarrier => None,
            ColimitError::StructureFailure { axiom, .. } => Some(axiom),
        }
    }
}

struct Dsu {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu { parent: (0..n).collect(), size: vec![1; n] }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
    }
}

/// The set-level quotient: every pair with its class.
#[derive(Debug, Clone)]
pub struct Quotient {
    offsets: Vec<Vec<usize>>,
    pairs: Vec<Pair>,
    class_of: Vec<usize>,
    labels: Vec<String>,
    members: Vec<Vec<usize>>,
}

impl Quotient {
    pub fn pair_id(&self, o: usize, s: usize, e: usize) -> usize {
        self.offsets[o][s] + e
    }

    pub fn class(&self, o: usize, s: usize, e: usize) -> usize {
        self.class_of[self.pair_id(o, s, e)]
    }

    pub fn pairs(&self) -> &[Pair] {
        &self.pairs
    }

    pub fn class_of_pair(&self, id: usize) -> usize {
        self.class_of[id]
    }

    pub fn class_count(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn members(&self, class: usize) -> impl Iterator<Item = Pair> + '_ {
        self.members[class].iter().map(|&i| self.pairs[i])
    }

    /// The canonical representative of a class.
    pub fn representative(&self, class: usize) -> Pair {
        self.pairs[self.members[class][0]]
    }
}

/// A colimit that passed validation as a quantum event algebra.
#[derive(Debug, Clone)]
pub struct ColimitAlgebra {
    algebra: Arc<EventAlgebra>,
    quotient: Quotient,
}

impl ColimitAlgebra {
    pub fn algebra(&self) -> &Arc<EventAlgebra> {
        &self.algebra
    }

    pub fn quotient(&self) -> &Quotient {
        &self.quotient
    }

    /// `‖(section, element)‖` as an element of the algebra.
    pub fn class(&self, o: usize, s: usize, e: usize) -> usize {
        self.quotient.class(o, s, e)
    }
}

/// Colimit with class labels `‖section,element‖`.
pub fn build_colimit(p: &Presheaf) -> Result<ColimitAlgebra, ColimitError> {
    let site = p.site().clone();
    let label = |o: usize, s: usize, e: usize| format!("‖{},{}‖", p.sections(o)[s], site.algebra(o).name_of(e));
    build_colimit_with(p, &format!("L{}", p.name()), &[], &label)
}

/// Colimit with extra identifications and a custom pair label.
///
/// The order is generated by `‖(s, d1)‖ <= ‖(s, d2)‖` for `d1 <= d2`; it is
/// checked for transitivity, not closed.
pub fn build_colimit_with(
    p: &Presheaf,
    name: &str,
    extra: &[(Pair, Pair)],
    label: &dyn Fn(usize, usize, usize) -> String,
) -> Result<ColimitAlgebra, ColimitError> {
    let site = p.site();
    let n = site.objects().len();
    let mut offsets = vec![vec![]; n];
    let mut pairs = vec![];
    for (o, off) in offsets.iter_mut().enumerate() {
        for s in 0..p.sections(o).len() {
            off.push(pairs.len());
            pairs.extend(site.algebra(o).elements().map(|e| (o, s, e)));
        }
    }
    if pairs.is_empty() {
        return Err(ColimitError::EmptyCarrier);
    }
    let mut dsu = Dsu::new(pairs.len());
    for (a, arr) in site.arrows().iter().enumerate() {
        for s in 0..p.sections(arr.target).len() {
            let r = p.restrict(a, s);
            for (q, &uq) in arr.map.iter().enumerate() {
                dsu.union(offsets[arr.source][r] + q, offsets[arr.target][s] + uq);
            }
        }
    }
    for &((o1, s1, e1), (o2, s2, e2)) in extra {
        dsu.union(offsets[o1][s1] + e1, offsets[o2][s2] + e2);
    }
    let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
    for i in 0..pairs.len() {
        groups.entry(dsu.find(i)).or_default().push(i);
    }
    let key = |i: usize| {
        let (o, s, e) = pairs[i];
        (p.sections(o)[s].clone(), site.algebra(o).name_of(e).to_string(), site.object(o).name.clone())
    };
    let mut classes: Vec<(String, Vec<usize>)> = groups
        .into_values()
        .map(|mut m| {
            m.sort_by_cached_key(|&i| key(i));
            let (o, s, e) = pairs[m[0]];
            (label(o, s, e), m)
        })
        .collect();
    classes.sort_by(|a, b| a.0.cmp(&b.0));
    for i in 1..classes.len() {
        if classes[i].0 == classes[i - 1].0 {
            classes[i].0 = format!("{}#{}", classes[i].0, i);
        }
    }
    let mut class_of = vec![0; pairs.len()];
    for (c, (_, m)) in classes.iter().enumerate() {
        for &i in m {
            class_of[i] = c;
        }
    }
    let (labels, members): (Vec<String>, Vec<Vec<usize>>) = classes.into_iter().unzip();
    let quotient = Quotient { offsets, pairs, class_of, labels, members };
    structure(name, p, quotient)
}

fn failure(axiom: &str, witnesses: Vec<String>, quotient: Quotient) -> ColimitError {
    ColimitError::StructureFailure { axiom: axiom.to_string(), witnesses, quotient: Box::new(quotient) }
}

fn structure(name: &str, p: &Presheaf, q: Quotient) -> Result<ColimitAlgebra, ColimitError> {
    let site = p.site();
    let k = q.class_count();
    let mut ortho = vec![usize::MAX; k];
    for (i, &(o, s, e)) in q.pairs.iter().enumerate() {
        let c = q.class_of[i];
        let oc = q.class(o, s, site.algebra(o).ortho(e));
        if ortho[c] == usize::MAX {
            ortho[c] = oc;
        } else if ortho[c] != oc {
            let w = vec![q.labels[c].clone(), q.labels[ortho[c]].clone(), q.labels[oc].clone()];
            return Err(failure("ortho-well-defined", w, q));
        }
    }
    let ones: Vec<usize> = q.pairs.iter().map(|&(o, s, _)| q.class(o, s, site.algebra(o).one())).collect();
    if let Some(&other) = ones.iter().find(|&&c| c != ones[0]) {
        let w = vec![q.labels[ones[0]].clone(), q.labels[other].clone()];
        return Err(failure("unit", w, q));
    }
    let (o0, s0, _) = q.pairs[0];
    let zero = q.class(o0, s0, site.algebra(o0).zero());
    let words = k.div_ceil(64);
    let mut rel = vec![0u64; k * words];
    for o in 0..site.objects().len() {
        let a = site.algebra(o);
        for s in 0..p.sections(o).len() {
            for d1 in a.elements() {
                let c1 = q.class(o, s, d1);
                for d2 in a.elements().filter(|&d2| a.leq(d1, d2)) {
                    let c2 = q.class(o, s, d2);
                    rel[c1 * words + c2 / 64] |= 1 << (c2 % 64);
                }
            }
        }
    }
    let has = |rel: &[u64], i: usize, j: usize| rel[i * words + j / 64] >> (j % 64) & 1 == 1;
    for i in 0..k {
        for j in 0..k {
            if i != j && has(&rel, i, j) {
                for w in 0..words {
                    let missing = rel[j * words + w] & !rel[i * words + w];
                    if missing != 0 {
                        let l = w * 64 + missing.trailing_zeros() as usize;
                        let wit = vec![q.labels[i].clone(), q.labels[j].clone(), q.labels[l].clone()];
                        return Err(failure("order-transitivity", wit, q));
                    }
                }
            }
        }
    }
    let mut leq = vec![];
    for i in 0..k {
        for j in 0..k {
            if i != j && has(&rel, i, j) {
                leq.push((i, j));
            }
        }
    }
    let parts = AlgebraParts { name: name.to_string(), names: q.labels.clone(), leq, ortho, zero, one: ones[0] };
    match EventAlgebra::from_parts(parts) {
        Ok(alg) => Ok(ColimitAlgebra { algebra: Arc::new(alg), quotient: q }),
        Err(v) => Err(failure(v.axiom(), v.witnesses(), q)),
    }
}
