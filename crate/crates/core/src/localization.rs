//! Prelocalization systems (ideal subfunctors of `R(L)`), pullbacks of
//! covers, pasting maps and the cocycle conditions.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use thiserror::Error;

use crate::adjunction::{counit_over, CounitReport, HomPresheaf};
use crate::algebra::{AlgebraParts, AxiomViolation, EventAlgebra};
use crate::morphism::{check_conditions, enumerate_homomorphisms, MorphismKind};
use crate::site::{BooleanSite, Presheaf};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LocalizationError {
    #[error("section {1} over object {0} is not in the hom presheaf")]
    SectionNotInHomPresheaf(usize, usize),
    #[error("cover `{0}` is not monic")]
    NotMonic(String),
}

/// Sections reachable from `gens` by restriction, per object.
pub fn restriction_closure(p: &Presheaf, gens: &[(usize, usize)]) -> Vec<BTreeSet<usize>> {
    let site = p.site();
    let mut keep = vec![BTreeSet::new(); site.objects().len()];
    let mut work: Vec<(usize, usize)> = gens.to_vec();
    while let Some((o, s)) = work.pop() {
        if !keep[o].insert(s) {
            continue;
        }
        for &a in site.arrows_into(o) {
            work.push((site.arrow(a).source, p.restrict(a, s)));
        }
    }
    keep
}

/// A subfunctor of `R(L)` closed under precomposition.
#[derive(Debug, Clone)]
pub struct PrelocalizationSystem {
    base: Arc<HomPresheaf>,
    selected: Vec<BTreeSet<usize>>,
}

/// Smallest system containing the generators `(object, section)`.
pub fn generate_system(
    base: &Arc<HomPresheaf>,
    generators: &[(usize, usize)],
) -> Result<PrelocalizationSystem, LocalizationError> {
    for &(o, s) in generators {
        if o >= base.site().objects().len() || s >= base.section_count(o) {
            return Err(LocalizationError::SectionNotInHomPresheaf(o, s));
        }
    }
    Ok(PrelocalizationSystem { base: base.clone(), selected: restriction_closure(base.presheaf(), generators) })
}

impl PrelocalizationSystem {
    /// Arbitrary selection, not necessarily an ideal.
    pub fn from_selection(base: &Arc<HomPresheaf>, selected: Vec<BTreeSet<usize>>) -> Self {
        PrelocalizationSystem { base: base.clone(), selected }
    }

    pub fn base(&self) -> &Arc<HomPresheaf> {
        &self.base
    }

    pub fn selected(&self, o: usize) -> &BTreeSet<usize> {
        &self.selected[o]
    }

    pub fn is_subfunctor(&self) -> bool {
        self.selected.iter().enumerate().all(|(o, s)| s.iter().all(|&p| p < self.base.section_count(o)))
    }

    /// `ψ ∈ S(B)` and `v: B' -> B` imply `ψ ∘ v ∈ S(B')`.
    pub fn is_ideal(&self) -> bool {
        let site = self.base.site();
        let p = self.base.presheaf();
        site.arrows().iter().enumerate().all(|(a, arr)| {
            self.selected[arr.target].iter().all(|&s| self.selected[arr.source].contains(&p.restrict(a, s)))
        })
    }

    pub fn is_empty(&self) -> bool {
        self.selected.iter().all(BTreeSet::is_empty)
    }

    pub fn leq(&self, other: &Self) -> bool {
        self.selected.iter().zip(&other.selected).all(|(a, b)| a.is_subset(b))
    }

    pub fn union(&self, other: &Self) -> Self {
        let selected = self.selected.iter().zip(&other.selected).map(|(a, b)| a | b).collect();
        PrelocalizationSystem { base: self.base.clone(), selected }
    }

    pub fn intersection(&self, other: &Self) -> Self {
        let selected = self.selected.iter().zip(&other.selected).map(|(a, b)| a & b).collect();
        PrelocalizationSystem { base: self.base.clone(), selected }
    }

    /// All covers `(object, section)` in the system.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        self.selected.iter().enumerate().flat_map(|(o, s)| s.iter().map(move |&p| (o, p))).collect()
    }

    pub fn as_hom_presheaf(&self) -> HomPresheaf {
        self.base.restricted_to(&format!("S⊂{}", self.base.presheaf().name()), &self.selected)
    }

    pub fn cover_name(&self, (o, s): (usize, usize)) -> &str {
        &self.base.presheaf().sections(o)[s]
    }

    pub fn is_monic(&self, (o, s): (usize, usize)) -> bool {
        let m = self.base.section_map(o, s);
        let set: BTreeSet<&usize> = m.iter().collect();
        set.len() == m.len()
    }
}

pub fn minimal_system(base: &Arc<HomPresheaf>) -> PrelocalizationSystem {
    generate_system(base, &[]).unwrap()
}

pub fn maximal_system(base: &Arc<HomPresheaf>) -> PrelocalizationSystem {
    let gens: Vec<(usize, usize)> =
        (0..base.site().objects().len()).flat_map(|o| (0..base.section_count(o)).map(move |s| (o, s))).collect();
    generate_system(base, &gens).unwrap()
}

/// `A(B) ×_L A(B')` with its projections.
#[derive(Debug, Clone)]
pub struct Pullback {
    pub carrier: Result<Arc<EventAlgebra>, AxiomViolation>,
    /// `(x, y)` for each carrier element, in carrier order.
    pub pairs: Vec<(usize, usize)>,
    /// Universal property against cones from site objects.
    pub compatible: bool,
    pub witness: Option<String>,
}

impl Pullback {
    pub fn proj1(&self) -> Vec<usize> {
        self.pairs.iter().map(|p| p.0).collect()
    }

    pub fn proj2(&self) -> Vec<usize> {
        self.pairs.iter().map(|p| p.1).collect()
    }
}

/// Pullback of two covers of the system's base.
pub fn cover_pullback(base: &HomPresheaf, c1: (usize, usize), c2: (usize, usize)) -> Pullback {
    let site = base.site();
    pullback_of_maps(
        site,
        site.algebra(c1.0),
        base.section_map(c1.0, c1.1),
        site.algebra(c2.0),
        base.section_map(c2.0, c2.1),
        base.target(),
    )
}

/// Pullback of two maps into `l`, which need not be validated homomorphisms.
pub fn pullback_of_maps(
    site: &BooleanSite,
    a: &EventAlgebra,
    psi: &[usize],
    b: &EventAlgebra,
    phi: &[usize],
    l: &EventAlgebra,
) -> Pullback {
    let mut pairs: Vec<(usize, usize)> = vec![];
    for x in a.elements() {
        for y in b.elements() {
            if psi[x] == phi[y] {
                pairs.push((x, y));
            }
        }
    }
    let label = |&(x, y): &(usize, usize)| format!("({},{})", a.name_of(x), b.name_of(y));
    pairs.sort_by_key(label);
    let pos = |p: (usize, usize)| pairs.iter().position(|&q| q == p);
    let carrier = (|| {
        let zero = pos((a.zero(), b.zero())).ok_or(AxiomViolation::UnknownElement("(0,0)".into()))?;
        let one = pos((a.one(), b.one())).ok_or(AxiomViolation::UnknownElement("(1,1)".into()))?;
        let mut ortho = vec![];
        for &(x, y) in &pairs {
            ortho.push(pos((a.ortho(x), b.ortho(y))).ok_or_else(|| AxiomViolation::OrthoMissing(label(&(x, y))))?);
        }
        let mut leq = vec![];
        for (i, &(x1, y1)) in pairs.iter().enumerate() {
            for (j, &(x2, y2)) in pairs.iter().enumerate() {
                if i != j && a.leq(x1, x2) && b.leq(y1, y2) {
                    leq.push((i, j));
                }
            }
        }
        let names = pairs.iter().map(label).collect();
        EventAlgebra::from_parts(AlgebraParts { name: "pullback".into(), names, leq, ortho, zero, one }).map(Arc::new)
    })();
    let Ok(p) = &carrier else {
        let witness = carrier.as_ref().err().map(|e| format!("pullback is not an event algebra: {e}"));
        return Pullback { carrier, pairs, compatible: false, witness };
    };
    let a_arc = Arc::new(a.clone());
    let b_arc = Arc::new(b.clone());
    for o in 0..site.objects().len() {
        let t = site.algebra(o);
        let hs = enumerate_homomorphisms(t, &a_arc, MorphismKind::Quantum);
        let gs = enumerate_homomorphisms(t, &b_arc, MorphismKind::Quantum);
        for h in &hs {
            for g in &gs {
                if t.elements().any(|e| psi[h.apply(e)] != phi[g.apply(e)]) {
                    continue;
                }
                let u: Option<Vec<usize>> = t.elements().map(|e| pos((h.apply(e), g.apply(e)))).collect();
                let ok = u.as_ref().is_some_and(|u| check_conditions(t, p, u, MorphismKind::Quantum).is_ok());
                if !ok {
                    let witness = Some(format!(
                        "cone from {} via {} and {} does not factor",
                        site.object(o).name,
                        h.name(),
                        g.name()
                    ));
                    return Pullback { carrier, pairs, compatible: false, witness };
                }
            }
        }
    }
    let _ = l;
    Pullback { carrier, pairs, compatible: true, witness: None }
}

/// `Ω_{B,B'}`: the overlap of `A(B')` carried to `A(B)` through `L`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PastingMap {
    /// The cover whose coordinates are the result (`B`).
    pub to: (usize, usize),
    /// The cover whose coordinates are the input (`B'`).
    pub from: (usize, usize),
    pub forward: BTreeMap<usize, usize>,
    pub inverse: BTreeMap<usize, usize>,
}

impl PastingMap {
    pub fn apply(&self, y: usize) -> Option<usize> {
        self.forward.get(&y).copied()
    }

    pub fn domain(&self) -> impl Iterator<Item = usize> + '_ {
        self.forward.keys().copied()
    }
}

/// `Ω_{B,B'}` for monic covers `ψ_B` (`to`) and `ψ_B'` (`from`).
pub fn pasting_map(
    base: &HomPresheaf,
    to: (usize, usize),
    from: (usize, usize),
) -> Result<PastingMap, LocalizationError> {
    let (pb, pc) = (base.section_map(to.0, to.1), base.section_map(from.0, from.1));
    for (c, m) in [(to, pb), (from, pc)] {
        let set: BTreeSet<&usize> = m.iter().collect();
        if set.len() != m.len() {
            return Err(LocalizationError::NotMonic(base.presheaf().sections(c.0)[c.1].clone()));
        }
    }
    let mut forward = BTreeMap::new();
    let mut inverse = BTreeMap::new();
    for (y, &l) in pc.iter().enumerate() {
        if let Some(x) = pb.iter().position(|&k| k == l) {
            forward.insert(y, x);
            inverse.insert(x, y);
        }
    }
    Ok(PastingMap { to, from, forward, inverse })
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CocycleReport {
    pub covers: usize,
    pub identity: bool,
    pub inverse: bool,
    pub triple: bool,
    pub triples_checked: usize,
    pub failures: Vec<String>,
}

impl CocycleReport {
    pub fn holds(&self) -> bool {
        self.identity && self.inverse && self.triple
    }
}

/// Identity, inverse and triple-composition laws on the monic covers given.
pub fn cocycle_suite(base: &HomPresheaf, covers: &[(usize, usize)]) -> Result<CocycleReport, LocalizationError> {
    let name = |c: (usize, usize)| base.presheaf().sections(c.0)[c.1].clone();
    let n = covers.len();
    let mut maps = vec![];
    for &b in covers {
        let row: Result<Vec<PastingMap>, _> = covers.iter().map(|&c| pasting_map(base, b, c)).collect();
        maps.push(row?);
    }
    let mut rep = CocycleReport { covers: n, identity: true, inverse: true, triple: true, ..Default::default() };
    for i in 0..n {
        let m = &maps[i][i];
        let size = base.site().algebra(covers[i].0).len();
        if m.forward.len() != size || m.forward.iter().any(|(y, x)| x != y) {
            rep.identity = false;
            rep.failures.push(format!("Ω({0},{0}) is not the identity", name(covers[i])));
        }
        for j in 0..n {
            let (bc, cb) = (&maps[i][j], &maps[j][i]);
            if bc.forward != cb.inverse {
                rep.inverse = false;
                rep.failures.push(format!("Ω({},{}) is not inverse to Ω({1},{0})", name(covers[i]), name(covers[j])));
            }
            for k in 0..n {
                let (bb, cc) = (&maps[i][j], &maps[j][k]);
                let direct = &maps[i][k];
                for z in cc.domain() {
                    let y = cc.apply(z).unwrap();
                    let Some(x) = bb.apply(y) else { continue };
                    rep.triples_checked += 1;
                    if direct.apply(z) != Some(x) {
                        rep.triple = false;
                        rep.failures.push(format!(
                            "Ω({a},{b})∘Ω({b},{c}) differs from Ω({a},{c})",
                            a = name(covers[i]),
                            b = name(covers[j]),
                            c = name(covers[k])
                        ));
                    }
                }
            }
        }
    }
    Ok(rep)
}

#[derive(Debug, Clone)]
pub struct LocalizationReport {
    /// `(cover, cover, compatible)`
    pub pairwise: Vec<(String, String, bool)>,
    pub cocycles: CocycleReport,
    pub counit: Option<CounitReport>,
    pub counit_error: Option<String>,
}

impl LocalizationReport {
    pub fn compatible(&self) -> bool {
        self.pairwise.iter().all(|p| p.2)
    }

    pub fn counit_iso(&self) -> bool {
        self.counit.as_ref().is_some_and(CounitReport::is_iso)
    }

    pub fn holds(&self) -> bool {
        self.compatible() && self.cocycles.holds() && self.counit_iso()
    }
}

pub fn is_localization_system(s: &PrelocalizationSystem) -> LocalizationReport {
    let covers = s.covers();
    let base = s.base();
    let mut pairwise = vec![];
    for &c1 in &covers {
        for &c2 in &covers {
            let pb = cover_pullback(base, c1, c2);
            pairwise.push((s.cover_name(c1).to_string(), s.cover_name(c2).to_string(), pb.compatible));
        }
    }
    let monic: Vec<(usize, usize)> = covers.iter().copied().filter(|&c| s.is_monic(c)).collect();
    let cocycles = cocycle_suite(base, &monic).expect("monic covers");
    let (counit, counit_error) = if s.is_empty() {
        (None, Some("empty system".to_string()))
    } else {
        match counit_over(&s.as_hom_presheaf()) {
            Ok(c) => (Some(c), None),
            Err(e) => (None, Some(e.to_string())),
        }
    };
    LocalizationReport { pairwise, cocycles, counit, counit_error }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adjunction::hom_presheaf;
    use crate::corpus::load;
    use crate::site::default_site;

    fn mo2_base() -> Arc<HomPresheaf> {
        let l = load("mo2.qea");
        Arc::new(hom_presheaf(&Arc::new(default_site(&l)), &l))
    }

    fn inclusion_gens(base: &HomPresheaf) -> Vec<(usize, usize)> {
        let site = base.site();
        (0..site.objects().len())
            .filter_map(|o| base.find_section(o, site.object(o).embedding.as_ref().unwrap()).map(|s| (o, s)))
            .collect()
    }

    #[test]
    fn generated_systems() {
        let base = mo2_base();
        let s = generate_system(&base, &inclusion_gens(&base)[..2]).unwrap();
        assert!(s.is_ideal() && s.is_subfunctor());
        assert_eq!(s.covers().len(), 3);
        assert!(minimal_system(&base).is_empty());
        let max = maximal_system(&base);
        assert_eq!(max.covers().len(), base.presheaf().total_sections());
        let again = generate_system(&base, &s.covers()).unwrap();
        assert_eq!(again.covers(), s.covers());
        assert!(matches!(generate_system(&base, &[(0, 999)]), Err(LocalizationError::SectionNotInHomPresheaf(0, 999))));
    }

    #[test]
    fn block_pullback_is_overlap() {
        let base = mo2_base();
        let g = inclusion_gens(&base);
        let pb = cover_pullback(&base, g[0], g[1]);
        assert_eq!(pb.carrier.as_ref().unwrap().len(), 2);
        assert!(pb.compatible);
        let diag = cover_pullback(&base, g[0], g[0]);
        assert_eq!(diag.pairs.iter().filter(|(x, y)| x == y).count(), 4);
        let m = pasting_map(&base, g[0], g[1]).unwrap();
        assert_eq!(m.forward.len(), 2);
    }

    #[test]
    fn corrupted_cover_is_incompatible() {
        let base = mo2_base();
        let site = base.site();
        let g = inclusion_gens(&base);
        let a = site.algebra(g[0].0);
        let good = base.section_map(g[0].0, g[0].1);
        let mut bad = good.to_vec();
        let l = base.target();
        let (x, y) = (a.index_of("a").unwrap(), l.index_of("b").unwrap());
        bad[x] = y;
        let pb = pullback_of_maps(site, a, good, a, &bad, l);
        assert!(!pb.compatible);
        assert!(pb.witness.is_some());
    }

    #[test]
    fn localization_verdicts() {
        let base = mo2_base();
        let g = inclusion_gens(&base);
        let both = generate_system(&base, &g).unwrap();
        let rep = is_localization_system(&both);
        assert!(rep.holds(), "{:?}", rep.cocycles);
        let one = generate_system(&base, &g[..1]).unwrap();
        let rep = is_localization_system(&one);
        assert!(!rep.counit.as_ref().unwrap().surjective);
    }
}
