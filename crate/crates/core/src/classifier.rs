//! Subobjects, the subobject presheaf `Θ(A(-))`, the truth-values object
//! `Ω = Θ(A(-)) ⊗ A`, characteristic arrows and truth values.

use std::collections::BTreeSet;
use std::sync::Arc;

use thiserror::Error;

use crate::adjunction::{counit_over, cover_system, AdjunctionError, CounitReport, HomPresheaf};
use crate::algebra::{two, ElementNotFound, EventAlgebra};
use crate::blocks::{closed_under_orthogonal_joins, inclusion, subset_label};
use crate::colimit::{build_colimit_with, ColimitError, Pair, Quotient};
use crate::localization::{pasting_map, LocalizationError};
use crate::morphism::{check_conditions, enumerate_homomorphisms, AlgebraMorphism, MorphismKind};
use crate::site::{single_object_site, BooleanSite, Presheaf};

#[derive(Debug, Clone, Error)]
pub enum ClassifierError {
    #[error("context `{0}` is not Boolean")]
    NotBoolean(String),
    #[error("{0} is not a subobject of `{1}`")]
    NotSubobject(String, String),
    #[error(transparent)]
    ElementNotFound(#[from] ElementNotFound),
    #[error("pullback {0} is not a subalgebra")]
    PullbackNotAlgebra(String),
    #[error("counit is not an isomorphism")]
    CounitNotIso,
    #[error("characteristic arrow is ill-defined: {0} and {1} are equal in L but not in Ω")]
    IllDefined(String, String),
    #[error("characteristic arrow is not a homomorphism: {0}")]
    NotHomomorphism(String),
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error(transparent)]
    Omega(#[from] ColimitError),
    #[error(transparent)]
    Adjunction(#[from] AdjunctionError),
}

/// A subobject, represented by its image: a sorted element set closed under
/// ortho and orthogonal joins.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Subobject {
    pub elements: Vec<usize>,
    pub label: String,
}

impl Subobject {
    pub fn contains(&self, x: usize) -> bool {
        self.elements.binary_search(&x).is_ok()
    }

    pub fn is_whole(&self, of: &EventAlgebra) -> bool {
        self.elements.len() == of.len()
    }

    pub fn inclusion(&self, of: &Arc<EventAlgebra>) -> AlgebraMorphism {
        inclusion(of, &self.elements, &self.label)
    }
}

pub fn is_subobject(of: &EventAlgebra, elems: &[usize]) -> bool {
    let set: BTreeSet<usize> = elems.iter().copied().collect();
    let sorted: Vec<usize> = set.iter().copied().collect();
    set.contains(&of.zero())
        && set.contains(&of.one())
        && sorted.iter().all(|&x| set.contains(&of.ortho(x)))
        && closed_under_orthogonal_joins(of, &sorted)
}

/// Canonical subobject on `elems`.
pub fn subobject(of: &EventAlgebra, elems: &[usize]) -> Result<Subobject, ClassifierError> {
    let mut elements = elems.to_vec();
    elements.sort_unstable();
    elements.dedup();
    if !is_subobject(of, &elements) {
        let names: Vec<&str> = elements.iter().map(|&x| of.name_of(x)).collect();
        return Err(ClassifierError::NotSubobject(format!("{{{}}}", names.join(",")), of.name().to_string()));
    }
    let label = if elements.len() == of.len() { "id".to_string() } else { subset_label(of, &elements) };
    Ok(Subobject { elements, label })
}

/// All subobjects, ordered by size then element set.
pub fn subobjects(of: &EventAlgebra) -> Vec<Subobject> {
    let pairs: Vec<usize> = of.elements().filter(|&x| x < of.ortho(x) && x != of.zero() && x != of.one()).collect();
    let mut out = vec![];
    let base = [of.zero(), of.one()];
    let choose = |mask: u64| {
        let mut e: Vec<usize> = base.to_vec();
        for (i, &x) in pairs.iter().enumerate() {
            if mask >> i & 1 == 1 {
                e.push(x);
                e.push(of.ortho(x));
            }
        }
        e.sort_unstable();
        e
    };
    if pairs.len() <= 24 {
        for mask in 0..1u64 << pairs.len() {
            let e = choose(mask);
            if closed_under_orthogonal_joins(of, &e) {
                out.push(subobject(of, &e).unwrap());
            }
        }
    } else {
        // closures of single pairs and their unions, iterated
        let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
        let mut work = vec![of.subalgebra_closure(&base)];
        while let Some(s) = work.pop() {
            if !seen.insert(s.clone()) {
                continue;
            }
            for &x in &pairs {
                if s.binary_search(&x).is_err() {
                    let mut seeds = s.clone();
                    seeds.push(x);
                    work.push(of.subalgebra_closure(&seeds));
                }
            }
        }
        out = seen.into_iter().map(|e| subobject(of, &e).unwrap()).collect();
    }
    out.sort_by(|a, b| a.elements.len().cmp(&b.elements.len()).then_with(|| a.elements.cmp(&b.elements)));
    out
}

/// `l ∗ e`: the elements of `A(B)` that `e` sends into `l`.
pub fn pullback_subobject(l: &Subobject, e: &[usize], ab: &EventAlgebra) -> Result<Subobject, ClassifierError> {
    let elems: Vec<usize> = ab.elements().filter(|&x| l.contains(e[x])).collect();
    subobject(ab, &elems).map_err(|_| ClassifierError::PullbackNotAlgebra(format!("{}∗{}", l.label, ab.name())))
}

/// `Θ(A(-))` over a site: subobjects restricted by pullback.
#[derive(Debug, Clone)]
pub struct SubobjectPresheaf {
    presheaf: Arc<Presheaf>,
    subs: Vec<Vec<Subobject>>,
}

impl SubobjectPresheaf {
    pub fn new(site: &Arc<BooleanSite>) -> Result<Self, ClassifierError> {
        let n = site.objects().len();
        let subs: Vec<Vec<Subobject>> = (0..n).map(|o| subobjects(site.algebra(o))).collect();
        let mut restriction = vec![];
        for arr in site.arrows() {
            let src = site.algebra(arr.source);
            let mut row = vec![];
            for phi in &subs[arr.target] {
                let pb = pullback_subobject(phi, &arr.map, src)?;
                row.push(
                    subs[arr.source].iter().position(|s| s.elements == pb.elements).expect("subobjects are complete"),
                );
            }
            restriction.push(row);
        }
        let names = subs.iter().map(|ss| ss.iter().map(|s| s.label.clone()).collect()).collect();
        let presheaf = Presheaf::new("Θ(A)", site, names, restriction).map_err(AdjunctionError::from)?;
        Ok(SubobjectPresheaf { presheaf: Arc::new(presheaf), subs })
    }

    pub fn presheaf(&self) -> &Arc<Presheaf> {
        &self.presheaf
    }

    pub fn subobjects(&self, o: usize) -> &[Subobject] {
        &self.subs[o]
    }

    pub fn find(&self, o: usize, elems: &[usize]) -> Option<usize> {
        self.subs[o].iter().position(|s| s.elements == elems)
    }
}

/// The classes of `Θ(A(-)) ⊗ A` with the truth region, whether or not
/// they carry an event algebra structure.
#[derive(Debug, Clone)]
pub struct OmegaClasses {
    theta: SubobjectPresheaf,
    quotient: Quotient,
    truth: Vec<bool>,
    coherent: bool,
    true_class: usize,
    structure: Result<Arc<EventAlgebra>, ColimitError>,
}

pub fn omega_classes(site: &Arc<BooleanSite>) -> Result<OmegaClasses, ClassifierError> {
    let theta = SubobjectPresheaf::new(site)?;
    let p = theta.presheaf().clone();
    let mut tops: Vec<Pair> = vec![];
    let mut bottoms: Vec<Pair> = vec![];
    for o in 0..site.objects().len() {
        let a = site.algebra(o);
        for s in 0..p.sections(o).len() {
            tops.push((o, s, a.one()));
            bottoms.push((o, s, a.zero()));
        }
    }
    let mut extra = vec![];
    for group in [&tops, &bottoms] {
        extra.extend(group.iter().skip(1).map(|&q| (group[0], q)));
    }
    let label = |o: usize, s: usize, e: usize| {
        let a = site.algebra(o);
        if e == a.one() {
            "true".to_string()
        } else if e == a.zero() {
            "0".to_string()
        } else {
            format!("{}⊗{}", p.sections(o)[s], a.name_of(e))
        }
    };
    let (quotient, structure) = match build_colimit_with(&p, "Ω", &extra, &label) {
        Ok(c) => (c.quotient().clone(), Ok(c.algebra().clone())),
        Err(ColimitError::StructureFailure { axiom, witnesses, quotient }) => {
            let q = (*quotient).clone();
            (q, Err(ColimitError::StructureFailure { axiom, witnesses, quotient }))
        }
        Err(e) => return Err(e.into()),
    };
    let mut truth = vec![None; quotient.class_count()];
    let mut coherent = true;
    for (i, &(o, s, e)) in quotient.pairs().iter().enumerate() {
        let flag = theta.subs[o][s].contains(e);
        let c = quotient.class_of_pair(i);
        match truth[c] {
            None => truth[c] = Some(flag),
            Some(f) => coherent &= f == flag,
        }
    }
    let truth = truth.into_iter().map(|t| t.unwrap_or(false)).collect();
    let true_class = quotient.class(tops[0].0, tops[0].1, tops[0].2);
    Ok(OmegaClasses { theta, quotient, truth, coherent, true_class, structure })
}

impl OmegaClasses {
    pub fn theta(&self) -> &SubobjectPresheaf {
        &self.theta
    }

    pub fn quotient(&self) -> &Quotient {
        &self.quotient
    }

    pub fn site(&self) -> &Arc<BooleanSite> {
        self.theta.presheaf.site()
    }

    pub fn len(&self) -> usize {
        self.quotient.class_count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn label(&self, class: usize) -> &str {
        &self.quotient.labels()[class]
    }

    /// `‖id ⊗ 1‖`.
    pub fn true_class(&self) -> usize {
        self.true_class
    }

    /// Classes whose members `φ ⊗ b` have `b ∈ Dom φ`.
    pub fn truth_region(&self) -> &[bool] {
        &self.truth
    }

    pub fn is_true(&self, class: usize) -> bool {
        self.truth[class]
    }

    /// Membership in `Dom φ` is constant on every class.
    pub fn truth_coherent(&self) -> bool {
        self.coherent
    }

    /// `‖φ ⊗ q‖` for section `s` over object `o`.
    pub fn tensor(&self, o: usize, s: usize, q: usize) -> usize {
        self.quotient.class(o, s, q)
    }

    /// The event algebra on the classes, or why there is none.
    pub fn structure(&self) -> Result<&Arc<EventAlgebra>, &ColimitError> {
        self.structure.as_ref()
    }
}

/// The truth-values object: classes that validated as an event algebra.
#[derive(Debug, Clone)]
pub struct OmegaAlgebra {
    classes: OmegaClasses,
    algebra: Arc<EventAlgebra>,
}

pub fn build_omega(site: &Arc<BooleanSite>) -> Result<OmegaAlgebra, ClassifierError> {
    let classes = omega_classes(site)?;
    let algebra = classes.structure.clone()?;
    Ok(OmegaAlgebra { classes, algebra })
}

impl OmegaAlgebra {
    pub fn algebra(&self) -> &Arc<EventAlgebra> {
        &self.algebra
    }

    pub fn classes(&self) -> &OmegaClasses {
        &self.classes
    }

    pub fn theta(&self) -> &SubobjectPresheaf {
        &self.classes.theta
    }

    pub fn site(&self) -> &Arc<BooleanSite> {
        self.classes.site()
    }

    pub fn true_class(&self) -> usize {
        self.classes.true_class
    }

    pub fn is_true(&self, class: usize) -> bool {
        self.classes.truth[class]
    }

    pub fn truth_coherent(&self) -> bool {
        self.classes.coherent
    }

    pub fn tensor(&self, o: usize, s: usize, q: usize) -> usize {
        self.classes.tensor(o, s, q)
    }

    /// Same classes and truth region over a different algebra structure.
    pub fn with_algebra(&self, algebra: EventAlgebra) -> OmegaAlgebra {
        OmegaAlgebra { algebra: Arc::new(algebra), classes: self.classes.clone() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruthValue {
    pub class: usize,
    pub label: String,
    pub is_true: bool,
}

impl std::fmt::Display for TruthValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_true {
            f.write_str("true")
        } else {
            f.write_str(&self.label)
        }
    }
}

/// `‖φ ⊗ b‖` over site object `o`.
pub fn truth_value(omega: &OmegaClasses, o: usize, phi: &Subobject, b: usize) -> Result<TruthValue, ClassifierError> {
    let a = omega.site().algebra(o);
    if b >= a.len() {
        return Err(ElementNotFound(b.to_string()).into());
    }
    let s = omega
        .theta
        .find(o, &phi.elements)
        .ok_or_else(|| ClassifierError::NotSubobject(phi.label.clone(), a.name().to_string()))?;
    let class = omega.tensor(o, s, b);
    Ok(TruthValue { class, label: omega.label(class).to_string(), is_true: omega.is_true(class) })
}

/// Truth of `φ ⊗ Ω_{B,C}(c)` read through the pasting map between monic
/// covers `to` (over `B`, where `φ` lives) and `from` (over `C`).
pub fn truth_via_pasting(
    base: &HomPresheaf,
    to: (usize, usize),
    from: (usize, usize),
    phi: &Subobject,
    c: usize,
) -> Result<bool, ClassifierError> {
    let m = pasting_map(base, to, from).map_err(|e| match e {
        LocalizationError::NotMonic(n) => ClassifierError::NotApplicable(format!("cover {n} is not monic")),
        other => ClassifierError::NotApplicable(other.to_string()),
    })?;
    Ok(m.apply(c).is_some_and(|x| phi.contains(x)))
}

/// `φ_l: L -> Ω`, `‖(e, b)‖ ↦ ‖(l ∗ e) ⊗ b‖`, over the counit colimit.
pub fn characteristic_arrow(
    omega: &OmegaAlgebra,
    covers: &HomPresheaf,
    counit: &CounitReport,
    l: &Subobject,
) -> Result<Vec<usize>, ClassifierError> {
    if !counit.is_iso() {
        return Err(ClassifierError::CounitNotIso);
    }
    let site = covers.site();
    let target = covers.target();
    let q = counit.colimit.quotient();
    let mut map = vec![usize::MAX; target.len()];
    let mut witness: Vec<Pair> = vec![(0, 0, 0); target.len()];
    let mut pulled: Vec<Vec<Option<usize>>> =
        (0..site.objects().len()).map(|o| vec![None; covers.section_count(o)]).collect();
    for &(o, s, e) in q.pairs() {
        let x = counit.map[q.class(o, s, e)];
        let phi = match pulled[o][s] {
            Some(i) => i,
            None => {
                let pb = pullback_subobject(l, covers.section_map(o, s), site.algebra(o))?;
                let i = omega.theta().find(o, &pb.elements).expect("subobjects are complete");
                pulled[o][s] = Some(i);
                i
            }
        };
        let v = omega.tensor(o, phi, e);
        if map[x] == usize::MAX {
            map[x] = v;
            witness[x] = (o, s, e);
        } else if map[x] != v {
            let show =
                |(o, s, e): Pair| format!("({}, {})", covers.presheaf().sections(o)[s], site.algebra(o).name_of(e));
            return Err(ClassifierError::IllDefined(show(witness[x]), show((o, s, e))));
        }
    }
    check_conditions(target, &omega.algebra, &map, MorphismKind::Quantum)
        .map_err(|v| ClassifierError::NotHomomorphism(format!("φ_{}: {v}", l.label)))?;
    Ok(map)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SquareVerdict {
    pub subobject: String,
    pub arrow: Option<Vec<usize>>,
    /// `φ_l ∘ l` lands in the truth region.
    pub commutes: bool,
    /// Preimage of true under `φ_l` is exactly `l`.
    pub preimage_is_l: bool,
    /// Every cone from a site object factors through `l`.
    pub pullback: bool,
    pub cones_checked: usize,
    pub witness: Option<String>,
}

impl SquareVerdict {
    pub fn holds(&self) -> bool {
        self.arrow.is_some() && self.commutes && self.preimage_is_l && self.pullback
    }
}

#[derive(Debug, Clone)]
pub struct ClassifierReport {
    pub subobject_count: usize,
    pub hom_count: usize,
    /// Arrows `L -> Ω` equal to the characteristic arrow of their own
    /// pullback of true.
    pub classifying: Vec<Vec<usize>>,
    pub squares: Vec<SquareVerdict>,
    pub injective: bool,
    pub surjective: bool,
    /// `ϖ_L ∘ (pullback of T along -)` is the identity on classifying arrows.
    pub round_trip: bool,
    pub truth_coherent: bool,
}

impl ClassifierReport {
    pub fn holds(&self) -> bool {
        self.truth_coherent
            && self.injective
            && self.surjective
            && self.round_trip
            && self.subobject_count == self.classifying.len()
            && self.squares.iter().all(SquareVerdict::holds)
    }

    pub fn witness(&self) -> Option<String> {
        self.squares.iter().find_map(|s| s.witness.clone())
    }
}

pub fn classifier_check(l: &Arc<EventAlgebra>, site: &Arc<BooleanSite>) -> Result<ClassifierReport, ClassifierError> {
    let omega = build_omega(site)?;
    classifier_check_with(l, &omega)
}

/// Classifier check against a given `Ω`, which may have been tampered with.
pub fn classifier_check_with(l: &Arc<EventAlgebra>, omega: &OmegaAlgebra) -> Result<ClassifierReport, ClassifierError> {
    let site = omega.site();
    let covers = cover_system(site, l);
    let counit = counit_over(&covers)?;
    if !counit.is_iso() {
        return Err(ClassifierError::CounitNotIso);
    }
    let subs = subobjects(l);
    let mut squares = vec![];
    let mut arrows: Vec<Option<Vec<usize>>> = vec![];
    let site_homs: Vec<Vec<AlgebraMorphism>> =
        (0..site.objects().len()).map(|d| enumerate_homomorphisms(site.algebra(d), l, MorphismKind::Quantum)).collect();
    for sub in &subs {
        let mut v = SquareVerdict {
            subobject: sub.label.clone(),
            arrow: None,
            commutes: false,
            preimage_is_l: false,
            pullback: false,
            cones_checked: 0,
            witness: None,
        };
        match characteristic_arrow(omega, &covers, &counit, sub) {
            Err(e) => v.witness = Some(e.to_string()),
            Ok(map) => {
                v.commutes = sub.elements.iter().all(|&x| omega.is_true(map[x]));
                let pre: Vec<usize> = l.elements().filter(|&x| omega.is_true(map[x])).collect();
                v.preimage_is_l = pre == sub.elements;
                if !v.commutes || !v.preimage_is_l {
                    v.witness = Some(format!("preimage of true under φ_{} is not {}", sub.label, sub.label));
                }
                v.pullback = true;
                'cones: for (d, homs) in site_homs.iter().enumerate() {
                    for h in homs {
                        if !site.algebra(d).elements().all(|t| omega.is_true(map[h.apply(t)])) {
                            continue;
                        }
                        v.cones_checked += 1;
                        let factors = h.image().iter().all(|&x| sub.contains(x));
                        if !factors {
                            v.pullback = false;
                            v.witness = Some(format!(
                                "cone {} from {} does not factor through {}",
                                h.name(),
                                site.object(d).name,
                                sub.label
                            ));
                            break 'cones;
                        }
                    }
                }
                v.arrow = Some(map.clone());
            }
        }
        arrows.push(v.arrow.clone());
        squares.push(v);
    }
    let distinct: BTreeSet<&Vec<usize>> = arrows.iter().flatten().collect();
    let injective = arrows.iter().all(Option::is_some) && distinct.len() == subs.len();
    let homs = enumerate_homomorphisms(l, &omega.algebra, MorphismKind::Quantum);
    let mut classifying = vec![];
    let mut round_trip = true;
    for h in &homs {
        let pre: Vec<usize> = l.elements().filter(|&x| omega.is_true(h.apply(x))).collect();
        let Some(i) = subs.iter().position(|s| s.elements == pre) else { continue };
        if arrows[i].as_deref() == Some(h.map()) {
            classifying.push(h.map().to_vec());
        }
    }
    for (i, a) in arrows.iter().enumerate() {
        if let Some(a) = a {
            let pre: Vec<usize> = l.elements().filter(|&x| omega.is_true(a[x])).collect();
            round_trip &= pre == subs[i].elements;
        }
    }
    let surjective = classifying.iter().all(|c| distinct.contains(c)) && classifying.len() == distinct.len();
    Ok(ClassifierReport {
        subobject_count: subs.len(),
        hom_count: homs.len(),
        classifying,
        squares,
        injective,
        surjective,
        round_trip,
        truth_coherent: omega.truth_coherent(),
    })
}

/// The unit of `Θ(A(-))` into `Ω` and whether the classifier check passes.
#[derive(Debug, Clone)]
pub struct UnitPropositionReport {
    /// `(object, injective, surjective)`
    pub components: Vec<(String, bool, bool)>,
    pub unit_iso: bool,
    pub classifier_holds: bool,
}

pub fn unit_proposition_check(
    l: &Arc<EventAlgebra>,
    site: &Arc<BooleanSite>,
) -> Result<UnitPropositionReport, ClassifierError> {
    let omega = build_omega(site)?;
    let mut components = vec![];
    for o in 0..site.objects().len() {
        let a = site.algebra(o);
        let maps: Vec<Vec<usize>> =
            (0..omega.theta().subs[o].len()).map(|s| a.elements().map(|e| omega.tensor(o, s, e)).collect()).collect();
        let distinct: BTreeSet<&Vec<usize>> = maps.iter().collect();
        let all = enumerate_homomorphisms(a, &omega.algebra, MorphismKind::Quantum);
        let surjective = all.iter().all(|h| distinct.contains(&h.map().to_vec()));
        components.push((site.object(o).name.clone(), distinct.len() == maps.len(), surjective));
    }
    let unit_iso = components.iter().all(|c| c.1 && c.2);
    let classifier_holds = classifier_check_with(l, &omega).map(|r| r.holds()).unwrap_or(false);
    Ok(UnitPropositionReport { components, unit_iso, classifier_holds })
}

/// Truth criterion over every `(φ, b)` of a site, and its pasting-map form
/// over every pair of monic covers of `L`.
#[derive(Debug, Clone, Default)]
pub struct TruthSweep {
    pub checked: usize,
    pub mismatches: Vec<String>,
    pub pasting_checked: usize,
    pub pasting_mismatches: Vec<String>,
}

impl TruthSweep {
    pub fn holds(&self) -> bool {
        self.mismatches.is_empty() && self.pasting_mismatches.is_empty()
    }
}

pub fn truth_sweep(l: &Arc<EventAlgebra>, site: &Arc<BooleanSite>) -> Result<TruthSweep, ClassifierError> {
    let omega = omega_classes(site)?;
    let mut sweep = TruthSweep::default();
    for o in 0..site.objects().len() {
        let a = site.algebra(o);
        for phi in omega.theta.subobjects(o) {
            for b in a.elements() {
                sweep.checked += 1;
                let t = truth_value(&omega, o, phi, b)?;
                if t.is_true != phi.contains(b) {
                    sweep.mismatches.push(format!("{}⊗{} over {}", phi.label, a.name_of(b), site.object(o).name));
                }
            }
        }
    }
    let covers = cover_system(site, l);
    let monic: Vec<(usize, usize)> = (0..site.objects().len())
        .flat_map(|o| (0..covers.section_count(o)).map(move |s| (o, s)))
        .filter(|&(o, s)| {
            let m = covers.section_map(o, s);
            m.iter().collect::<BTreeSet<_>>().len() == m.len()
        })
        .collect();
    for &to in &monic {
        for &from in &monic {
            let m = pasting_map(&covers, to, from).expect("monic covers");
            for phi in omega.theta.subobjects(to.0) {
                for c in m.domain() {
                    sweep.pasting_checked += 1;
                    let direct = truth_value(&omega, to.0, phi, m.apply(c).unwrap())?.is_true;
                    if truth_via_pasting(&covers, to, from, phi, c)? != direct {
                        sweep.pasting_mismatches.push(format!(
                            "{} via Ω({},{})",
                            site.algebra(from.0).name_of(c),
                            covers.presheaf().sections(to.0)[to.1],
                            covers.presheaf().sections(from.0)[from.1]
                        ));
                    }
                }
            }
        }
    }
    Ok(sweep)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Reduction {
    /// The ultrafilter at `atom`, as a map `context -> 2` (`0` or `1`).
    Ultrafilter {
        atom: String,
        valuation: Vec<(String, bool)>,
    },
    NotApplicable(String),
}

#[derive(Debug, Clone)]
pub struct ScenarioReport {
    pub proposition: String,
    pub truth: TruthValue,
    /// `(¬p ∨ q, is maximal)`
    pub implication: Option<(String, bool)>,
    pub reduction: Reduction,
}

/// Valuation of `p` (and `p → q`) in a Boolean context measured by an
/// apparatus subobject.
pub fn valuate_scenario(
    context: &Arc<EventAlgebra>,
    apparatus: &[usize],
    p: usize,
    q: Option<usize>,
) -> Result<ScenarioReport, ClassifierError> {
    if !context.is_boolean() {
        return Err(ClassifierError::NotBoolean(context.name().to_string()));
    }
    let app = subobject(context, apparatus)?;
    let site =
        Arc::new(single_object_site(context).map_err(|_| ClassifierError::NotBoolean(context.name().to_string()))?);
    let omega = build_omega(&site)?;
    let truth = truth_value(omega.classes(), 0, &app, p)?;
    let implication = q.map(|q| {
        let imp = context.join(context.ortho(p), q).expect("Boolean context has joins");
        (context.name_of(imp).to_string(), imp == context.one())
    });
    let generators: Vec<usize> = context
        .atoms()
        .iter()
        .copied()
        .filter(|&a| app.contains(a) && context.subalgebra_closure(&[a]) == app.elements)
        .collect();
    let reduction = match generators.iter().find(|&&a| context.leq(a, p)).or(generators.first()) {
        None => Reduction::NotApplicable(format!("{} is not generated by an atom", app.label)),
        Some(&atom) => {
            let two = Arc::new(two());
            let map: Vec<usize> =
                context.elements().map(|x| if context.leq(atom, x) { two.one() } else { two.zero() }).collect();
            debug_assert!(check_conditions(context, &two, &map, MorphismKind::Quantum).is_ok());
            Reduction::Ultrafilter {
                atom: context.name_of(atom).to_string(),
                valuation: context.elements().map(|x| (context.name_of(x).to_string(), map[x] == two.one())).collect(),
            }
        }
    };
    Ok(ScenarioReport { proposition: context.name_of(p).to_string(), truth, implication, reduction })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::load;
    use crate::site::default_site;

    fn elems(a: &EventAlgebra, names: &[&str]) -> Vec<usize> {
        let mut v: Vec<usize> = names.iter().map(|n| a.index_of(n).unwrap()).collect();
        v.sort_unstable();
        v
    }

    #[test]
    fn subobject_counts() {
        assert_eq!(subobjects(&load("two.qea")).len(), 1);
        assert_eq!(subobjects(&load("two2.qea")).len(), 2);
        assert_eq!(subobjects(&load("mo2.qea")).len(), 4);
        assert_eq!(subobjects(&load("two3.qea")).len(), 5);
    }

    #[test]
    fn pullbacks_of_blocks() {
        let l = load("mo2.qea");
        let ba = subobject(&l, &elems(&l, &["0", "a", "a'", "1"])).unwrap();
        let bb = elems(&l, &["0", "b", "b'", "1"]);
        let sub_b = l.induced(&bb, "B").unwrap();
        let e: Vec<usize> = bb.clone();
        let pb = pullback_subobject(&ba, &e, &sub_b).unwrap();
        assert_eq!(pb.elements.len(), 2);
        let whole = subobject(&l, &l.elements().collect::<Vec<_>>()).unwrap();
        assert_eq!(pullback_subobject(&whole, &e, &sub_b).unwrap().elements.len(), 4);
    }

    #[test]
    fn omega_shapes() {
        let two = load("two.qea");
        let o = build_omega(&Arc::new(single_object_site(&two).unwrap())).unwrap();
        assert_eq!(o.algebra().len(), 2);
        assert!(o.truth_coherent());
        let t2 = load("two2.qea");
        let o = build_omega(&Arc::new(single_object_site(&t2).unwrap())).unwrap();
        assert_eq!(o.algebra().len(), 6);
        let mo2 = load("mo2.qea");
        let o = build_omega(&Arc::new(default_site(&mo2))).unwrap();
        assert!(o.truth_coherent());
        assert_eq!(o.algebra().len(), 10);
    }

    #[test]
    fn classifier_on_mo2() {
        let l = load("mo2.qea");
        let site = Arc::new(default_site(&l));
        let r = classifier_check(&l, &site).unwrap();
        assert!(r.holds(), "{r:?}");
        assert_eq!(r.classifying.len(), 4);
        let omega = build_omega(&site).unwrap();
        let a = omega.algebra();
        let x = a.elements().find(|&x| x != a.zero() && x != a.one()).unwrap();
        let y = a.elements().find(|&y| y != x && y != a.ortho(x) && y != a.zero() && y != a.one()).unwrap();
        let bad = omega.with_algebra(a.with_swapped_ortho(x, y));
        let r = classifier_check_with(&l, &bad).unwrap();
        assert!(!r.holds());
        assert!(r.witness().is_some());
    }

    #[test]
    fn scenario() {
        let t2 = load("two2.qea");
        let x = t2.index_of("x").unwrap();
        let all: Vec<usize> = t2.elements().collect();
        let r = valuate_scenario(&t2, &all, x, Some(x)).unwrap();
        assert!(r.truth.is_true);
        assert_eq!(r.implication, Some(("1".to_string(), true)));
        assert!(matches!(&r.reduction, Reduction::Ultrafilter { atom, .. } if atom == "x"));
        let t3 = load("two3.qea");
        let a = t3.index_of("a").unwrap();
        let b = t3.index_of("b").unwrap();
        let app = t3.subalgebra_closure(&[a]);
        let r = valuate_scenario(&t3, &app, b, None).unwrap();
        assert!(!r.truth.is_true);
        assert_ne!(r.truth.to_string(), "false");
        let Reduction::Ultrafilter { valuation, .. } = r.reduction else { panic!() };
        assert!(!valuation.iter().find(|v| v.0 == "b").unwrap().1);
        assert!(matches!(valuate_scenario(&load("mo2.qea"), &[], a, None), Err(ClassifierError::NotBoolean(_))));
    }
}
