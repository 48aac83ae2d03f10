//! Finite Boolean sites, presheaves over them, natural transformations and
//! categories of elements.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use thiserror::Error;

use crate::algebra::EventAlgebra;
use crate::blocks::{block_element_sets, closed_under_orthogonal_joins, subset_label};
use crate::format::{ArrowRule, RawSite};
use crate::morphism::{check_conditions, enumerate_homomorphisms, MorphismKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SiteError {
    #[error("site object `{0}` is not Boolean")]
    NotBoolean(String),
    #[error("arrow {0} -> {1} is not a Boolean homomorphism")]
    ArrowNotBooleanHom(String, String),
    #[error("object `{0}` is not in the site")]
    ObjectNotInSite(String),
    #[error("coefficient functor fails on {0}")]
    NotFunctorial(String),
    #[error("`{0}` is not a subalgebra of the ambient algebra")]
    NotSubalgebra(String),
}

#[derive(Debug, Clone)]
pub struct SiteObject {
    pub name: String,
    pub algebra: Arc<EventAlgebra>,
    /// Position of each element in the ambient algebra, when the site is
    /// modelled on one.
    pub embedding: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SiteArrow {
    pub name: String,
    pub source: usize,
    pub target: usize,
    pub map: Vec<usize>,
}

/// A finite category of Boolean event algebras, closed under composition,
/// with the coefficient functor given by the underlying maps.
#[derive(Debug, Clone)]
pub struct BooleanSite {
    name: String,
    objects: Vec<SiteObject>,
    arrows: Vec<SiteArrow>,
    identity: Vec<usize>,
    into: Vec<Vec<usize>>,
    out_of: Vec<Vec<usize>>,
    pos_in: Vec<usize>,
    pos_out: Vec<usize>,
    // per middle object: [pos_in(v) * |out_of| + pos_out(u)] = u∘v
    table: Vec<Vec<u32>>,
    by_map: HashMap<(usize, usize, Vec<usize>), usize>,
    ambient: Option<Arc<EventAlgebra>>,
}

impl BooleanSite {
    /// Builds a site from objects and generating maps `(source, target, map)`.
    /// Identities and composites are added.
    pub fn new(
        name: &str,
        objects: Vec<SiteObject>,
        generators: Vec<(usize, usize, Vec<usize>)>,
        ambient: Option<Arc<EventAlgebra>>,
    ) -> Result<BooleanSite, SiteError> {
        for o in &objects {
            if !o.algebra.is_boolean() {
                return Err(SiteError::NotBoolean(o.name.clone()));
            }
        }
        let mut graphs: BTreeSet<(usize, usize, Vec<usize>)> = BTreeSet::new();
        for (i, o) in objects.iter().enumerate() {
            graphs.insert((i, i, o.algebra.elements().collect()));
        }
        for (s, t, map) in generators {
            let (a, b) = (&objects[s].algebra, &objects[t].algebra);
            if map.len() != a.len() || check_conditions(a, b, &map, MorphismKind::Boolean).is_err() {
                return Err(SiteError::ArrowNotBooleanHom(objects[s].name.clone(), objects[t].name.clone()));
            }
            graphs.insert((s, t, map));
        }
        let mut into: Vec<Vec<Vec<usize>>> = vec![vec![]; objects.len()];
        let mut out_of: Vec<Vec<(usize, Vec<usize>)>> = vec![vec![]; objects.len()];
        let mut into_src: Vec<Vec<usize>> = vec![vec![]; objects.len()];
        let mut work: Vec<(usize, usize, Vec<usize>)> = graphs.iter().cloned().collect();
        for (s, t, m) in &work {
            into[*t].push(m.clone());
            into_src[*t].push(*s);
            out_of[*s].push((*t, m.clone()));
        }
        while let Some((s, t, m)) = work.pop() {
            let mut fresh = vec![];
            for (t2, m2) in &out_of[t] {
                fresh.push((s, *t2, m.iter().map(|&x| m2[x]).collect::<Vec<usize>>()));
            }
            for (s0, m0) in into_src[s].iter().zip(&into[s]) {
                fresh.push((*s0, t, m0.iter().map(|&x| m[x]).collect()));
            }
            for (s2, t2, m2) in fresh {
                if graphs.insert((s2, t2, m2.clone())) {
                    into[t2].push(m2.clone());
                    into_src[t2].push(s2);
                    out_of[s2].push((t2, m2.clone()));
                    work.push((s2, t2, m2));
                }
            }
        }
        let mut counter: HashMap<(usize, usize), usize> = HashMap::new();
        let arrows: Vec<SiteArrow> = graphs
            .into_iter()
            .map(|(s, t, map)| {
                let (src, tgt) = (&objects[s], &objects[t]);
                let name = if s == t && map.iter().enumerate().all(|(i, &j)| i == j) {
                    format!("id_{}", src.name)
                } else if matches!((&src.embedding, &tgt.embedding), (Some(es), Some(et)) if map.iter().enumerate().all(|(i, &j)| es[i] == et[j]))
                {
                    format!("{}⊂{}", src.name, tgt.name)
                } else {
                    let k = counter.entry((s, t)).or_insert(0);
                    *k += 1;
                    format!("{}→{}#{}", src.name, tgt.name, k)
                };
                SiteArrow { name, source: s, target: t, map }
            })
            .collect();
        Ok(Self::index(name, objects, arrows, ambient))
    }

    fn index(name: &str, objects: Vec<SiteObject>, arrows: Vec<SiteArrow>, ambient: Option<Arc<EventAlgebra>>) -> Self {
        let n = objects.len();
        let mut into = vec![vec![]; n];
        let mut out_of = vec![vec![]; n];
        let mut pos_in = vec![0; arrows.len()];
        let mut pos_out = vec![0; arrows.len()];
        let mut by_map = HashMap::new();
        let mut identity = vec![usize::MAX; n];
        for (i, a) in arrows.iter().enumerate() {
            pos_in[i] = into[a.target].len();
            into[a.target].push(i);
            pos_out[i] = out_of[a.source].len();
            out_of[a.source].push(i);
            by_map.insert((a.source, a.target, a.map.clone()), i);
            if a.source == a.target && a.map.iter().enumerate().all(|(x, &y)| x == y) {
                identity[a.source] = i;
            }
        }
        let mut table = Vec::with_capacity(n);
        for c in 0..n {
            let mut t = Vec::with_capacity(into[c].len() * out_of[c].len());
            for &v in &into[c] {
                for &u in &out_of[c] {
                    let (av, au): (&SiteArrow, &SiteArrow) = (&arrows[v], &arrows[u]);
                    let m: Vec<usize> = av.map.iter().map(|&x| au.map[x]).collect();
                    t.push(by_map[&(av.source, au.target, m)] as u32);
                }
            }
            table.push(t);
        }
        BooleanSite {
            name: name.to_string(),
            objects,
            arrows,
            identity,
            into,
            out_of,
            pos_in,
            pos_out,
            table,
            by_map,
            ambient,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn objects(&self) -> &[SiteObject] {
        &self.objects
    }

    pub fn object(&self, i: usize) -> &SiteObject {
        &self.objects[i]
    }

    pub fn algebra(&self, i: usize) -> &Arc<EventAlgebra> {
        &self.objects[i].algebra
    }

    pub fn object_index(&self, name: &str) -> Result<usize, SiteError> {
        self.objects.iter().position(|o| o.name == name).ok_or_else(|| SiteError::ObjectNotInSite(name.to_string()))
    }

    pub fn arrows(&self) -> &[SiteArrow] {
        &self.arrows
    }

    pub fn arrow(&self, i: usize) -> &SiteArrow {
        &self.arrows[i]
    }

    pub fn identity(&self, obj: usize) -> usize {
        self.identity[obj]
    }

    /// Arrows with the given target.
    pub fn arrows_into(&self, obj: usize) -> &[usize] {
        &self.into[obj]
    }

    pub fn arrows_out_of(&self, obj: usize) -> &[usize] {
        &self.out_of[obj]
    }

    pub fn hom(&self, source: usize, target: usize) -> Vec<usize> {
        self.out_of[source].iter().copied().filter(|&a| self.arrows[a].target == target).collect()
    }

    /// `u ∘ v`, where `v`'s target is `u`'s source.
    pub fn compose(&self, u: usize, v: usize) -> usize {
        let c = self.arrows[u].source;
        debug_assert_eq!(self.arrows[v].target, c);
        self.table[c][self.pos_in[v] * self.out_of[c].len() + self.pos_out[u]] as usize
    }

    /// Non-identity arrows whose composites give every arrow. Greedy:
    /// endomorphisms first, then by growth in size.
    pub fn generating_arrows(&self) -> Vec<usize> {
        let size = |o: usize| self.objects[o].algebra.len();
        let mut order: Vec<usize> = (0..self.arrows.len()).filter(|&a| !self.identity.contains(&a)).collect();
        order.sort_by_key(|&a| {
            (size(self.arrows[a].target) - size(self.arrows[a].source).min(size(self.arrows[a].target)), a)
        });
        let mut reached = vec![false; self.arrows.len()];
        let mut closed: Vec<usize> = vec![];
        for &i in &self.identity {
            reached[i] = true;
            closed.push(i);
        }
        let mut gens: Vec<usize> = vec![];
        for g in order {
            if reached[g] {
                continue;
            }
            gens.push(g);
            let mut work = vec![];
            for &x in &closed {
                if self.arrows[x].target == self.arrows[g].source {
                    work.push(self.compose(g, x));
                }
                if self.arrows[g].target == self.arrows[x].source {
                    work.push(self.compose(x, g));
                }
            }
            while let Some(x) = work.pop() {
                if std::mem::replace(&mut reached[x], true) {
                    continue;
                }
                closed.push(x);
                for &h in &gens {
                    if self.arrows[x].target == self.arrows[h].source {
                        work.push(self.compose(h, x));
                    }
                    if self.arrows[h].target == self.arrows[x].source {
                        work.push(self.compose(x, h));
                    }
                }
            }
        }
        gens
    }

    pub fn arrow_by_map(&self, source: usize, target: usize, map: &[usize]) -> Option<usize> {
        self.by_map.get(&(source, target, map.to_vec())).copied()
    }

    pub fn ambient(&self) -> Option<&Arc<EventAlgebra>> {
        self.ambient.as_ref()
    }

    /// Checks that the coefficient functor preserves identities and
    /// composition, and that every arrow is a Boolean homomorphism.
    pub fn check_coefficient_functor(&self) -> Result<(), SiteError> {
        for (o, &id) in self.identity.iter().enumerate() {
            if id == usize::MAX {
                return Err(SiteError::NotFunctorial(format!("missing identity on {}", self.objects[o].name)));
            }
        }
        for a in &self.arrows {
            let (s, t) = (&self.objects[a.source].algebra, &self.objects[a.target].algebra);
            if check_conditions(s, t, &a.map, MorphismKind::Boolean).is_err() {
                return Err(SiteError::ArrowNotBooleanHom(
                    self.objects[a.source].name.clone(),
                    self.objects[a.target].name.clone(),
                ));
            }
        }
        for c in 0..self.objects.len() {
            for &v in &self.into[c] {
                for &u in &self.out_of[c] {
                    let w = &self.arrows[self.compose(u, v)];
                    let expect: Vec<usize> = self.arrows[v].map.iter().map(|&x| self.arrows[u].map[x]).collect();
                    if w.map != expect || w.source != self.arrows[v].source || w.target != self.arrows[u].target {
                        return Err(SiteError::NotFunctorial(format!(
                            "{} ∘ {}",
                            self.arrows[u].name, self.arrows[v].name
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Same objects, with every Boolean homomorphism between them as an arrow.
    pub fn saturated(&self) -> BooleanSite {
        let mut gens = vec![];
        for (s, a) in self.objects.iter().enumerate() {
            for (t, b) in self.objects.iter().enumerate() {
                for h in enumerate_homomorphisms(&a.algebra, &b.algebra, MorphismKind::Boolean) {
                    gens.push((s, t, h.map().to_vec()));
                }
            }
        }
        BooleanSite::new(&format!("{}+", self.name), self.objects.clone(), gens, self.ambient.clone())
            .expect("Boolean homs between Boolean objects")
    }

    /// The full subcategory without the named object.
    pub fn without_object(&self, name: &str) -> Result<BooleanSite, SiteError> {
        let drop = self.object_index(name)?;
        let keep: Vec<usize> = (0..self.objects.len()).filter(|&i| i != drop).collect();
        let renum = |i: usize| keep.iter().position(|&k| k == i);
        let objects = keep.iter().map(|&i| self.objects[i].clone()).collect();
        let gens =
            self.arrows.iter().filter_map(|a| Some((renum(a.source)?, renum(a.target)?, a.map.clone()))).collect();
        BooleanSite::new(&format!("{}-{}", self.name, name), objects, gens, self.ambient.clone())
    }
}

fn sub_object(l: &Arc<EventAlgebra>, elems: &[usize], name: String) -> SiteObject {
    let alg = l.induced(elems, &name).expect("subalgebra validates");
    SiteObject { name, algebra: Arc::new(alg), embedding: Some(elems.to_vec()) }
}

fn inclusion_generators(objects: &[SiteObject]) -> Vec<(usize, usize, Vec<usize>)> {
    let mut gens = vec![];
    for (s, a) in objects.iter().enumerate() {
        for (t, b) in objects.iter().enumerate() {
            let (Some(ea), Some(eb)) = (&a.embedding, &b.embedding) else { continue };
            if s != t && ea.iter().all(|x| eb.contains(x)) {
                gens.push((s, t, ea.iter().map(|x| eb.iter().position(|y| y == x).unwrap()).collect()));
            }
        }
    }
    gens
}

/// Blocks of `l` and their pairwise Boolean intersections, with inclusions.
pub fn default_site(l: &Arc<EventAlgebra>) -> BooleanSite {
    let blocks = block_element_sets(l);
    let mut meets: Vec<Vec<usize>> = vec![];
    for (i, a) in blocks.iter().enumerate() {
        for b in &blocks[i + 1..] {
            let m: Vec<usize> = a.iter().copied().filter(|x| b.contains(x)).collect();
            if !blocks.contains(&m)
                && !meets.contains(&m)
                && l.is_boolean_subset(&m)
                && closed_under_orthogonal_joins(l, &m)
            {
                meets.push(m);
            }
        }
    }
    meets.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
    let objects: Vec<SiteObject> =
        blocks.iter().chain(meets.iter()).map(|e| sub_object(l, e, subset_label(l, e))).collect();
    let gens = inclusion_generators(&objects);
    BooleanSite::new(&format!("default({})", l.name()), objects, gens, Some(l.clone())).expect("inclusions are Boolean")
}

/// One Boolean object with its identity arrow only.
pub fn single_object_site(b: &Arc<EventAlgebra>) -> Result<BooleanSite, SiteError> {
    let obj = SiteObject { name: b.name().to_string(), algebra: b.clone(), embedding: Some(b.elements().collect()) };
    BooleanSite::new(&format!("{{{}}}", b.name()), vec![obj], vec![], Some(b.clone()))
}

/// A site described in an instance file, over its ambient algebra.
pub fn site_from_raw(raw: &RawSite, over: &Arc<EventAlgebra>) -> Result<BooleanSite, SiteError> {
    let mut objects = vec![];
    for (name, ids) in &raw.objects {
        let mut elems: Vec<usize> = ids.iter().map(|s| over.index_of(s).unwrap()).collect();
        elems.sort_unstable();
        elems.dedup();
        if over.subalgebra_closure(&elems) != elems {
            return Err(SiteError::NotSubalgebra(name.clone()));
        }
        let alg = over.induced(&elems, name).map_err(|_| SiteError::NotSubalgebra(name.clone()))?;
        objects.push(SiteObject { name: name.clone(), algebra: Arc::new(alg), embedding: Some(elems) });
    }
    let gens = inclusion_generators(&objects);
    let site = BooleanSite::new(&raw.name, objects, gens, Some(over.clone()))?;
    Ok(match raw.arrows {
        ArrowRule::Inclusions => site,
        ArrowRule::Full => site.saturated(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PresheafError {
    #[error("restriction of `{section}` along `{arrow}` is out of range")]
    OutOfRange { arrow: String, section: String },
    #[error("identity law fails at `{section}` over `{object}`")]
    Identity { object: String, section: String },
    #[error("composition law fails at `{section}` along {u} ∘ {v}")]
    Composition { section: String, u: String, v: String },
    #[error("presheaves live over different sites")]
    SiteMismatch,
}

/// A contravariant set-valued functor on a site; sections are named.
#[derive(Debug, Clone)]
pub struct Presheaf {
    name: String,
    site: Arc<BooleanSite>,
    sections: Vec<Vec<String>>,
    // per arrow v: C -> B, sections(B) -> sections(C)
    restriction: Vec<Vec<usize>>,
}

impl Presheaf {
    /// Checked construction.
    pub fn new(
        name: &str,
        site: &Arc<BooleanSite>,
        sections: Vec<Vec<String>>,
        restriction: Vec<Vec<usize>>,
    ) -> Result<Presheaf, PresheafError> {
        let p = Presheaf::unchecked(name, site, sections, restriction);
        p.check_functorial()?;
        Ok(p)
    }

    pub(crate) fn unchecked(
        name: &str,
        site: &Arc<BooleanSite>,
        sections: Vec<Vec<String>>,
        restriction: Vec<Vec<usize>>,
    ) -> Presheaf {
        Presheaf { name: name.to_string(), site: site.clone(), sections, restriction }
    }

    /// Both action laws: `p · id = p` and `p · (v∘w) = (p · v) · w`.
    pub fn check_functorial(&self) -> Result<(), PresheafError> {
        let site = &self.site;
        for (a, arrow) in site.arrows().iter().enumerate() {
            for (p, &r) in self.restriction[a].iter().enumerate() {
                if r >= self.sections[arrow.source].len() {
                    return Err(PresheafError::OutOfRange {
                        arrow: arrow.name.clone(),
                        section: self.sections[arrow.target][p].clone(),
                    });
                }
            }
        }
        for o in 0..site.objects().len() {
            let id = site.identity(o);
            for p in 0..self.sections[o].len() {
                if self.restriction[id][p] != p {
                    return Err(PresheafError::Identity {
                        object: site.object(o).name.clone(),
                        section: self.sections[o][p].clone(),
                    });
                }
            }
        }
        for c in 0..site.objects().len() {
            for &w in site.arrows_into(c) {
                for &v in site.arrows_out_of(c) {
                    let vw = site.compose(v, w);
                    let b = site.arrow(v).target;
                    for p in 0..self.sections[b].len() {
                        if self.restriction[vw][p] != self.restriction[w][self.restriction[v][p]] {
                            return Err(PresheafError::Composition {
                                section: self.sections[b][p].clone(),
                                u: site.arrow(v).name.clone(),
                                v: site.arrow(w).name.clone(),
                            });
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn site(&self) -> &Arc<BooleanSite> {
        &self.site
    }

    pub fn sections(&self, obj: usize) -> &[String] {
        &self.sections[obj]
    }

    pub fn section_index(&self, obj: usize, name: &str) -> Option<usize> {
        self.sections[obj].iter().position(|s| s == name)
    }

    /// `p · v` for `v: C -> B` and `p` over `B`.
    pub fn restrict(&self, arrow: usize, p: usize) -> usize {
        self.restriction[arrow][p]
    }

    pub fn restriction_table(&self, arrow: usize) -> &[usize] {
        &self.restriction[arrow]
    }

    pub fn total_sections(&self) -> usize {
        self.sections.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.total_sections() == 0
    }

    /// Sub-presheaf on the given section subsets, which must be closed
    /// under restriction.
    pub fn restricted_to(&self, name: &str, keep: &[BTreeSet<usize>]) -> Presheaf {
        let renum: Vec<HashMap<usize, usize>> =
            keep.iter().map(|k| k.iter().enumerate().map(|(i, &p)| (p, i)).collect()).collect();
        let sections =
            keep.iter().enumerate().map(|(o, k)| k.iter().map(|&p| self.sections[o][p].clone()).collect()).collect();
        let restriction = self
            .site
            .arrows()
            .iter()
            .enumerate()
            .map(|(a, arr)| keep[arr.target].iter().map(|&p| renum[arr.source][&self.restriction[a][p]]).collect())
            .collect();
        Presheaf::unchecked(name, &self.site, sections, restriction)
    }
}

/// The representable presheaf `y[B]`: arrows into `B`, acted on by precomposition.
pub fn yoneda(site: &Arc<BooleanSite>, b: usize) -> Result<Presheaf, SiteError> {
    if b >= site.objects().len() {
        return Err(SiteError::ObjectNotInSite(b.to_string()));
    }
    let homs: Vec<Vec<usize>> = (0..site.objects().len()).map(|c| site.hom(c, b)).collect();
    let sections = homs.iter().map(|h| h.iter().map(|&a| site.arrow(a).name.clone()).collect()).collect();
    let restriction = site
        .arrows()
        .iter()
        .enumerate()
        .map(|(v, arr)| {
            homs[arr.target]
                .iter()
                .map(|&f| {
                    let fv = site.compose(f, v);
                    homs[arr.source].iter().position(|&g| g == fv).unwrap()
                })
                .collect()
        })
        .collect();
    Ok(Presheaf::unchecked(&format!("y[{}]", site.object(b).name), site, sections, restriction))
}

/// A family of component maps, one per site object.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NaturalTransformation {
    pub components: Vec<Vec<usize>>,
}

impl NaturalTransformation {
    pub fn is_natural(&self, p: &Presheaf, q: &Presheaf) -> bool {
        p.site().arrows().iter().enumerate().all(|(a, arr)| {
            (0..p.sections(arr.target).len())
                .all(|s| self.components[arr.source][p.restrict(a, s)] == q.restrict(a, self.components[arr.target][s]))
        })
    }
}

/// Every natural transformation `P => Q`, in lexicographic order of
/// components. Each restriction is a binary constraint between a section
/// and its restriction; the search keeps the constraints arc consistent
/// and branches on the smallest open domain.
pub fn natural_transformations(p: &Presheaf, q: &Presheaf) -> Result<Vec<NaturalTransformation>, PresheafError> {
    if !Arc::ptr_eq(p.site(), q.site()) {
        return Err(PresheafError::SiteMismatch);
    }
    let site = p.site();
    let n = site.objects().len();
    let offset: Vec<usize> = (0..n)
        .scan(0, |acc, o| {
            let r = *acc;
            *acc += p.sections(o).len();
            Some(r)
        })
        .collect();
    let owner: Vec<usize> = (0..n).flat_map(|o| std::iter::repeat_n(o, p.sections(o).len())).collect();
    let mut constraints = vec![];
    let mut touching = vec![vec![]; owner.len()];
    for a in site.generating_arrows() {
        let arr = site.arrow(a);
        for s in 0..p.sections(arr.target).len() {
            let c = constraints.len();
            let (lo, hi) = (offset[arr.source] + p.restrict(a, s), offset[arr.target] + s);
            constraints.push(Constraint { lo, hi, table: q.restriction_table(a) });
            touching[lo].push(c);
            touching[hi].push(c);
        }
    }
    let start: Vec<usize> = owner
        .iter()
        .scan(0, |acc, &o| {
            let r = *acc;
            *acc += q.sections(o).len();
            Some(r)
        })
        .chain(std::iter::once(owner.iter().map(|&o| q.sections(o).len()).sum()))
        .collect();
    // sections forcing the most restrictions are tried first
    let weight: Vec<usize> = (0..owner.len())
        .map(|e| {
            let mut seen = vec![false; owner.len()];
            let mut stack = vec![e];
            let mut count = 0;
            while let Some(x) = stack.pop() {
                if std::mem::replace(&mut seen[x], true) {
                    continue;
                }
                count += 1;
                for &c in &touching[x] {
                    if constraints[c].hi == x {
                        stack.push(constraints[c].lo);
                    }
                }
            }
            count
        })
        .collect();
    let ctx = NatSearch { constraints: &constraints, start: &start, weight: &weight, touching: &touching };
    let mut out = vec![];
    let domains = Domains {
        bits: vec![true; start[owner.len()]],
        size: (0..owner.len()).map(|e| start[e + 1] - start[e]).collect(),
    };
    if let Some(d) = ctx.propagate(domains, (0..constraints.len()).collect()) {
        ctx.go(d, &mut out);
    }
    let mut out: Vec<NaturalTransformation> = out
        .into_iter()
        .map(|v| NaturalTransformation {
            components: (0..n).map(|o| v[offset[o]..offset[o] + p.sections(o).len()].to_vec()).collect(),
        })
        .collect();
    out.sort();
    Ok(out)
}

/// `value(lo) == table[value(hi)]`.
struct Constraint<'a> {
    lo: usize,
    hi: usize,
    table: &'a [usize],
}

/// Candidate values of every section, flattened.
#[derive(Clone)]
struct Domains {
    bits: Vec<bool>,
    size: Vec<usize>,
}

struct NatSearch<'a> {
    constraints: &'a [Constraint<'a>],
    start: &'a [usize],
    weight: &'a [usize],
    touching: &'a [Vec<usize>],
}

impl NatSearch<'_> {
    fn values<'d>(&self, d: &'d Domains, e: usize) -> &'d [bool] {
        &d.bits[self.start[e]..self.start[e + 1]]
    }

    fn go(&self, d: Domains, out: &mut Vec<Vec<usize>>) {
        let open = (0..d.size.len())
            .filter(|&e| d.size[e] > 1)
            .min_by_key(|&e| (d.size[e], std::cmp::Reverse(self.weight[e])));
        let Some(e) = open else {
            out.push((0..d.size.len()).map(|e| self.values(&d, e).iter().position(|&b| b).unwrap()).collect());
            return;
        };
        let width = self.start[e + 1] - self.start[e];
        for v in (0..width).filter(|&v| d.bits[self.start[e] + v]) {
            let mut next = d.clone();
            for w in 0..width {
                next.bits[self.start[e] + w] = w == v;
            }
            next.size[e] = 1;
            if let Some(next) = self.propagate(next, self.touching[e].clone()) {
                self.go(next, out);
            }
        }
    }

    fn propagate(&self, mut d: Domains, mut queue: Vec<usize>) -> Option<Domains> {
        let mut queued = vec![false; self.constraints.len()];
        queue.iter().for_each(|&c| queued[c] = true);
        let mut reach = vec![];
        while let Some(c) = queue.pop() {
            queued[c] = false;
            let Constraint { lo, hi, table } = self.constraints[c];
            let (sl, sh) = (self.start[lo], self.start[hi]);
            let (mut lo_changed, mut hi_changed) = (false, false);
            reach.clear();
            reach.resize(self.start[lo + 1] - sl, false);
            for v in 0..self.start[hi + 1] - sh {
                if d.bits[sh + v] {
                    if d.bits[sl + table[v]] {
                        reach[table[v]] = true;
                    } else {
                        d.bits[sh + v] = false;
                        d.size[hi] -= 1;
                        hi_changed = true;
                    }
                }
            }
            for (w, &r) in reach.iter().enumerate() {
                if d.bits[sl + w] && !r {
                    d.bits[sl + w] = false;
                    d.size[lo] -= 1;
                    lo_changed = true;
                }
            }
            for (e, changed) in [(lo, lo_changed), (hi, hi_changed)] {
                if !changed {
                    continue;
                }
                if d.size[e] == 0 {
                    return None;
                }
                for &k in &self.touching[e] {
                    if k != c && !queued[k] {
                        queued[k] = true;
                        queue.push(k);
                    }
                }
            }
        }
        Some(d)
    }
}

/// Pairs `(B, p)` with arrows `u: (B', p·u) -> (B, p)`.
#[derive(Debug, Clone)]
pub struct ElementsCategory {
    pub objects: Vec<(usize, usize)>,
    /// `(site arrow, source element, target element)`
    pub arrows: Vec<(usize, usize, usize)>,
}

pub fn elements_category(p: &Presheaf) -> ElementsCategory {
    let site = p.site();
    let objects: Vec<(usize, usize)> =
        (0..site.objects().len()).flat_map(|o| (0..p.sections(o).len()).map(move |s| (o, s))).collect();
    let index: HashMap<(usize, usize), usize> = objects.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let mut arrows = vec![];
    for (a, arr) in site.arrows().iter().enumerate() {
        for s in 0..p.sections(arr.target).len() {
            arrows.push((a, index[&(arr.source, p.restrict(a, s))], index[&(arr.target, s)]));
        }
    }
    ElementsCategory { objects, arrows }
}

impl ElementsCategory {
    /// Objects receiving exactly one arrow from every object.
    pub fn terminal_objects(&self) -> Vec<usize> {
        let n = self.objects.len();
        let mut count = vec![vec![0usize; n]; n];
        for &(_, s, t) in &self.arrows {
            count[t][s] += 1;
        }
        (0..n).filter(|&t| count[t].iter().all(|&c| c == 1)).collect()
    }

    /// Projection to the site preserves identities and composition.
    pub fn projection_is_functorial(&self, p: &Presheaf) -> bool {
        let site = p.site();
        let index: HashMap<(usize, usize), usize> = self.objects.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        let lookup: HashMap<(usize, usize), usize> = self.arrows.iter().map(|&(a, _, t)| ((a, t), 0)).collect();
        for (i, &(o, _)) in self.objects.iter().enumerate() {
            if !lookup.contains_key(&(site.identity(o), i)) {
                return false;
            }
        }
        self.arrows.iter().all(|&(a, s, t)| {
            let arr = site.arrow(a);
            self.objects[s].0 == arr.source
                && self.objects[t].0 == arr.target
                && index[&(arr.source, p.restrict(a, self.objects[t].1))] == s
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::load;

    #[test]
    fn default_sites() {
        let mo2 = Arc::new(default_site(&load("mo2.qea")));
        assert_eq!(mo2.objects().len(), 3);
        let non_id = mo2.arrows().iter().filter(|a| a.source != a.target).count();
        assert_eq!(non_id, 2);
        mo2.check_coefficient_functor().unwrap();
        let sq = default_site(&load("two2.qea"));
        assert_eq!((sq.objects().len(), sq.arrows().len()), (1, 1));
        let chain = default_site(&load("greechie_chain.qea"));
        let sizes: Vec<usize> = chain.objects().iter().map(|o| o.algebra.len()).collect();
        assert_eq!(sizes, vec![8, 8, 8, 4, 4, 2]);
    }

    #[test]
    fn yoneda_sections() {
        let site = Arc::new(default_site(&load("mo2.qea")));
        let a = 0;
        let y = yoneda(&site, a).unwrap();
        y.check_functorial().unwrap();
        let bottom = site.object_index("B[0,1]").unwrap();
        assert_eq!(y.sections(bottom).len(), 1);
        assert_eq!(y.sections(1).len(), 0);
        let ec = elements_category(&y);
        let id = ec
            .objects
            .iter()
            .position(|&(o, s)| o == a && y.sections(o)[s] == site.arrow(site.identity(a)).name)
            .unwrap();
        assert_eq!(ec.terminal_objects(), vec![id]);
        assert!(ec.projection_is_functorial(&y));
    }

    #[test]
    fn yoneda_lemma_counts() {
        let site = Arc::new(default_site(&load("greechie_chain.qea")).saturated());
        for b in 0..site.objects().len() {
            let y = yoneda(&site, b).unwrap();
            for c in 0..site.objects().len() {
                let yc = yoneda(&site, c).unwrap();
                let nat = natural_transformations(&y, &yc).unwrap();
                assert_eq!(nat.len(), yc.sections(b).len());
                assert!(nat.iter().all(|t| t.is_natural(&y, &yc)));
            }
        }
    }

    #[test]
    fn empty_presheaf_has_one_transformation() {
        let site = Arc::new(default_site(&load("mo2.qea")));
        let n = site.objects().len();
        let empty = Presheaf::new("0", &site, vec![vec![]; n], site.arrows().iter().map(|_| vec![]).collect()).unwrap();
        let y = yoneda(&site, 0).unwrap();
        assert_eq!(natural_transformations(&empty, &y).unwrap().len(), 1);
        assert!(elements_category(&empty).objects.is_empty());
    }

    #[test]
    fn removing_an_object() {
        let site = default_site(&load("mo2.qea"));
        let smaller = site.without_object("B[b,b']").unwrap();
        assert_eq!(smaller.objects().len(), 2);
        assert!(site.without_object("nope").is_err());
    }
}
