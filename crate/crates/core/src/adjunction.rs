//! The hom presheaf `R(L)`, the counit `LR(L) -> L`, the unit
//! `P => RLP` and the bijection `Nat(P, R(L)) ≅ Hom(LP, L)`.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use thiserror::Error;

use crate::algebra::EventAlgebra;
use crate::colimit::{build_colimit, ColimitAlgebra, ColimitError};
use crate::morphism::{check_conditions, enumerate_homomorphisms, validate_morphism, AlgebraMorphism, MorphismKind};
use crate::site::{natural_transformations, BooleanSite, NaturalTransformation, Presheaf, PresheafError};

#[derive(Debug, Clone, Error)]
pub enum AdjunctionError {
    #[error(transparent)]
    Colimit(#[from] ColimitError),
    #[error(transparent)]
    Presheaf(#[from] PresheafError),
    #[error("counit is ill-defined: {0} and {1} are equivalent but have different images")]
    IllDefined(String, String),
}

/// `R(L)`: quantum homomorphisms `A(B) -> L`, restricted by precomposition.
#[derive(Debug, Clone)]
pub struct HomPresheaf {
    presheaf: Arc<Presheaf>,
    target: Arc<EventAlgebra>,
    maps: Vec<Vec<Vec<usize>>>,
}

pub fn hom_presheaf(site: &Arc<BooleanSite>, l: &Arc<EventAlgebra>) -> HomPresheaf {
    let maps: Vec<Vec<Vec<usize>>> = (0..site.objects().len())
        .map(|o| {
            enumerate_homomorphisms(site.algebra(o), l, MorphismKind::Quantum)
                .into_iter()
                .map(|h| h.map().to_vec())
                .collect()
        })
        .collect();
    let names = (0..site.objects().len())
        .map(|o| (0..maps[o].len()).map(|i| format!("{}→{}#{}", site.object(o).name, l.name(), i)).collect())
        .collect();
    HomPresheaf::from_maps(&format!("R({})", l.name()), site, l, maps, names)
}

/// `R(1)` for the one-element algebra: one section per object.
pub fn terminal_presheaf(site: &Arc<BooleanSite>) -> Presheaf {
    let n = site.objects().len();
    Presheaf::new("R(1)", site, vec![vec!["!".to_string()]; n], site.arrows().iter().map(|_| vec![0]).collect())
        .expect("constant presheaf is functorial")
}

impl HomPresheaf {
    fn from_maps(
        name: &str,
        site: &Arc<BooleanSite>,
        l: &Arc<EventAlgebra>,
        maps: Vec<Vec<Vec<usize>>>,
        names: Vec<Vec<String>>,
    ) -> HomPresheaf {
        let index: Vec<HashMap<&[usize], usize>> =
            maps.iter().map(|ms| ms.iter().enumerate().map(|(i, m)| (m.as_slice(), i)).collect()).collect();
        let restriction = site
            .arrows()
            .iter()
            .map(|arr| {
                maps[arr.target]
                    .iter()
                    .map(|psi| {
                        let m: Vec<usize> = arr.map.iter().map(|&x| psi[x]).collect();
                        index[arr.source][m.as_slice()]
                    })
                    .collect()
            })
            .collect();
        let presheaf = Arc::new(Presheaf::unchecked(name, site, names, restriction));
        HomPresheaf { presheaf, target: l.clone(), maps }
    }

    pub fn presheaf(&self) -> &Arc<Presheaf> {
        &self.presheaf
    }

    pub fn site(&self) -> &Arc<BooleanSite> {
        self.presheaf.site()
    }

    pub fn target(&self) -> &Arc<EventAlgebra> {
        &self.target
    }

    pub fn section_map(&self, o: usize, s: usize) -> &[usize] {
        &self.maps[o][s]
    }

    pub fn section_count(&self, o: usize) -> usize {
        self.maps[o].len()
    }

    pub fn find_section(&self, o: usize, map: &[usize]) -> Option<usize> {
        self.maps[o].iter().position(|m| m == map)
    }

    pub fn morphism(&self, o: usize, s: usize) -> AlgebraMorphism {
        validate_morphism(
            &self.presheaf.sections(o)[s],
            self.site().algebra(o),
            &self.target,
            self.maps[o][s].clone(),
            MorphismKind::Quantum,
        )
        .expect("sections are homomorphisms")
    }

    /// Sub-presheaf on sections closed under restriction.
    pub fn restricted_to(&self, name: &str, keep: &[BTreeSet<usize>]) -> HomPresheaf {
        let maps: Vec<Vec<Vec<usize>>> =
            keep.iter().enumerate().map(|(o, k)| k.iter().map(|&s| self.maps[o][s].clone()).collect()).collect();
        let names = keep
            .iter()
            .enumerate()
            .map(|(o, k)| k.iter().map(|&s| self.presheaf.sections(o)[s].clone()).collect())
            .collect();
        HomPresheaf::from_maps(name, self.site(), &self.target, maps, names)
    }
}

/// Verdict for `‖(ψ, q)‖ ↦ ψ(q)`.
#[derive(Debug, Clone)]
pub struct CounitReport {
    pub colimit: ColimitAlgebra,
    pub map: Vec<usize>,
    pub injective: bool,
    pub surjective: bool,
    pub structure_preserving: bool,
    /// Elements of `L` outside the image.
    pub missed: Vec<String>,
}

impl CounitReport {
    pub fn is_iso(&self) -> bool {
        self.injective && self.surjective && self.structure_preserving
    }
}

/// Counit over an arbitrary family of sections (`R(L)` or a subsystem).
pub fn counit_over(h: &HomPresheaf) -> Result<CounitReport, AdjunctionError> {
    let colimit = build_colimit(h.presheaf())?;
    let lp = colimit.algebra().clone();
    let l = h.target();
    let q = colimit.quotient();
    let mut map = vec![usize::MAX; lp.len()];
    let mut witness = vec![(0, 0, 0); lp.len()];
    for &(o, s, e) in q.pairs() {
        let c = q.class(o, s, e);
        let v = h.section_map(o, s)[e];
        if map[c] == usize::MAX {
            map[c] = v;
            witness[c] = (o, s, e);
        } else if map[c] != v {
            let show = |(o, s, e): (usize, usize, usize)| {
                format!("({}, {})", h.presheaf().sections(o)[s], h.site().algebra(o).name_of(e))
            };
            return Err(AdjunctionError::IllDefined(show(witness[c]), show((o, s, e))));
        }
    }
    let mut hit = vec![false; l.len()];
    let mut injective = true;
    for &v in &map {
        injective &= !std::mem::replace(&mut hit[v], true);
    }
    let missed = l.elements().filter(|&x| !hit[x]).map(|x| l.name_of(x).to_string()).collect::<Vec<_>>();
    let reflects = lp.elements().all(|x| lp.elements().all(|y| lp.leq(x, y) == l.leq(map[x], map[y])));
    let structure_preserving = check_conditions(&lp, l, &map, MorphismKind::Quantum).is_ok() && reflects;
    Ok(CounitReport { colimit, map, injective, surjective: missed.is_empty(), structure_preserving, missed })
}

/// Sections of `R(L)` generated by the site's own inclusions into `L`, when
/// the site is modelled on `L`; all of `R(L)` otherwise.
pub fn cover_system(site: &Arc<BooleanSite>, l: &Arc<EventAlgebra>) -> HomPresheaf {
    let full = hom_presheaf(site, l);
    let modelled = site.ambient().is_some_and(|a| **a == **l) && site.objects().iter().all(|o| o.embedding.is_some());
    if !modelled {
        return full;
    }
    let gens: Vec<(usize, usize)> = (0..site.objects().len())
        .filter_map(|o| {
            let emb = site.object(o).embedding.as_ref().unwrap();
            full.find_section(o, emb).map(|s| (o, s))
        })
        .collect();
    let keep = crate::localization::restriction_closure(full.presheaf(), &gens);
    full.restricted_to(&format!("S({})", l.name()), &keep)
}

/// Counit restricted to the covers the site provides for `L`.
pub fn counit(l: &Arc<EventAlgebra>, site: &Arc<BooleanSite>) -> Result<CounitReport, AdjunctionError> {
    counit_over(&cover_system(site, l))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentVerdict {
    pub object: String,
    pub injective: bool,
    /// Every homomorphism `A(B) -> LP` is the image of a section.
    pub surjective: bool,
}

/// `δ_P`: section `p` over `B` goes to `q ↦ ‖(p, q)‖`.
#[derive(Debug, Clone)]
pub struct UnitReport {
    pub colimit: ColimitAlgebra,
    /// `[object][section]` -> map `A(B) -> LP`
    pub components: Vec<Vec<Vec<usize>>>,
    pub natural: bool,
    pub homomorphisms: bool,
    pub verdicts: Vec<ComponentVerdict>,
}

impl UnitReport {
    pub fn is_iso(&self) -> bool {
        self.verdicts.iter().all(|v| v.injective && v.surjective)
    }

    /// `δ_P` as a transformation into `R(LP)` built over the same site.
    pub fn as_transformation(&self, r: &HomPresheaf) -> Option<NaturalTransformation> {
        let components = self
            .components
            .iter()
            .enumerate()
            .map(|(o, secs)| secs.iter().map(|m| r.find_section(o, m)).collect::<Option<Vec<usize>>>())
            .collect::<Option<Vec<_>>>()?;
        Some(NaturalTransformation { components })
    }
}

pub fn unit(p: &Presheaf) -> Result<UnitReport, AdjunctionError> {
    let colimit = build_colimit(p)?;
    let site = p.site();
    let lp = colimit.algebra().clone();
    let components: Vec<Vec<Vec<usize>>> = (0..site.objects().len())
        .map(|o| {
            (0..p.sections(o).len())
                .map(|s| site.algebra(o).elements().map(|e| colimit.class(o, s, e)).collect())
                .collect()
        })
        .collect();
    let homomorphisms = (0..site.objects().len()).all(|o| {
        components[o].iter().all(|m| check_conditions(site.algebra(o), &lp, m, MorphismKind::Quantum).is_ok())
    });
    let natural = site.arrows().iter().enumerate().all(|(a, arr)| {
        (0..p.sections(arr.target).len()).all(|s| {
            let lhs = &components[arr.source][p.restrict(a, s)];
            let rhs: Vec<usize> = arr.map.iter().map(|&x| components[arr.target][s][x]).collect();
            *lhs == rhs
        })
    });
    let verdicts = (0..site.objects().len())
        .map(|o| {
            let distinct: BTreeSet<&Vec<usize>> = components[o].iter().collect();
            let all = enumerate_homomorphisms(site.algebra(o), &lp, MorphismKind::Quantum);
            ComponentVerdict {
                object: site.object(o).name.clone(),
                injective: distinct.len() == components[o].len(),
                surjective: all.iter().all(|h| distinct.contains(&h.map().to_vec())),
            }
        })
        .collect();
    Ok(UnitReport { colimit, components, natural, homomorphisms, verdicts })
}

#[derive(Debug, Clone)]
pub struct AdjunctionReport {
    pub nat_count: usize,
    pub hom_count: usize,
    /// `P` had no sections; both sides are singletons by convention.
    pub degenerate: bool,
    /// Every `τ` yields a well-defined homomorphism `LP -> L`.
    pub forward_defined: bool,
    /// Every `h` yields a section family in `R(L)`.
    pub backward_defined: bool,
    pub inverse_left: bool,
    pub inverse_right: bool,
    /// `(τ, h)` pairs under the bijection, as indices.
    pub correspondence: Vec<(usize, usize)>,
}

impl AdjunctionReport {
    pub fn holds(&self) -> bool {
        self.nat_count == self.hom_count
            && self.forward_defined
            && self.backward_defined
            && self.inverse_left
            && self.inverse_right
    }
}

/// Enumerates `Nat(P, R(L))` and `Hom(LP, L)` and checks that
/// `τ ↦ (‖(p,q)‖ ↦ τ(p)(q))` and `h ↦ h ∘ δ_P` are mutually inverse.
pub fn adjunction_bijection_check(p: &Presheaf, l: &Arc<EventAlgebra>) -> Result<AdjunctionReport, AdjunctionError> {
    let site = p.site().clone();
    let r = hom_presheaf(&site, l);
    let colimit = if p.is_empty() { None } else { Some(build_colimit(p)?) };
    let nats = natural_transformations(p, r.presheaf())?;
    let Some(colimit) = colimit else {
        return Ok(AdjunctionReport {
            nat_count: nats.len(),
            hom_count: 1,
            degenerate: true,
            forward_defined: true,
            backward_defined: true,
            inverse_left: true,
            inverse_right: true,
            correspondence: vec![(0, 0)],
        });
    };
    let lp = colimit.algebra().clone();
    let q = colimit.quotient();
    let homs = enumerate_homomorphisms(&lp, l, MorphismKind::Quantum);
    let hom_index: HashMap<&[usize], usize> = homs.iter().enumerate().map(|(i, h)| (h.map(), i)).collect();
    let mut forward_defined = true;
    let mut forward = vec![None; nats.len()];
    for (t, tau) in nats.iter().enumerate() {
        let mut map = vec![usize::MAX; lp.len()];
        let mut ok = true;
        for &(o, s, e) in q.pairs() {
            let v = r.section_map(o, tau.components[o][s])[e];
            let c = q.class(o, s, e);
            if map[c] == usize::MAX {
                map[c] = v;
            } else if map[c] != v {
                ok = false;
            }
        }
        forward[t] = if ok { hom_index.get(map.as_slice()).copied() } else { None };
        forward_defined &= forward[t].is_some();
    }
    let mut backward_defined = true;
    let mut backward = vec![None; homs.len()];
    let tau_index: HashMap<&NaturalTransformation, usize> = nats.iter().enumerate().map(|(i, t)| (t, i)).collect();
    for (i, h) in homs.iter().enumerate() {
        let components: Option<Vec<Vec<usize>>> = (0..site.objects().len())
            .map(|o| {
                (0..p.sections(o).len())
                    .map(|s| {
                        let m: Vec<usize> =
                            site.algebra(o).elements().map(|e| h.apply(colimit.class(o, s, e))).collect();
                        r.find_section(o, &m)
                    })
                    .collect()
            })
            .collect();
        backward[i] = components.and_then(|c| tau_index.get(&NaturalTransformation { components: c }).copied());
        backward_defined &= backward[i].is_some();
    }
    let inverse_left = forward.iter().enumerate().all(|(t, f)| f.and_then(|h| backward[h]) == Some(t));
    let inverse_right = backward.iter().enumerate().all(|(h, b)| b.and_then(|t| forward[t]) == Some(h));
    let correspondence = forward.iter().enumerate().filter_map(|(t, f)| f.map(|h| (t, h))).collect();
    Ok(AdjunctionReport {
        nat_count: nats.len(),
        hom_count: homs.len(),
        degenerate: false,
        forward_defined,
        backward_defined,
        inverse_left,
        inverse_right,
        correspondence,
    })
}
