//! Blocks (maximal Boolean subalgebras) and algebra isomorphism search.

use std::sync::Arc;

use crate::algebra::EventAlgebra;
use crate::morphism::{maximal_orthogonal_atom_sets, validate_morphism, AlgebraMorphism, MorphismKind};

/// Label of a subalgebra given by its sorted element set: its atoms.
pub fn subset_label(l: &EventAlgebra, elems: &[usize]) -> String {
    let atoms: Vec<&str> = elems
        .iter()
        .copied()
        .filter(|&x| x != l.zero() && elems.iter().all(|&z| z == l.zero() || z == x || !l.leq(z, x)))
        .map(|x| l.name_of(x))
        .collect();
    if elems.len() == 2 {
        "B[0,1]".to_string()
    } else {
        format!("B[{}]", atoms.join(","))
    }
}

/// Element sets of all blocks, sorted lexicographically.
pub fn block_element_sets(l: &EventAlgebra) -> Vec<Vec<usize>> {
    let mut found: Vec<Vec<usize>> = vec![];
    for atoms in maximal_orthogonal_atom_sets(l) {
        if atoms.len() > 20 {
            continue;
        }
        let mut elems = vec![l.zero()];
        for &a in &atoms {
            let extra: Vec<usize> = elems.iter().filter_map(|&e| l.join(e, a)).collect();
            if extra.len() != elems.len() {
                break;
            }
            elems.extend(extra);
        }
        elems.sort_unstable();
        elems.dedup();
        if elems.len() != 1 << atoms.len() || !l.is_boolean_subset(&elems) || !closed_under_orthogonal_joins(l, &elems)
        {
            continue;
        }
        found.push(elems);
    }
    found.sort();
    found.dedup();
    let maximal: Vec<Vec<usize>> = found
        .iter()
        .filter(|s| !found.iter().any(|t| t.len() > s.len() && s.iter().all(|x| t.contains(x))))
        .cloned()
        .collect();
    maximal
}

pub fn closed_under_orthogonal_joins(l: &EventAlgebra, elems: &[usize]) -> bool {
    elems.iter().all(|&x| {
        elems.iter().all(|&y| !l.orthogonal(x, y) || l.join(x, y).is_some_and(|z| elems.binary_search(&z).is_ok()))
    })
}

/// Every block of `l` as an inclusion monic.
pub fn maximal_boolean_subalgebras(l: &Arc<EventAlgebra>) -> Vec<AlgebraMorphism> {
    block_element_sets(l).into_iter().map(|elems| inclusion(l, &elems, &subset_label(l, &elems))).collect()
}

/// Inclusion of the induced subalgebra on `elems` (which must be a subalgebra).
pub fn inclusion(l: &Arc<EventAlgebra>, elems: &[usize], name: &str) -> AlgebraMorphism {
    let sub = Arc::new(l.induced(elems, name).expect("subalgebra validates"));
    let map = sub.names().iter().map(|s| l.index_of(s).unwrap()).collect();
    validate_morphism(&format!("{name}⊂{}", l.name()), &sub, l, map, MorphismKind::Monic)
        .expect("inclusion of a subalgebra is monic")
}

/// A bijection preserving order and ortho, if one exists.
pub fn find_isomorphism(a: &EventAlgebra, b: &EventAlgebra) -> Option<Vec<usize>> {
    if a.len() != b.len() || a.atoms().len() != b.atoms().len() {
        return None;
    }
    let sig = |l: &EventAlgebra, x: usize| {
        let down = l.elements().filter(|&z| l.leq(z, x)).count();
        let up = l.elements().filter(|&z| l.leq(x, z)).count();
        (down, up)
    };
    let sa: Vec<_> = a.elements().map(|x| sig(a, x)).collect();
    let sb: Vec<_> = b.elements().map(|x| sig(b, x)).collect();
    let mut f: Vec<Option<usize>> = vec![None; a.len()];
    let mut used = vec![false; b.len()];
    fn consistent(a: &EventAlgebra, b: &EventAlgebra, f: &[Option<usize>], x: usize) -> bool {
        let fx = f[x].unwrap();
        (0..a.len()).all(|u| match f[u] {
            Some(fu) => a.leq(x, u) == b.leq(fx, fu) && a.leq(u, x) == b.leq(fu, fx),
            None => true,
        })
    }
    fn go(
        a: &EventAlgebra,
        b: &EventAlgebra,
        sa: &[(usize, usize)],
        sb: &[(usize, usize)],
        f: &mut Vec<Option<usize>>,
        used: &mut Vec<bool>,
        x: usize,
    ) -> bool {
        if x == a.len() {
            return true;
        }
        if f[x].is_some() {
            return go(a, b, sa, sb, f, used, x + 1);
        }
        let ox = a.ortho(x);
        for y in b.elements() {
            let oy = b.ortho(y);
            if used[y] || sa[x] != sb[y] || (ox != x) != (oy != y) || (ox != x && used[oy]) {
                continue;
            }
            f[x] = Some(y);
            used[y] = true;
            f[ox] = Some(oy);
            used[oy] = true;
            if consistent(a, b, f, x) && consistent(a, b, f, ox) && go(a, b, sa, sb, f, used, x + 1) {
                return true;
            }
            f[x] = None;
            used[y] = false;
            f[ox] = None;
            used[oy] = false;
        }
        false
    }
    go(a, b, &sa, &sb, &mut f, &mut used, 0).then(|| f.into_iter().map(Option::unwrap).collect())
}
