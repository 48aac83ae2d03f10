#![allow(dead_code)]

use std::sync::Arc;

use qlogic::morphism::check_conditions;
use qlogic::{EventAlgebra, MorphismKind};

/// Maps `b -> l` passing the validator, by filtering every candidate map.
///
/// With `all_maps` every total map is tried. Otherwise only maps with
/// `H(x*) = H(x)*` are generated, one choice per ortho pair; the validator
/// rejects every other map at condition [b] regardless.
pub fn brute_force_homs(b: &EventAlgebra, l: &EventAlgebra, kind: MorphismKind, all_maps: bool) -> Vec<Vec<usize>> {
    let free: Vec<usize> =
        if all_maps { b.elements().collect() } else { b.elements().filter(|&x| x <= b.ortho(x)).collect() };
    let n = l.len();
    let mut out = vec![];
    let mut choice = vec![0usize; free.len()];
    let mut map = vec![0usize; b.len()];
    loop {
        for (i, &x) in free.iter().enumerate() {
            map[x] = choice[i];
            if !all_maps {
                map[b.ortho(x)] = l.ortho(choice[i]);
            }
        }
        let consistent = all_maps || free.iter().enumerate().all(|(i, &x)| map[x] == choice[i]);
        if consistent && check_conditions(b, l, &map, kind).is_ok() {
            out.push(map.clone());
        }
        let mut k = 0;
        loop {
            if k == choice.len() {
                out.sort();
                out.dedup();
                return out;
            }
            choice[k] += 1;
            if choice[k] < n {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
    }
}

/// Number of candidate maps `brute_force_homs` would try.
pub fn candidate_count(b: &EventAlgebra, l: &EventAlgebra, all_maps: bool) -> f64 {
    let free = if all_maps { b.len() } else { b.elements().filter(|&x| x <= b.ortho(x)).count() };
    (l.len() as f64).powi(free as i32)
}

pub fn arc(l: EventAlgebra) -> Arc<EventAlgebra> {
    Arc::new(l)
}

/// Horizontal sum of Boolean blocks, block `i` having `sizes[i]` atoms,
/// glued along `0` and `1`.
pub fn horizontal_sum(sizes: &[usize]) -> EventAlgebra {
    let mut raw = qlogic::RawAlgebra {
        name: format!("HS{}", sizes.iter().map(|n| n.to_string()).collect::<Vec<_>>().join("-")),
        elements: vec!["0".into(), "1".into()],
        zero: "0".into(),
        one: "1".into(),
        ..Default::default()
    };
    for (i, &n) in sizes.iter().enumerate() {
        let full = (1usize << n) - 1;
        let id = |m: usize| format!("h{i}_{m:0n$b}");
        for m in 1..full {
            raw.elements.push(id(m));
            if m < full ^ m {
                raw.ortho.push((id(m), id(full ^ m)));
            }
            for k in 1..full {
                if k != m && k & m == k {
                    raw.leq.push((id(k), id(m)));
                }
            }
        }
    }
    qlogic::validate_event_algebra(&raw).expect("horizontal sums of Boolean algebras are orthomodular")
}

/// Least upper bound by scanning all upper bounds.
pub fn lub(l: &EventAlgebra, xs: &[usize]) -> Option<usize> {
    let ubs: Vec<usize> = l.elements().filter(|&u| xs.iter().all(|&x| l.leq(x, u))).collect();
    ubs.iter().copied().find(|&u| ubs.iter().all(|&v| l.leq(u, v)))
}
