use std::sync::Arc;
use std::time::Instant;

use qlogic::adjunction::{adjunction_bijection_check, hom_presheaf};
use qlogic::corpus::{load, valid_files};
use qlogic::site::{default_site, yoneda};

fn main() {
    for f in valid_files() {
        let l = load(&f);
        for (kind, site) in [("default", default_site(&l)), ("saturated", default_site(&l).saturated())] {
            let site = Arc::new(site);
            let t = Instant::now();
            let mut ys = vec![];
            for o in 0..site.objects().len() {
                let y = yoneda(&site, o).unwrap();
                let r = adjunction_bijection_check(&y, &l).map(|r| (r.nat_count, r.hom_count, r.holds()));
                ys.push(r.map_err(|e| e.to_string()));
            }
            let ty = t.elapsed();
            if kind == "default" {
                println!(
                    "{f} {kind} arrows {} y-all-ok {} ({ty:?})",
                    site.arrows().len(),
                    ys.iter().all(|y| matches!(y, Ok((_, _, true))))
                );
                continue;
            }
            let t = Instant::now();
            let r = hom_presheaf(&site, &l);
            let rr = adjunction_bijection_check(r.presheaf(), &l).map(|r| (r.nat_count, r.hom_count, r.holds()));
            println!(
                "{f} {kind} arrows {} y-all-ok {} ({ty:?}) R(L) {:?} ({:?})",
                site.arrows().len(),
                ys.iter().all(|y| matches!(y, Ok((_, _, true)))),
                rr.map_err(|e| e.to_string()),
                t.elapsed()
            );
            if ys.iter().any(|y| !matches!(y, Ok((_, _, true)))) {
                println!("   {:?}", ys);
            }
        }
    }
}
