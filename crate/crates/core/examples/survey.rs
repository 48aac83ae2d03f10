use std::sync::Arc;
use std::time::Instant;

use qlogic::classifier::{build_omega, classifier_check, truth_sweep, unit_proposition_check};
use qlogic::corpus::{load, valid_files};
use qlogic::site::default_site;

fn main() {
    for f in valid_files() {
        let l = load(&f);
        let site = Arc::new(default_site(&l));
        let t = Instant::now();
        let omega = build_omega(&site).map(|o| (o.algebra().len(), o.truth_coherent()));
        println!(
            "{f}: objects {} omega {:?} ({:?})",
            site.objects().len(),
            omega.as_ref().map_err(|e| e.to_string()),
            t.elapsed()
        );
        let t = Instant::now();
        let sweep = truth_sweep(&l, &site).map(|s| (s.checked, s.pasting_checked, s.holds()));
        println!("  sweep {:?} ({:?})", sweep.map_err(|e| e.to_string()), t.elapsed());
        if l.len() <= 12 {
            let c =
                classifier_check(&l, &site).map(|r| (r.subobject_count, r.hom_count, r.classifying.len(), r.holds()));
            println!("  classifier {:?}", c.map_err(|e| e.to_string()));
            let u = unit_proposition_check(&l, &site).map(|r| (r.components, r.unit_iso, r.classifier_holds));
            println!("  unit {:?}", u.map_err(|e| e.to_string()));
        }
    }
}
