use plsigma::catalog;
use plsigma::checks::{verify_bialgebra, Sampling};
use plsigma::Tolerances;

#[test]
fn every_catalog_entry_passes_the_battery() {
    let tol = Tolerances::default();
    let mut entries = catalog::entries();
    entries.push(catalog::example_beta(-2.0));
    entries.push(catalog::example_beta(0.5));
    for entry in entries {
        let reports = verify_bialgebra(
            &entry.constants().unwrap(),
            &entry.cocommutator().unwrap(),
            entry.r().as_ref(),
            &tol,
            &Sampling::default(),
        );
        for r in &reports {
            println!(
                "{:<14} {:<30} {:>10.3e} <= {:>10.3e} {}",
                entry.name, r.check_name, r.max_defect, r.tolerance, r.pass
            );
        }
        let failed: Vec<_> = reports.iter().filter(|r| !r.pass).collect();
        assert!(failed.is_empty(), "{}: {:?}", entry.name, failed);
    }
}

#[test]
fn invalid_fixtures_fail_the_battery() {
    for entry in catalog::invalid_fixtures() {
        let reports = verify_bialgebra(
            &entry.constants().unwrap(),
            &entry.cocommutator().unwrap(),
            None,
            &Tolerances::default(),
            &Sampling::default(),
        );
        assert!(reports.iter().any(|r| !r.pass), "{}", entry.name);
    }
}
