use drs_dirac::spectrum::tables::{bundled, parse};
use drs_dirac::spectrum::{audit_table, AuditOptions, RootClass};
use std::time::Instant;

#[test]
fn every_entry_is_classified_within_budget() {
    let start = Instant::now();
    for id in 1..=4 {
        let entries = bundled(id).unwrap();
        let report = audit_table(id, &entries, &AuditOptions::default()).unwrap();
        let s = &report.summary;
        assert_eq!(s.total, entries.len());
        assert_eq!(s.a + s.b + s.c + s.d, s.total);
        // matched entries carry a deviation inside the tolerance, unmatched ones none
        for e in &report.entries {
            match e.class {
                RootClass::D => assert!(e.deviation.is_none()),
                _ => assert!(e.deviation.unwrap() < report.tolerance),
            }
        }
        eprintln!("table {id}: {} A {} B {} C {} D, {:?}", s.a, s.b, s.c, s.d, start.elapsed());
    }
    assert!(start.elapsed().as_secs_f64() < 30.0, "{:?}", start.elapsed());
}

#[test]
fn oscillator_central_entries_match_tightly() {
    let entries: Vec<_> = bundled(4).unwrap().into_iter().filter(|e| e.a == 0.0 && e.b == 0.0).collect();
    let report = audit_table(4, &entries, &AuditOptions::default()).unwrap();
    for e in &report.entries {
        assert!(e.deviation.unwrap() < 1e-6, "{e:?}");
    }
}

#[test]
fn spin_kratzer_ring_ground_is_a_and_b() {
    let entries: Vec<_> =
        bundled(3).unwrap().into_iter().filter(|e| e.qn.n == 0 && e.qn.n_prime == 0 && e.qn.m == 0 && e.a == 1.0 && e.b == 1.0).collect();
    let report = audit_table(3, &entries, &AuditOptions::default()).unwrap();
    let classes: Vec<_> = report.entries.iter().map(|e| e.class).collect();
    assert_eq!(classes, vec![RootClass::A, RootClass::B]);
}

#[test]
fn fabricated_entry_lands_in_d_with_nearest_root() {
    let entries = parse("0 0 0 0 0 -3.3").unwrap();
    let report = audit_table(1, &entries, &AuditOptions::default()).unwrap();
    let e = &report.entries[0];
    assert_eq!(e.class, RootClass::D);
    assert!(e.nearest_distance.unwrap() > 1e-4);
    assert_eq!(report.d_list().len(), 1);
    assert!(report.to_text().contains("unexplained"));
}

#[test]
fn unknown_table_is_an_error() {
    assert!(audit_table(9, &[], &AuditOptions::default()).is_err());
}

