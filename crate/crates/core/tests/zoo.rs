use std::time::Instant;

use boolcomp::zoo::{
    build_code, build_grouped, build_or_compose, build_random_code, build_star,
    verify_construction, ClaimStatus, ZooReport,
};
use boolcomp::{bublitz, named_fn};

fn show(r: &ZooReport) {
    for c in &r.results {
        eprintln!(
            "{:?} {:?}: {} [{}]",
            r.kind, c.status, c.description, c.detail
        );
    }
}

#[test]
fn star_claims_hold() {
    for s in 3..=5 {
        let r = verify_construction(&build_star(s).unwrap());
        show(&r);
        assert!(r.passed, "s = {s}");
        assert!(r.results[..4]
            .iter()
            .all(|c| c.status == ClaimStatus::ProvenAtScale));
    }
}

#[test]
fn star_or_composition_skipped_when_large() {
    let r = verify_construction(&build_star(5).unwrap());
    assert_eq!(r.results.last().unwrap().status, ClaimStatus::Skipped);
    let r = verify_construction(&build_star(3).unwrap());
    assert_eq!(r.results.last().unwrap().status, ClaimStatus::ProvenAtScale);
}

#[test]
fn grouped_sixteen() {
    let t = Instant::now();
    let r = verify_construction(&build_grouped(16).unwrap());
    show(&r);
    eprintln!("grouped(16) in {:?}", t.elapsed());
    assert!(r.passed);
    assert!(r
        .results
        .iter()
        .all(|c| c.status == ClaimStatus::ProvenAtScale));
}

#[test]
fn code_with_good_distance() {
    // a repetition-style code with distance 8 on 8 bits
    let r = verify_construction(&build_code(8, &[0, 0xff], 8).unwrap());
    show(&r);
    assert!(r.passed);
}

#[test]
fn code_distance_failure_is_reported() {
    let r = verify_construction(&build_code(6, &[0b000111, 0b001111], 3).unwrap());
    assert!(!r.passed);
    assert_eq!(r.results[1].status, ClaimStatus::Failed);
    assert_eq!(r.results[1].detail, "minimum distance 1");
}

#[test]
fn random_code_is_reproducible() {
    let a = build_random_code(10, 4, 7, 1).unwrap();
    let b = build_random_code(10, 4, 7, 1).unwrap();
    assert_eq!(a, b);
    let r = verify_construction(&a);
    show(&r);
    assert_eq!(r.results[0].status, ClaimStatus::ProvenAtScale);
    assert_eq!(r.results[2].status, ClaimStatus::ProvenAtScale);
}

#[test]
fn or_compose_identities() {
    for g in [bublitz(), named_fn("NAND", Some(3)).unwrap()] {
        let r = verify_construction(&build_or_compose(&g, 2).unwrap());
        show(&r);
        assert!(r.passed);
    }
}

// Golden values: codewords from the seeded stream; distance and measures
// checked by a brute-force script over all 2^16 inputs (bs_0 = C_0 = 3 pins
// bs*_0 = 3).
#[test]
fn random_code_golden() {
    let c = build_random_code(16, 8, 2024, 3).unwrap();
    assert_eq!(
        c.codewords,
        [19399, 28303, 59316, 3412, 7888, 62732, 19311, 12839]
    );
    let r = verify_construction(&c);
    show(&r);
    assert!(r.passed);
    let details: Vec<&str> = r.results.iter().map(|c| c.detail.as_str()).collect();
    assert_eq!(details[1], "minimum distance 3");
    assert_eq!(details[2], "r = 1, most short blocks at one input = 1");
    assert_eq!(&details[3..], ["3", "3", "3"]);
    assert!(r.results[3..]
        .iter()
        .all(|c| c.status == ClaimStatus::Observed));
}

#[test]
fn close_codewords_fail_distance_but_report_measures() {
    // small cube and many words: some seed draws two codewords at distance < 3
    let c = (0..64u64)
        .map(|seed| build_random_code(6, 6, seed, 3).unwrap())
        .find(|c| verify_construction(c).results[1].status == ClaimStatus::Failed)
        .expect("an adversarial seed exists");
    let r = verify_construction(&c);
    assert!(!r.passed);
    assert!(r.results[3..]
        .iter()
        .all(|c| c.status == ClaimStatus::Observed));
}
