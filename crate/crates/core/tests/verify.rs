use boolcomp::verify::{run_suite, Suite};

#[test]
fn fast_suites_pass() {
    for s in [
        Suite::Bublitz,
        Suite::Lift,
        Suite::Nand,
        Suite::Structural,
        Suite::Rc,
    ] {
        let r = run_suite(s).unwrap();
        for n in &r.notes {
            eprintln!("{s}: {} {}", n.name, n.detail);
        }
        assert!(r.passed, "{s}: {:?}", r.first_failure());
        assert!(r.failures.is_empty());
    }
}

#[test]
fn report_serializes() {
    let r = run_suite(Suite::Bublitz).unwrap();
    let v = serde_json::to_value(&r).unwrap();
    assert_eq!(v["suite"], "bublitz");
    assert_eq!(v["criterion"], 1);
    assert_eq!(v["checks"], 257 + 1);
}
