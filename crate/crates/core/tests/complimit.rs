use boolcomp::complimit::{
    bs_lift_packing, bs_lift_singleton, charval, default_tol, limit_convergence, sandwich_check,
    Mat2,
};
use boolcomp::measures::MeasureId;
use boolcomp::rational::{q, qr};
use boolcomp::{bublitz, named_fn, Surd};

#[test]
fn bublitz_characteristic_values() {
    let f = bublitz();
    let cs = charval(&f, MeasureId::CStar, &default_tol()).unwrap();
    assert_eq!(cs.exact.as_rational(), Some(&qr(9, 2)));
    assert!(cs.lo <= qr(9, 2) && qr(9, 2) <= cs.hi);
    assert!(&cs.hi - &cs.lo <= default_tol());
    let c = charval(&f, MeasureId::C, &default_tol()).unwrap();
    assert_eq!(c.exact.as_rational(), Some(&q(5)));
}

#[test]
fn nand_certificate_limit() {
    for n in 2..=6usize {
        let f = named_fn("NAND", Some(n)).unwrap();
        let cv = charval(&f, MeasureId::C, &default_tol()).unwrap();
        assert_eq!(cv.exact, Surd::new(q(0), q(1), q(n as i64)), "n={n}");
    }
}

#[test]
fn bublitz_lift_beats_square() {
    let f = bublitz();
    let p = bs_lift_packing(&f, &f, false).unwrap();
    assert_eq!(p.arity, 36);
    assert_eq!(p.fold, 4);
    assert!(p.size >= 18, "size {}", p.size);
    let s = bs_lift_singleton(&f, true).unwrap();
    assert!(s.size >= 4);
}

#[test]
fn sandwich_nand2() {
    let f = named_fn("NAND", Some(2)).unwrap();
    for k in 1..=4 {
        let r = sandwich_check(&f, MeasureId::C, k).unwrap();
        assert!(r.holds(), "{r:?}");
    }
}

#[test]
fn bublitz_bs_table() {
    let t = limit_convergence(&bublitz(), MeasureId::Bs, 3).unwrap();
    assert_eq!(t.rows[0].value, Some(q(4)));
    assert!(t.rows[1].value.clone().unwrap() >= q(18));
    eprintln!("{:?}", t.rows);
}

#[test]
fn grouped_case_matrix() {
    let m = Mat2::from_ints(10, 0, 8, 4).unwrap();
    assert_eq!(m.rho().as_rational(), Some(&q(10)));
}
