use boolcomp::complimit::{charval, default_tol, Mat2, ProfileMatrix2};
use boolcomp::measures::{global, MeasureId};
use boolcomp::rational::{qr, Surd};
use boolcomp::tree::compose_aw;
use boolcomp::zoo::random_fn;
use boolcomp::{Assignment, Selector, WeightFn, WeightSelector};
use proptest::prelude::*;

fn level() -> impl Strategy<Value = (Selector, WeightSelector)> {
    (1usize..=3).prop_flat_map(|n| {
        let w = || proptest::collection::vec((0i64..=4, 1i64..=3), n);
        (0u64..1 << n, 0u64..1 << n, w(), w()).prop_map(move |(a0, a1, w0, w1)| {
            let sel = Selector::new(
                Assignment::new(n, a0).unwrap(),
                Assignment::new(n, a1).unwrap(),
            )
            .unwrap();
            let wf = |v: Vec<(i64, i64)>| {
                WeightFn::new(v.into_iter().map(|(a, b)| qr(a, b)).collect()).unwrap()
            };
            (
                sel,
                WeightSelector {
                    w0: wf(w0),
                    w1: wf(w1),
                },
            )
        })
    })
}

fn nonconstant(arity: usize, seed: u64) -> boolcomp::BoolFn {
    (seed..)
        .map(|s| random_fn(arity, s).unwrap())
        .find(|f| !f.is_constant())
        .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn profile_matrix_product_law(
        levels in proptest::collection::vec(level(), 1..=4)
            .prop_filter("selectors fit in 64 leaves", |ls| ls.iter().map(|(s, _)| s.alpha0.arity).product::<usize>() <= 64)
    ) {
        let (sel, ws) = compose_aw(&levels).unwrap();
        let composed = ProfileMatrix2::new(&sel, &ws).unwrap().matrix();
        let product = levels
            .iter()
            .map(|(s, w)| ProfileMatrix2::new(s, w).unwrap().matrix())
            .fold(Mat2::identity(), |acc, m| acc.mul(&m));
        prop_assert_eq!(composed, product);
    }

    #[test]
    fn charval_between_min_side_and_max(arity in 1usize..=4, seed in any::<u64>()) {
        let f = nonconstant(arity, seed);
        for m in [MeasureId::S, MeasureId::C, MeasureId::CStar] {
            let cv = charval(&f, m, &default_tol()).unwrap();
            let g = global(&f, m).unwrap();
            let lo = Surd::rational(g.m0.clone().min(g.m1.clone()));
            prop_assert!(lo <= cv.exact, "{m}: {} < min side", cv.exact);
            prop_assert!(cv.exact <= Surd::rational(g.m.clone()), "{m}: {} > m", cv.exact);
        }
    }

    #[test]
    fn integral_limit_dominates_fractional(arity in 2usize..=5, seed in any::<u64>()) {
        let f = nonconstant(arity, seed);
        let c = charval(&f, MeasureId::C, &default_tol()).unwrap();
        let cs = charval(&f, MeasureId::CStar, &default_tol()).unwrap();
        prop_assert!(c.exact >= cs.exact, "C-hat {} < C*-hat {}", c.exact, cs.exact);
    }
}
