mod common;

use common::*;
use fracmax::oscfun::{cube_functional_value, sup_functional, sup_functional_over};
use fracmax::{Cube, CubeFamily, OscFunctionalSpec, OscKind};
use proptest::prelude::*;

fn spec(kind: OscKind) -> OscFunctionalSpec<f64> {
    let s = OscFunctionalSpec::new(kind)
        .with_alpha(0.25)
        .with_gamma_for_max(0.25);
    if kind.is_lipschitz() {
        s.with_beta(0.5)
    } else {
        s
    }
}

fn kind() -> impl Strategy<Value = OscKind> {
    prop::sample::select(OscKind::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn functionals_are_positively_homogeneous(b in grid_fn(-3.0, 3.0), k in kind(), c in 0.01f64..20.0) {
        let fam = CubeFamily::dyadic(b.domain());
        let sp = spec(k);
        let base = sup_functional(&b, &sp, &fam).unwrap().sup_value;
        let scaled = sup_functional(&b.scaled(c).unwrap(), &sp, &fam).unwrap().sup_value;
        prop_assert!((scaled - c * base).abs() <= 1e-12 * (1.0 + c * base));
    }

    #[test]
    fn mean_based_functionals_ignore_constants(b in grid_fn(-3.0, 3.0), k in kind(), c in -5.0f64..5.0) {
        prop_assume!(k.is_mean_based());
        let fam = CubeFamily::dyadic(b.domain());
        let sp = spec(k);
        let base = sup_functional(&b, &sp, &fam).unwrap().sup_value;
        let shifted = sup_functional(&b.shifted(c).unwrap(), &sp, &fam).unwrap().sup_value;
        prop_assert!((shifted - base).abs() <= 1e-12 * (1.0 + base + c.abs()));
    }

    #[test]
    fn larger_outer_families_never_decrease(b in grid_fn(-3.0, 3.0), k in kind()) {
        let d = b.domain();
        let inner = CubeFamily::dyadic(d);
        let sp = spec(k);
        let coarse = sup_functional_over(&b, &sp, &inner, &CubeFamily::dyadic(d).with_stride(2).unwrap()).unwrap();
        let fine = sup_functional_over(&b, &sp, &inner, &inner).unwrap();
        let all = sup_functional_over(&b, &sp, &inner, &CubeFamily::all(d)).unwrap();
        prop_assert!(coarse.sup_value <= fine.sup_value && fine.sup_value <= all.sup_value);
    }

    #[test]
    fn sup_is_the_largest_scale_maximum(b in grid_fn(-3.0, 3.0), k in kind()) {
        let r = sup_functional(&b, &spec(k), &CubeFamily::dyadic(b.domain())).unwrap();
        let top = r.per_scale_max.iter().map(|s| s.max).fold(f64::NEG_INFINITY, f64::max);
        prop_assert_eq!(r.sup_value, top);
    }

    #[test]
    fn lip_q_grows_with_q(b in grid_fn(-3.0, 3.0), q1 in 1.0f64..4.0, dq in 0.0f64..4.0) {
        let d = b.domain();
        let fam = CubeFamily::dyadic(d);
        let lo = spec(OscKind::LipQ).with_inner_q(q1);
        let hi = spec(OscKind::LipQ).with_inner_q(q1 + dq);
        for q in fam.cubes(d) {
            let a = cube_functional_value(&b, &q, &lo, &fam).unwrap();
            let c = cube_functional_value(&b, &q, &hi, &fam).unwrap();
            prop_assert!(a <= c * (1.0 + 1e-12) + 1e-15);
        }
    }

    #[test]
    fn bmo_seminorm_is_within_twice_the_mean_form(b in grid_fn(-3.0, 3.0)) {
        let d = b.domain();
        let fam = CubeFamily::dyadic(d);
        let bmo = spec(OscKind::BmoSeminorm);
        let mc = OscFunctionalSpec::new(OscKind::McBmo);
        let whole = Cube::from_anchor(&vec![0; d.dim()], d.min_cells()).unwrap();
        for q in fam.cubes(d).into_iter().chain([whole]) {
            let a = cube_functional_value(&b, &q, &bmo, &fam).unwrap();
            let c = cube_functional_value(&b, &q, &mc, &fam).unwrap();
            prop_assert!(a <= 2.0 * c + 1e-12);
        }
    }
}
