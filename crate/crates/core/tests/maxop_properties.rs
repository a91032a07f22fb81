mod common;

use common::*;
use fracmax::maxop::{maximal, maximal_commutator, nonlinear_commutator};
use fracmax::{CommutatorMode, CubeFamily, FracParams};
use proptest::prelude::*;

fn gamma() -> impl Strategy<Value = f64> {
    prop_oneof![Just(0.0), 0.0f64..0.9]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn maximal_is_sublinear((f, g) in grid_pair(-1.0, 1.0), gm in gamma()) {
        let fam = CubeFamily::dyadic(f.domain());
        let gp = FracParams::new(gm).unwrap();
        let mf = maximal(&f, &gp, &fam).unwrap();
        let mg = maximal(&g, &gp, &fam).unwrap();
        let mfg = maximal(&f.add(&g).unwrap(), &gp, &fam).unwrap();
        for i in 0..f.len() {
            prop_assert!(mfg.samples()[i] <= mf.samples()[i] + mg.samples()[i] + 1e-12);
        }
    }

    #[test]
    fn maximal_is_absolutely_homogeneous(f in grid_fn(-1.0, 1.0), c in -8.0f64..8.0, gm in gamma()) {
        let fam = CubeFamily::dyadic(f.domain());
        let gp = FracParams::new(gm).unwrap();
        let mf = maximal(&f, &gp, &fam).unwrap();
        let mcf = maximal(&f.scaled(c).unwrap(), &gp, &fam).unwrap();
        for (a, b) in mcf.samples().iter().zip(mf.samples()) {
            prop_assert!((a - c.abs() * b).abs() <= 1e-12 * (1.0 + c.abs() * b));
        }
    }

    #[test]
    fn larger_families_give_larger_maximal_functions(f in grid_fn(-1.0, 1.0), gm in gamma(), stride in 2usize..4) {
        let d = f.domain();
        let gp = FracParams::new(gm).unwrap();
        let coarse = maximal(&f, &gp, &CubeFamily::dyadic(d).with_stride(stride).unwrap()).unwrap();
        let dyadic = maximal(&f, &gp, &CubeFamily::dyadic(d)).unwrap();
        let all = maximal(&f, &gp, &CubeFamily::all(d)).unwrap();
        for i in 0..f.len() {
            prop_assert!(coarse.samples()[i] <= dyadic.samples()[i]);
            prop_assert!(dyadic.samples()[i] <= all.samples()[i]);
        }
    }

    #[test]
    fn maximal_commutator_is_bounded_by_twice_sup_b((b, f) in grid_pair(-2.0, 2.0), gm in gamma()) {
        let fam = CubeFamily::dyadic(b.domain());
        let gp = FracParams::new(gm).unwrap();
        let mc = maximal_commutator(&b, &f, &gp, &fam, CommutatorMode::Fast).unwrap();
        let mf = maximal(&f, &gp, &fam).unwrap();
        let k = 2.0 * b.sup_abs();
        for (a, m) in mc.samples().iter().zip(mf.samples()) {
            prop_assert!(*a <= k * m * (1.0 + 1e-12) + 1e-12);
        }
    }

    #[test]
    fn nonlinear_commutator_is_dominated_for_nonnegative_b((b, f) in grid_pair(0.0, 2.0), gm in gamma()) {
        let fam = CubeFamily::dyadic(b.domain());
        let gp = FracParams::new(gm).unwrap();
        let nl = nonlinear_commutator(&b, &f, &gp, &fam).unwrap();
        let mc = maximal_commutator(&b, &f, &gp, &fam, CommutatorMode::Fast).unwrap();
        for (a, m) in nl.samples().iter().zip(mc.samples()) {
            prop_assert!(a.abs() <= m + 1e-12 * (1.0 + m));
        }
    }

    #[test]
    fn fast_and_brute_commutators_agree((b, f) in grid_pair(-2.0, 2.0), gm in gamma(), stride in 1usize..3) {
        let fam = CubeFamily::dyadic(b.domain()).with_stride(stride).unwrap();
        let gp = FracParams::new(gm).unwrap();
        let fast = maximal_commutator(&b, &f, &gp, &fam, CommutatorMode::Fast).unwrap();
        let brute = maximal_commutator(&b, &f, &gp, &fam, CommutatorMode::Brute).unwrap();
        for (a, c) in fast.samples().iter().zip(brute.samples()) {
            prop_assert!((a - c).abs() <= 1e-10 * (1.0 + c.abs()));
        }
    }
}

#[test]
fn single_precision_tracks_double_precision() {
    let d = D::symmetric(2, 1.0, 24).unwrap();
    let f = fracmax::grid::make_corpus(&fracmax::Symbol::Bump, &d).unwrap();
    let fam = CubeFamily::dyadic(&d);
    let m64 = maximal(&f, &FracParams::new(0.5).unwrap(), &fam).unwrap();
    let m32 = maximal(&f.cast::<f32>(), &FracParams::new(0.5f32).unwrap(), &fam).unwrap();
    for (a, b) in m32.samples().iter().zip(m64.samples()) {
        assert!((f64::from(*a) - b).abs() <= 1e-5 * (1.0 + b));
    }
}
