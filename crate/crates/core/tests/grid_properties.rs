mod common;

use common::*;
use fracmax::grid::io::{decode_gfn, encode_gfn};
use fracmax::grid::{
    average, decompose, indicator, integrate, pointwise_lipschitz_seminorm, PairBudget,
};
use fracmax::maxop::PrefixTable;
use fracmax::{Cube, CubeFamily};
use proptest::prelude::*;

/// A function and a cube inside its domain.
fn fn_and_cube() -> impl Strategy<Value = (G, Cube)> {
    grid_fn(-5.0, 5.0).prop_flat_map(|f| {
        let n = f.domain().min_cells();
        let dim = f.domain().dim();
        (1..=n).prop_flat_map(move |side| {
            let f = f.clone();
            (0..=n - side, 0..=n - side).prop_map(move |(a, b)| {
                let anchor = if dim == 1 { vec![a] } else { vec![a, b] };
                (f.clone(), Cube::from_anchor(&anchor, side).unwrap())
            })
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn integral_is_additive_over_halves((f, q) in fn_and_cube()) {
        prop_assume!(q.side % 2 == 0);
        let dom = f.domain();
        let half = q.side / 2;
        let mut parts = 0.0;
        let offsets: Vec<Vec<usize>> = if dom.dim() == 1 {
            vec![vec![0], vec![half]]
        } else {
            vec![vec![0, 0], vec![0, half], vec![half, 0], vec![half, half]]
        };
        for off in offsets {
            let anchor: Vec<usize> = (0..dom.dim()).map(|a| q.anchor[a] + off[a]).collect();
            parts += integrate(&f, &Cube::from_anchor(&anchor, half).unwrap()).unwrap();
        }
        let whole = integrate(&f, &q).unwrap();
        let scale = integrate(&f.abs(), &q).unwrap();
        prop_assert!((whole - parts).abs() <= 1e-12 * (1.0 + scale));
    }

    #[test]
    fn indicator_averages_to_one((f, q) in fn_and_cube()) {
        let chi = indicator(&q, f.domain()).unwrap();
        prop_assert_eq!(average(&chi, &q).unwrap(), 1.0);
    }

    #[test]
    fn prefix_table_matches_direct_sums((f, q) in fn_and_cube()) {
        let table = PrefixTable::new(&f);
        let direct: f64 = f.restrict(&q).unwrap().iter().sum::<f64>() * f.domain().cell_measure();
        let scale: f64 = f.abs().restrict(&q).unwrap().iter().sum::<f64>() * f.domain().cell_measure();
        prop_assert!((table.cube_integral(f.domain(), &q) - direct).abs() <= 1e-12 * (1.0 + scale));
    }

    #[test]
    fn decomposition_is_exact(f in grid_fn(-5.0, 5.0)) {
        let (pos, neg) = decompose(&f);
        for ((&p, &m), &v) in pos.samples().iter().zip(neg.samples()).zip(f.samples()) {
            prop_assert!(p >= 0.0 && m >= 0.0 && p * m == 0.0);
            prop_assert_eq!(p - m, v);
        }
    }

    #[test]
    fn lipschitz_seminorm_is_homogeneous(f in grid_fn(-5.0, 5.0), c in -4.0f64..4.0, beta in 0.1f64..0.9) {
        let base = pointwise_lipschitz_seminorm(&f, beta, PairBudget::default()).unwrap();
        let scaled = pointwise_lipschitz_seminorm(&f.scaled(c).unwrap(), beta, PairBudget::default()).unwrap();
        prop_assert!((scaled - c.abs() * base).abs() <= 1e-12 * (1.0 + c.abs() * base));
    }

    #[test]
    fn gfn_round_trip_is_bit_exact(f in grid_fn(-1e6, 1e6), flag in any::<bool>()) {
        let (back, got_flag) = decode_gfn::<f64>(&encode_gfn(&f, flag)).unwrap();
        prop_assert_eq!(got_flag, flag);
        prop_assert_eq!(back.domain(), f.domain());
        let same = back.samples().iter().zip(f.samples()).all(|(a, b)| a.to_bits() == b.to_bits());
        prop_assert!(same);
    }

    #[test]
    fn family_cubes_lie_inside_the_domain(d in domain(), stride in 1usize..4) {
        for fam in [CubeFamily::dyadic(&d), CubeFamily::all(&d)] {
            let fam = fam.with_stride(stride).unwrap();
            prop_assert!(fam.scales().windows(2).all(|w| w[0] < w[1]));
            for q in fam.cubes(&d) {
                prop_assert!(d.check_cube(&q).is_ok());
                prop_assert!(q.measure(&d) > 0.0);
            }
        }
    }
}

#[test]
fn cell_centers_sit_at_half_steps() {
    let d = D::interval(-1.0, 3.0, 8).unwrap();
    for i in 0..8 {
        assert_eq!(d.coordinate(0, i), -1.0 + (i as f64 + 0.5) * 0.5);
    }
}
