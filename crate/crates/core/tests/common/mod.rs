#![allow(dead_code)]

use fracmax::{Domain, GridFunction};
use proptest::prelude::*;

pub type D = Domain<f64>;
pub type G = GridFunction<f64>;

/// A 1D grid of 2..=64 cells or a 2D grid of 2..=12 cells per axis.
pub fn domain() -> impl Strategy<Value = D> {
    prop_oneof![
        3 => (2usize..=64).prop_map(|n| D::symmetric(1, 1.0, n).unwrap()),
        1 => (2usize..=12).prop_map(|n| D::symmetric(2, 1.0, n).unwrap()),
    ]
}

pub fn samples(dom: &D, lo: f64, hi: f64) -> impl Strategy<Value = G> {
    let dom = dom.clone();
    prop::collection::vec(lo..hi, dom.len())
        .prop_map(move |v| GridFunction::new(dom.clone(), v).unwrap())
}

/// A domain with one function on it.
pub fn grid_fn(lo: f64, hi: f64) -> impl Strategy<Value = G> {
    domain().prop_flat_map(move |d| samples(&d, lo, hi))
}

/// A domain with two functions on it.
pub fn grid_pair(lo: f64, hi: f64) -> impl Strategy<Value = (G, G)> {
    domain().prop_flat_map(move |d| (samples(&d, lo, hi), samples(&d, lo, hi)))
}

pub fn close(a: f64, b: f64, rtol: f64) -> bool {
    (a - b).abs() <= rtol * (1.0 + a.abs().max(b.abs()))
}
