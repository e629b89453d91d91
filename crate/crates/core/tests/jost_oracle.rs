mod common;

use proptest::prelude::*;

use epoint_core::jost;
use epoint_core::{Binding, Layer, ParamPoint, PotentialSpec, C64};

use common::{jost_at, rel, richardson};

fn three_layer(width_bound: bool) -> PotentialSpec {
    let layers = vec![
        Layer::new(0.7, -2.0).unwrap(),
        Layer::new(1.3, 9.0).unwrap(),
        Layer::new(0.4, 3.0).unwrap(),
    ];
    let x1 = if width_bound {
        Binding::width(1)
    } else {
        Binding::height(1)
    };
    PotentialSpec::new("three", layers, [Some(x1), Some(Binding::height(2))]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn value_matches_transfer_matrices(
        re in 0.05f64..5.0, im in -2.0f64..-1e-3,
        x1 in 0.5f64..12.0, x2 in -3.0f64..6.0,
    ) {
        let k = C64::new(re, im);
        for spec in [three_layer(false), PotentialSpec::demo_double_barrier()] {
            let p = ParamPoint::new(x1.max(0.5), x2);
            let got = jost::eval(&spec, p, k).unwrap().f;
            prop_assert!(rel(got, jost_at(&spec, p, k)) < 1e-11);
        }
    }

    #[test]
    fn reflection_symmetry(re in 0.05f64..5.0, im in -2.0f64..-1e-3) {
        // f(−k̄) = conj f(k) for a real potential.
        let spec = PotentialSpec::demo_double_barrier();
        let p = spec.base_point();
        let k = C64::new(re, im);
        let a = jost::eval(&spec, p, k).unwrap();
        let b = jost::eval(&spec, p, -k.conj()).unwrap();
        prop_assert!(rel(b.f, a.f.conj()) < 1e-12);
        // d/dk picks up a sign under k → −k̄.
        prop_assert!(rel(b.df_dk, -a.df_dk.conj()) < 1e-12);
    }
}

#[test]
fn width_derivative_matches_oracle() {
    let spec = three_layer(true);
    let p = ParamPoint::new(1.1, 2.5);
    for k in [
        C64::new(0.8, -0.05),
        C64::new(2.7, -0.6),
        C64::new(4.1, -1.2),
    ] {
        let v = jost::eval(&spec, p, k).unwrap();
        let dx = richardson(&|t| jost_at(&spec, p.offset(t, 0.0), k), 1, 0.02, 5);
        let dxk = richardson(
            &|t| richardson(&|s| jost_at(&spec, p.offset(t, 0.0), k + s), 1, 0.02, 5),
            1,
            0.02,
            5,
        );
        assert!(rel(v.df_dx[0], dx) < 1e-9, "{} vs {dx}", v.df_dx[0]);
        assert!(rel(v.d2f_dxdk[0], dxk) < 1e-8, "{} vs {dxk}", v.d2f_dxdk[0]);
    }
}

#[test]
fn derivatives_through_kappa_zero() {
    // k² = V in the barrier: the series form has no branch point there.
    let spec = PotentialSpec::demo_double_barrier();
    let p = spec.base_point();
    let k = C64::new(14.5f64.sqrt(), 0.0) + C64::new(0.0, -1e-12);
    let v = jost::eval(&spec, p, k).unwrap();
    let d = richardson(&|t| jost_at(&spec, p, k + t), 1, 0.01, 5);
    assert!(rel(v.df_dk, d) < 1e-8, "{} vs {d}", v.df_dk);
}

#[test]
fn unbound_parameter_has_zero_slot() {
    let spec = PotentialSpec::new(
        "one",
        vec![Layer::new(1.0, 4.0).unwrap()],
        [Some(Binding::height(0)), None],
    )
    .unwrap();
    let v = jost::eval(&spec, ParamPoint::new(4.0, 123.0), C64::new(1.0, -0.3)).unwrap();
    assert_eq!(v.df_dx[1], C64::new(0.0, 0.0));
    assert_eq!(v.d2f_dxdk[1], C64::new(0.0, 0.0));
    assert!(v.df_dx[0].norm() > 0.0);
}
