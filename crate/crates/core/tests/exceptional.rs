mod common;

use std::f64::consts::PI;

use epoint_core::exceptional::{self, ParamGrid};
use epoint_core::unfolding::{self, OffsetVector};
use epoint_core::zeros::{self, Rect};
use epoint_core::{Binding, ExceptionalPoint, PotentialSpec, ZeroOptions};

use common::{demo, demo_grid, demo_region, jost_at, richardson};

#[test]
fn located_point_is_a_fixed_point() {
    let (spec, ep, _) = demo();
    let again = exceptional::locate(spec, ep.k_d, ep.x_star).unwrap();
    assert!((again.k_d - ep.k_d).norm() < 1e-12);
    assert!(again.x_star.distance(&ep.x_star) < 1e-10);
    assert!(again.iterations <= 1, "{} iterations", again.iterations);
}

#[test]
fn double_zero_at_the_ep() {
    let (spec, ep, _) = demo();
    // f and ∂f/∂k vanish by the oracle, f_kk does not.
    assert!(jost_at(spec, ep.x_star, ep.k_d).norm() < 1e-10);
    let fk = richardson(&|t| jost_at(spec, ep.x_star, ep.k_d + t), 1, 0.05, 5);
    let fkk = richardson(&|t| jost_at(spec, ep.x_star, ep.k_d + t), 2, 0.05, 5);
    assert!(fk.norm() < 1e-8, "|f_k| = {}", fk.norm());
    assert!((fkk - ep.f_kk).norm() < 1e-6 * ep.f_kk.norm());
    // Contour count: exactly two zeros in a small square, none nearby.
    for half in [1e-4, 1e-3, 5e-3] {
        let n = zeros::count_zeros(spec, ep.x_star, &Rect::square(ep.k_d, half)).unwrap();
        assert_eq!(n, 2, "half-side {half}");
    }
}

#[test]
fn best_seed_is_within_one_grid_cell() {
    let (spec, ep, _) = demo();
    let grid = demo_grid();
    let scan = exceptional::scan_seeds(spec, &grid, &demo_region()).unwrap();
    let s = &scan.seeds[0];
    let (h1, h2) = grid.steps();
    assert!(
        (s.p.x1 - ep.x_star.x1).abs() <= h1,
        "{:?} vs {:?}",
        s.p,
        ep.x_star
    );
    assert!((s.p.x2 - ep.x_star.x2).abs() <= h2);
    assert!(s.gap > 0.0);
}

#[test]
fn swapping_bindings_mirrors_the_scan() {
    let (spec, ep, _) = demo();
    let [b1, b2] = spec.bindings();
    let mirrored = PotentialSpec::new("mirrored", spec.layers().to_vec(), [b2, b1]).unwrap();
    let g = demo_grid();
    let mg = ParamGrid::new(g.n2, g.n1, (g.x2_lo, g.x2_hi), (g.x1_lo, g.x1_hi)).unwrap();
    let a = exceptional::scan_seeds(spec, &g, &demo_region()).unwrap();
    let b = exceptional::scan_seeds(&mirrored, &mg, &demo_region()).unwrap();
    assert_eq!(a.seeds.len(), b.seeds.len());
    for (s, t) in a.seeds.iter().zip(&b.seeds) {
        assert!((s.p.x1 - t.p.x2).abs() < 1e-12 && (s.p.x2 - t.p.x1).abs() < 1e-12);
        assert!((s.k - t.k).norm() < 1e-12);
    }
    let m = exceptional::locate(&mirrored, b.seeds[0].k, b.seeds[0].p).unwrap();
    assert!((m.k_d - ep.k_d).norm() < 1e-10);
    assert!((m.x_star.x1 - ep.x_star.x2).abs() < 1e-9);
    assert!((m.x_star.x2 - ep.x_star.x1).abs() < 1e-9);
}

#[test]
fn doublet_stays_isolated_on_a_small_circle() {
    let (spec, _, m) = demo();
    let opts = ZeroOptions::default();
    for j in 0..16 {
        let xi = OffsetVector::polar(1e-3, 2.0 * PI * j as f64 / 16.0);
        let pair = unfolding::exact_doublet(spec, m, xi, &opts).unwrap();
        let gap = (pair[0] - pair[1]).norm();
        // Any third zero would have to sit inside a square of side 4·gap.
        let n = zeros::count_zeros(
            spec,
            xi.point(&m.ep),
            &Rect::square(0.5 * (pair[0] + pair[1]), 2.0 * gap),
        )
        .unwrap();
        assert_eq!(n, 2, "direction {j}");
    }
}

#[test]
fn json_round_trip_reverifies_identically() {
    let (spec, ep, _) = demo();
    let text = serde_json::to_string(ep).unwrap();
    let back: ExceptionalPoint = serde_json::from_str(&text).unwrap();
    assert_eq!(&back, ep);
    let v = exceptional::verify(spec, &back).unwrap();
    assert_eq!(v.residual, exceptional::verify(spec, ep).unwrap().residual);
    assert!(v.residual < 1e-10);
}

#[test]
fn same_ep_under_a_width_binding() {
    // Drive the well width instead of the inner barrier height.
    let (spec, ep, _) = demo();
    let mut layers = spec.layers().to_vec();
    layers[1].height = ep.x_star.x1;
    let family = PotentialSpec::new(
        "width",
        layers,
        [Some(Binding::width(2)), Some(Binding::height(3))],
    )
    .unwrap();
    // At the demo EP the well width is 1, so the same point is an EP of
    // this family too.
    let p = epoint_core::ParamPoint::new(1.0, ep.x_star.x2);
    let found = exceptional::locate(&family, ep.k_d, p.offset(1e-3, -1e-3)).unwrap();
    assert!((found.k_d - ep.k_d).norm() < 1e-9);
    assert!(found.x_star.distance(&p) < 1e-9);
}
