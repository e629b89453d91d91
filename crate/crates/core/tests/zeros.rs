mod common;

use proptest::prelude::*;

use epoint_core::zeros::{self, winding_number};
use epoint_core::{Jost, ParamPoint, PotentialSpec, Rect, C64};

use common::{demo_region, jost_at};

/// Zeros by brute force: local minima of |f| on a fine grid, polished by
/// the secant method on the oracle value.
fn grid_scan(spec: &PotentialSpec, p: ParamPoint, r: &Rect, h: f64) -> Vec<C64> {
    let nx = (r.width() / h).ceil() as usize + 1;
    let ny = (r.height() / h).ceil() as usize + 1;
    let at = |i: usize, j: usize| C64::new(r.re_min + i as f64 * h, r.im_min + j as f64 * h);
    let mag: Vec<Vec<f64>> = (0..nx)
        .map(|i| (0..ny).map(|j| jost_at(spec, p, at(i, j)).norm()).collect())
        .collect();
    let mut found: Vec<C64> = Vec::new();
    for i in 1..nx - 1 {
        for j in 1..ny - 1 {
            let m = mag[i][j];
            let is_min = (i - 1..=i + 1)
                .flat_map(|a| (j - 1..=j + 1).map(move |b| (a, b)))
                .all(|(a, b)| (a, b) == (i, j) || mag[a][b] > m);
            if !is_min {
                continue;
            }
            let (mut k0, mut k1) = (at(i, j), at(i, j) + C64::new(0.1 * h, 0.1 * h));
            let (mut f0, mut f1) = (jost_at(spec, p, k0), jost_at(spec, p, k1));
            for _ in 0..60 {
                if f1 == f0 {
                    break;
                }
                let k2 = k1 - f1 * (k1 - k0) / (f1 - f0);
                (k0, f0) = (k1, f1);
                k1 = k2;
                f1 = jost_at(spec, p, k1);
                if (k1 - k0).norm() < 1e-15 * k1.norm() {
                    break;
                }
            }
            if r.contains(k1) && f1.norm() < 1e-10 && !found.iter().any(|z| (z - k1).norm() < 1e-8)
            {
                found.push(k1);
            }
        }
    }
    found
}

fn assert_same_set(mut a: Vec<C64>, mut b: Vec<C64>, tol: f64) {
    assert_eq!(a.len(), b.len(), "{a:?} vs {b:?}");
    let key = |z: &C64| (z.re, z.im);
    a.sort_by(|x, y| key(x).partial_cmp(&key(y)).unwrap());
    b.sort_by(|x, y| key(x).partial_cmp(&key(y)).unwrap());
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).norm() < tol, "{x} vs {y}");
    }
}

#[test]
fn demo_window_matches_grid_scan() {
    let spec = PotentialSpec::demo_double_barrier();
    for p in [spec.base_point(), ParamPoint::new(15.2, 4.9)] {
        let r = demo_region();
        let set = zeros::find_zeros(&spec, p, &r).unwrap();
        assert_eq!(set.winding, 2);
        assert_same_set(set.points(), grid_scan(&spec, p, &r, 2e-3), 1e-9);
    }
}

#[test]
fn wide_window_matches_grid_scan() {
    let spec = PotentialSpec::demo_double_barrier();
    let p = spec.base_point();
    let r = Rect::new(0.5, 4.5, -1.2, -1e-4).unwrap();
    let set = zeros::find_zeros(&spec, p, &r).unwrap();
    assert!(set.winding >= 3, "winding {}", set.winding);
    assert_same_set(set.points(), grid_scan(&spec, p, &r, 4e-3), 1e-9);
}

#[test]
fn free_potential_has_no_zeros() {
    let spec = PotentialSpec::free();
    let r = Rect::new(0.1, 8.0, -8.0, -1e-3).unwrap();
    let set = zeros::find_zeros(&spec, ParamPoint::new(0.0, 0.0), &r).unwrap();
    assert_eq!(set.winding, 0);
    assert!(set.zeros.is_empty());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn winding_is_additive(
        re0 in 0.4f64..3.0, w in 0.3f64..1.5,
        im1 in -0.05f64..-0.002, h in 0.1f64..0.8,
        s in 0.2f64..0.8,
    ) {
        let spec = PotentialSpec::demo_double_barrier();
        let jost = Jost::new(&spec, spec.base_point()).unwrap();
        let r = Rect::new(re0, re0 + w, im1 - h, im1).unwrap();
        let (Ok(total), Ok(parts)) = (
            winding_number(&jost, &r),
            r.split(s).iter().map(|q| winding_number(&jost, q)).collect::<Result<Vec<_>, _>>(),
        ) else {
            // A zero on a shared edge is a legitimate refusal.
            return Ok(());
        };
        prop_assert_eq!(total, parts.iter().sum::<i32>());
        prop_assert!(total >= 0);
    }
}
