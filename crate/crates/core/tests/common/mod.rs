//! Oracles shared by the integration tests. Nothing here calls into the
//! library's Jost recursion; values come from plain transfer matrices with
//! an explicit complex square root, derivatives from Richardson-extrapolated
//! central differences.

#![allow(dead_code)]

use std::sync::OnceLock;

use epoint_core::potential::instantiate;
use epoint_core::unfolding::{self, UnfoldingModel};
use epoint_core::{ExceptionalPoint, Layer, ParamGrid, ParamPoint, PotentialSpec, Rect, C64};

/// f(−k) = e^{ikR}(φ′(R) − ikφ(R)) with κ = √(k² − V) per layer.
pub fn jost_value(layers: &[Layer], k: C64) -> C64 {
    let (mut phi, mut dphi) = (C64::new(0.0, 0.0), C64::new(1.0, 0.0));
    let mut radius = 0.0;
    for l in layers {
        let kappa = (k * k - l.height).sqrt();
        let (c, s) = ((kappa * l.width).cos(), (kappa * l.width).sin());
        let next_phi = c * phi + s / kappa * dphi;
        let next_dphi = -kappa * s * phi + c * dphi;
        phi = next_phi;
        dphi = next_dphi;
        radius += l.width;
    }
    let i = C64::new(0.0, 1.0);
    (i * k * radius).exp() * (dphi - i * k * phi)
}

pub fn jost_at(spec: &PotentialSpec, p: ParamPoint, k: C64) -> C64 {
    jost_value(&instantiate(spec, p).expect("valid point"), k)
}

/// Central-difference stencil for the n-th derivative (n = 1, 2, 3) of g at 0.
fn stencil(g: &dyn Fn(f64) -> C64, n: usize, h: f64) -> C64 {
    match n {
        1 => (g(h) - g(-h)) / (2.0 * h),
        2 => (g(h) - 2.0 * g(0.0) + g(-h)) / (h * h),
        3 => (g(2.0 * h) - 2.0 * g(h) + 2.0 * g(-h) - g(-2.0 * h)) / (2.0 * h * h * h),
        _ => unreachable!("order {n}"),
    }
}

/// Richardson tableau over step halvings; the stencils have even error
/// expansions, so column j removes the h^{2j} term.
pub fn richardson(g: &dyn Fn(f64) -> C64, n: usize, h0: f64, levels: usize) -> C64 {
    let mut prev: Vec<C64> = Vec::new();
    for l in 0..levels {
        let mut row = vec![stencil(g, n, h0 / 2f64.powi(l as i32))];
        for j in 1..=l {
            let f = 4f64.powi(j as i32);
            let v = (row[j - 1] * f - prev[j - 1]) / (f - 1.0);
            row.push(v);
        }
        prev = row;
    }
    *prev.last().expect("levels > 0")
}

pub fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

/// Demo search window around the first doublet.
pub fn demo_region() -> Rect {
    Rect::new(1.2, 2.4, -0.3, -1e-6).unwrap()
}

pub fn demo_grid() -> ParamGrid {
    ParamGrid::parse("21,21,14.0,15.4,4.8,5.5").unwrap()
}

/// The demo EP, found once per test binary by scan + locate, with its
/// calibrated model.
pub fn demo() -> &'static (PotentialSpec, ExceptionalPoint, UnfoldingModel) {
    static DEMO: OnceLock<(PotentialSpec, ExceptionalPoint, UnfoldingModel)> = OnceLock::new();
    DEMO.get_or_init(|| {
        let spec = PotentialSpec::demo_double_barrier();
        let seeds = epoint_core::scan_seeds(&spec, &demo_grid(), &demo_region()).unwrap();
        let s = seeds.seeds.first().expect("demo grid has a seed");
        let ep = epoint_core::locate(&spec, s.k, s.p).unwrap();
        let m = unfolding::extract(&spec, &ep).unwrap();
        let cal = unfolding::validity_radius(&spec, &m).unwrap();
        (spec, ep, m.with_calibration(&cal))
    })
}
