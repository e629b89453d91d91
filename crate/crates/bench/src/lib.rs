//! Fixtures shared by the benchmarks.

use epoint_core::{ParamPoint, PotentialSpec, Rect, C64};

pub use epoint_core;

/// The demo double barrier near its exceptional point.
pub fn demo() -> (PotentialSpec, ParamPoint) {
    (
        PotentialSpec::demo_double_barrier(),
        ParamPoint::new(14.6747, 5.1405),
    )
}

pub fn doublet_window() -> Rect {
    Rect::new(1.2, 2.4, -0.3, -1e-6).expect("valid window")
}

/// Points spread over the fourth quadrant.
pub fn k_samples(n: usize) -> Vec<C64> {
    (0..n)
        .map(|j| {
            let t = j as f64 / n as f64;
            C64::new(0.2 + 4.0 * t, -0.02 - 0.8 * (1.0 - t) * t)
        })
        .collect()
}
