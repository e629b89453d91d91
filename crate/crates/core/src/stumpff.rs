//! Stumpff functions `c_j(x) = Σ_m (−x)^m / (j + 2m)!` for complex x.
//!
//! A constant-potential layer of width w at squared local wavenumber
//! z = k² − V propagates (φ, φ′) through cos(√z w) = c₀(w²z) and
//! sin(√z w)/√z = w·c₁(w²z). Both are entire in z, so no square-root
//! branch ever has to be chosen.

use num_complex::Complex64 as C64;

pub(crate) const ORDERS: usize = 8;

const INV_FACT: [f64; ORDERS] = [
    1.0,
    1.0,
    1.0 / 2.0,
    1.0 / 6.0,
    1.0 / 24.0,
    1.0 / 120.0,
    1.0 / 720.0,
    1.0 / 5040.0,
];

/// Below this |x| the top orders come from the series and the rest by
/// downward recurrence; above it c₀, c₁ come from cos/sin and the rest by
/// upward recurrence. Both directions are well conditioned on their side.
const SERIES_LIMIT: f64 = 20.0;

/// c₀(x) … c₇(x).
pub(crate) fn stumpff(x: C64) -> [C64; ORDERS] {
    let mut c = [C64::new(0.0, 0.0); ORDERS];
    if x.norm() < SERIES_LIMIT {
        c[ORDERS - 1] = series(ORDERS - 1, x);
        c[ORDERS - 2] = series(ORDERS - 2, x);
        for j in (0..ORDERS - 2).rev() {
            c[j] = C64::new(INV_FACT[j], 0.0) - x * c[j + 2];
        }
    } else {
        let s = x.sqrt();
        c[0] = s.cos();
        c[1] = s.sin() / s;
        for j in 0..ORDERS - 2 {
            c[j + 2] = (C64::new(INV_FACT[j], 0.0) - c[j]) / x;
        }
    }
    c
}

fn series(j: usize, x: C64) -> C64 {
    let mut term = C64::new(INV_FACT[j], 0.0);
    let mut sum = term;
    for m in 0..60 {
        let a = (j + 2 * m + 1) as f64;
        term = term * (-x) / (a * (a + 1.0));
        sum += term;
        if term.norm() <= 1e-18 * sum.norm() {
            break;
        }
    }
    sum
}

/// Taylor coefficients `c_j⁽ⁿ⁾(x)/n!`, n = 0..=3, for j ∈ {0, 1}.
///
/// Uses `c_k′ = (k·c_{k+2} − c_{k+1}) / 2`, which keeps every derivative a
/// finite combination of Stumpff functions.
pub(crate) fn taylor(j: usize, c: &[C64; ORDERS]) -> [C64; 4] {
    debug_assert!(j <= 1);
    let mut basis = [0.0f64; ORDERS];
    basis[j] = 1.0;
    let mut out = [C64::new(0.0, 0.0); 4];
    let mut fact = 1.0;
    for (n, slot) in out.iter_mut().enumerate() {
        if n > 0 {
            fact *= n as f64;
        }
        let v: C64 = basis.iter().zip(c).map(|(b, ck)| *ck * *b).sum();
        *slot = v / fact;
        if n < 3 {
            let mut next = [0.0f64; ORDERS];
            for (k, &b) in basis.iter().enumerate() {
                if b != 0.0 {
                    next[k + 2] += 0.5 * k as f64 * b;
                    next[k + 1] -= 0.5 * b;
                }
            }
            basis = next;
        }
    }
    out
}
