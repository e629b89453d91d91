//! Truncated Taylor arithmetic for exact derivative propagation.
//!
//! [`Dual`] carries a value and its first k-derivative. [`Jet`] carries
//! the k-series up to third order plus first-order sensitivities to each
//! control parameter and their first k-derivative, which is exactly the
//! set of slots needed by the unfolding coefficients.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64 as C64;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

pub(crate) trait Taylor:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Mul<C64, Output = Self>
    + Neg<Output = Self>
{
    fn constant(c: C64) -> Self;

    /// The independent variable k at `k0`.
    fn var_k(k0: C64) -> Self;

    /// A real quantity that may be driven by control parameter `slot`.
    fn param(value: f64, slot: Option<usize>) -> Self;

    fn value(&self) -> C64;

    /// Applies a function given its Taylor coefficients `f⁽ⁿ⁾(v)/n!`,
    /// n = 0..=3, at `v = self.value()`.
    fn compose(&self, coeffs: &[C64; 4]) -> Self {
        let shift = *self - Self::constant(self.value());
        let mut acc = Self::constant(coeffs[0]);
        let mut power = shift;
        for c in &coeffs[1..] {
            acc = acc + power * *c;
            power = power * shift;
        }
        acc
    }

    fn exp(&self) -> Self {
        let e = self.value().exp();
        self.compose(&[e, e, e * 0.5, e / 6.0])
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Dual {
    pub v: C64,
    pub d: C64,
}

impl Add for Dual {
    type Output = Dual;
    fn add(self, o: Dual) -> Dual {
        Dual {
            v: self.v + o.v,
            d: self.d + o.d,
        }
    }
}

impl Sub for Dual {
    type Output = Dual;
    fn sub(self, o: Dual) -> Dual {
        Dual {
            v: self.v - o.v,
            d: self.d - o.d,
        }
    }
}

impl Mul for Dual {
    type Output = Dual;
    fn mul(self, o: Dual) -> Dual {
        Dual {
            v: self.v * o.v,
            d: self.v * o.d + self.d * o.v,
        }
    }
}

impl Mul<C64> for Dual {
    type Output = Dual;
    fn mul(self, c: C64) -> Dual {
        Dual {
            v: self.v * c,
            d: self.d * c,
        }
    }
}

impl Neg for Dual {
    type Output = Dual;
    fn neg(self) -> Dual {
        Dual {
            v: -self.v,
            d: -self.d,
        }
    }
}

impl Taylor for Dual {
    fn constant(c: C64) -> Self {
        Dual { v: c, d: ZERO }
    }

    fn var_k(k0: C64) -> Self {
        Dual { v: k0, d: ONE }
    }

    fn param(value: f64, _slot: Option<usize>) -> Self {
        Dual::constant(value.into())
    }

    fn value(&self) -> C64 {
        self.v
    }

    fn compose(&self, coeffs: &[C64; 4]) -> Self {
        Dual {
            v: coeffs[0],
            d: coeffs[1] * self.d,
        }
    }
}

/// Series `Σ k[n] tⁿ + Σ_i δ_i (x[i][0] + x[i][1] t)` truncated at t³, with
/// δ_i δ_j = 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Jet {
    pub k: [C64; 4],
    pub x: [[C64; 2]; 2],
}

impl Jet {
    const ZERO: Jet = Jet {
        k: [ZERO; 4],
        x: [[ZERO; 2]; 2],
    };
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        let mut r = self;
        for n in 0..4 {
            r.k[n] += o.k[n];
        }
        for i in 0..2 {
            r.x[i][0] += o.x[i][0];
            r.x[i][1] += o.x[i][1];
        }
        r
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        self + (-o)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self * C64::new(-1.0, 0.0)
    }
}

impl Mul<C64> for Jet {
    type Output = Jet;
    fn mul(self, c: C64) -> Jet {
        let mut r = self;
        r.k.iter_mut().for_each(|v| *v *= c);
        r.x.iter_mut().flatten().for_each(|v| *v *= c);
        r
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        let a = &self.k;
        let b = &o.k;
        let mut r = Jet::ZERO;
        r.k[0] = a[0] * b[0];
        r.k[1] = a[0] * b[1] + a[1] * b[0];
        r.k[2] = a[0] * b[2] + a[1] * b[1] + a[2] * b[0];
        r.k[3] = a[0] * b[3] + a[1] * b[2] + a[2] * b[1] + a[3] * b[0];
        for i in 0..2 {
            let (sx, ox) = (&self.x[i], &o.x[i]);
            r.x[i][0] = a[0] * ox[0] + sx[0] * b[0];
            r.x[i][1] = a[0] * ox[1] + a[1] * ox[0] + sx[0] * b[1] + sx[1] * b[0];
        }
        r
    }
}

impl Taylor for Jet {
    fn constant(c: C64) -> Self {
        let mut r = Jet::ZERO;
        r.k[0] = c;
        r
    }

    fn var_k(k0: C64) -> Self {
        let mut r = Jet::constant(k0);
        r.k[1] = ONE;
        r
    }

    fn param(value: f64, slot: Option<usize>) -> Self {
        let mut r = Jet::constant(value.into());
        if let Some(i) = slot {
            r.x[i][0] = ONE;
        }
        r
    }

    fn value(&self) -> C64 {
        self.k[0]
    }
}
