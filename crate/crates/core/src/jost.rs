//! The s-wave Jost function f(−k; x₁, x₂) of a layered potential.
//!
//! The regular solution φ (φ(0) = 0, φ′(0) = 1) is carried through each
//! layer by its closed-form transfer matrix, and
//!
//! ```text
//! f(−k) = e^{ikR} [φ′(k, R) − ik φ(k, R)]
//! ```
//!
//! is read off at the outer radius R. This is the coefficient of the
//! incoming wave e^{−ikr} outside the potential, normalised to 1 for V ≡ 0,
//! so its zeros with Re k > 0, Im k < 0 are the resonance poles. The phase
//! e^{ikw} of each layer is folded into its transfer matrix.
//!
//! Derivatives are propagated through the same recursion with truncated
//! Taylor arithmetic, so every slot of [`JostValue`] is exact up to
//! rounding.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::{instantiate, Field, Layer, ParamPoint, PotentialSpec};
use crate::series::{Dual, Jet, Taylor};
use crate::stumpff;

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// f(−k; x₁, x₂) and the partial derivatives used by the unfolding.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JostValue {
    pub f: C64,
    pub df_dk: C64,
    pub d2f_dk2: C64,
    pub d3f_dk3: C64,
    pub df_dx: [C64; 2],
    pub d2f_dxdk: [C64; 2],
}

impl JostValue {
    /// Every slot multiplied by a constant.
    pub fn scaled(&self, g: C64) -> JostValue {
        JostValue {
            f: self.f * g,
            df_dk: self.df_dk * g,
            d2f_dk2: self.d2f_dk2 * g,
            d3f_dk3: self.d3f_dk3 * g,
            df_dx: self.df_dx.map(|v| v * g),
            d2f_dxdk: self.d2f_dxdk.map(|v| v * g),
        }
    }

    fn is_finite(&self) -> bool {
        [self.f, self.df_dk, self.d2f_dk2, self.d3f_dk3]
            .iter()
            .chain(&self.df_dx)
            .chain(&self.d2f_dxdk)
            .all(|v| v.is_finite())
    }
}

/// A potential instantiated at one parameter point, ready for repeated
/// evaluation in k.
#[derive(Debug, Clone)]
pub struct Jost {
    layers: Vec<Layer>,
    /// Parameter slot (0 or 1) driving each layer's width and height.
    slots: Vec<[Option<usize>; 2]>,
}

impl Jost {
    pub fn new(spec: &PotentialSpec, p: ParamPoint) -> Result<Self> {
        let layers = instantiate(spec, p)?;
        let slots = (0..layers.len())
            .map(|i| {
                [
                    spec.slot_param(i, Field::Width),
                    spec.slot_param(i, Field::Height),
                ]
            })
            .collect();
        Ok(Jost { layers, slots })
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    /// All derivative slots at k.
    pub fn eval(&self, k: C64) -> Result<JostValue> {
        check_k(k)?;
        let j: Jet = self.propagate(k);
        let value = JostValue {
            f: j.k[0],
            df_dk: j.k[1],
            d2f_dk2: j.k[2] * 2.0,
            d3f_dk3: j.k[3] * 6.0,
            df_dx: [j.x[0][0], j.x[1][0]],
            d2f_dxdk: [j.x[0][1], j.x[1][1]],
        };
        if !value.is_finite() {
            return Err(overflow(k));
        }
        Ok(value)
    }

    /// (f, ∂f/∂k) only; the cheap path used by contour integration.
    pub fn value_slope(&self, k: C64) -> Result<(C64, C64)> {
        check_k(k)?;
        let d: Dual = self.propagate(k);
        if !(d.v.is_finite() && d.d.is_finite()) {
            return Err(overflow(k));
        }
        Ok((d.v, d.d))
    }

    pub fn value(&self, k: C64) -> Result<C64> {
        self.value_slope(k).map(|(f, _)| f)
    }

    fn propagate<T: Taylor>(&self, k: C64) -> T {
        let kk = T::var_k(k);
        let k2 = kk * kk;
        let mut phi = T::constant(C64::new(0.0, 0.0));
        let mut dphi = T::constant(C64::new(1.0, 0.0));
        for (layer, slots) in self.layers.iter().zip(&self.slots) {
            let w = T::param(layer.width, slots[0]);
            let v = T::param(layer.height, slots[1]);
            let z = k2 - v;
            let u = w * w * z;
            let c = stumpff::stumpff(u.value());
            let cos = u.compose(&stumpff::taylor(0, &c));
            let sinc = w * u.compose(&stumpff::taylor(1, &c));
            let phase = (kk * w * I).exp();
            let a = cos * phase;
            let b = sinc * phase;
            let zb = z * b;
            let next_phi = a * phi + b * dphi;
            let next_dphi = a * dphi - zb * phi;
            phi = next_phi;
            dphi = next_dphi;
        }
        dphi - kk * phi * I
    }
}

fn check_k(k: C64) -> Result<()> {
    if k == C64::new(0.0, 0.0) {
        return Err(Error::Domain(
            "the Jost function is evaluated at k ≠ 0".into(),
        ));
    }
    if !k.is_finite() {
        return Err(Error::Domain(format!("non-finite wave number {k}")));
    }
    Ok(())
}

fn overflow(k: C64) -> Error {
    Error::Range(format!("Jost function overflows at k = {k}"))
}

/// f(−k; x₁, x₂) with all derivative slots.
pub fn eval(spec: &PotentialSpec, p: ParamPoint, k: C64) -> Result<JostValue> {
    Jost::new(spec, p)?.eval(k)
}

/// |f(−k) − conj f(k*)|: the two sides agree for any real potential, which
/// pairs each fourth-quadrant zero with a third-quadrant one at −k*.
pub fn symmetry_check(spec: &PotentialSpec, p: ParamPoint, k: C64) -> Result<f64> {
    let jost = Jost::new(spec, p)?;
    let direct = jost.value(k)?;
    let mirrored = jost.value(-k.conj())?.conj();
    Ok((direct - mirrored).norm())
}
