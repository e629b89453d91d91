//! Local two-parameter model of the doublet around an exceptional point.
//!
//! Near (k_d, x*) the Jost function behaves like
//! ½f_kk δ² + ⅙f_kkk δ³ + f_x·ξ + f_xk·ξ δ with δ = k − k_d, so the two
//! zeros are
//!
//! ```text
//! k̂ = k_d + d1·ξ ± √(¼ c1·ξ),   c1 = −8 f_x / f_kk,
//! d1 = −(f_xk − f_kkk f_x / (3 f_kk)) / f_kk.
//! ```
//!
//! Squaring k gives the energy model with C = 4k_d²·c1 = R + iI and
//! (Ê_n − Ê_{n+1})² = C·ξ. The branch labelled n is the one with the
//! larger real energy.

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exceptional::{self, ExceptionalPoint};
use crate::jost::{Jost, JostValue};
use crate::potential::{ParamPoint, PotentialSpec};
use crate::zeros::{find_in, Rect, ZeroOptions};

/// ξ = x − x*.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct OffsetVector {
    pub xi1: f64,
    pub xi2: f64,
}

impl OffsetVector {
    pub fn new(xi1: f64, xi2: f64) -> Self {
        OffsetVector { xi1, xi2 }
    }

    pub fn polar(radius: f64, angle: f64) -> Self {
        OffsetVector::new(radius * angle.cos(), radius * angle.sin())
    }

    pub fn along(dir: [f64; 2], t: f64) -> Self {
        OffsetVector::new(t * dir[0], t * dir[1])
    }

    pub fn norm(&self) -> f64 {
        self.xi1.hypot(self.xi2)
    }

    pub fn dot(&self, v: [f64; 2]) -> f64 {
        self.xi1 * v[0] + self.xi2 * v[1]
    }

    pub fn cdot(&self, v: [C64; 2]) -> C64 {
        v[0] * self.xi1 + v[1] * self.xi2
    }

    /// The parameter point x* + ξ.
    pub fn point(&self, ep: &ExceptionalPoint) -> ParamPoint {
        ep.x_star.offset(self.xi1, self.xi2)
    }
}

/// √F with arg F taken in [0, 2π), so the cut lies on the positive real axis.
pub fn branch_sqrt(f: C64) -> C64 {
    let mut arg = f.arg();
    if arg < 0.0 {
        arg += 2.0 * std::f64::consts::PI;
    }
    C64::from_polar(f.norm().sqrt(), 0.5 * arg)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnfoldingModel {
    pub ep: ExceptionalPoint,
    /// Gradient of (k_n − k_{n+1})².
    pub c1: [C64; 2],
    /// Gradient of ½(k_n + k_{n+1}).
    pub d1: [C64; 2],
    /// Re of the gradient of (𝓔_n − 𝓔_{n+1})².
    #[serde(rename = "R")]
    pub r: [f64; 2],
    /// Im of the gradient of (𝓔_n − 𝓔_{n+1})².
    #[serde(rename = "I")]
    pub i: [f64; 2],
    /// Gradient of ½(𝓔_n + 𝓔_{n+1}).
    pub e_shift: [C64; 2],
    /// Unit vector with I·ξ̂ = 0 and R·ξ̂ < 0. The real energies coincide
    /// along +cut_dir, the imaginary ones along −cut_dir.
    pub cut_dir: [f64; 2],
    /// Unit vector along which the two k-branches share Im k.
    pub k_cut_dir: [f64; 2],
    pub validity_radius: Option<f64>,
    /// Fitted constant of the |ξ|^{3/2} remainder in k.
    pub puiseux_constant: Option<f64>,
    /// Same for the energies.
    #[serde(default)]
    pub puiseux_constant_energy: Option<f64>,
}

/// Unit vector orthogonal to `null` whose product with `sign_of` is negative
/// (`want_negative`) or positive.
fn cut_direction(null: [f64; 2], sign_of: [f64; 2], want_negative: bool) -> Result<[f64; 2]> {
    let n = null[0].hypot(null[1]);
    let s = sign_of[0].hypot(sign_of[1]);
    if n == 0.0 || s == 0.0 {
        return Err(Error::DegenerateUnfolding(format!(
            "vanishing gradient component: {null:?}, {sign_of:?}"
        )));
    }
    let mut d = [-null[1] / n, null[0] / n];
    let proj = d[0] * sign_of[0] + d[1] * sign_of[1];
    if proj.abs() <= 1e-10 * s {
        return Err(Error::DegenerateUnfolding(format!(
            "real and imaginary gradients are parallel: {sign_of:?}, {null:?}"
        )));
    }
    if (proj < 0.0) != want_negative {
        d = [-d[0], -d[1]];
    }
    Ok(d)
}

pub fn extract(spec: &PotentialSpec, ep: &ExceptionalPoint) -> Result<UnfoldingModel> {
    let v = exceptional::eval(spec, ep)?;
    extract_from_value(ep, &v)
}

/// Builds the model from derivative slots already evaluated at the EP.
pub fn extract_from_value(ep: &ExceptionalPoint, v: &JostValue) -> Result<UnfoldingModel> {
    let fkk = v.d2f_dk2;
    if fkk.norm() == 0.0 {
        return Err(Error::HigherOrderDegeneracy(0.0));
    }
    let c1 = [0, 1].map(|i| -8.0 * v.df_dx[i] / fkk);
    let d1 = [0, 1].map(|i| -(v.d2f_dxdk[i] - v.d3f_dk3 * v.df_dx[i] / (3.0 * fkk)) / fkk);
    let kd = ep.k_d;
    let c = c1.map(|c| 4.0 * kd * kd * c);
    let r = c.map(|c| c.re);
    let i = c.map(|c| c.im);
    let scale = r[0].hypot(r[1]).max(i[0].hypot(i[1]));
    if scale == 0.0 || !scale.is_finite() {
        return Err(Error::DegenerateUnfolding(format!("R = {r:?}, I = {i:?}")));
    }
    let e_shift = [0, 1].map(|j| 2.0 * kd * d1[j] + 0.25 * c1[j]);
    let cut_dir = cut_direction(i, r, true)?;
    let k_cut_dir = cut_direction(c1.map(|c| c.im), c1.map(|c| c.re), false)?;
    Ok(UnfoldingModel {
        ep: *ep,
        c1,
        d1,
        r,
        i,
        e_shift,
        cut_dir,
        k_cut_dir,
        validity_radius: None,
        puiseux_constant: None,
        puiseux_constant_energy: None,
    })
}

/// √(a + ib) from the half-power forms, with both parts non-negative.
fn half_powers(a: f64, b: f64) -> (f64, f64) {
    let rho = a.hypot(b);
    if rho == 0.0 {
        return (0.0, 0.0);
    }
    // Take the well-conditioned half first, the other from 2·re·im = |b|.
    if a >= 0.0 {
        let re = (0.5 * (rho + a)).sqrt();
        (re, 0.5 * b.abs() / re)
    } else {
        let im = (0.5 * (rho - a)).sqrt();
        (0.5 * b.abs() / im, im)
    }
}

impl UnfoldingModel {
    pub fn dot_r(&self, xi: OffsetVector) -> f64 {
        xi.dot(self.r)
    }

    pub fn dot_i(&self, xi: OffsetVector) -> f64 {
        xi.dot(self.i)
    }

    /// Ê_n − Ê_{n+1}: Re ≥ 0, and sign(Re)·sign(Im) = sign(I·ξ).
    pub fn energy_gap(&self, xi: OffsetVector) -> C64 {
        let (a, b) = (self.dot_r(xi), self.dot_i(xi));
        let (re, im) = half_powers(a, b);
        let sigma_i = if b < 0.0 { -1.0 } else { 1.0 };
        C64::new(re, sigma_i * im)
    }

    pub fn energy_center(&self, xi: OffsetVector) -> C64 {
        self.ep.energy() + xi.cdot(self.e_shift)
    }

    /// (Ê_n, Ê_{n+1}).
    pub fn model_energy(&self, xi: OffsetVector) -> (C64, C64) {
        let center = self.energy_center(xi);
        let half = 0.5 * self.energy_gap(xi);
        (center + half, center - half)
    }

    /// (k̂_n, k̂_{n+1}), labelled consistently with [`Self::model_energy`].
    pub fn model_k(&self, xi: OffsetVector) -> (C64, C64) {
        let center = self.ep.k_d + xi.cdot(self.d1);
        let mut s = branch_sqrt(0.25 * xi.cdot(self.c1));
        // Ê_n − Ê_{n+1} ≈ 4 k_d s fixes which sign is branch n.
        if (self.energy_gap(xi).conj() * self.ep.k_d * s).re < 0.0 {
            s = -s;
        }
        (center + s, center - s)
    }

    pub fn is_valid(&self, xi: OffsetVector) -> Result<bool> {
        let rho = self.validity_radius.ok_or(Error::Uncalibrated)?;
        Ok(xi.norm() <= rho)
    }

    pub fn with_calibration(mut self, cal: &Calibration) -> Self {
        self.validity_radius = Some(cal.radius);
        self.puiseux_constant = Some(cal.puiseux_k);
        self.puiseux_constant_energy = Some(cal.puiseux_e);
        self
    }
}

/// Orders `exact` to match the labels of `model`; returns the max deviation.
pub fn match_pair(model: (C64, C64), exact: [C64; 2]) -> ([C64; 2], f64) {
    let keep = (model.0 - exact[0]).norm().max((model.1 - exact[1]).norm());
    let swap = (model.0 - exact[1]).norm().max((model.1 - exact[0]).norm());
    if swap < keep {
        ([exact[1], exact[0]], swap)
    } else {
        (exact, keep)
    }
}

/// The exact doublet at x* + ξ, labelled like the model branches.
///
/// The search square starts around the model prediction and grows until it
/// holds exactly two zeros.
pub fn exact_doublet(
    spec: &PotentialSpec,
    m: &UnfoldingModel,
    xi: OffsetVector,
    opts: &ZeroOptions,
) -> Result<[C64; 2]> {
    let jost = Jost::new(spec, xi.point(&m.ep))?;
    let guess = m.model_k(xi);
    let center = 0.5 * (guess.0 + guess.1);
    let floor = 1e-7 * m.ep.k_d.norm();
    let mut half = 2.0 * (guess.0 - guess.1).norm().max(floor);
    let mut last = 0;
    for _ in 0..24 {
        let rect = Rect::square(center, half);
        let set = find_in(&jost, &rect, opts)?;
        match set.winding {
            2 => {
                let z = set.points();
                return Ok(match_pair(guess, [z[0], z[1]]).0);
            }
            w if w < 2 => half *= 2.0,
            // Too many: the doublet sits inside a tighter square.
            _ if last < 2 => half *= 0.6,
            _ => break,
        }
        last = set.winding;
    }
    Err(Error::NotIsolated { found: last })
}

/// Result of the validity sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub radius: f64,
    /// max error/|ξ|^{3/2} in k over the accepted disc.
    pub puiseux_k: f64,
    /// Same for the energies.
    pub puiseux_e: f64,
    /// max error/gap at |ξ| = radius.
    pub tightness: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidityOptions {
    pub start: f64,
    pub floor: f64,
    /// Allowed model error as a fraction of the exact gap.
    pub criterion: f64,
    pub directions: usize,
    pub zeros: ZeroOptions,
}

impl Default for ValidityOptions {
    fn default() -> Self {
        ValidityOptions {
            start: 1.0,
            floor: 1e-8,
            criterion: 1e-2,
            directions: 16,
            zeros: ZeroOptions::default(),
        }
    }
}

/// One model-vs-exact comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Deviation {
    pub xi: OffsetVector,
    pub exact: [C64; 2],
    pub error_k: f64,
    pub error_e: f64,
    pub gap: f64,
}

pub fn deviation(
    spec: &PotentialSpec,
    m: &UnfoldingModel,
    xi: OffsetVector,
    opts: &ZeroOptions,
) -> Result<Deviation> {
    let exact = exact_doublet(spec, m, xi, opts)?;
    let (kn, kn1) = m.model_k(xi);
    let (en, en1) = m.model_energy(xi);
    let (exact, error_k) = match_pair((kn, kn1), exact);
    let error_e = (en - exact[0] * exact[0])
        .norm()
        .max((en1 - exact[1] * exact[1]).norm());
    Ok(Deviation {
        xi,
        exact,
        error_k,
        error_e,
        gap: (exact[0] - exact[1]).norm(),
    })
}

fn ring(
    spec: &PotentialSpec,
    m: &UnfoldingModel,
    radius: f64,
    opts: &ValidityOptions,
) -> Option<Vec<Deviation>> {
    (0..opts.directions)
        .into_par_iter()
        .map(|j| {
            let angle = 2.0 * std::f64::consts::PI * j as f64 / opts.directions as f64;
            deviation(spec, m, OffsetVector::polar(radius, angle), &opts.zeros).ok()
        })
        .collect()
}

/// Largest dyadic radius ρ for which the model error stays below 1% of the
/// exact gap on rings of radius ρ, ρ/2 and ρ/4.
pub fn validity_radius(spec: &PotentialSpec, m: &UnfoldingModel) -> Result<Calibration> {
    validity_radius_with(spec, m, &ValidityOptions::default())
}

pub fn validity_radius_with(
    spec: &PotentialSpec,
    m: &UnfoldingModel,
    opts: &ValidityOptions,
) -> Result<Calibration> {
    let mut rings: Vec<Option<Vec<Deviation>>> = Vec::new();
    let radius = |j: usize| opts.start * 0.5f64.powi(j as i32);
    let passes = |ring: &Option<Vec<Deviation>>| {
        ring.as_ref().is_some_and(|r| {
            r.iter()
                .all(|d| d.error_k <= opts.criterion * d.gap && d.gap > 0.0)
        })
    };
    let mut level = 0;
    loop {
        if radius(level) < opts.floor {
            return Err(Error::ExtractionSuspect(radius(level)));
        }
        while rings.len() < level + 3 {
            rings.push(ring(spec, m, radius(rings.len()), opts));
        }
        if rings[level..level + 3].iter().all(passes) {
            break;
        }
        level += 1;
    }
    let accepted: Vec<&Deviation> = rings[level..level + 3]
        .iter()
        .flat_map(|r| r.as_ref().expect("passed"))
        .collect();
    let fit = |err: fn(&Deviation) -> f64| {
        accepted
            .iter()
            .map(|d| err(d) / d.xi.norm().powf(1.5))
            .fold(0.0, f64::max)
    };
    let tightness = rings[level]
        .as_ref()
        .expect("passed")
        .iter()
        .map(|d| d.error_k / d.gap)
        .fold(0.0, f64::max);
    Ok(Calibration {
        radius: radius(level),
        puiseux_k: fit(|d| d.error_k),
        puiseux_e: fit(|d| d.error_e),
        tightness,
    })
}
