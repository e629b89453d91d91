//! Energy and width differences along one-parameter sections ξ₂ = ξ̄₂.
//!
//! With ε = 𝓔_n − 𝓔_{n+1}, the observables are ΔE = Re ε and
//! ΔΓ = 2 Im ε = Γ_{n+1} − Γ_n (Γ = −2 Im 𝓔). They satisfy
//! ΔE·ΔΓ = I·ξ and ΔE² − ¼ΔΓ² = R·ξ, so a crossing of energies or widths
//! needs I·ξ = 0, and the sign of R·ξ there decides which one crosses.

use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::PotentialSpec;
use crate::tracer::{self, PathSpec};
use crate::unfolding::{OffsetVector, UnfoldingModel};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectionObservables {
    pub xi1: f64,
    #[serde(default)]
    pub xi2: f64,
    #[serde(rename = "dE")]
    pub d_e: f64,
    #[serde(rename = "dGamma")]
    pub d_gamma: f64,
    #[serde(rename = "dotR")]
    pub dot_r: f64,
    #[serde(rename = "dotI")]
    pub dot_i: f64,
}

impl SectionObservables {
    /// Observables of one labelled pair of complex energies.
    pub fn from_pair(xi: OffsetVector, e: [C64; 2]) -> Self {
        let eps = e[0] - e[1];
        let d_e = eps.re;
        let d_gamma = 2.0 * eps.im;
        SectionObservables {
            xi1: xi.xi1,
            xi2: xi.xi2,
            d_e,
            d_gamma,
            dot_r: d_e * d_e - 0.25 * d_gamma * d_gamma,
            dot_i: d_e * d_gamma,
        }
    }

    /// The same sample with n and n+1 exchanged.
    pub fn relabelled(&self) -> Self {
        SectionObservables {
            d_e: -self.d_e,
            d_gamma: -self.d_gamma,
            ..*self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CrossingKind {
    #[serde(rename = "EnergyAnticross_WidthCross")]
    EnergyAnticrossWidthCross,
    JointDegeneracy,
    #[serde(rename = "EnergyCross_WidthAnticross")]
    EnergyCrossWidthAnticross,
    NoCrossing,
}

impl CrossingKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            CrossingKind::EnergyAnticrossWidthCross => "EnergyAnticross_WidthCross",
            CrossingKind::JointDegeneracy => "JointDegeneracy",
            CrossingKind::EnergyCrossWidthAnticross => "EnergyCross_WidthAnticross",
            CrossingKind::NoCrossing => "NoCrossing",
        }
    }
}

impl fmt::Display for CrossingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CrossingKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        [
            CrossingKind::EnergyAnticrossWidthCross,
            CrossingKind::JointDegeneracy,
            CrossingKind::EnergyCrossWidthAnticross,
            CrossingKind::NoCrossing,
        ]
        .into_iter()
        .find(|k| k.as_str() == s)
        .ok_or_else(|| format!("unknown crossing class `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossingClass {
    pub kind: CrossingKind,
    pub xi1_c: Option<f64>,
    /// R·ξ interpolated at the crossing.
    pub dot_r_c: Option<f64>,
}

/// Model observables on the line ξ₂ = `xi2_bar`, `n` samples over `range`.
pub fn section(
    m: &UnfoldingModel,
    xi2_bar: f64,
    range: (f64, f64),
    n: usize,
) -> Result<Vec<SectionObservables>> {
    let xis = sample_line(xi2_bar, range, n)?;
    let outside: Vec<usize> = xis
        .iter()
        .enumerate()
        .filter_map(|(j, xi)| match m.is_valid(*xi) {
            Ok(true) => None,
            Ok(false) => Some(Ok(j)),
            Err(e) => Some(Err(e)),
        })
        .collect::<Result<_>>()?;
    if !outside.is_empty() {
        return Err(Error::OutsideValidity { indices: outside });
    }
    let pairs: Vec<[C64; 2]> = xis
        .iter()
        .map(|xi| {
            let (a, b) = m.model_energy(*xi);
            [a, b]
        })
        .collect();
    let pairs = label_by_continuity(&pairs);
    Ok(xis
        .iter()
        .zip(&pairs)
        .map(|(xi, e)| {
            let mut s = SectionObservables::from_pair(*xi, *e);
            // The model identities are exact; use the linear forms directly.
            s.dot_r = m.dot_r(*xi);
            s.dot_i = m.dot_i(*xi);
            s
        })
        .collect())
}

/// Same section computed from continued exact zeros.
pub fn section_exact(
    spec: &PotentialSpec,
    m: &UnfoldingModel,
    xi2_bar: f64,
    range: (f64, f64),
    n: usize,
) -> Result<Vec<SectionObservables>> {
    let path = PathSpec::new(xi2_bar, range.0, range.1, n)?;
    let traj = tracer::trace(spec, m, &path)?;
    Ok(traj
        .records
        .iter()
        .map(|r| SectionObservables::from_pair(OffsetVector::new(r.xi1, r.xi2), r.e))
        .collect())
}

pub(crate) fn sample_line(xi2_bar: f64, range: (f64, f64), n: usize) -> Result<Vec<OffsetVector>> {
    if n == 0 || !(range.0.is_finite() && range.1.is_finite() && xi2_bar.is_finite()) {
        return Err(Error::Domain(format!(
            "section needs n ≥ 1 and finite bounds (n = {n}, range = {range:?})"
        )));
    }
    Ok((0..n)
        .map(|j| {
            let t = if n == 1 {
                0.0
            } else {
                j as f64 / (n - 1) as f64
            };
            OffsetVector::new(range.0 + (range.1 - range.0) * t, xi2_bar)
        })
        .collect())
}

/// Orders each pair so that both branches move continuously, starting from
/// the given order of the first pair. Uses a linear predictor.
pub fn label_by_continuity(pairs: &[[C64; 2]]) -> Vec<[C64; 2]> {
    let mut out: Vec<[C64; 2]> = Vec::with_capacity(pairs.len());
    for (j, &p) in pairs.iter().enumerate() {
        let pred = match j {
            0 => {
                out.push(p);
                continue;
            }
            1 => out[0],
            _ => [0, 1].map(|b| 2.0 * out[j - 1][b] - out[j - 2][b]),
        };
        let keep = (p[0] - pred[0]).norm_sqr() + (p[1] - pred[1]).norm_sqr();
        let swap = (p[1] - pred[0]).norm_sqr() + (p[0] - pred[1]).norm_sqr();
        out.push(if swap < keep { [p[1], p[0]] } else { p });
    }
    out
}

/// Relative tolerance for the R·ξ_c = 0 case on model sections.
pub const JOINT_TOL: f64 = 1e-8;

pub fn classify(samples: &[SectionObservables]) -> CrossingClass {
    classify_with(samples, JOINT_TOL)
}

/// Locates the zero of I·ξ along the samples and applies the sign rule on
/// R·ξ there. |R·ξ_c| within `joint_tol` of the section's largest |R·ξ|,
/// |I·ξ| counts as the joint degeneracy.
pub fn classify_with(samples: &[SectionObservables], joint_tol: f64) -> CrossingClass {
    let none = CrossingClass {
        kind: CrossingKind::NoCrossing,
        xi1_c: None,
        dot_r_c: None,
    };
    let scale = samples
        .iter()
        .map(|s| s.dot_r.abs().max(s.dot_i.abs()))
        .fold(0.0, f64::max);
    if scale == 0.0 {
        return none;
    }

    let mut crossings: Vec<(f64, f64, f64)> = Vec::new();
    for (j, s) in samples.iter().enumerate() {
        if s.dot_i == 0.0 {
            crossings.push((s.xi1, s.xi2, s.dot_r));
        }
        if let Some(t) = samples.get(j + 1) {
            if s.dot_i * t.dot_i < 0.0 {
                let w = s.dot_i / (s.dot_i - t.dot_i);
                crossings.push((
                    s.xi1 + w * (t.xi1 - s.xi1),
                    s.xi2 + w * (t.xi2 - s.xi2),
                    s.dot_r + w * (t.dot_r - s.dot_r),
                ));
            }
        }
    }
    let Some(&(xi1_c, _, dot_r_c)) = crossings
        .iter()
        .min_by(|a, b| a.0.hypot(a.1).total_cmp(&b.0.hypot(b.1)))
    else {
        return none;
    };
    if crossings.len() > 1 {
        log::warn!(
            "I·ξ vanishes {} times along the section; using the one nearest the EP",
            crossings.len()
        );
    }
    let kind = if dot_r_c.abs() <= joint_tol * scale {
        CrossingKind::JointDegeneracy
    } else if dot_r_c > 0.0 {
        CrossingKind::EnergyAnticrossWidthCross
    } else {
        CrossingKind::EnergyCrossWidthAnticross
    };
    CrossingClass {
        kind,
        xi1_c: Some(xi1_c),
        dot_r_c: Some(dot_r_c),
    }
}

/// The three canonical sections of a model: crossing L_R, through the EP,
/// crossing L_I. Each is (ξ̄₂, ξ₁ range) and stays inside the validity disc.
///
/// The L_R and L_I lines meet the cut line at |ξ| = ρ/2.
pub fn canonical_sections(m: &UnfoldingModel) -> Result<[(f64, (f64, f64)); 3]> {
    let rho = m.validity_radius.ok_or(Error::Uncalibrated)?;
    let d = m.cut_dir;
    if d[1].abs() < 1e-6 {
        return Err(Error::DegenerateUnfolding(
            "cut line parallel to ξ₁; sections at fixed ξ₂ never cross it".into(),
        ));
    }
    let xi2 = 0.5 * rho * d[1];
    let reach = |x2: f64| 0.95 * (rho * rho - x2 * x2).sqrt();
    Ok([
        (xi2, (-reach(xi2), reach(xi2))),
        (0.0, (-0.5 * rho, 0.5 * rho)),
        (-xi2, (-reach(xi2), reach(xi2))),
    ])
}

fn sci(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_csv<W: Write>(
    out: W,
    samples: &[SectionObservables],
    class: &CrossingClass,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["xi1", "dE", "dGamma", "dotR", "dotI", "class"])?;
    for s in samples {
        w.write_record([
            sci(s.xi1),
            sci(s.d_e),
            sci(s.d_gamma),
            sci(s.dot_r),
            sci(s.dot_i),
            class.kind.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Deserialize)]
struct Row {
    xi1: f64,
    #[serde(rename = "dE")]
    d_e: f64,
    #[serde(rename = "dGamma")]
    d_gamma: f64,
    #[serde(rename = "dotR")]
    dot_r: f64,
    #[serde(rename = "dotI")]
    dot_i: f64,
    class: String,
}

/// Reads a section CSV; returns the samples and the recorded class.
pub fn read_csv(path: impl AsRef<Path>) -> Result<(Vec<SectionObservables>, CrossingKind)> {
    let mut rdr = csv::Reader::from_path(path)?;
    let mut samples = Vec::new();
    let mut kind = None;
    for row in rdr.deserialize() {
        let row: Row = row?;
        let k = row.class.parse().map_err(Error::Domain)?;
        if kind.is_some_and(|old| old != k) {
            return Err(Error::Domain("mixed classes in one section file".into()));
        }
        kind = Some(k);
        samples.push(SectionObservables {
            xi1: row.xi1,
            xi2: 0.0,
            d_e: row.d_e,
            d_gamma: row.d_gamma,
            dot_r: row.dot_r,
            dot_i: row.dot_i,
        });
    }
    let kind = kind.ok_or_else(|| Error::Domain("empty section file".into()))?;
    Ok((samples, kind))
}
