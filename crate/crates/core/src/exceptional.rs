//! Exceptional points: parameter values where two resonance zeros merge.
//!
//! At an exceptional point f = 0 and ∂f/∂k = 0 hold simultaneously, with
//! ∂²f/∂k² ≠ 0 certifying that exactly two zeros coalesce. The two complex
//! conditions form a square real system in (Re k, Im k, x₁, x₂) whose
//! Jacobian comes straight from the derivative slots of [`JostValue`].

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jost::{Jost, JostValue};
use crate::potential::{ParamPoint, PotentialSpec};
use crate::zeros::{find_in, Rect, ZeroOptions};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExceptionalPoint {
    pub k_d: C64,
    pub x_star: ParamPoint,
    /// ∂²f/∂k² at the solution; the rank-one certificate.
    pub f_kk: C64,
    /// max(|f|, |∂f/∂k|) at the solution.
    pub residual: f64,
    /// Newton steps taken by the locator.
    #[serde(default)]
    pub iterations: usize,
}

impl ExceptionalPoint {
    /// Energy 𝓔_d = k_d² of the double pole.
    pub fn energy(&self) -> C64 {
        self.k_d * self.k_d
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocateOptions {
    /// Iteration stops once the residual is below this.
    pub tol: f64,
    /// Residual required of the returned point.
    pub accept: f64,
    pub max_iter: usize,
    pub max_halvings: usize,
    /// |f_kk| below this is treated as a higher-order degeneracy.
    pub f_kk_floor: f64,
}

impl Default for LocateOptions {
    fn default() -> Self {
        LocateOptions {
            tol: 1e-12,
            accept: 1e-10,
            max_iter: 100,
            max_halvings: 8,
            f_kk_floor: 1e-6,
        }
    }
}

fn residual(v: &JostValue) -> f64 {
    v.f.norm().max(v.df_dk.norm())
}

fn system(v: &JostValue) -> Vector4<f64> {
    Vector4::new(v.f.re, v.f.im, v.df_dk.re, v.df_dk.im)
}

/// Jacobian of (Re f, Im f, Re f_k, Im f_k) in (Re k, Im k, x₁, x₂).
fn jacobian(v: &JostValue) -> Matrix4<f64> {
    let i = C64::new(0.0, 1.0);
    let cols = [
        (v.df_dk, v.d2f_dk2),
        (v.df_dk * i, v.d2f_dk2 * i),
        (v.df_dx[0], v.d2f_dxdk[0]),
        (v.df_dx[1], v.d2f_dxdk[1]),
    ];
    Matrix4::from_fn(|r, c| {
        let (f, fk) = cols[c];
        match r {
            0 => f.re,
            1 => f.im,
            2 => fk.re,
            _ => fk.im,
        }
    })
}

fn eval_at(spec: &PotentialSpec, u: &Vector4<f64>) -> Result<JostValue> {
    Jost::new(spec, ParamPoint::new(u[2], u[3]))?.eval(C64::new(u[0], u[1]))
}

pub fn locate(spec: &PotentialSpec, seed_k: C64, seed_p: ParamPoint) -> Result<ExceptionalPoint> {
    locate_with(spec, seed_k, seed_p, &LocateOptions::default())
}

/// Damped Newton on f = ∂f/∂k = 0 from a seed.
pub fn locate_with(
    spec: &PotentialSpec,
    seed_k: C64,
    seed_p: ParamPoint,
    opts: &LocateOptions,
) -> Result<ExceptionalPoint> {
    let mut u = Vector4::new(seed_k.re, seed_k.im, seed_p.x1, seed_p.x2);
    let mut v = eval_at(spec, &u)?;
    let mut trace = vec![residual(&v)];
    let mut iterations = 0;

    while residual(&v) > opts.tol {
        if iterations == opts.max_iter {
            return Err(Error::NoConvergence {
                iterations,
                residual: residual(&v),
                trace,
            });
        }
        iterations += 1;
        let step = jacobian(&v)
            .lu()
            .solve(&(-system(&v)))
            .filter(|s| s.iter().all(|x| x.is_finite()))
            .ok_or_else(|| Error::NoConvergence {
                iterations,
                residual: residual(&v),
                trace: trace.clone(),
            })?;

        let current = system(&v).norm();
        let mut scale = 1.0;
        let mut accepted = None;
        for _ in 0..=opts.max_halvings {
            let trial = u + step * scale;
            if let Ok(tv) = eval_at(spec, &trial) {
                if system(&tv).norm() < current {
                    accepted = Some((trial, tv));
                    break;
                }
                accepted.get_or_insert((trial, tv));
            }
            scale *= 0.5;
        }
        let Some((next_u, next_v)) = accepted else {
            return Err(Error::NoConvergence {
                iterations,
                residual: residual(&v),
                trace,
            });
        };
        let moved = (next_u - u).norm();
        u = next_u;
        v = next_v;
        trace.push(residual(&v));
        if moved <= 1e-15 * (1.0 + u.norm()) {
            break;
        }
    }

    let ep = ExceptionalPoint {
        k_d: C64::new(u[0], u[1]),
        x_star: ParamPoint::new(u[2], u[3]),
        f_kk: v.d2f_dk2,
        residual: residual(&v),
        iterations,
    };
    certify(&ep, opts, trace)
}

fn certify(
    ep: &ExceptionalPoint,
    opts: &LocateOptions,
    trace: Vec<f64>,
) -> Result<ExceptionalPoint> {
    if ep.residual > opts.accept {
        return Err(Error::NoConvergence {
            iterations: ep.iterations,
            residual: ep.residual,
            trace,
        });
    }
    if ep.f_kk.norm() < opts.f_kk_floor {
        return Err(Error::HigherOrderDegeneracy(ep.f_kk.norm()));
    }
    if !(ep.k_d.re > 0.0 && ep.k_d.im < 0.0) {
        return Err(Error::Domain(format!(
            "degeneracy at k = {} is not a resonance (fourth quadrant)",
            ep.k_d
        )));
    }
    Ok(*ep)
}

/// Re-evaluates residual and certificate of a stored exceptional point.
pub fn verify(spec: &PotentialSpec, ep: &ExceptionalPoint) -> Result<ExceptionalPoint> {
    let v = eval(spec, ep)?;
    let fresh = ExceptionalPoint {
        f_kk: v.d2f_dk2,
        residual: residual(&v),
        ..*ep
    };
    certify(&fresh, &LocateOptions::default(), vec![fresh.residual])
}

pub(crate) fn eval(spec: &PotentialSpec, ep: &ExceptionalPoint) -> Result<JostValue> {
    Jost::new(spec, ep.x_star)?.eval(ep.k_d)
}

/// Uniform n1 × n2 grid over [x1_lo, x1_hi] × [x2_lo, x2_hi].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamGrid {
    pub n1: usize,
    pub n2: usize,
    pub x1_lo: f64,
    pub x1_hi: f64,
    pub x2_lo: f64,
    pub x2_hi: f64,
}

impl ParamGrid {
    /// Parses `n1,n2,x1lo,x1hi,x2lo,x2hi`.
    pub fn parse(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 6 {
            return Err(format!("grid needs 6 comma-separated values, got `{s}`"));
        }
        let n = |t: &str| {
            t.parse::<usize>()
                .map_err(|e| format!("bad grid size `{t}`: {e}"))
        };
        let x = |t: &str| {
            t.parse::<f64>()
                .map_err(|e| format!("bad grid bound `{t}`: {e}"))
        };
        ParamGrid::new(
            n(parts[0])?,
            n(parts[1])?,
            (x(parts[2])?, x(parts[3])?),
            (x(parts[4])?, x(parts[5])?),
        )
    }

    pub fn new(
        n1: usize,
        n2: usize,
        x1: (f64, f64),
        x2: (f64, f64),
    ) -> std::result::Result<Self, String> {
        if n1 == 0 || n2 == 0 {
            return Err("grid sizes must be positive".into());
        }
        let bounds = [x1.0, x1.1, x2.0, x2.1];
        if bounds.iter().any(|v| !v.is_finite()) || x1.0 > x1.1 || x2.0 > x2.1 {
            return Err(format!("grid bounds {bounds:?} must be finite and ordered"));
        }
        Ok(ParamGrid {
            n1,
            n2,
            x1_lo: x1.0,
            x1_hi: x1.1,
            x2_lo: x2.0,
            x2_hi: x2.1,
        })
    }

    fn coord(lo: f64, hi: f64, n: usize, i: usize) -> f64 {
        if n == 1 {
            0.5 * (lo + hi)
        } else {
            lo + (hi - lo) * i as f64 / (n - 1) as f64
        }
    }

    pub fn point(&self, i: usize, j: usize) -> ParamPoint {
        ParamPoint::new(
            Self::coord(self.x1_lo, self.x1_hi, self.n1, i),
            Self::coord(self.x2_lo, self.x2_hi, self.n2, j),
        )
    }

    pub fn steps(&self) -> (f64, f64) {
        let step = |lo: f64, hi: f64, n: usize| {
            if n > 1 {
                (hi - lo) / (n - 1) as f64
            } else {
                0.0
            }
        };
        (
            step(self.x1_lo, self.x1_hi, self.n1),
            step(self.x2_lo, self.x2_hi, self.n2),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Seed {
    /// Centroid of the doublet at this grid point.
    pub k: C64,
    pub p: ParamPoint,
    /// |k_n − k_{n+1}|
    pub gap: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanOptions {
    /// Grid minima with a larger doublet gap are not reported.
    pub max_gap: f64,
    pub zeros: ZeroOptions,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            max_gap: 0.05,
            zeros: ZeroOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    /// Local minima of the doublet gap, smallest first.
    pub seeds: Vec<Seed>,
    /// Grid points where the region did not hold exactly two zeros.
    pub skipped: usize,
}

pub fn scan_seeds(spec: &PotentialSpec, grid: &ParamGrid, region: &Rect) -> Result<ScanResult> {
    scan_seeds_with(spec, grid, region, &ScanOptions::default())
}

pub fn scan_seeds_with(
    spec: &PotentialSpec,
    grid: &ParamGrid,
    region: &Rect,
    opts: &ScanOptions,
) -> Result<ScanResult> {
    let cells: Vec<Option<Seed>> = (0..grid.n1 * grid.n2)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx / grid.n2, idx % grid.n2);
            let p = grid.point(i, j);
            let set = Jost::new(spec, p).and_then(|jost| find_in(&jost, region, &opts.zeros));
            match set {
                Ok(set) if set.winding == 2 => {
                    let z = set.points();
                    Some(Seed {
                        k: (z[0] + z[1]) * 0.5,
                        p,
                        gap: (z[0] - z[1]).norm(),
                    })
                }
                Ok(_) | Err(_) => None,
            }
        })
        .collect();

    let skipped = cells.iter().filter(|c| c.is_none()).count();
    if skipped > 0 {
        log::warn!("{skipped} grid point(s) skipped: region does not isolate a doublet");
    }

    let at = |i: isize, j: isize| -> Option<&Seed> {
        if i < 0 || j < 0 || i as usize >= grid.n1 || j as usize >= grid.n2 {
            return None;
        }
        cells[i as usize * grid.n2 + j as usize].as_ref()
    };
    let mut seeds = Vec::new();
    for i in 0..grid.n1 as isize {
        for j in 0..grid.n2 as isize {
            let Some(s) = at(i, j) else { continue };
            if s.gap > opts.max_gap {
                continue;
            }
            let me = i * grid.n2 as isize + j;
            let is_min = (-1..=1)
                .flat_map(|di| (-1..=1).map(move |dj| (di, dj)))
                .filter(|&d| d != (0, 0))
                .all(|(di, dj)| match at(i + di, j + dj) {
                    None => true,
                    // Ties go to the lower index so plateaus yield one seed.
                    Some(o) => {
                        let other = (i + di) * grid.n2 as isize + (j + dj);
                        s.gap < o.gap || (s.gap == o.gap && me < other)
                    }
                });
            if is_min {
                seeds.push(*s);
            }
        }
    }
    seeds.sort_by(|a, b| a.gap.total_cmp(&b.gap));
    Ok(ScanResult { seeds, skipped })
}
