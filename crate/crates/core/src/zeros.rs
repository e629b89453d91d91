//! Certified zero search for f(−k) inside rectangles of the k-plane.
//!
//! The number of zeros inside a rectangle is the winding number of f along
//! its boundary. Each boundary segment is accepted only when the phase
//! increment is small and agrees with a Simpson estimate of ∫ f′/f dk, so
//! no full turn can hide between samples. Regions are split recursively
//! until each cell holds one zero, which Newton then refines; a cell that
//! shrinks below `min_cell` while still holding two zeros is reported as a
//! double zero.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jost::Jost;
use crate::potential::{ParamPoint, PotentialSpec};

/// Axis-aligned rectangle in the complex k-plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Rect {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self> {
        let all_finite = [re_min, re_max, im_min, im_max]
            .iter()
            .all(|v| v.is_finite());
        if !all_finite || re_min >= re_max || im_min >= im_max {
            return Err(Error::Domain(format!(
                "rectangle [{re_min}, {re_max}] x [{im_min}, {im_max}] has empty interior"
            )));
        }
        Ok(Rect {
            re_min,
            re_max,
            im_min,
            im_max,
        })
    }

    /// Square of half-side `half` around `center`.
    pub fn square(center: C64, half: f64) -> Self {
        Rect {
            re_min: center.re - half,
            re_max: center.re + half,
            im_min: center.im - half,
            im_max: center.im + half,
        }
    }

    pub fn center(&self) -> C64 {
        C64::new(
            0.5 * (self.re_min + self.re_max),
            0.5 * (self.im_min + self.im_max),
        )
    }

    pub fn width(&self) -> f64 {
        self.re_max - self.re_min
    }

    pub fn height(&self) -> f64 {
        self.im_max - self.im_min
    }

    pub fn max_side(&self) -> f64 {
        self.width().max(self.height())
    }

    pub fn contains(&self, z: C64) -> bool {
        z.re >= self.re_min && z.re <= self.re_max && z.im >= self.im_min && z.im <= self.im_max
    }

    /// Grown by `fraction` of each side, about the center.
    pub fn dilate(&self, fraction: f64) -> Rect {
        let dw = 0.5 * fraction * self.width();
        let dh = 0.5 * fraction * self.height();
        Rect {
            re_min: self.re_min - dw,
            re_max: self.re_max + dw,
            im_min: self.im_min - dh,
            im_max: self.im_max + dh,
        }
    }

    fn corners(&self) -> [C64; 4] {
        [
            C64::new(self.re_min, self.im_min),
            C64::new(self.re_max, self.im_min),
            C64::new(self.re_max, self.im_max),
            C64::new(self.re_min, self.im_max),
        ]
    }

    /// Four children split at fraction `t` of each side.
    pub fn split(&self, t: f64) -> [Rect; 4] {
        let re = self.re_min + t * self.width();
        let im = self.im_min + t * self.height();
        [
            Rect {
                re_max: re,
                im_max: im,
                ..*self
            },
            Rect {
                re_min: re,
                im_max: im,
                ..*self
            },
            Rect {
                re_max: re,
                im_min: im,
                ..*self
            },
            Rect {
                re_min: re,
                im_min: im,
                ..*self
            },
        ]
    }
}

/// A search window strictly inside the fourth quadrant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Rect", into = "Rect")]
pub struct SearchRegion(Rect);

impl SearchRegion {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self> {
        SearchRegion::try_from(Rect::new(re_min, re_max, im_min, im_max)?)
    }

    pub fn rect(&self) -> &Rect {
        &self.0
    }

    /// Default window for a potential: real parts up to the top of the
    /// highest barrier, imaginary parts down to a quarter of that.
    pub fn default_for(spec: &PotentialSpec) -> Self {
        let top = spec.max_height().max(1.0).sqrt();
        SearchRegion(Rect {
            re_min: 0.05 * top,
            re_max: top,
            im_min: -0.25 * top,
            im_max: -1e-6,
        })
    }
}

impl TryFrom<Rect> for SearchRegion {
    type Error = Error;

    fn try_from(r: Rect) -> Result<Self> {
        if r.re_min.is_nan() || r.im_max.is_nan() || r.re_min <= 0.0 || r.im_max >= 0.0 {
            return Err(Error::Domain(format!(
                "search region must lie in the fourth quadrant (re_min > 0, im_max < 0), got {r:?}"
            )));
        }
        Rect::new(r.re_min, r.re_max, r.im_min, r.im_max).map(SearchRegion)
    }
}

impl From<SearchRegion> for Rect {
    fn from(r: SearchRegion) -> Rect {
        r.0
    }
}

impl std::ops::Deref for SearchRegion {
    type Target = Rect;
    fn deref(&self) -> &Rect {
        &self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Pole {
    Simple {
        k: C64,
    },
    /// Two zeros closer than the minimal cell size.
    Double {
        k: C64,
    },
}

impl Pole {
    pub fn k(&self) -> C64 {
        match *self {
            Pole::Simple { k } | Pole::Double { k } => k,
        }
    }

    pub fn multiplicity(&self) -> i32 {
        match self {
            Pole::Simple { .. } => 1,
            Pole::Double { .. } => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoleSet {
    pub zeros: Vec<Pole>,
    pub winding: i32,
    pub refine_tol: f64,
}

impl PoleSet {
    /// Zero locations repeated by multiplicity.
    pub fn points(&self) -> Vec<C64> {
        self.zeros
            .iter()
            .flat_map(|p| std::iter::repeat_n(p.k(), p.multiplicity() as usize))
            .collect()
    }

    pub fn has_double(&self) -> bool {
        self.zeros.iter().any(|p| matches!(p, Pole::Double { .. }))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroOptions {
    /// Newton stops once |f| < refine_tol · max(1, |f′|·|k|).
    pub refine_tol: f64,
    /// Cells below this side with two zeros become a double-zero certificate.
    pub min_cell: f64,
    pub max_newton: usize,
    /// Relative growth applied once when a zero sits on the boundary.
    pub dilation: f64,
}

impl Default for ZeroOptions {
    fn default() -> Self {
        ZeroOptions {
            refine_tol: 1e-12,
            min_cell: 1e-6,
            max_newton: 50,
            dilation: 0.01,
        }
    }
}

const MAX_SEGMENT_PHASE: f64 = 0.5;
const MAX_SIMPSON_MISMATCH: f64 = 0.05;
const INITIAL_SEGMENTS: usize = 8;
const WINDING_TOL: f64 = 1e-3;

struct Sample {
    z: C64,
    f: C64,
    /// f′/f
    g: C64,
}

fn sample(jost: &Jost, z: C64) -> Result<Sample> {
    let (f, df) = jost.value_slope(z)?;
    if f.norm() == 0.0 || !(df / f).is_finite() {
        return Err(Error::BoundaryZero { at: z });
    }
    Ok(Sample { z, f, g: df / f })
}

/// Total phase increment of f along the straight segment a → b.
fn edge_phase(jost: &Jost, a: C64, b: C64) -> Result<f64> {
    let min_len = 1e-12 * (1.0 + a.norm().max(b.norm()));
    let mut total = 0.0;
    let mut points: Vec<Sample> = (0..=INITIAL_SEGMENTS)
        .map(|i| sample(jost, a + (b - a) * (i as f64 / INITIAL_SEGMENTS as f64)))
        .collect::<Result<_>>()?;
    // Work through the segments from the back so `points` acts as a stack.
    points.reverse();
    let mut left = points.pop().expect("at least two samples");
    while let Some(right) = points.pop() {
        let h = right.z - left.z;
        let mid = sample(jost, left.z + h * 0.5)?;
        let log_ratio = (right.f / left.f).ln();
        let simpson = h / 6.0 * (left.g + mid.g * 4.0 + right.g);
        if log_ratio.im.abs() < MAX_SEGMENT_PHASE
            && (simpson - log_ratio).norm() < MAX_SIMPSON_MISMATCH
        {
            total += log_ratio.im;
            left = right;
        } else {
            if h.norm() < min_len {
                return Err(Error::BoundaryZero { at: left.z });
            }
            points.push(right);
            points.push(mid);
        }
    }
    Ok(total)
}

/// Number of zeros of f inside `rect`, by the argument principle.
pub fn winding_number(jost: &Jost, rect: &Rect) -> Result<i32> {
    let c = rect.corners();
    if rect.contains(C64::new(0.0, 0.0)) {
        return Err(Error::Domain(format!("contour {rect:?} encloses k = 0")));
    }
    let mut phase = 0.0;
    for i in 0..4 {
        phase += edge_phase(jost, c[i], c[(i + 1) % 4])?;
    }
    let turns = phase / (2.0 * PI);
    let n = turns.round();
    if (turns - n).abs() > WINDING_TOL {
        return Err(Error::Quadrature(format!(
            "winding {turns} is not an integer over {rect:?}"
        )));
    }
    Ok(n as i32)
}

/// Counts with one dilation retry; returns the count and the contour used.
fn count_on(jost: &Jost, rect: &Rect, opts: &ZeroOptions) -> Result<(i32, Rect)> {
    match winding_number(jost, rect) {
        Err(Error::BoundaryZero { at }) => {
            log::debug!("zero near contour at {at}; dilating {rect:?}");
            let grown = rect.dilate(opts.dilation);
            winding_number(jost, &grown).map(|n| (n, grown))
        }
        other => other.map(|n| (n, *rect)),
    }
}

/// Winding number of f(−k; p) around `region`.
pub fn count_zeros(spec: &PotentialSpec, p: ParamPoint, region: &Rect) -> Result<i32> {
    let jost = Jost::new(spec, p)?;
    count_on(&jost, region, &ZeroOptions::default()).map(|(n, _)| n)
}

pub fn find_zeros(spec: &PotentialSpec, p: ParamPoint, region: &Rect) -> Result<PoleSet> {
    find_zeros_with(spec, p, region, &ZeroOptions::default())
}

pub fn find_zeros_with(
    spec: &PotentialSpec,
    p: ParamPoint,
    region: &Rect,
    opts: &ZeroOptions,
) -> Result<PoleSet> {
    let jost = Jost::new(spec, p)?;
    find_in(&jost, region, opts)
}

/// All zeros of an already-instantiated Jost function inside `region`.
pub fn find_in(jost: &Jost, region: &Rect, opts: &ZeroOptions) -> Result<PoleSet> {
    let (winding, rect) = count_on(jost, region, opts)?;
    let mut zeros = Vec::new();
    solve_cell(jost, &rect, winding, opts, &mut zeros)?;
    zeros.sort_by(|a, b| {
        let (a, b) = (a.k(), b.k());
        a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
    });
    Ok(PoleSet {
        zeros,
        winding,
        refine_tol: opts.refine_tol,
    })
}

fn solve_cell(
    jost: &Jost,
    rect: &Rect,
    count: i32,
    opts: &ZeroOptions,
    out: &mut Vec<Pole>,
) -> Result<()> {
    match count {
        0 => return Ok(()),
        c if c < 0 => {
            return Err(Error::Quadrature(format!(
                "negative winding {c} over {rect:?}"
            )))
        }
        1 => {
            if let Ok(k) = newton(jost, rect.center(), opts) {
                if rect.dilate(1e-6).contains(k) {
                    out.push(Pole::Simple { k });
                    return Ok(());
                }
            }
        }
        2 => {
            if let Some(k) = double_zero(jost, rect, opts) {
                out.push(Pole::Double { k });
                return Ok(());
            }
        }
        _ => {}
    }

    if rect.max_side() < opts.min_cell {
        return match count {
            2 => {
                out.push(Pole::Double { k: rect.center() });
                Ok(())
            }
            _ => Err(Error::Refinement { cell: *rect }),
        };
    }

    // Off-center splits keep symmetric zero pairs away from cell edges.
    let mut last_err = None;
    for t in [0.5 + 1.0 / 64.0, 0.5 - 3.0 / 64.0, 0.5 + 5.0 / 64.0] {
        let children = rect.split(t);
        let counts: Result<Vec<i32>> = children.iter().map(|c| winding_number(jost, c)).collect();
        match counts {
            Ok(counts) => {
                let sum: i32 = counts.iter().sum();
                if sum != count {
                    return Err(Error::Quadrature(format!(
                        "children of {rect:?} hold {sum} zeros, parent {count}"
                    )));
                }
                for (child, n) in children.iter().zip(counts) {
                    solve_cell(jost, child, n, opts, out)?;
                }
                return Ok(());
            }
            Err(e @ Error::BoundaryZero { .. }) => last_err = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last_err.expect("loop ran"))
}

/// Tests whether a two-zero cell is a cluster tighter than `min_cell`:
/// Newton on f′ finds the midpoint, then a tiny contour must hold both.
fn double_zero(jost: &Jost, rect: &Rect, opts: &ZeroOptions) -> Option<C64> {
    let mut k = rect.center();
    for _ in 0..opts.max_newton {
        let v = jost.eval(k).ok()?;
        let step = v.df_dk / v.d2f_dk2;
        if !step.is_finite() {
            return None;
        }
        k -= step;
        if step.norm() <= 1e-15 * k.norm() {
            break;
        }
    }
    if !rect.contains(k) {
        return None;
    }
    let tiny = Rect::square(k, 0.5 * opts.min_cell);
    match winding_number(jost, &tiny) {
        Ok(2) => Some(k),
        _ => None,
    }
}

/// Newton iteration from `k0` with the analytic slope.
pub fn newton(jost: &Jost, k0: C64, opts: &ZeroOptions) -> Result<C64> {
    let mut k = k0;
    for _ in 0..opts.max_newton {
        let (f, df) = jost.value_slope(k)?;
        let scale = 1f64.max(df.norm() * k.norm());
        if f.norm() < opts.refine_tol * scale {
            return Ok(polish(jost, k));
        }
        let step = f / df;
        if !step.is_finite() {
            break;
        }
        k -= step;
    }
    Err(Error::Refinement {
        cell: Rect::square(k0, 0.0),
    })
}

/// A few extra Newton steps so the result is stationary to rounding.
fn polish(jost: &Jost, mut k: C64) -> C64 {
    for _ in 0..3 {
        let Ok((f, df)) = jost.value_slope(k) else {
            break;
        };
        let step = f / df;
        if !step.is_finite() || step.norm() > 1e-8 * k.norm() {
            break;
        }
        k -= step;
        if step.norm() <= 1e-16 * k.norm() {
            break;
        }
    }
    k
}

/// The two zeros inside `rect`, which must hold exactly two. A double
/// zero is returned twice.
pub fn doublet_in(jost: &Jost, rect: &Rect, opts: &ZeroOptions) -> Result<[C64; 2]> {
    let set = find_in(jost, rect, opts)?;
    if set.winding != 2 {
        return Err(Error::NotIsolated { found: set.winding });
    }
    let pts = set.points();
    Ok([pts[0], pts[1]])
}
