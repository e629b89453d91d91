//! Continuation of the exact doublet along parameter paths.
//!
//! At each step the two zeros are re-isolated by a winding count in a
//! square around the predicted positions, then matched to the previous
//! step by nearest neighbour. A large jump that could just as well be a
//! label swap is reported instead of guessed.

use std::io::Write;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jost::Jost;
use crate::potential::PotentialSpec;
use crate::unfolding::{exact_doublet, OffsetVector, UnfoldingModel};
use crate::zeros::{find_in, Rect, ZeroOptions};

/// Straight path ξ₂ = ξ̄₂, ξ₁ from start to end in uniform steps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathSpec {
    pub xi2_bar: f64,
    pub xi1_start: f64,
    pub xi1_end: f64,
    pub n_steps: usize,
}

impl PathSpec {
    pub fn new(xi2_bar: f64, xi1_start: f64, xi1_end: f64, n_steps: usize) -> Result<Self> {
        if ![xi2_bar, xi1_start, xi1_end].iter().all(|v| v.is_finite()) {
            return Err(Error::Domain("path bounds must be finite".into()));
        }
        if n_steps < 2 && xi1_start != xi1_end {
            return Err(Error::Domain(format!(
                "path needs at least 2 steps, got {n_steps}"
            )));
        }
        Ok(PathSpec {
            xi2_bar,
            xi1_start,
            xi1_end,
            n_steps,
        })
    }

    /// Sample points; a zero-length path has a single one.
    pub fn points(&self) -> Vec<OffsetVector> {
        if self.xi1_start == self.xi1_end {
            return vec![OffsetVector::new(self.xi1_start, self.xi2_bar)];
        }
        let n = self.n_steps;
        (0..n)
            .map(|j| {
                let t = j as f64 / (n - 1) as f64;
                OffsetVector::new(
                    self.xi1_start + (self.xi1_end - self.xi1_start) * t,
                    self.xi2_bar,
                )
            })
            .collect()
    }

    pub fn reversed(&self) -> Self {
        PathSpec {
            xi1_start: self.xi1_end,
            xi1_end: self.xi1_start,
            ..*self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub xi1: f64,
    pub xi2: f64,
    /// Exact (k_n, k_{n+1}), continuous along the path.
    pub k: [C64; 2],
    pub e: [C64; 2],
    /// Model energies in the same labelling, where the model is valid.
    pub model: Option<[C64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub records: Vec<TraceRecord>,
}

/// Which planar projections of the two trajectories cross.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjectionCrossings {
    /// (Re 𝓔, ξ₁)
    pub re: bool,
    /// (Im 𝓔, ξ₁)
    pub im: bool,
    /// (Re 𝓔, Im 𝓔)
    pub complex: bool,
}

impl Trajectory {
    /// Largest |model − exact| energy deviation over valid records.
    pub fn max_model_deviation(&self) -> Option<f64> {
        self.records
            .iter()
            .filter_map(|r| {
                r.model
                    .map(|m| (m[0] - r.e[0]).norm().max((m[1] - r.e[1]).norm()))
            })
            .reduce(f64::max)
    }

    pub fn projection_crossings(&self) -> ProjectionCrossings {
        let diff: Vec<C64> = self.records.iter().map(|r| r.e[0] - r.e[1]).collect();
        let changes = |part: fn(&C64) -> f64| {
            let scale = diff.iter().map(|d| part(d).abs()).fold(0.0, f64::max);
            let tiny = 1e-9 * scale;
            diff.iter().any(|d| part(d).abs() <= tiny)
                || diff.windows(2).any(|w| part(&w[0]) * part(&w[1]) < 0.0)
        };
        let a: Vec<C64> = self.records.iter().map(|r| r.e[0]).collect();
        let b: Vec<C64> = self.records.iter().map(|r| r.e[1]).collect();
        ProjectionCrossings {
            re: changes(|z| z.re),
            im: changes(|z| z.im),
            complex: polylines_meet(&a, &b),
        }
    }

    /// Angle in degrees between the lines carrying the pole pair just
    /// before and just after the record nearest ξ = 0.
    pub fn crossing_angle(&self) -> Option<f64> {
        let (centre, _) = self.records.iter().enumerate().min_by(|a, b| {
            let na = a.1.xi1.hypot(a.1.xi2);
            let nb = b.1.xi1.hypot(b.1.xi2);
            na.total_cmp(&nb)
        })?;
        let pick = |range: &mut dyn Iterator<Item = usize>| {
            range
                .map(|j| self.records[j].e[0] - self.records[j].e[1])
                .find(|d| d.norm() > 0.0)
        };
        let before = pick(&mut (0..centre).rev())?;
        let after = pick(&mut (centre + 1..self.records.len()))?;
        let cos = (before.conj() * after).re.abs() / (before.norm() * after.norm());
        Some(cos.min(1.0).acos().to_degrees())
    }
}

fn segments_meet(p1: C64, p2: C64, q1: C64, q2: C64) -> bool {
    let cross = |a: C64, b: C64| a.re * b.im - a.im * b.re;
    let d1 = cross(q2 - q1, p1 - q1);
    let d2 = cross(q2 - q1, p2 - q1);
    let d3 = cross(p2 - p1, q1 - p1);
    let d4 = cross(p2 - p1, q2 - p1);
    d1 * d2 <= 0.0 && d3 * d4 <= 0.0
}

/// True when the two polylines share a point.
pub fn polylines_meet(a: &[C64], b: &[C64]) -> bool {
    if a.len() == 1 || b.len() == 1 {
        return a.iter().any(|x| b.contains(x));
    }
    a.windows(2)
        .any(|s| b.windows(2).any(|t| segments_meet(s[0], s[1], t[0], t[1])))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackOptions {
    pub zeros: ZeroOptions,
    /// Tracking square half-side as a multiple of the previous gap.
    pub region_factor: f64,
    /// A step moving more than this times the median motion is suspect.
    pub guard_factor: f64,
    /// ... and is rejected if the other assignment costs less than this
    /// multiple of the chosen one.
    pub ambiguity: f64,
}

impl Default for TrackOptions {
    fn default() -> Self {
        TrackOptions {
            zeros: ZeroOptions::default(),
            region_factor: 10.0,
            guard_factor: 5.0,
            ambiguity: 2.0,
        }
    }
}

struct Tracker<'a> {
    spec: &'a PotentialSpec,
    m: &'a UnfoldingModel,
    opts: TrackOptions,
    prev: [C64; 2],
    prev2: Option<[C64; 2]>,
    motions: Vec<f64>,
}

impl<'a> Tracker<'a> {
    /// Starts at ξ with n = the zero of larger Re 𝓔.
    fn start(
        spec: &'a PotentialSpec,
        m: &'a UnfoldingModel,
        xi: OffsetVector,
        opts: TrackOptions,
    ) -> Result<Self> {
        let mut k = exact_doublet(spec, m, xi, &opts.zeros)?;
        if (k[1] * k[1]).re > (k[0] * k[0]).re {
            k.swap(0, 1);
        }
        Ok(Tracker {
            spec,
            m,
            opts,
            prev: k,
            prev2: None,
            motions: Vec::new(),
        })
    }

    fn step(&mut self, xi: OffsetVector, index: usize) -> Result<[C64; 2]> {
        let pred = match self.prev2 {
            Some(p2) => [0, 1].map(|b| 2.0 * self.prev[b] - p2[b]),
            None => self.prev,
        };
        let gap = (self.prev[0] - self.prev[1]).norm();
        let motion = self.prev2.map_or(0.0, |p2| {
            (self.prev[0] - p2[0])
                .norm()
                .max((self.prev[1] - p2[1]).norm())
        });
        let floor = 1e-7 * self.m.ep.k_d.norm();
        let mut half = (self.opts.region_factor * gap.max((pred[0] - pred[1]).norm()))
            .max(4.0 * motion)
            .max(floor);
        let center = 0.5 * (pred[0] + pred[1]);

        let jost = Jost::new(self.spec, xi.point(&self.m.ep))?;
        let mut found = find_in(&jost, &Rect::square(center, half), &self.opts.zeros)?;
        if found.winding != 2 {
            half *= if found.winding < 2 { 4.0 } else { 0.25 };
            found = find_in(&jost, &Rect::square(center, half), &self.opts.zeros)?;
        }
        if found.winding != 2 {
            return Err(Error::IsolationLost {
                step: index,
                winding: found.winding,
            });
        }
        let z = found.points();

        let cost = |a: C64, b: C64| (a - pred[0]).norm() + (b - pred[1]).norm();
        let (keep, swap) = (cost(z[0], z[1]), cost(z[1], z[0]));
        let (next, chosen, other) = if swap < keep {
            ([z[1], z[0]], swap, keep)
        } else {
            ([z[0], z[1]], keep, swap)
        };
        let moved = (next[0] - self.prev[0])
            .norm()
            .max((next[1] - self.prev[1]).norm());
        let new_gap = (next[0] - next[1]).norm();
        // Through a near-coalescence the labels are genuinely free.
        let coalescing = gap.min(new_gap) <= 2.0 * moved;
        if self.motions.len() >= 2 && !coalescing {
            let median = median(&self.motions);
            if median > 0.0
                && moved > self.opts.guard_factor * median
                && other < self.opts.ambiguity * chosen
            {
                return Err(Error::Continuation { step: index });
            }
        }
        self.motions.push(moved);
        self.prev2 = Some(self.prev);
        self.prev = next;
        Ok(next)
    }
}

fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}

pub fn trace(spec: &PotentialSpec, m: &UnfoldingModel, path: &PathSpec) -> Result<Trajectory> {
    trace_with(spec, m, path, &TrackOptions::default())
}

pub fn trace_with(
    spec: &PotentialSpec,
    m: &UnfoldingModel,
    path: &PathSpec,
    opts: &TrackOptions,
) -> Result<Trajectory> {
    let rho = m.validity_radius.ok_or(Error::Uncalibrated)?;
    let points = path.points();
    let mut tracker = Tracker::start(spec, m, points[0], *opts)?;
    let mut records = Vec::with_capacity(points.len());
    for (j, xi) in points.iter().enumerate() {
        let k = if j == 0 {
            tracker.prev
        } else {
            tracker.step(*xi, j)?
        };
        let e = k.map(|k| k * k);
        let model = (xi.norm() <= rho).then(|| {
            let (a, b) = m.model_energy(*xi);
            let keep = (a - e[0]).norm() + (b - e[1]).norm();
            let swap = (b - e[0]).norm() + (a - e[1]).norm();
            if swap < keep {
                [b, a]
            } else {
                [a, b]
            }
        });
        records.push(TraceRecord {
            xi1: xi.xi1,
            xi2: xi.xi2,
            k,
            e,
            model,
        });
    }
    Ok(Trajectory { records })
}

/// Closed circular loop in parameter space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LoopSpec {
    pub center: OffsetVector,
    pub radius: f64,
    /// Steps per turn.
    pub n_steps: usize,
    pub turns: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LoopReport {
    pub center: OffsetVector,
    pub radius: f64,
    pub turns: usize,
    pub n_steps: usize,
    pub encloses_ep: bool,
    pub swapped: bool,
    pub start: [C64; 2],
    pub end: [C64; 2],
    /// Distance between the end pair and the start pair under the reported
    /// permutation.
    pub closure: f64,
}

pub fn monodromy(spec: &PotentialSpec, m: &UnfoldingModel, lp: &LoopSpec) -> Result<LoopReport> {
    monodromy_with(spec, m, lp, &TrackOptions::default())
}

pub fn monodromy_with(
    spec: &PotentialSpec,
    m: &UnfoldingModel,
    lp: &LoopSpec,
    opts: &TrackOptions,
) -> Result<LoopReport> {
    if lp.n_steps < 8 || lp.turns == 0 || !lp.radius.is_finite() || lp.radius <= 0.0 {
        return Err(Error::Domain(format!(
            "loop needs radius > 0, ≥ 8 steps and ≥ 1 turn: {lp:?}"
        )));
    }
    let at = |j: usize| {
        let angle = 2.0 * std::f64::consts::PI * j as f64 / lp.n_steps as f64;
        let d = OffsetVector::polar(lp.radius, angle);
        OffsetVector::new(lp.center.xi1 + d.xi1, lp.center.xi2 + d.xi2)
    };
    let mut tracker = Tracker::start(spec, m, at(0), *opts)?;
    let start = tracker.prev;
    let total = lp.n_steps * lp.turns;
    for j in 1..=total {
        tracker.step(at(j), j)?;
    }
    let end = tracker.prev;
    let keep = (end[0] - start[0]).norm().max((end[1] - start[1]).norm());
    let swap = (end[0] - start[1]).norm().max((end[1] - start[0]).norm());
    Ok(LoopReport {
        center: lp.center,
        radius: lp.radius,
        turns: lp.turns,
        n_steps: lp.n_steps,
        encloses_ep: lp.center.norm() < lp.radius,
        swapped: swap < keep,
        start,
        end,
        closure: keep.min(swap),
    })
}

fn sig(x: f64) -> String {
    format!("{x:.16e}")
}

pub const CSV_HEADER: [&str; 14] = [
    "xi1",
    "reKn",
    "imKn",
    "reKn1",
    "imKn1",
    "reEn",
    "imEn",
    "reEn1",
    "imEn1",
    "reEhatN",
    "imEhatN",
    "reEhatN1",
    "imEhatN1",
    "model_valid",
];

pub fn write_csv<W: Write>(out: W, traj: &Trajectory) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in &traj.records {
        let mut row: Vec<String> = Vec::with_capacity(CSV_HEADER.len());
        row.push(sig(r.xi1));
        for z in r.k.iter().chain(&r.e) {
            row.push(sig(z.re));
            row.push(sig(z.im));
        }
        match r.model {
            Some(m) => {
                for z in &m {
                    row.push(sig(z.re));
                    row.push(sig(z.im));
                }
                row.push("1".into());
            }
            None => {
                row.extend(std::iter::repeat_n(String::new(), 4));
                row.push("0".into());
            }
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}
