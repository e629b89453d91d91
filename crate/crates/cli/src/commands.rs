use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use serde::Serialize;

use epoint_core::config;
use epoint_core::crossing::{self, CrossingClass, JOINT_TOL};
use epoint_core::exceptional::{self, LocateOptions, ScanOptions};
use epoint_core::tracer::{self, ProjectionCrossings, TrackOptions};
use epoint_core::unfolding::{self, ValidityOptions};
use epoint_core::zeros::{self, Pole};
use epoint_core::{
    Config, LoopSpec, OffsetVector, ParamPoint, PathSpec, Rect, SearchRegion, UnfoldingModel,
    ZeroOptions, C64,
};

use crate::failure::{CmdResult, Failure, CONFIG, NOTHING_FOUND};
use crate::manifest::RunManifest;
use crate::{
    Common, FindEpArgs, LineArgs, LoopArgs, PolesArgs, Preset, SectionArgs, TraceArgs, TrackTols,
    ZeroTols,
};

/// Collects output files and writes the manifest last.
struct Output {
    dir: PathBuf,
    manifest: RunManifest,
}

impl Output {
    fn new(common: &Common, command: &str, params: &impl Serialize) -> CmdResult<Self> {
        fs::create_dir_all(&common.out)?;
        let params = serde_json::to_value(params)?;
        Ok(Output {
            dir: common.out.clone(),
            manifest: RunManifest::new(&common.config, command, params, &common.out),
        })
    }

    fn json(&mut self, name: &str, value: &impl Serialize) -> CmdResult<()> {
        let text = serde_json::to_string_pretty(value)?;
        fs::write(self.dir.join(name), text + "\n")?;
        self.manifest.outputs.push(name.to_string());
        Ok(())
    }

    fn file(&mut self, name: &str) -> CmdResult<BufWriter<File>> {
        let f = File::create(self.dir.join(name))?;
        self.manifest.outputs.push(name.to_string());
        Ok(BufWriter::new(f))
    }

    fn finish(self) -> CmdResult<()> {
        self.manifest.write(&self.dir)?;
        Ok(())
    }
}

fn load_config(path: &Path) -> CmdResult<Config> {
    config::load(path)
        .map_err(|e| Failure::new(CONFIG, e).context(format!("loading config {}", path.display())))
}

fn load_model(path: &Path) -> CmdResult<UnfoldingModel> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::new(CONFIG, e).context(format!("reading {}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Failure::new(CONFIG, e).context(format!("parsing {}", path.display())))
}

fn search_region(flag: Option<[f64; 4]>, cfg: &Config) -> CmdResult<SearchRegion> {
    match flag {
        Some([a, b, c, d]) => Ok(SearchRegion::new(a, b, c, d)?),
        None => Ok(cfg
            .region
            .unwrap_or_else(|| SearchRegion::default_for(&cfg.spec))),
    }
}

fn zero_options(t: &ZeroTols) -> ZeroOptions {
    ZeroOptions {
        refine_tol: t.tol_refine,
        min_cell: t.tol_min_cell,
        ..ZeroOptions::default()
    }
}

fn track_options(t: &TrackTols) -> TrackOptions {
    TrackOptions {
        zeros: zero_options(&t.zeros),
        region_factor: t.tol_region,
        guard_factor: t.tol_guard,
        ..TrackOptions::default()
    }
}

fn resolve_line(line: &LineArgs, m: &UnfoldingModel) -> CmdResult<(f64, (f64, f64))> {
    let Some(preset) = line.preset else {
        // clap enforces both when no preset is given.
        return Ok((line.xi2.unwrap_or(0.0), line.range.unwrap_or((0.0, 0.0))));
    };
    let [lr, ep, li] = crossing::canonical_sections(m)?;
    Ok(match preset {
        Preset::CrossLr => lr,
        Preset::ThroughEp => ep,
        Preset::CrossLi => li,
    })
}

#[derive(Serialize)]
struct PoleEntry {
    kind: &'static str,
    multiplicity: i32,
    k: C64,
    energy: C64,
}

#[derive(Serialize)]
struct PolesReport {
    point: ParamPoint,
    region: Rect,
    winding: i32,
    zeros: Vec<PoleEntry>,
}

pub fn poles(a: &PolesArgs) -> CmdResult<()> {
    let cfg = load_config(&a.common.config)?;
    let region = search_region(a.region, &cfg)?;
    let p =
        a.at.map_or_else(|| cfg.spec.base_point(), |(x1, x2)| ParamPoint::new(x1, x2));
    let set = zeros::find_zeros_with(&cfg.spec, p, region.rect(), &zero_options(&a.tols))?;
    let report = PolesReport {
        point: p,
        region: *region.rect(),
        winding: set.winding,
        zeros: set
            .zeros
            .iter()
            .map(|z| PoleEntry {
                kind: match z {
                    Pole::Simple { .. } => "simple",
                    Pole::Double { .. } => "double",
                },
                multiplicity: z.multiplicity(),
                k: z.k(),
                energy: z.k() * z.k(),
            })
            .collect(),
    };
    let mut out = Output::new(&a.common, "poles", a)?;
    out.json("poles.json", &report)?;
    out.finish()?;
    let r = region.rect();
    println!(
        "{} zero(s) in Re k [{}, {}], Im k [{}, {}] at x = ({}, {})",
        set.winding, r.re_min, r.re_max, r.im_min, r.im_max, p.x1, p.x2
    );
    for z in &report.zeros {
        println!("  k = {:.12}  E = {:.12}  ({})", z.k, z.energy, z.kind);
    }
    Ok(())
}

pub fn find_ep(a: &FindEpArgs) -> CmdResult<()> {
    let cfg = load_config(&a.common.config)?;
    let grid = a.grid.or(cfg.grid).ok_or_else(|| {
        Failure::msg(
            CONFIG,
            "no scan grid: pass --grid or set `grid` in the config",
        )
    })?;
    let region = search_region(a.region, &cfg)?;
    let zeros = zero_options(&a.tols);
    let scan = exceptional::scan_seeds_with(
        &cfg.spec,
        &grid,
        region.rect(),
        &ScanOptions {
            max_gap: a.tol_gap,
            zeros,
        },
    )?;
    if scan.seeds.is_empty() {
        return Err(Failure::msg(
            NOTHING_FOUND,
            format!(
                "no seeds: no grid minimum of the doublet gap below {} ({} of {} points without a doublet)",
                a.tol_gap,
                scan.skipped,
                grid.n1 * grid.n2
            ),
        ));
    }
    let lopts = LocateOptions {
        tol: a.tol_newton,
        accept: a.tol_accept,
        f_kk_floor: a.tol_fkk,
        ..LocateOptions::default()
    };
    let mut last = None;
    let mut found = None;
    for s in &scan.seeds {
        match exceptional::locate_with(&cfg.spec, s.k, s.p, &lopts) {
            Ok(ep) => {
                found = Some(ep);
                break;
            }
            Err(e) => {
                log::info!("seed at ({}, {}) rejected: {e}", s.p.x1, s.p.x2);
                last = Some(e);
            }
        }
    }
    let ep = match (found, last) {
        (Some(ep), _) => ep,
        (None, Some(e)) => return Err(Failure::from(e).context("no seed converged")),
        (None, None) => unreachable!("seeds is non-empty"),
    };
    let model = unfolding::extract(&cfg.spec, &ep)?;
    let cal = unfolding::validity_radius_with(
        &cfg.spec,
        &model,
        &ValidityOptions {
            criterion: a.tol_validity,
            zeros,
            ..ValidityOptions::default()
        },
    )?;
    let model = model.with_calibration(&cal);

    let mut out = Output::new(&a.common, "find-ep", a)?;
    out.json("ep.json", &ep)?;
    out.json("model.json", &model)?;
    out.finish()?;
    println!(
        "EP at x* = ({:.12}, {:.12}), k_d = {:.12}, residual {:.1e}",
        ep.x_star.x1, ep.x_star.x2, ep.k_d, ep.residual
    );
    println!(
        "validity radius {:.3e}, Puiseux constant {:.3e}",
        cal.radius, cal.puiseux_k
    );
    Ok(())
}

#[derive(Serialize)]
struct SectionReport {
    xi2: f64,
    range: (f64, f64),
    exact: bool,
    joint_tol: f64,
    class: CrossingClass,
}

pub fn section(a: &SectionArgs) -> CmdResult<()> {
    let cfg = load_config(&a.common.config)?;
    let m = load_model(&a.line.model)?;
    let (xi2, range) = resolve_line(&a.line, &m)?;
    let samples = if a.exact {
        crossing::section_exact(&cfg.spec, &m, xi2, range, a.line.steps)?
    } else {
        crossing::section(&m, xi2, range, a.line.steps)?
    };
    let joint_tol = a
        .tol_joint
        .unwrap_or(if a.exact { 1e-3 } else { JOINT_TOL });
    let class = crossing::classify_with(&samples, joint_tol);

    let mut out = Output::new(&a.common, "section", a)?;
    crossing::write_csv(out.file("section.csv")?, &samples, &class)?;
    out.json(
        "classification.json",
        &SectionReport {
            xi2,
            range,
            exact: a.exact,
            joint_tol,
            class,
        },
    )?;
    out.finish()?;
    match class.xi1_c {
        Some(x) => println!("{} at xi1 = {x:.6e} (xi2 = {xi2:.6e})", class.kind),
        None => println!("{} (xi2 = {xi2:.6e})", class.kind),
    }
    Ok(())
}

#[derive(Serialize)]
struct TraceSummary {
    xi2: f64,
    range: (f64, f64),
    steps: usize,
    projection_crossings: ProjectionCrossings,
    crossing_angle_deg: Option<f64>,
    max_model_deviation: Option<f64>,
}

pub fn trace(a: &TraceArgs) -> CmdResult<()> {
    let cfg = load_config(&a.common.config)?;
    let m = load_model(&a.line.model)?;
    let (xi2, range) = resolve_line(&a.line, &m)?;
    let path = PathSpec::new(xi2, range.0, range.1, a.line.steps)?;
    let traj = tracer::trace_with(&cfg.spec, &m, &path, &track_options(&a.track))?;
    let summary = TraceSummary {
        xi2,
        range,
        steps: a.line.steps,
        projection_crossings: traj.projection_crossings(),
        crossing_angle_deg: traj.crossing_angle(),
        max_model_deviation: traj.max_model_deviation(),
    };

    let mut out = Output::new(&a.common, "trace", a)?;
    tracer::write_csv(out.file("trajectory.csv")?, &traj)?;
    out.json("summary.json", &summary)?;
    out.finish()?;
    let pc = summary.projection_crossings;
    println!(
        "{} samples; projections crossing: Re {}, Im {}, complex {}",
        traj.records.len(),
        pc.re,
        pc.im,
        pc.complex
    );
    if let Some(angle) = summary.crossing_angle_deg {
        println!("crossing angle {angle:.4} deg");
    }
    Ok(())
}

pub fn run_loop(a: &LoopArgs) -> CmdResult<()> {
    let cfg = load_config(&a.common.config)?;
    let m = load_model(&a.model)?;
    let spec = LoopSpec {
        center: OffsetVector::new(a.center.0, a.center.1),
        radius: a.radius,
        n_steps: a.steps,
        turns: a.turns,
    };
    let report = tracer::monodromy_with(&cfg.spec, &m, &spec, &track_options(&a.track))?;

    let mut out = Output::new(&a.common, "loop", a)?;
    out.json("loop.json", &report)?;
    out.finish()?;
    println!(
        "{}: {} turn(s) of radius {:.3e} {} the EP (closure {:.1e})",
        if report.swapped { "swap" } else { "identity" },
        report.turns,
        report.radius,
        if report.encloses_ep {
            "around"
        } else {
            "not around"
        },
        report.closure
    );
    Ok(())
}
