mod common;

use epoint_core::crossing;
use epoint_core::tracer::{self, LoopSpec, PathSpec, TrackOptions};
use epoint_core::unfolding::OffsetVector;
use epoint_core::Error;

use common::demo;

fn lr_path(n: usize) -> PathSpec {
    let (_, _, m) = demo();
    let [(xi2, range), _, _] = crossing::canonical_sections(m).unwrap();
    PathSpec::new(xi2, range.0, range.1, n).unwrap()
}

#[test]
fn reversed_path_gives_reversed_records() {
    let (spec, _, m) = demo();
    let path = lr_path(81);
    let fwd = tracer::trace(spec, m, &path).unwrap();
    let back = tracer::trace(spec, m, &path.reversed()).unwrap();
    assert_eq!(fwd.records.len(), back.records.len());
    for (a, b) in fwd.records.iter().zip(back.records.iter().rev()) {
        assert!((a.xi1 - b.xi1).abs() < 1e-15);
        // Labels follow continuity from opposite ends; compare as sets.
        let same = (a.k[0] - b.k[0]).norm().max((a.k[1] - b.k[1]).norm());
        let swapped = (a.k[0] - b.k[1]).norm().max((a.k[1] - b.k[0]).norm());
        assert!(same.min(swapped) < 1e-10, "at xi1 = {}", a.xi1);
    }
}

#[test]
fn refinement_keeps_shared_samples_and_labels() {
    let (spec, _, m) = demo();
    let coarse = tracer::trace(spec, m, &lr_path(41)).unwrap();
    let fine = tracer::trace(spec, m, &lr_path(81)).unwrap();
    for (j, a) in coarse.records.iter().enumerate() {
        let b = &fine.records[2 * j];
        assert!((a.xi1 - b.xi1).abs() < 1e-15);
        assert!((a.k[0] - b.k[0]).norm() < 1e-10 && (a.k[1] - b.k[1]).norm() < 1e-10);
    }
}

#[test]
fn labels_start_with_the_higher_energy() {
    let (spec, _, m) = demo();
    let traj = tracer::trace(spec, m, &lr_path(21)).unwrap();
    let first = &traj.records[0];
    assert!(first.e[0].re >= first.e[1].re);
    for r in &traj.records {
        assert!(((r.k[0] * r.k[0]) - r.e[0]).norm() < 1e-14 * r.e[0].norm());
    }
}

#[test]
fn model_columns_follow_the_exact_branches() {
    let (spec, _, m) = demo();
    let traj = tracer::trace(spec, m, &lr_path(41)).unwrap();
    let c = m.puiseux_constant_energy.unwrap();
    let rho = m.validity_radius.unwrap();
    // Model energies carry the same labels as the exact ones.
    assert!(traj.max_model_deviation().unwrap() <= 1.01 * c * rho.powf(1.5));
}

#[test]
fn zero_length_path_has_one_record() {
    let (spec, _, m) = demo();
    let path = PathSpec::new(1e-3, 2e-3, 2e-3, 0).unwrap();
    let traj = tracer::trace(spec, m, &path).unwrap();
    assert_eq!(traj.records.len(), 1);
    assert!(traj.records[0].model.is_some());
}

#[test]
fn path_outside_the_disc_drops_model_columns() {
    let (spec, _, m) = demo();
    let rho = m.validity_radius.unwrap();
    let path = PathSpec::new(0.0, 0.5 * rho, 1.5 * rho, 21).unwrap();
    let traj = tracer::trace(spec, m, &path).unwrap();
    let valid: Vec<bool> = traj.records.iter().map(|r| r.model.is_some()).collect();
    assert!(valid[0] && !valid[20]);
    let mut out = Vec::new();
    tracer::write_csv(&mut out, &traj).unwrap();
    let text = String::from_utf8(out).unwrap();
    let last = text.lines().last().unwrap();
    assert!(last.ends_with(",,,,,0"), "{last}");
}

#[test]
fn csv_has_header_and_seventeen_digits() {
    let (spec, _, m) = demo();
    let traj = tracer::trace(spec, m, &lr_path(5)).unwrap();
    let mut out = Vec::new();
    tracer::write_csv(&mut out, &traj).unwrap();
    let text = String::from_utf8(out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), tracer::CSV_HEADER.join(","));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row.len(), 14);
    let mantissa = row[1].split('e').next().unwrap().trim_start_matches('-');
    assert_eq!(mantissa.chars().filter(char::is_ascii_digit).count(), 17);
    assert_eq!(row[13], "1");
}

#[test]
fn loop_permutations() {
    let (spec, _, m) = demo();
    let run = |center: OffsetVector, radius: f64, turns: usize| {
        tracer::monodromy(
            spec,
            m,
            &LoopSpec {
                center,
                radius,
                n_steps: 48,
                turns,
            },
        )
        .unwrap()
    };
    let around = run(OffsetVector::default(), 2e-3, 1);
    assert!(around.encloses_ep && around.swapped);
    // Off-centre but still enclosing.
    assert!(run(OffsetVector::new(1e-3, 5e-4), 2e-3, 1).swapped);
    let away = run(OffsetVector::new(0.0, 2e-2), 2e-3, 1);
    assert!(!away.encloses_ep && !away.swapped);
    assert!(!run(OffsetVector::default(), 2e-3, 2).swapped);
    assert!(run(OffsetVector::default(), 2e-3, 3).swapped);
}

#[test]
fn too_coarse_loop_is_rejected_or_reported() {
    let (spec, _, m) = demo();
    let lp = LoopSpec {
        center: OffsetVector::default(),
        radius: 1e-3,
        n_steps: 4,
        turns: 1,
    };
    assert!(matches!(
        tracer::monodromy(spec, m, &lp),
        Err(Error::Domain(_))
    ));
    // A window too tight to hold the doublet either recovers or says where it lost it.
    let tight = TrackOptions {
        region_factor: 0.05,
        ..TrackOptions::default()
    };
    match tracer::monodromy_with(spec, m, &LoopSpec { n_steps: 16, ..lp }, &tight) {
        Ok(r) => assert!(r.swapped),
        Err(Error::IsolationLost { step, .. }) => assert!(step < 16),
        Err(e) => panic!("unexpected {e}"),
    }
}
