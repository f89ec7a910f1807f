//! Acceptance suite for the experiment runner: the three-arm ablation on the
//! bundled manifest and byte-level determinism of repeated runs. Each test
//! prints a PASS line with its measured margins (visible with `--nocapture`).

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use railmask_cli::{load_manifest, run_experiment, ArmOutcome, Manifest, RunOptions};

fn pass(line: &str) {
    println!("[PASS] {line}");
}

fn bundled_manifest() -> Manifest {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../manifests/default.json");
    load_manifest(&path).expect("bundled manifest must load")
}

fn sequential_into(root: PathBuf) -> RunOptions {
    RunOptions {
        output_root: Some(root),
        parallel: false,
    }
}

struct ArmSummary {
    baseline: ArmOutcome,
    edge: ArmOutcome,
    edge_smooth: ArmOutcome,
    elapsed: Duration,
}

fn run_arms(manifest: &Manifest, root: PathBuf) -> ArmSummary {
    let started = Instant::now();
    let mut outcomes = run_experiment(manifest, &sequential_into(root))
        .expect("experiment must complete")
        .into_iter();
    let summary = ArmSummary {
        baseline: outcomes.next().unwrap(),
        edge: outcomes.next().unwrap(),
        edge_smooth: outcomes.next().unwrap(),
        elapsed: started.elapsed(),
    };
    assert!(outcomes.next().is_none(), "exactly three arms expected");
    summary
}

/// The full ablation ordering; `None` when it holds, otherwise the first
/// violated clause.
fn ordering_violation(s: &ArmSummary) -> Option<String> {
    let (b, e, c) = (&s.baseline, &s.edge, &s.edge_smooth);
    if e.mean_boundary_f1 < b.mean_boundary_f1 - 1e-6 {
        return Some(format!(
            "boundary_f1 regressed: edge {:.6} vs baseline {:.6}",
            e.mean_boundary_f1, b.mean_boundary_f1
        ));
    }
    if e.mean_jaggedness >= b.mean_jaggedness {
        return Some(format!(
            "edge arm not smoother: jaggedness {:.6} vs baseline {:.6}",
            e.mean_jaggedness, b.mean_jaggedness
        ));
    }
    if c.mean_jaggedness >= e.mean_jaggedness || c.mean_jaggedness >= b.mean_jaggedness {
        return Some(format!(
            "smoothing arm not lowest: {:.6} vs edge {:.6}, baseline {:.6}",
            c.mean_jaggedness, e.mean_jaggedness, b.mean_jaggedness
        ));
    }
    for arm in [b, e, c] {
        if arm.mean_iou < 0.90 {
            return Some(format!(
                "arm '{}' iou {:.4} below 0.90",
                arm.name, arm.mean_iou
            ));
        }
    }
    None
}

/// Criterion: on the bundled manifest, the edge-loss arm matches the baseline
/// on boundary F1 and beats it on jaggedness, the smoothing+edge arm has the
/// lowest jaggedness of the three, every arm reaches IoU >= 0.90, and a
/// single-threaded run finishes within ten minutes. The claim is statistical:
/// if the bundled seed fails, the ordering must hold on at least 4 of 5 fixed
/// seeds.
#[test]
fn acceptance_ablation_improves_edge_quality() {
    let manifest = bundled_manifest();
    let dir = tempfile::tempdir().unwrap();

    let default_run = run_arms(&manifest, dir.path().join("default-seed"));
    assert!(
        default_run.elapsed < Duration::from_secs(600),
        "run took {:?}, budget is 10 minutes",
        default_run.elapsed
    );

    // The documented layout: one subdirectory per arm, each holding the loss
    // history, the metrics report, and one prediction per dataset instance.
    for arm in [
        &default_run.baseline,
        &default_run.edge,
        &default_run.edge_smooth,
    ] {
        assert!(arm.directory.join("loss.csv").is_file());
        assert!(arm.directory.join("metrics.json").is_file());
        for i in 0..manifest.dataset.len() {
            let pred = arm.directory.join(format!("pred_{i:03}.pgm"));
            assert!(pred.is_file(), "missing {}", pred.display());
        }
    }

    let verdict = ordering_violation(&default_run);
    if let Some(reason) = &verdict {
        // Fallback: the ordering must hold on at least 4 of 5 fixed seeds.
        println!("default seed failed ({reason}); sweeping fixed seeds");
        let mut held = 0;
        for seed in 0..5u64 {
            let mut variant = manifest.clone();
            variant.train.seed = seed;
            let run = run_arms(&variant, dir.path().join(format!("seed-{seed}")));
            match ordering_violation(&run) {
                None => held += 1,
                Some(why) => println!("seed {seed}: {why}"),
            }
        }
        assert!(held >= 4, "ordering held on only {held}/5 fixed seeds");
        pass(&format!(
            "ablation ordering: default seed failed but held on {held}/5 fixed seeds"
        ));
        return;
    }

    let (b, e, c) = (
        &default_run.baseline,
        &default_run.edge,
        &default_run.edge_smooth,
    );
    pass(&format!(
        "ablation boundary_f1: edge {:.6} >= baseline {:.6} - 1e-6",
        e.mean_boundary_f1, b.mean_boundary_f1
    ));
    pass(&format!(
        "ablation jaggedness: edge {:.6} < baseline {:.6} (margin {:.2e})",
        e.mean_jaggedness,
        b.mean_jaggedness,
        b.mean_jaggedness - e.mean_jaggedness
    ));
    pass(&format!(
        "ablation jaggedness: smoothing+edge {:.6} is the lowest of the three arms",
        c.mean_jaggedness
    ));
    pass(&format!(
        "ablation iou: all arms >= 0.90 (min {:.4})",
        b.mean_iou.min(e.mean_iou).min(c.mean_iou)
    ));
    pass(&format!(
        "ablation runtime: {:.1}s single-threaded (< 600s)",
        default_run.elapsed.as_secs_f64()
    ));
}

/// Criterion: running the same manifest twice produces byte-identical CSV
/// outputs (and, in fact, identical metrics and prediction images).
#[test]
fn acceptance_repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let manifest_json = format!(
        r#"{{
            "dataset": [
                {{ "trapezoid": {{ "row_top": 4, "row_bottom": 27, "top": [14.0, 20.0], "bottom": [6.0, 26.0] }} }},
                {{ "trapezoid": {{ "row_top": 6, "row_bottom": 25, "top": [8.0, 12.0], "bottom": [16.0, 28.0] }} }}
            ],
            "gt": {{ "source_size": [32, 32], "target_size": [16, 16] }},
            "train": {{ "learning_rate": 2.0, "steps": 60, "seed": 11, "prototypes": 4, "init_scale": 0.1 }},
            "output_dir": "{}"
        }}"#,
        dir.path().join("unused").display()
    );
    let manifest_path = dir.path().join("repeat.json");
    fs::write(&manifest_path, manifest_json).unwrap();
    let manifest = load_manifest(&manifest_path).unwrap();

    let first = run_experiment(&manifest, &sequential_into(dir.path().join("first"))).unwrap();
    let second = run_experiment(&manifest, &sequential_into(dir.path().join("second"))).unwrap();

    let mut compared = 0;
    for (a, b) in first.iter().zip(&second) {
        let mut names = vec![String::from("loss.csv"), String::from("metrics.json")];
        names.extend((0..a.reports.len()).map(|i| format!("pred_{i:03}.pgm")));
        for name in names {
            let left = fs::read(a.directory.join(&name)).unwrap();
            let right = fs::read(b.directory.join(&name)).unwrap();
            assert_eq!(left, right, "{}/{name} differs between runs", a.name);
            compared += 1;
        }
    }
    pass(&format!(
        "determinism: two runs produced byte-identical outputs ({compared} files compared)"
    ));
}
