//! Three-arm ablation runner: trains the prototype model once per arm and
//! writes per-arm loss curves, metrics, and predicted masks.
//!
//! The arms differ only in ground-truth smoothing and the edge-loss switch:
//!
//! | arm           | smoothed targets | edge loss |
//! |---------------|------------------|-----------|
//! | `baseline`    | no               | no        |
//! | `edge`        | no               | yes       |
//! | `edge_smooth` | yes              | yes       |
//!
//! Everything else (dataset, seed, hyperparameters) is shared, so metric
//! differences between arm directories are attributable to those two
//! switches alone.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use railmask_core::{
    prepare_gt, rasterize_trapezoid, sigmoid, train, EvalReport, GtLabel, LossBreakdown, MaskGrid,
    PrototypeModel, TrainResult,
};

use crate::error::CliError;
use crate::manifest::{DatasetEntry, Manifest};
use crate::pgm::{read_pgm, write_pgm, PgmFormat};

/// One ablation arm: a directory name plus the two switches it controls.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ArmSpec {
    pub name: &'static str,
    pub smoothing: bool,
    pub edge_loss: bool,
}

/// The fixed ablation, in execution and reporting order.
pub const ARMS: [ArmSpec; 3] = [
    ArmSpec {
        name: "baseline",
        smoothing: false,
        edge_loss: false,
    },
    ArmSpec {
        name: "edge",
        smoothing: false,
        edge_loss: true,
    },
    ArmSpec {
        name: "edge_smooth",
        smoothing: true,
        edge_loss: true,
    },
];

/// Runtime knobs that are not part of the manifest.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Overrides the manifest's `output_dir` when set.
    pub output_root: Option<PathBuf>,
    /// Runs the three arms on separate threads.
    pub parallel: bool,
}

/// Result of one completed arm.
#[derive(Debug, Clone)]
pub struct ArmOutcome {
    pub name: String,
    /// Directory holding `loss.csv`, `metrics.json`, and `pred_*.pgm`.
    pub directory: PathBuf,
    pub reports: Vec<EvalReport>,
    pub final_loss: LossBreakdown,
    pub mean_iou: f64,
    pub mean_boundary_f1: f64,
    pub mean_jaggedness: f64,
}

/// Rasterizes or loads every dataset entry at source resolution.
///
/// Trapezoid geometry problems are schema errors (the manifest describes
/// them); unreadable, non-binary, or wrongly sized mask files are input
/// errors.
pub fn load_source_masks(manifest: &Manifest) -> Result<Vec<MaskGrid>, CliError> {
    let (src_h, src_w) = {
        let cfg = manifest.gt_config();
        cfg.source_size
    };
    let mut masks = Vec::with_capacity(manifest.dataset.len());
    for (i, entry) in manifest.dataset.iter().enumerate() {
        let mask = match entry {
            DatasetEntry::Trapezoid(spec) => {
                rasterize_trapezoid(&spec.to_trapezoid(), (src_h, src_w))
                    .map_err(|e| CliError::Schema(format!("dataset[{i}]: {e}")))?
            }
            DatasetEntry::Mask(spec) => {
                let path = manifest.resolve_mask_path(&spec.path);
                let mask = read_pgm(&path)?;
                if !mask.is_binary() {
                    return Err(CliError::Input(format!(
                        "dataset[{i}]: {} is not a binary mask (values must be 0 or 1)",
                        path.display()
                    )));
                }
                if mask.dims() != (src_h, src_w) {
                    return Err(CliError::Input(format!(
                        "dataset[{i}]: {} is {}x{}, manifest expects {src_h}x{src_w}",
                        path.display(),
                        mask.height(),
                        mask.width()
                    )));
                }
                mask
            }
        };
        masks.push(mask);
    }
    Ok(masks)
}

/// Runs all three arms and returns their outcomes in [`ARMS`] order.
pub fn run_experiment(
    manifest: &Manifest,
    options: &RunOptions,
) -> Result<Vec<ArmOutcome>, CliError> {
    let masks = load_source_masks(manifest)?;
    let root = options
        .output_root
        .clone()
        .unwrap_or_else(|| manifest.output_dir.clone());
    fs::create_dir_all(&root)
        .map_err(|e| CliError::Failure(format!("cannot create {}: {e}", root.display())))?;

    if options.parallel {
        let results: Vec<Result<ArmOutcome, CliError>> = std::thread::scope(|scope| {
            let handles: Vec<_> = ARMS
                .iter()
                .map(|arm| scope.spawn(|| run_arm(manifest, &masks, *arm, &root)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("arm thread panicked"))
                .collect()
        });
        // Errors are reported in ARMS order regardless of finish order, so a
        // parallel run fails identically to a sequential one.
        results.into_iter().collect()
    } else {
        ARMS.iter()
            .map(|arm| run_arm(manifest, &masks, *arm, &root))
            .collect()
    }
}

fn run_arm(
    manifest: &Manifest,
    masks: &[MaskGrid],
    arm: ArmSpec,
    root: &Path,
) -> Result<ArmOutcome, CliError> {
    let mut gt_cfg = manifest.gt_config();
    gt_cfg.smoothing_enabled = arm.smoothing;
    let mut train_cfg = manifest.train_config();
    train_cfg.use_edge_loss = arm.edge_loss;

    let labels: Vec<GtLabel> = masks
        .iter()
        .map(|m| prepare_gt(m, &gt_cfg, train_cfg.operator))
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Failure(format!("arm '{}': ground truth: {e}", arm.name)))?;

    let (target_h, target_w) = gt_cfg.target_size;
    let model = PrototypeModel::init(
        manifest.train.prototypes,
        target_h,
        target_w,
        labels.len(),
        train_cfg.seed,
        train_cfg.init_scale,
    )
    .map_err(|e| CliError::Failure(format!("arm '{}': init: {e}", arm.name)))?;

    let result = train(model, &labels, &train_cfg).map_err(|e| match e {
        railmask_core::Error::Divergence { step } => CliError::Divergence {
            arm: arm.name.to_string(),
            step,
        },
        other => CliError::Failure(format!("arm '{}': {other}", arm.name)),
    })?;

    let directory = root.join(arm.name);
    fs::create_dir_all(&directory)
        .map_err(|e| CliError::Failure(format!("cannot create {}: {e}", directory.display())))?;
    write_loss_csv(&directory.join("loss.csv"), &result.history)?;
    write_metrics_json(&directory.join("metrics.json"), &result.reports)?;
    write_predictions(&directory, &result)?;

    let n = result.reports.len() as f64;
    let mean = |f: fn(&EvalReport) -> f64| result.reports.iter().map(f).sum::<f64>() / n;
    Ok(ArmOutcome {
        name: arm.name.to_string(),
        directory,
        mean_iou: mean(|r| r.iou),
        mean_boundary_f1: mean(|r| r.boundary_f1),
        mean_jaggedness: mean(|r| r.jaggedness),
        final_loss: *result.history.last().expect("steps >= 1 is validated"),
        reports: result.reports,
    })
}

/// One row per step. Floats use Rust's shortest round-trip formatting, so a
/// repeated run produces byte-identical files.
fn write_loss_csv(path: &Path, history: &[LossBreakdown]) -> Result<(), CliError> {
    let mut text = String::from("step,l_cls,l_bbox,l_mask,l_edge_raw,l_edge_coupled,total\n");
    for (step, row) in history.iter().enumerate() {
        text.push_str(&format!(
            "{step},{},{},{},{},{},{}\n",
            row.l_cls, row.l_bbox, row.l_mask, row.l_edge_raw, row.l_edge_coupled, row.total
        ));
    }
    fs::write(path, text)
        .map_err(|e| CliError::Failure(format!("cannot write {}: {e}", path.display())))
}

#[derive(Serialize)]
struct MetricsEntry {
    iou: f64,
    boundary_f1: f64,
    jaggedness: f64,
}

#[derive(Serialize)]
struct MetricsFile {
    instances: Vec<MetricsEntry>,
    mean: MetricsEntry,
}

fn write_metrics_json(path: &Path, reports: &[EvalReport]) -> Result<(), CliError> {
    let entry = |r: &EvalReport| MetricsEntry {
        iou: r.iou,
        boundary_f1: r.boundary_f1,
        jaggedness: r.jaggedness,
    };
    let n = reports.len() as f64;
    let file = MetricsFile {
        instances: reports.iter().map(entry).collect(),
        mean: MetricsEntry {
            iou: reports.iter().map(|r| r.iou).sum::<f64>() / n,
            boundary_f1: reports.iter().map(|r| r.boundary_f1).sum::<f64>() / n,
            jaggedness: reports.iter().map(|r| r.jaggedness).sum::<f64>() / n,
        },
    };
    let json = serde_json::to_string_pretty(&file)
        .map_err(|e| CliError::Failure(format!("cannot serialize metrics: {e}")))?;
    let mut out = fs::File::create(path)
        .map_err(|e| CliError::Failure(format!("cannot write {}: {e}", path.display())))?;
    writeln!(out, "{json}")
        .map_err(|e| CliError::Failure(format!("cannot write {}: {e}", path.display())))
}

fn write_predictions(directory: &Path, result: &TrainResult) -> Result<(), CliError> {
    for i in 0..result.model.instance_count() {
        let soft = result
            .model
            .assemble_instance(i)
            .and_then(|g| g.map(sigmoid))
            .map_err(|e| CliError::Failure(format!("prediction {i}: {e}")))?;
        let path = directory.join(format!("pred_{i:03}.pgm"));
        write_pgm(&path, &soft, PgmFormat::Binary)?;
    }
    Ok(())
}
