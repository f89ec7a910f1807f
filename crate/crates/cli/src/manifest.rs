//! JSON experiment manifest: dataset, ground-truth settings, training
//! hyperparameters, and output location.
//!
//! Unknown keys are rejected so typos fail loudly instead of silently
//! falling back to defaults. Per-arm switches (smoothing on/off, edge loss
//! on/off) are not part of the manifest — the runner controls them.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use railmask_core::{EdgeOperator, GtConfig, LossWeights, PaddingMode, TrainConfig, Trapezoid};

use crate::error::CliError;

/// Top-level experiment description.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    /// Instances to train on; must be non-empty.
    pub dataset: Vec<DatasetEntry>,
    #[serde(default)]
    pub gt: GtSection,
    #[serde(default)]
    pub train: TrainSection,
    /// Root directory for arm outputs (overridable via CLI/environment).
    pub output_dir: PathBuf,
    /// Directory of the manifest file; mask paths resolve against it.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

/// One training instance: a trapezoid rasterized at source resolution, or a
/// binary PGM mask loaded from disk.
#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum DatasetEntry {
    Trapezoid(TrapezoidSpec),
    Mask(MaskSpec),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrapezoidSpec {
    pub row_top: usize,
    pub row_bottom: usize,
    /// `[left_x, right_x]` of the top edge.
    pub top: [f64; 2],
    /// `[left_x, right_x]` of the bottom edge.
    pub bottom: [f64; 2],
}

impl TrapezoidSpec {
    pub fn to_trapezoid(&self) -> Trapezoid {
        Trapezoid {
            row_top: self.row_top,
            row_bottom: self.row_bottom,
            top: (self.top[0], self.top[1]),
            bottom: (self.bottom[0], self.bottom[1]),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaskSpec {
    pub path: PathBuf,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GtSection {
    #[serde(default = "default_source_size")]
    pub source_size: [usize; 2],
    #[serde(default = "default_target_size")]
    pub target_size: [usize; 2],
    #[serde(default = "default_box_size")]
    pub box_size: usize,
    #[serde(default)]
    pub padding: PaddingName,
    #[serde(default)]
    pub edge_from_raw: bool,
}

impl Default for GtSection {
    fn default() -> Self {
        Self {
            source_size: default_source_size(),
            target_size: default_target_size(),
            box_size: default_box_size(),
            padding: PaddingName::default(),
            edge_from_raw: false,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainSection {
    #[serde(default = "default_learning_rate")]
    pub learning_rate: f64,
    #[serde(default = "default_steps")]
    pub steps: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_prototypes")]
    pub prototypes: usize,
    #[serde(default = "default_init_scale")]
    pub init_scale: f64,
    #[serde(default)]
    pub operator: OperatorName,
    #[serde(default)]
    pub weights: WeightsSection,
}

impl Default for TrainSection {
    fn default() -> Self {
        Self {
            learning_rate: default_learning_rate(),
            steps: default_steps(),
            seed: 0,
            prototypes: default_prototypes(),
            init_scale: default_init_scale(),
            operator: OperatorName::default(),
            weights: WeightsSection::default(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightsSection {
    #[serde(default = "default_w_cls")]
    pub w_cls: f64,
    #[serde(default = "default_w_cls")]
    pub w_bbox: f64,
    #[serde(default = "default_w_mask")]
    pub w_mask: f64,
    #[serde(default = "default_edge_temperature")]
    pub edge_temperature: f64,
}

impl Default for WeightsSection {
    fn default() -> Self {
        Self {
            w_cls: default_w_cls(),
            w_bbox: default_w_cls(),
            w_mask: default_w_mask(),
            edge_temperature: default_edge_temperature(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PaddingName {
    Zero,
    #[default]
    Replicate,
}

impl From<PaddingName> for PaddingMode {
    fn from(name: PaddingName) -> Self {
        match name {
            PaddingName::Zero => PaddingMode::Zero,
            PaddingName::Replicate => PaddingMode::Replicate,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OperatorName {
    Sobel,
    #[default]
    Laplacian,
}

impl From<OperatorName> for EdgeOperator {
    fn from(name: OperatorName) -> Self {
        match name {
            OperatorName::Sobel => EdgeOperator::Sobel,
            OperatorName::Laplacian => EdgeOperator::Laplacian,
        }
    }
}

fn default_source_size() -> [usize; 2] {
    [800, 800]
}
fn default_target_size() -> [usize; 2] {
    [200, 200]
}
fn default_box_size() -> usize {
    3
}
fn default_learning_rate() -> f64 {
    0.05
}
fn default_steps() -> usize {
    2000
}
fn default_prototypes() -> usize {
    8
}
fn default_init_scale() -> f64 {
    0.01
}
fn default_w_cls() -> f64 {
    1.0
}
fn default_w_mask() -> f64 {
    1.125
}
fn default_edge_temperature() -> f64 {
    4.0
}

impl Manifest {
    /// Ground-truth configuration with smoothing enabled; arms flip the
    /// smoothing flag as needed.
    pub fn gt_config(&self) -> GtConfig {
        GtConfig {
            source_size: (self.gt.source_size[0], self.gt.source_size[1]),
            target_size: (self.gt.target_size[0], self.gt.target_size[1]),
            box_size: self.gt.box_size,
            smoothing_enabled: true,
            padding: self.gt.padding.into(),
            edge_from_raw: self.gt.edge_from_raw,
        }
    }

    /// Training configuration with the edge loss enabled; arms flip the edge
    /// flag as needed.
    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            learning_rate: self.train.learning_rate,
            steps: self.train.steps,
            seed: self.train.seed,
            init_scale: self.train.init_scale,
            use_edge_loss: true,
            operator: self.train.operator.into(),
            padding: self.gt.padding.into(),
            weights: LossWeights {
                w_cls: self.train.weights.w_cls,
                w_bbox: self.train.weights.w_bbox,
                w_mask: self.train.weights.w_mask,
                edge_temperature: self.train.weights.edge_temperature,
            },
        }
    }

    /// Semantic validation on top of the serde schema.
    pub fn validate(&self) -> Result<(), CliError> {
        if self.dataset.is_empty() {
            return Err(CliError::Schema("dataset must not be empty".into()));
        }
        if self.train.prototypes == 0 {
            return Err(CliError::Schema(
                "train.prototypes must be at least 1".into(),
            ));
        }
        self.gt_config()
            .validate()
            .map_err(|e| CliError::Schema(format!("gt section: {e}")))?;
        self.train_config()
            .validate()
            .map_err(|e| CliError::Schema(format!("train section: {e}")))?;
        Ok(())
    }

    /// Resolves a dataset mask path against the manifest's directory.
    pub fn resolve_mask_path(&self, path: &Path) -> PathBuf {
        if path.is_absolute() {
            path.to_path_buf()
        } else {
            self.base_dir.join(path)
        }
    }
}

/// Reads and parses a manifest. I/O problems are input errors (exit 2);
/// schema problems, including unknown keys, are schema errors (exit 65).
pub fn load_manifest(path: &Path) -> Result<Manifest, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    let mut manifest: Manifest = serde_json::from_str(&text)
        .map_err(|e| CliError::Schema(format!("{}: {e}", path.display())))?;
    manifest.base_dir = path.parent().unwrap_or(Path::new(".")).to_path_buf();
    manifest.validate()?;
    Ok(manifest)
}
