//! Toy prototype-assembly mask head and its full-batch gradient-descent
//! trainer.
//!
//! The model holds `k` shared prototype grids and one coefficient vector per
//! training instance; an instance's mask logits are the pixelwise linear
//! combination `Σ_j c_j · P_j`. Training minimizes the sum of per-instance
//! totals (coupled objective or mask-only baseline) over prototypes and
//! coefficients jointly. Everything is deterministic for a fixed seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::edge::EdgeOperator;
use crate::error::{Error, Result};
use crate::grid::{MaskGrid, PaddingMode};
use crate::gt::GtLabel;
use crate::loss::{loss_and_grad_values, EdgeTerm, LossBreakdown, LossWeights};
use crate::metrics::{boundary_f1, iou, jaggedness, DEFAULT_BOUNDARY_TOLERANCE};

/// Hyperparameters for [`train`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    /// Gradient-descent step size.
    pub learning_rate: f64,
    /// Number of full-batch steps.
    pub steps: usize,
    /// Seed for parameter initialization.
    pub seed: u64,
    /// Prototypes and coefficients are drawn i.i.d. from
    /// `U[-init_scale, init_scale]`.
    pub init_scale: f64,
    /// When false, train on the mask-only baseline objective instead of the
    /// coupled one.
    pub use_edge_loss: bool,
    /// Edge operator for both prediction- and target-side edge maps.
    pub operator: EdgeOperator,
    /// Padding for all windowed operations during training.
    pub padding: PaddingMode,
    pub weights: LossWeights,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.05,
            steps: 2000,
            seed: 0,
            init_scale: 0.01,
            use_edge_loss: true,
            operator: EdgeOperator::Laplacian,
            padding: PaddingMode::Replicate,
            weights: LossWeights::default(),
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.learning_rate.is_finite() || self.learning_rate <= 0.0 {
            return Err(Error::Validation(format!(
                "learning_rate must be finite and positive, got {}",
                self.learning_rate
            )));
        }
        if self.steps == 0 {
            return Err(Error::Validation("steps must be at least 1".into()));
        }
        if !self.init_scale.is_finite() || self.init_scale <= 0.0 {
            return Err(Error::Validation(format!(
                "init_scale must be finite and positive, got {}",
                self.init_scale
            )));
        }
        self.weights.validate()
    }
}

/// Prototype grids plus per-instance combination coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct PrototypeModel {
    height: usize,
    width: usize,
    prototypes: Vec<MaskGrid>,
    coefficients: Vec<Vec<f64>>,
}

impl PrototypeModel {
    /// Randomly initialized model: prototypes are drawn first (row-major,
    /// in order), then one coefficient vector per instance, all i.i.d. from
    /// `U[-init_scale, init_scale]` with a ChaCha8 stream seeded by `seed`.
    pub fn init(
        prototype_count: usize,
        height: usize,
        width: usize,
        instance_count: usize,
        seed: u64,
        init_scale: f64,
    ) -> Result<Self> {
        if prototype_count == 0 || instance_count == 0 {
            return Err(Error::Validation(format!(
                "need at least one prototype and one instance, got {prototype_count} and {instance_count}"
            )));
        }
        if !init_scale.is_finite() || init_scale <= 0.0 {
            return Err(Error::Validation(format!(
                "init_scale must be finite and positive, got {init_scale}"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = |n: usize| -> Vec<f64> {
            (0..n)
                .map(|_| rng.gen_range(-init_scale..=init_scale))
                .collect()
        };
        let prototypes = (0..prototype_count)
            .map(|_| MaskGrid::new(height, width, draw(height * width)))
            .collect::<Result<Vec<_>>>()?;
        let coefficients = (0..instance_count).map(|_| draw(prototype_count)).collect();
        Ok(Self {
            height,
            width,
            prototypes,
            coefficients,
        })
    }

    /// Builds a model from explicit parameters. All prototypes must share one
    /// shape and every coefficient vector must have one entry per prototype.
    pub fn from_parts(prototypes: Vec<MaskGrid>, coefficients: Vec<Vec<f64>>) -> Result<Self> {
        let first = prototypes
            .first()
            .ok_or_else(|| Error::Validation("need at least one prototype".into()))?;
        let (height, width) = first.dims();
        if let Some(bad) = prototypes.iter().find(|p| p.dims() != (height, width)) {
            return Err(Error::Dimension(format!(
                "prototype shapes differ: {height}x{width} vs {}x{}",
                bad.height(),
                bad.width()
            )));
        }
        if coefficients.is_empty() {
            return Err(Error::Validation("need at least one instance".into()));
        }
        for row in &coefficients {
            if row.len() != prototypes.len() {
                return Err(Error::Dimension(format!(
                    "coefficient vector has {} entries for {} prototypes",
                    row.len(),
                    prototypes.len()
                )));
            }
            if let Some(bad) = row.iter().find(|c| !c.is_finite()) {
                return Err(Error::Validation(format!(
                    "coefficients must be finite, found {bad}"
                )));
            }
        }
        Ok(Self {
            height,
            width,
            prototypes,
            coefficients,
        })
    }

    pub fn prototype_count(&self) -> usize {
        self.prototypes.len()
    }

    pub fn instance_count(&self) -> usize {
        self.coefficients.len()
    }

    /// `(height, width)` of the prototype grids.
    pub fn dims(&self) -> (usize, usize) {
        (self.height, self.width)
    }

    pub fn prototypes(&self) -> &[MaskGrid] {
        &self.prototypes
    }

    pub fn coefficients(&self) -> &[Vec<f64>] {
        &self.coefficients
    }

    /// Logits for one training instance.
    pub fn assemble_instance(&self, instance: usize) -> Result<MaskGrid> {
        let coefficients = self.coefficients.get(instance).ok_or_else(|| {
            Error::Validation(format!(
                "instance {instance} out of range ({} instances)",
                self.coefficients.len()
            ))
        })?;
        assemble_mask(self, coefficients)
    }
}

/// Pixelwise linear combination of the model's prototypes: `Σ_j c_j · P_j`,
/// returned as logits. Accumulation order is prototype-major and fixed.
pub fn assemble_mask(model: &PrototypeModel, coefficients: &[f64]) -> Result<MaskGrid> {
    if coefficients.len() != model.prototypes.len() {
        return Err(Error::Dimension(format!(
            "{} coefficients for {} prototypes",
            coefficients.len(),
            model.prototypes.len()
        )));
    }
    let mut out = vec![0.0; model.height * model.width];
    for (&c, prototype) in coefficients.iter().zip(&model.prototypes) {
        for (acc, &p) in out.iter_mut().zip(prototype.values()) {
            *acc += c * p;
        }
    }
    MaskGrid::new(model.height, model.width, out)
}

/// Aggregate loss and parameter gradients for one full-batch pass.
#[derive(Debug, Clone)]
pub struct StepGradients {
    /// Field-wise sum of per-instance breakdowns; `total` is the trained
    /// objective.
    pub aggregate: LossBreakdown,
    pub per_instance: Vec<LossBreakdown>,
    /// One row-major gradient grid per prototype.
    pub prototype_grads: Vec<Vec<f64>>,
    /// One gradient vector per instance.
    pub coefficient_grads: Vec<Vec<f64>>,
}

/// Evaluates the training objective (sum of per-instance totals) and its
/// gradients with respect to every prototype pixel and coefficient.
pub fn training_loss_and_gradients(
    model: &PrototypeModel,
    dataset: &[GtLabel],
    cfg: &TrainConfig,
) -> Result<StepGradients> {
    cfg.validate()?;
    check_dataset(model, dataset)?;
    gradients_raw(
        &model.prototypes,
        &model.coefficients,
        (model.height, model.width),
        dataset,
        cfg,
        0,
    )
}

fn check_dataset(model: &PrototypeModel, dataset: &[GtLabel]) -> Result<()> {
    if dataset.len() != model.instance_count() {
        return Err(Error::Dimension(format!(
            "model has {} instances but the dataset has {}",
            model.instance_count(),
            dataset.len()
        )));
    }
    for label in dataset {
        if label.mask_smoothed.dims() != (model.height, model.width) {
            return Err(Error::Dimension(format!(
                "label is {}x{} but the model is {}x{}",
                label.mask_smoothed.height(),
                label.mask_smoothed.width(),
                model.height,
                model.width
            )));
        }
    }
    Ok(())
}

/// One forward/backward pass over raw parameter buffers. Non-finite values
/// encountered mid-pass (overflowing assembly or loss) are reported as
/// divergence at `step`.
fn gradients_raw(
    prototypes: &[MaskGrid],
    coefficients: &[Vec<f64>],
    dims: (usize, usize),
    dataset: &[GtLabel],
    cfg: &TrainConfig,
    step: usize,
) -> Result<StepGradients> {
    let (height, width) = dims;
    let pixel_count = height * width;
    let k = prototypes.len();
    let mut aggregate = LossBreakdown::ZERO;
    let mut per_instance = Vec::with_capacity(dataset.len());
    let mut prototype_grads = vec![vec![0.0; pixel_count]; k];
    let mut coefficient_grads = vec![vec![0.0; k]; dataset.len()];

    let diverged = |_| Error::Divergence { step };

    for (i, label) in dataset.iter().enumerate() {
        let mut logits = vec![0.0; pixel_count];
        for (&c, prototype) in coefficients[i].iter().zip(prototypes) {
            for (acc, &p) in logits.iter_mut().zip(prototype.values()) {
                *acc += c * p;
            }
        }
        let logits = MaskGrid::new(height, width, logits).map_err(diverged)?;
        let edge = cfg.use_edge_loss.then_some(EdgeTerm {
            operator: cfg.operator,
            padding: cfg.padding,
            target: &label.edge_target,
        });
        let (breakdown, logit_grad) =
            match loss_and_grad_values(&logits, &label.mask_smoothed, edge, &cfg.weights) {
                Ok(result) => result,
                Err(Error::Validation(_)) => return Err(Error::Divergence { step }),
                Err(other) => return Err(other),
            };
        if !breakdown.total.is_finite() {
            return Err(Error::Divergence { step });
        }
        aggregate.accumulate(&breakdown);
        per_instance.push(breakdown);
        // Chain rule through the assembly: ∂L/∂P_j = c_j · ∂L/∂z and
        // ∂L/∂c_j = <∂L/∂z, P_j>.
        for (j, prototype) in prototypes.iter().enumerate() {
            let c = coefficients[i][j];
            let mut dot = 0.0;
            for (px, &g) in logit_grad.iter().enumerate() {
                prototype_grads[j][px] += c * g;
                dot += g * prototype.values()[px];
            }
            coefficient_grads[i][j] = dot;
        }
    }
    Ok(StepGradients {
        aggregate,
        per_instance,
        prototype_grads,
        coefficient_grads,
    })
}

/// Per-instance quality of the trained model against its evaluation
/// reference (the raw downscaled ground truth).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalReport {
    pub iou: f64,
    pub boundary_f1: f64,
    pub jaggedness: f64,
}

/// Output of [`train`].
#[derive(Debug, Clone)]
pub struct TrainResult {
    pub model: PrototypeModel,
    /// Aggregate loss per step, in step order.
    pub history: Vec<LossBreakdown>,
    /// One report per instance, in dataset order.
    pub reports: Vec<EvalReport>,
}

/// Trains the model by full-batch gradient descent.
///
/// Each step evaluates the objective on every instance in dataset order with
/// a fixed accumulation order, then updates prototypes and coefficients
/// simultaneously. A non-finite loss or parameter aborts with
/// [`Error::Divergence`].
pub fn train(model: PrototypeModel, dataset: &[GtLabel], cfg: &TrainConfig) -> Result<TrainResult> {
    cfg.validate()?;
    check_dataset(&model, dataset)?;
    let (height, width) = model.dims();
    let mut prototypes = model.prototypes;
    let mut coefficients = model.coefficients;
    let mut history = Vec::with_capacity(cfg.steps);

    for step in 0..cfg.steps {
        let grads = gradients_raw(
            &prototypes,
            &coefficients,
            (height, width),
            dataset,
            cfg,
            step,
        )?;
        history.push(grads.aggregate);
        let mut updated = Vec::with_capacity(prototypes.len());
        for (prototype, grad) in prototypes.iter().zip(&grads.prototype_grads) {
            let values: Vec<f64> = prototype
                .values()
                .iter()
                .zip(grad)
                .map(|(p, g)| p - cfg.learning_rate * g)
                .collect();
            updated.push(
                MaskGrid::new(height, width, values).map_err(|_| Error::Divergence { step })?,
            );
        }
        prototypes = updated;
        for (row, grad) in coefficients.iter_mut().zip(&grads.coefficient_grads) {
            for (c, g) in row.iter_mut().zip(grad) {
                *c -= cfg.learning_rate * g;
            }
            if row.iter().any(|c| !c.is_finite()) {
                return Err(Error::Divergence { step });
            }
        }
    }

    let model = PrototypeModel::from_parts(prototypes, coefficients)?;
    let reports = evaluate(&model, dataset)?;
    Ok(TrainResult {
        model,
        history,
        reports,
    })
}

fn evaluate(model: &PrototypeModel, dataset: &[GtLabel]) -> Result<Vec<EvalReport>> {
    let mut reports = Vec::with_capacity(dataset.len());
    for (i, label) in dataset.iter().enumerate() {
        let soft = model.assemble_instance(i)?.map(crate::loss::sigmoid)?;
        reports.push(EvalReport {
            iou: iou(&soft, &label.mask_raw)?,
            boundary_f1: boundary_f1(&soft, &label.mask_raw, DEFAULT_BOUNDARY_TOLERANCE)?,
            jaggedness: jaggedness(&soft)?,
        });
    }
    Ok(reports)
}
