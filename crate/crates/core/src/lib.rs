//! Edge-aware mask losses over dense `f64` grids.
//!
//! The crate implements one self-contained pipeline:
//!
//! * [`grid`] — row-major grids plus the primitive transforms everything else
//!   is built from: fixed-kernel cross-correlation, bilinear downscaling, and
//!   box filtering.
//! * [`edge`] — Sobel and Laplacian edge extraction with responses normalized
//!   into `[0, 1]`.
//! * [`loss`] — binary cross-entropy on masks and edge maps, the coupled
//!   edge/mask objective, and its analytic gradient with respect to mask
//!   logits.
//! * [`gt`] — ground-truth preparation: rasterize or ingest full-resolution
//!   binary masks, downscale them to prediction resolution, and box-filter the
//!   result to suppress interpolation staircasing.
//! * [`model`] — a toy prototype-assembly mask head trained by full-batch
//!   gradient descent, used to exercise the loss end to end.
//! * [`metrics`] — IoU, boundary F1, and a jaggedness score for judging mask
//!   boundary quality.
//!
//! Everything is deterministic: fixed seeds, fixed iteration orders, no
//! threading inside the numeric kernels.

pub mod edge;
pub mod error;
pub mod grid;
pub mod gt;
pub mod loss;
pub mod metrics;
pub mod model;

pub use edge::{extract_edges, laplacian_kernel, sobel_kernels, EdgeMap, EdgeOperator};
pub use error::{Error, Result};
pub use grid::{box_filter, correlate, resize_bilinear, Kernel, MaskGrid, PaddingMode};
pub use gt::{prepare_gt, rasterize_trapezoid, GtConfig, GtLabel, Trapezoid};
pub use loss::{
    baseline_loss, bce, coupled_loss, edge_loss_raw, sigmoid, total_loss_and_grad, GradGrid,
    LossBreakdown, LossWeights, BCE_EPSILON,
};
pub use metrics::{boundary_f1, iou, jaggedness, DEFAULT_BOUNDARY_TOLERANCE};
pub use model::{
    assemble_mask, train, training_loss_and_gradients, EvalReport, PrototypeModel, StepGradients,
    TrainConfig, TrainResult,
};
