//! Mask and edge losses, their coupling, and the analytic gradient of the
//! total objective with respect to mask logits.
//!
//! The objective for one instance is
//!
//! ```text
//! total = w_cls·0 + w_bbox·0 + w_mask·l_mask + l_mask·exp(l_edge / τ)
//! ```
//!
//! where `l_mask` is mean BCE between the sigmoid of the logits and the mask
//! target, and `l_edge` is mean BCE between the edge map of the prediction
//! and the edge map of the ground truth. Classification and box terms are
//! structurally zero here (mask-only pipeline) but keep their weights so the
//! breakdown mirrors the full detector objective.

use crate::edge::{
    extract_edges, laplacian_kernel, sobel_kernels, EdgeMap, EdgeOperator, LAPLACIAN_NORMALIZER,
    SOBEL_NORMALIZER,
};
use crate::error::{Error, Result};
use crate::grid::{correlate, correlate_adjoint, MaskGrid, PaddingMode};

/// Predictions are clamped into `[BCE_EPSILON, 1 - BCE_EPSILON]` before the
/// logarithms, keeping BCE finite for saturated inputs.
pub const BCE_EPSILON: f64 = 1e-7;

/// Smoothing applied to the Sobel magnitude inside the gradient engine:
/// `√(gx² + gy² + δ²) - δ` instead of `√(gx² + gy²)`, which removes the
/// non-differentiable point at zero gradient while still being exactly zero
/// there. Forward values shift by less than `δ` per pixel.
const SOBEL_SMOOTHING_DELTA: f64 = 1e-8;

/// Term weights and the coupling temperature of the total objective.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossWeights {
    pub w_cls: f64,
    pub w_bbox: f64,
    pub w_mask: f64,
    /// Temperature τ in the `exp(l_edge / τ)` coupling factor.
    pub edge_temperature: f64,
}

impl Default for LossWeights {
    fn default() -> Self {
        Self {
            w_cls: 1.0,
            w_bbox: 1.0,
            w_mask: 1.125,
            edge_temperature: 4.0,
        }
    }
}

impl LossWeights {
    /// Weights must be finite and non-negative; the temperature must be
    /// finite and strictly positive.
    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("w_cls", self.w_cls),
            ("w_bbox", self.w_bbox),
            ("w_mask", self.w_mask),
        ] {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::Validation(format!(
                    "{name} must be finite and non-negative, got {value}"
                )));
            }
        }
        if !self.edge_temperature.is_finite() || self.edge_temperature <= 0.0 {
            return Err(Error::Validation(format!(
                "edge_temperature must be finite and positive, got {}",
                self.edge_temperature
            )));
        }
        Ok(())
    }
}

/// All terms of the objective for one evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossBreakdown {
    /// Classification term; always `0.0` in this pipeline.
    pub l_cls: f64,
    /// Box-regression term; always `0.0` in this pipeline.
    pub l_bbox: f64,
    /// Mean BCE between predicted mask probabilities and the mask target.
    pub l_mask: f64,
    /// Mean BCE between predicted and target edge maps, before coupling.
    pub l_edge_raw: f64,
    /// `l_mask · exp(l_edge_raw / τ)`.
    pub l_edge_coupled: f64,
    /// Weighted sum of all terms.
    pub total: f64,
}

impl LossBreakdown {
    /// All-zero breakdown; identity for [`LossBreakdown::accumulate`].
    pub const ZERO: Self = Self {
        l_cls: 0.0,
        l_bbox: 0.0,
        l_mask: 0.0,
        l_edge_raw: 0.0,
        l_edge_coupled: 0.0,
        total: 0.0,
    };

    /// Field-wise sum, used to aggregate per-instance losses.
    pub fn accumulate(&mut self, other: &LossBreakdown) {
        self.l_cls += other.l_cls;
        self.l_bbox += other.l_bbox;
        self.l_mask += other.l_mask;
        self.l_edge_raw += other.l_edge_raw;
        self.l_edge_coupled += other.l_edge_coupled;
        self.total += other.total;
    }
}

/// Per-pixel partial derivatives of a scalar objective with respect to a
/// logit grid; same shape as the logits.
#[derive(Debug, Clone, PartialEq)]
pub struct GradGrid {
    grid: MaskGrid,
}

impl GradGrid {
    pub(crate) fn new(height: usize, width: usize, values: Vec<f64>) -> Result<Self> {
        Ok(Self {
            grid: MaskGrid::new(height, width, values)?,
        })
    }

    pub fn height(&self) -> usize {
        self.grid.height()
    }

    pub fn width(&self) -> usize {
        self.grid.width()
    }

    /// Row-major partial derivatives.
    pub fn values(&self) -> &[f64] {
        self.grid.values()
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.grid.get(row, col)
    }

    /// Largest absolute entry; zero for an empty gradient.
    pub fn max_abs(&self) -> f64 {
        self.grid
            .values()
            .iter()
            .fold(0.0_f64, |acc, v| acc.max(v.abs()))
    }
}

/// Numerically stable logistic function.
pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

fn bce_forward(pred: &[f64], target: &[f64]) -> f64 {
    let mut sum = 0.0;
    for (&p, &t) in pred.iter().zip(target) {
        let p = p.clamp(BCE_EPSILON, 1.0 - BCE_EPSILON);
        sum -= t * p.ln() + (1.0 - t) * (1.0 - p).ln();
    }
    sum / pred.len() as f64
}

/// BCE plus its gradient with respect to the (unclamped) predictions. Where
/// the clamp was active the gradient is zero, matching the piecewise-constant
/// forward value there.
fn bce_with_grad(pred: &[f64], target: &[f64]) -> (f64, Vec<f64>) {
    let n = pred.len() as f64;
    let mut sum = 0.0;
    let mut grad = vec![0.0; pred.len()];
    for (i, (&p_raw, &t)) in pred.iter().zip(target).enumerate() {
        let p = p_raw.clamp(BCE_EPSILON, 1.0 - BCE_EPSILON);
        sum -= t * p.ln() + (1.0 - t) * (1.0 - p).ln();
        if p_raw > BCE_EPSILON && p_raw < 1.0 - BCE_EPSILON {
            grad[i] = (-t / p + (1.0 - t) / (1.0 - p)) / n;
        }
    }
    (sum / n, grad)
}

/// Mean binary cross-entropy between `prediction` and `target`, with the
/// prediction clamped into `[ε, 1-ε]` first. Targets are used as-is and are
/// expected in `[0, 1]`.
pub fn bce(prediction: &MaskGrid, target: &MaskGrid) -> Result<f64> {
    if !prediction.same_dims(target) {
        return Err(Error::Dimension(format!(
            "bce prediction is {}x{} but target is {}x{}",
            prediction.height(),
            prediction.width(),
            target.height(),
            target.width()
        )));
    }
    Ok(bce_forward(prediction.values(), target.values()))
}

/// Mean BCE between the edge map of `pred_mask` and the edge map of
/// `gt_mask`, both extracted with the same operator and padding.
pub fn edge_loss_raw(
    pred_mask: &MaskGrid,
    gt_mask: &MaskGrid,
    operator: EdgeOperator,
    padding: PaddingMode,
) -> Result<f64> {
    if !pred_mask.same_dims(gt_mask) {
        return Err(Error::Dimension(format!(
            "edge loss prediction is {}x{} but ground truth is {}x{}",
            pred_mask.height(),
            pred_mask.width(),
            gt_mask.height(),
            gt_mask.width()
        )));
    }
    let pred_edges = extract_edges(pred_mask, operator, padding)?;
    let gt_edges = extract_edges(gt_mask, operator, padding)?;
    bce(pred_edges.grid(), gt_edges.grid())
}

/// Combines scalar mask and edge losses into the full breakdown:
/// `total = w_mask·l_mask + l_mask·exp(l_edge_raw / τ)`.
pub fn coupled_loss(l_mask: f64, l_edge_raw: f64, weights: &LossWeights) -> Result<LossBreakdown> {
    weights.validate()?;
    for (name, value) in [("l_mask", l_mask), ("l_edge_raw", l_edge_raw)] {
        if !value.is_finite() || value < 0.0 {
            return Err(Error::Validation(format!(
                "{name} must be finite and non-negative, got {value}"
            )));
        }
    }
    let l_edge_coupled = l_mask * (l_edge_raw / weights.edge_temperature).exp();
    let total = weights.w_mask * l_mask + l_edge_coupled;
    if !total.is_finite() {
        return Err(Error::Validation(format!(
            "coupled loss overflowed: l_mask={l_mask}, l_edge_raw={l_edge_raw}"
        )));
    }
    Ok(LossBreakdown {
        l_cls: 0.0,
        l_bbox: 0.0,
        l_mask,
        l_edge_raw,
        l_edge_coupled,
        total,
    })
}

/// Breakdown with the edge term disabled: `total = w_mask·l_mask` and both
/// edge fields zero. This is the ablation arm the coupled objective is
/// compared against.
pub fn baseline_loss(l_mask: f64, weights: &LossWeights) -> Result<LossBreakdown> {
    weights.validate()?;
    if !l_mask.is_finite() || l_mask < 0.0 {
        return Err(Error::Validation(format!(
            "l_mask must be finite and non-negative, got {l_mask}"
        )));
    }
    Ok(LossBreakdown {
        l_cls: 0.0,
        l_bbox: 0.0,
        l_mask,
        l_edge_raw: 0.0,
        l_edge_coupled: 0.0,
        total: weights.w_mask * l_mask,
    })
}

/// Borrowed ingredients for the edge term of [`loss_and_grad_values`].
pub(crate) struct EdgeTerm<'a> {
    pub operator: EdgeOperator,
    pub padding: PaddingMode,
    /// Precomputed edge map of the ground truth mask.
    pub target: &'a EdgeMap,
}

/// Full forward/backward pass shared by [`total_loss_and_grad`] and the
/// trainer. `edge: None` evaluates the mask-only baseline objective.
///
/// Returns the loss breakdown and `∂total/∂z` per logit, in row-major order.
pub(crate) fn loss_and_grad_values(
    logits: &MaskGrid,
    mask_target: &MaskGrid,
    edge: Option<EdgeTerm<'_>>,
    weights: &LossWeights,
) -> Result<(LossBreakdown, Vec<f64>)> {
    weights.validate()?;
    if !logits.same_dims(mask_target) {
        return Err(Error::Dimension(format!(
            "logits are {}x{} but mask target is {}x{}",
            logits.height(),
            logits.width(),
            mask_target.height(),
            mask_target.width()
        )));
    }
    let probs: Vec<f64> = logits.values().iter().map(|&z| sigmoid(z)).collect();
    let (l_mask, mask_grad) = bce_with_grad(&probs, mask_target.values());

    let (breakdown, prob_grad) = match edge {
        None => {
            let breakdown = baseline_loss(l_mask, weights)?;
            let prob_grad: Vec<f64> = mask_grad.iter().map(|g| weights.w_mask * g).collect();
            (breakdown, prob_grad)
        }
        Some(term) => {
            if !logits.same_dims(term.target.grid()) {
                return Err(Error::Dimension(format!(
                    "logits are {}x{} but edge target is {}x{}",
                    logits.height(),
                    logits.width(),
                    term.target.grid().height(),
                    term.target.grid().width()
                )));
            }
            let prob_grid = MaskGrid::new(logits.height(), logits.width(), probs.clone())?;
            let (edge_pred, edge_grad_to_probs) =
                edge_response_with_backprop(&prob_grid, term.operator, term.padding)?;
            let (l_edge_raw, edge_bce_grad) =
                bce_with_grad(&edge_pred, term.target.grid().values());
            let edge_grad = edge_grad_to_probs(&edge_bce_grad)?;
            let breakdown = coupled_loss(l_mask, l_edge_raw, weights)?;
            let boost = (l_edge_raw / weights.edge_temperature).exp();
            let mask_factor = weights.w_mask + boost;
            let edge_factor = l_mask * boost / weights.edge_temperature;
            let prob_grad = mask_grad
                .iter()
                .zip(&edge_grad)
                .map(|(m, e)| mask_factor * m + edge_factor * e)
                .collect();
            (breakdown, prob_grad)
        }
    };

    // Chain through the sigmoid: dσ/dz = p(1-p).
    let grad = prob_grad
        .iter()
        .zip(&probs)
        .map(|(g, &p)| g * p * (1.0 - p))
        .collect();
    Ok((breakdown, grad))
}

type EdgeBackprop<'a> = Box<dyn FnOnce(&[f64]) -> Result<Vec<f64>> + 'a>;

/// Computes the normalized edge response of a probability grid and returns a
/// closure mapping `∂loss/∂edge` back to `∂loss/∂probability`.
///
/// The Sobel magnitude is δ-smoothed (see [`SOBEL_SMOOTHING_DELTA`]); the
/// Laplacian needs no smoothing because its kink at zero response lies inside
/// the BCE clamp zone, where the gradient is zero anyway.
fn edge_response_with_backprop(
    probs: &MaskGrid,
    operator: EdgeOperator,
    padding: PaddingMode,
) -> Result<(Vec<f64>, EdgeBackprop<'static>)> {
    let (height, width) = probs.dims();
    match operator {
        EdgeOperator::Laplacian => {
            let response = correlate(probs, &laplacian_kernel(), padding)?;
            let edge: Vec<f64> = response
                .values()
                .iter()
                .map(|&u| (u.abs() / LAPLACIAN_NORMALIZER).clamp(0.0, 1.0))
                .collect();
            let backprop = move |edge_grad: &[f64]| -> Result<Vec<f64>> {
                let upstream: Vec<f64> = edge_grad
                    .iter()
                    .zip(response.values())
                    .map(|(&g, &u)| {
                        let sign = if u > 0.0 {
                            1.0
                        } else if u < 0.0 {
                            -1.0
                        } else {
                            0.0
                        };
                        g * sign / LAPLACIAN_NORMALIZER
                    })
                    .collect();
                let upstream = MaskGrid::new(height, width, upstream)?;
                Ok(correlate_adjoint(&upstream, &laplacian_kernel(), padding)?
                    .values()
                    .to_vec())
            };
            Ok((edge, Box::new(backprop)))
        }
        EdgeOperator::Sobel => {
            let (sx, sy) = sobel_kernels();
            let gx = correlate(probs, &sx, padding)?;
            let gy = correlate(probs, &sy, padding)?;
            let delta = SOBEL_SMOOTHING_DELTA;
            let mut edge = Vec::with_capacity(gx.values().len());
            let mut denom = Vec::with_capacity(gx.values().len());
            for (&x, &y) in gx.values().iter().zip(gy.values()) {
                let root = (x * x + y * y + delta * delta).sqrt();
                denom.push(root);
                edge.push(((root - delta) / SOBEL_NORMALIZER).clamp(0.0, 1.0));
            }
            let backprop = move |edge_grad: &[f64]| -> Result<Vec<f64>> {
                let mut gx_grad = Vec::with_capacity(edge_grad.len());
                let mut gy_grad = Vec::with_capacity(edge_grad.len());
                for i in 0..edge_grad.len() {
                    let scale = edge_grad[i] / (SOBEL_NORMALIZER * denom[i]);
                    gx_grad.push(scale * gx.values()[i]);
                    gy_grad.push(scale * gy.values()[i]);
                }
                let gx_grad = MaskGrid::new(height, width, gx_grad)?;
                let gy_grad = MaskGrid::new(height, width, gy_grad)?;
                let ax = correlate_adjoint(&gx_grad, &sx, padding)?;
                let ay = correlate_adjoint(&gy_grad, &sy, padding)?;
                Ok(ax
                    .values()
                    .iter()
                    .zip(ay.values())
                    .map(|(a, b)| a + b)
                    .collect())
            };
            Ok((edge, Box::new(backprop)))
        }
    }
}

/// Evaluates the full coupled objective and its gradient with respect to the
/// logits.
///
/// The edge target is extracted from `gt_mask` with the same operator and
/// padding used on the prediction side. Inside the gradient engine the Sobel
/// magnitude is δ-smoothed, so `l_edge_raw` can differ from a plain
/// [`edge_loss_raw`] evaluation by up to about `1e-8`.
pub fn total_loss_and_grad(
    pred_logits: &MaskGrid,
    gt_mask: &MaskGrid,
    operator: EdgeOperator,
    weights: &LossWeights,
    padding: PaddingMode,
) -> Result<(LossBreakdown, GradGrid)> {
    if !pred_logits.same_dims(gt_mask) {
        return Err(Error::Dimension(format!(
            "logits are {}x{} but ground truth is {}x{}",
            pred_logits.height(),
            pred_logits.width(),
            gt_mask.height(),
            gt_mask.width()
        )));
    }
    let target = extract_edges(gt_mask, operator, padding)?;
    let term = EdgeTerm {
        operator,
        padding,
        target: &target,
    };
    let (breakdown, grad) = loss_and_grad_values(pred_logits, gt_mask, Some(term), weights)?;
    Ok((
        breakdown,
        GradGrid::new(pred_logits.height(), pred_logits.width(), grad)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_weights() {
        let w = LossWeights::default();
        assert_eq!(w.w_cls, 1.0);
        assert_eq!(w.w_bbox, 1.0);
        assert_eq!(w.w_mask, 1.125);
        assert_eq!(w.edge_temperature, 4.0);
        w.validate().unwrap();
    }

    #[test]
    fn weights_validation_rejects_bad_values() {
        let w = LossWeights {
            w_mask: -0.1,
            ..LossWeights::default()
        };
        assert!(w.validate().is_err());
        let w = LossWeights {
            edge_temperature: 0.0,
            ..LossWeights::default()
        };
        assert!(w.validate().is_err());
    }

    #[test]
    fn sigmoid_basics() {
        assert_eq!(sigmoid(0.0), 0.5);
        assert!((sigmoid(2.0) + sigmoid(-2.0) - 1.0).abs() < 1e-15);
        assert!(sigmoid(1.0) > sigmoid(0.5));
        // Extreme logits saturate without producing NaN.
        assert_eq!(sigmoid(1e6), 1.0);
        assert_eq!(sigmoid(-1e6), 0.0);
    }

    #[test]
    fn bce_uniform_half_is_ln_two() {
        let p = MaskGrid::filled(4, 4, 0.5).unwrap();
        let t = MaskGrid::from_fn(4, 4, |r, _| (r % 2) as f64).unwrap();
        assert!((bce(&p, &t).unwrap() - std::f64::consts::LN_2).abs() < 1e-12);
    }

    #[test]
    fn bce_of_perfect_binary_prediction_is_near_zero() {
        let t = MaskGrid::from_fn(3, 5, |r, c| ((r + c) % 2) as f64).unwrap();
        let loss = bce(&t, &t).unwrap();
        // The ε-clamp leaves -ln(1-ε) ≈ ε per pixel.
        assert!(loss > 0.0 && loss < 1.5e-7, "{loss}");
    }

    #[test]
    fn bce_is_symmetric_under_complement() {
        let p = MaskGrid::from_fn(4, 4, |r, c| 0.05 + 0.05 * ((r * 4 + c) as f64)).unwrap();
        let t = MaskGrid::from_fn(4, 4, |r, c| ((r ^ c) & 1) as f64).unwrap();
        let p_c = p.map(|v| 1.0 - v).unwrap();
        let t_c = t.map(|v| 1.0 - v).unwrap();
        assert!((bce(&p, &t).unwrap() - bce(&p_c, &t_c).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn bce_rejects_mismatched_dims() {
        let p = MaskGrid::zeros(2, 3).unwrap();
        let t = MaskGrid::zeros(3, 2).unwrap();
        assert!(bce(&p, &t).is_err());
    }

    #[test]
    fn coupled_loss_point_value() {
        let bd = coupled_loss(0.5, 4.0, &LossWeights::default()).unwrap();
        let expected = 1.125 * 0.5 + 0.5 * std::f64::consts::E;
        assert!((bd.total - expected).abs() < 1e-9, "{}", bd.total);
        assert!((bd.l_edge_coupled - 0.5 * std::f64::consts::E).abs() < 1e-9);
        assert_eq!(bd.l_cls, 0.0);
        assert_eq!(bd.l_bbox, 0.0);
    }

    #[test]
    fn coupled_loss_vanishes_with_mask_loss() {
        let bd = coupled_loss(0.0, 3.0, &LossWeights::default()).unwrap();
        assert_eq!(bd.l_edge_coupled, 0.0);
        assert_eq!(bd.total, 0.0);
    }

    #[test]
    fn coupled_loss_grows_with_edge_loss() {
        let w = LossWeights::default();
        let lo = coupled_loss(0.4, 0.5, &w).unwrap();
        let hi = coupled_loss(0.4, 2.5, &w).unwrap();
        assert!(hi.total > lo.total);
        assert_eq!(hi.l_mask, lo.l_mask);
    }

    #[test]
    fn coupled_loss_rejects_negative_terms() {
        assert!(coupled_loss(-0.1, 0.0, &LossWeights::default()).is_err());
        assert!(coupled_loss(0.1, f64::NAN, &LossWeights::default()).is_err());
    }

    #[test]
    fn baseline_total_is_weighted_mask_loss_exactly() {
        let w = LossWeights::default();
        for l_mask in [0.0, 0.3125, 0.6875, 12.5] {
            let bd = baseline_loss(l_mask, &w).unwrap();
            assert_eq!(bd.total, 1.125 * l_mask);
            assert_eq!(bd.l_edge_raw, 0.0);
            assert_eq!(bd.l_edge_coupled, 0.0);
        }
    }

    fn test_logits(height: usize, width: usize) -> MaskGrid {
        MaskGrid::from_fn(height, width, |r, c| {
            ((r * 13 + c * 7) % 17) as f64 * 0.35 - 2.6
        })
        .unwrap()
    }

    fn test_gt(height: usize, width: usize) -> MaskGrid {
        MaskGrid::from_fn(height, width, |r, c| {
            if c >= width / 4 && c < 3 * width / 4 && r >= 1 && r + 1 < height {
                1.0
            } else {
                0.0
            }
        })
        .unwrap()
    }

    #[test]
    fn total_loss_matches_composition_of_public_pieces() {
        let logits = test_logits(7, 8);
        let gt = test_gt(7, 8);
        let w = LossWeights::default();
        for operator in [EdgeOperator::Sobel, EdgeOperator::Laplacian] {
            for padding in [PaddingMode::Zero, PaddingMode::Replicate] {
                let (bd, _) = total_loss_and_grad(&logits, &gt, operator, &w, padding).unwrap();
                let probs = logits.map(sigmoid).unwrap();
                let l_mask = bce(&probs, &gt).unwrap();
                let l_edge = edge_loss_raw(&probs, &gt, operator, padding).unwrap();
                let expected = coupled_loss(l_mask, l_edge, &w).unwrap();
                // 1e-8 headroom: the engine δ-smooths the Sobel magnitude.
                assert!(
                    (bd.total - expected.total).abs() < 1e-8,
                    "{operator:?}/{padding:?}: {} vs {}",
                    bd.total,
                    expected.total
                );
                assert!((bd.l_mask - l_mask).abs() < 1e-12);
                assert!((bd.l_edge_raw - l_edge).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn saturated_logits_give_tiny_loss_and_gradient() {
        let gt = test_gt(8, 8);
        let logits = gt.map(|v| if v > 0.5 { 20.0 } else { -20.0 }).unwrap();
        let w = LossWeights::default();
        let (bd, grad) = total_loss_and_grad(
            &logits,
            &gt,
            EdgeOperator::Laplacian,
            &w,
            PaddingMode::Replicate,
        )
        .unwrap();
        // The ε-clamp floors per-pixel BCE at -ln(1-ε) ≈ 1e-7.
        assert!(bd.l_mask < 1.5e-7, "{}", bd.l_mask);
        assert!(bd.total < 1e-6, "{}", bd.total);
        // Mask BCE is inside its clamp zone, so only the (tiny) edge path
        // leaks gradient through the saturated sigmoid.
        assert!(grad.max_abs() < 1e-8, "{}", grad.max_abs());
    }

    #[test]
    fn baseline_gradient_is_exactly_zero_when_saturated() {
        let gt = test_gt(6, 6);
        let logits = gt.map(|v| if v > 0.5 { 20.0 } else { -20.0 }).unwrap();
        let (bd, grad) = loss_and_grad_values(&logits, &gt, None, &LossWeights::default()).unwrap();
        assert!(bd.total < 1e-6);
        assert!(grad.iter().all(|&g| g == 0.0));
    }

    #[test]
    fn gradient_pushes_probabilities_toward_target() {
        // Uniform 0 logits against an all-ones target: every pixel should
        // receive a negative (increase-the-logit) gradient from the mask term.
        let logits = MaskGrid::zeros(6, 6).unwrap();
        let gt = MaskGrid::filled(6, 6, 1.0).unwrap();
        let (_, grad) = loss_and_grad_values(&logits, &gt, None, &LossWeights::default()).unwrap();
        assert!(grad.iter().all(|&g| g < 0.0));
    }

    #[test]
    fn total_loss_rejects_mismatched_edge_dims() {
        let logits = MaskGrid::zeros(4, 4).unwrap();
        let gt = MaskGrid::zeros(4, 5).unwrap();
        assert!(total_loss_and_grad(
            &logits,
            &gt,
            EdgeOperator::Sobel,
            &LossWeights::default(),
            PaddingMode::Zero
        )
        .is_err());
    }
}
