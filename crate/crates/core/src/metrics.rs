//! Mask-quality metrics: IoU, boundary F1, and a jaggedness score.
//!
//! All metrics binarize soft masks at 0.5 (values ≥ 0.5 are foreground)
//! before any set arithmetic; jaggedness additionally inspects the soft
//! values along the binarized boundary.

use crate::edge::laplacian_kernel;
use crate::error::{Error, Result};
use crate::grid::{correlate, MaskGrid, PaddingMode};

/// Chebyshev distance (in pixels) within which boundary pixels are considered
/// matched by [`boundary_f1`].
pub const DEFAULT_BOUNDARY_TOLERANCE: usize = 2;

fn binarize(grid: &MaskGrid) -> Vec<bool> {
    grid.values().iter().map(|&v| v >= 0.5).collect()
}

fn check_same_dims(a: &MaskGrid, b: &MaskGrid, what: &str) -> Result<()> {
    if !a.same_dims(b) {
        return Err(Error::Dimension(format!(
            "{what}: {}x{} vs {}x{}",
            a.height(),
            a.width(),
            b.height(),
            b.width()
        )));
    }
    Ok(())
}

/// Intersection over union of the binarized masks. Defined as `1.0` when both
/// masks are empty.
pub fn iou(a: &MaskGrid, b: &MaskGrid) -> Result<f64> {
    check_same_dims(a, b, "iou operands differ")?;
    let fa = binarize(a);
    let fb = binarize(b);
    let mut intersection = 0usize;
    let mut union = 0usize;
    for (x, y) in fa.iter().zip(&fb) {
        intersection += usize::from(*x && *y);
        union += usize::from(*x || *y);
    }
    if union == 0 {
        Ok(1.0)
    } else {
        Ok(intersection as f64 / union as f64)
    }
}

/// Marks foreground pixels that have at least one in-grid background
/// 4-neighbor (the inner boundary of the binarized mask).
fn boundary_pixels(fg: &[bool], height: usize, width: usize) -> Vec<bool> {
    let mut boundary = vec![false; fg.len()];
    for r in 0..height {
        for c in 0..width {
            let i = r * width + c;
            if !fg[i] {
                continue;
            }
            let has_bg_neighbor = (r > 0 && !fg[i - width])
                || (r + 1 < height && !fg[i + width])
                || (c > 0 && !fg[i - 1])
                || (c + 1 < width && !fg[i + 1]);
            boundary[i] = has_bg_neighbor;
        }
    }
    boundary
}

/// Dilates a pixel set by a Chebyshev radius.
fn dilate(set: &[bool], height: usize, width: usize, radius: usize) -> Vec<bool> {
    let mut out = vec![false; set.len()];
    let radius = radius as isize;
    for r in 0..height as isize {
        for c in 0..width as isize {
            if !set[(r * width as isize + c) as usize] {
                continue;
            }
            for i in (r - radius).max(0)..=(r + radius).min(height as isize - 1) {
                for j in (c - radius).max(0)..=(c + radius).min(width as isize - 1) {
                    out[(i * width as isize + j) as usize] = true;
                }
            }
        }
    }
    out
}

fn count_matched(set: &[bool], dilated_other: &[bool]) -> (usize, usize) {
    let mut total = 0;
    let mut matched = 0;
    for (s, d) in set.iter().zip(dilated_other) {
        if *s {
            total += 1;
            matched += usize::from(*d);
        }
    }
    (total, matched)
}

/// Boundary F1 between the binarized masks: a boundary pixel counts as
/// matched when the other mask has a boundary pixel within `tolerance_px`
/// (Chebyshev). Both boundaries empty is a perfect `1.0`; exactly one empty
/// is `0.0`.
pub fn boundary_f1(pred: &MaskGrid, gt: &MaskGrid, tolerance_px: usize) -> Result<f64> {
    check_same_dims(pred, gt, "boundary_f1 operands differ")?;
    let (height, width) = pred.dims();
    let pred_boundary = boundary_pixels(&binarize(pred), height, width);
    let gt_boundary = boundary_pixels(&binarize(gt), height, width);
    let pred_any = pred_boundary.iter().any(|&b| b);
    let gt_any = gt_boundary.iter().any(|&b| b);
    match (pred_any, gt_any) {
        (false, false) => return Ok(1.0),
        (false, true) | (true, false) => return Ok(0.0),
        (true, true) => {}
    }
    let gt_reach = dilate(&gt_boundary, height, width, tolerance_px);
    let pred_reach = dilate(&pred_boundary, height, width, tolerance_px);
    let (pred_total, pred_matched) = count_matched(&pred_boundary, &gt_reach);
    let (gt_total, gt_matched) = count_matched(&gt_boundary, &pred_reach);
    let precision = pred_matched as f64 / pred_total as f64;
    let recall = gt_matched as f64 / gt_total as f64;
    if precision + recall == 0.0 {
        Ok(0.0)
    } else {
        Ok(2.0 * precision * recall / (precision + recall))
    }
}

/// Mean absolute raw Laplacian response of the soft mask over the boundary
/// band (pixels whose binarized class differs from an in-grid 4-neighbor).
/// High values mean staircased or noisy boundaries; straight binary edges
/// score 1, linear ramps score 0. Returns `0.0` when the band is empty.
///
/// The mask must lie in `[0, 1]`.
pub fn jaggedness(mask: &MaskGrid) -> Result<f64> {
    if mask.min_value() < 0.0 || mask.max_value() > 1.0 {
        return Err(Error::Validation(format!(
            "jaggedness needs values in [0, 1], got [{}, {}]",
            mask.min_value(),
            mask.max_value()
        )));
    }
    let (height, width) = mask.dims();
    let fg = binarize(mask);
    let mut band = vec![false; fg.len()];
    for r in 0..height {
        for c in 0..width {
            let i = r * width + c;
            let differs = (r > 0 && fg[i - width] != fg[i])
                || (r + 1 < height && fg[i + width] != fg[i])
                || (c > 0 && fg[i - 1] != fg[i])
                || (c + 1 < width && fg[i + 1] != fg[i]);
            band[i] = differs;
        }
    }
    let band_size = band.iter().filter(|&&b| b).count();
    if band_size == 0 {
        return Ok(0.0);
    }
    let response = correlate(mask, &laplacian_kernel(), PaddingMode::Replicate)?;
    let sum: f64 = response
        .values()
        .iter()
        .zip(&band)
        .filter(|(_, &in_band)| in_band)
        .map(|(&v, _)| v.abs())
        .sum();
    Ok(sum / band_size as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vertical_step(height: usize, width: usize, ones_through_col: usize) -> MaskGrid {
        MaskGrid::from_fn(
            height,
            width,
            |_, c| if c <= ones_through_col { 1.0 } else { 0.0 },
        )
        .unwrap()
    }

    fn rect(height: usize, width: usize, r0: usize, r1: usize, c0: usize, c1: usize) -> MaskGrid {
        MaskGrid::from_fn(height, width, |r, c| {
            if r >= r0 && r < r1 && c >= c0 && c < c1 {
                1.0
            } else {
                0.0
            }
        })
        .unwrap()
    }

    #[test]
    fn iou_of_identical_masks_is_one() {
        let m = rect(8, 8, 2, 6, 2, 6);
        assert_eq!(iou(&m, &m).unwrap(), 1.0);
    }

    #[test]
    fn iou_of_disjoint_masks_is_zero() {
        let a = rect(8, 8, 0, 3, 0, 3);
        let b = rect(8, 8, 5, 8, 5, 8);
        assert_eq!(iou(&a, &b).unwrap(), 0.0);
    }

    #[test]
    fn iou_counts_overlap() {
        // 4x4 squares overlapping in a 2x2 corner: 4 / (16 + 16 - 4).
        let a = rect(10, 10, 2, 6, 2, 6);
        let b = rect(10, 10, 4, 8, 4, 8);
        assert!((iou(&a, &b).unwrap() - 4.0 / 28.0).abs() < 1e-12);
    }

    #[test]
    fn iou_of_two_empty_masks_is_one() {
        let z = MaskGrid::zeros(5, 5).unwrap();
        assert_eq!(iou(&z, &z).unwrap(), 1.0);
    }

    #[test]
    fn iou_binarizes_at_half() {
        let soft = MaskGrid::from_fn(4, 4, |_, c| if c < 2 { 0.51 } else { 0.49 }).unwrap();
        let hard = rect(4, 4, 0, 4, 0, 2);
        assert_eq!(iou(&soft, &hard).unwrap(), 1.0);
    }

    #[test]
    fn boundary_f1_identical_masks() {
        let m = rect(12, 12, 3, 9, 3, 9);
        assert_eq!(boundary_f1(&m, &m, 0).unwrap(), 1.0);
    }

    #[test]
    fn boundary_f1_tolerates_small_shifts() {
        let a = rect(16, 16, 4, 10, 4, 10);
        let b = rect(16, 16, 5, 11, 4, 10); // shifted down by one row
        assert!(boundary_f1(&a, &b, 0).unwrap() < 1.0);
        assert_eq!(boundary_f1(&a, &b, 2).unwrap(), 1.0);
    }

    #[test]
    fn boundary_f1_penalizes_large_shifts() {
        let a = rect(24, 24, 2, 8, 2, 8);
        let b = rect(24, 24, 14, 20, 14, 20);
        assert_eq!(boundary_f1(&a, &b, 2).unwrap(), 0.0);
    }

    #[test]
    fn boundary_f1_empty_conventions() {
        let empty = MaskGrid::zeros(6, 6).unwrap();
        let full = MaskGrid::filled(6, 6, 1.0).unwrap(); // no in-grid bg neighbors
        let something = rect(6, 6, 1, 4, 1, 4);
        assert_eq!(boundary_f1(&empty, &empty, 2).unwrap(), 1.0);
        assert_eq!(boundary_f1(&full, &full, 2).unwrap(), 1.0);
        assert_eq!(boundary_f1(&empty, &something, 2).unwrap(), 0.0);
        assert_eq!(boundary_f1(&something, &empty, 2).unwrap(), 0.0);
    }

    #[test]
    fn boundary_f1_is_symmetric() {
        let a = rect(16, 16, 2, 9, 3, 12);
        let b = rect(16, 16, 4, 12, 2, 10);
        for d in 0..4 {
            let ab = boundary_f1(&a, &b, d).unwrap();
            let ba = boundary_f1(&b, &a, d).unwrap();
            assert!((ab - ba).abs() < 1e-12, "d={d}");
        }
    }

    #[test]
    fn jaggedness_of_hard_step_is_one() {
        // Band is the two columns astride the jump; |Laplacian| is 1 on both.
        let m = vertical_step(6, 6, 2);
        assert!((jaggedness(&m).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn jaggedness_of_linear_ramp_band_is_zero() {
        // Box-filtered step: [1, 1, 2/3, 1/3, 0, 0] per row. The band (cols
        // 2-3) sits on the linear part of the ramp where the Laplacian
        // vanishes; the curvature lives outside the band.
        let profile = [1.0, 1.0, 2.0 / 3.0, 1.0 / 3.0, 0.0, 0.0];
        let m = MaskGrid::from_fn(6, 6, |_, c| profile[c]).unwrap();
        assert!(jaggedness(&m).unwrap().abs() < 1e-12);
    }

    #[test]
    fn jaggedness_of_constant_mask_is_zero() {
        let m = MaskGrid::filled(7, 7, 1.0).unwrap();
        assert_eq!(jaggedness(&m).unwrap(), 0.0);
        let m = MaskGrid::zeros(7, 7).unwrap();
        assert_eq!(jaggedness(&m).unwrap(), 0.0);
    }

    #[test]
    fn jaggedness_is_invariant_under_complement() {
        let m = MaskGrid::from_fn(9, 9, |r, c| if (r * 5 + c * 3) % 7 < 3 { 1.0 } else { 0.0 })
            .unwrap();
        let complement = m.map(|v| 1.0 - v).unwrap();
        assert!((jaggedness(&m).unwrap() - jaggedness(&complement).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn jaggedness_rejects_out_of_range_values() {
        let m = MaskGrid::filled(4, 4, 1.5).unwrap();
        assert!(matches!(jaggedness(&m), Err(Error::Validation(_))));
    }
}
