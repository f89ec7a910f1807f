//! Ground-truth preparation.
//!
//! Full-resolution binary masks (rasterized trapezoids or ingested images)
//! are bilinearly downscaled to prediction resolution, optionally box-filtered
//! to suppress the staircase artifacts the downscale leaves on slanted
//! boundaries, and paired with the edge map used as the edge-loss target.
//!
//! The two training branches are configured independently: `smoothing_enabled`
//! picks the mask-loss label (box-filtered or raw), while the edge target is
//! extracted from the box-filtered mask regardless, so the edge branch always
//! trains against smooth reference contours. Set `edge_from_raw` to point the
//! edge branch at the raw staircase instead.

use crate::edge::{extract_edges, EdgeMap, EdgeOperator};
use crate::error::{Error, Result};
use crate::grid::{box_filter, resize_bilinear, MaskGrid, PaddingMode};

/// Settings for [`prepare_gt`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GtConfig {
    /// Expected `(height, width)` of incoming full-resolution masks.
    pub source_size: (usize, usize),
    /// `(height, width)` of the prediction-resolution targets.
    pub target_size: (usize, usize),
    /// Odd side length of the anti-jag box filter.
    pub box_size: usize,
    /// When false, the mask-loss label is the raw downscaled mask rather
    /// than the box-filtered one.
    pub smoothing_enabled: bool,
    /// Padding used by the box filter and edge extraction.
    pub padding: PaddingMode,
    /// When true, the edge target is extracted from the raw downscaled mask
    /// instead of the box-filtered one.
    pub edge_from_raw: bool,
}

impl Default for GtConfig {
    fn default() -> Self {
        Self {
            source_size: (800, 800),
            target_size: (200, 200),
            box_size: 3,
            smoothing_enabled: true,
            padding: PaddingMode::Replicate,
            edge_from_raw: false,
        }
    }
}

impl GtConfig {
    /// Sizes must be positive, the target must not exceed the source on
    /// either axis (this is a downscaling pipeline), and the box size must be
    /// odd and fit the target.
    pub fn validate(&self) -> Result<()> {
        let (sh, sw) = self.source_size;
        let (th, tw) = self.target_size;
        if sh == 0 || sw == 0 || th == 0 || tw == 0 {
            return Err(Error::Validation(format!(
                "sizes must be positive, got source {sh}x{sw}, target {th}x{tw}"
            )));
        }
        if th > sh || tw > sw {
            return Err(Error::Validation(format!(
                "target {th}x{tw} exceeds source {sh}x{sw}"
            )));
        }
        if self.box_size == 0 || self.box_size.is_multiple_of(2) {
            return Err(Error::Validation(format!(
                "box_size must be odd and positive, got {}",
                self.box_size
            )));
        }
        if self.box_size > th || self.box_size > tw {
            return Err(Error::Validation(format!(
                "box_size {} does not fit the {th}x{tw} target",
                self.box_size
            )));
        }
        Ok(())
    }
}

/// Prediction-resolution training targets for one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct GtLabel {
    /// The BCE mask target: box-filtered when smoothing is enabled, otherwise
    /// the raw downscaled mask.
    pub mask_smoothed: MaskGrid,
    /// Raw bilinear downscale of the source mask; the evaluation reference.
    pub mask_raw: MaskGrid,
    /// Edge map the edge loss trains against, extracted from the box-filtered
    /// mask unless `edge_from_raw` is set.
    pub edge_target: EdgeMap,
}

/// Downscales a full-resolution binary mask and derives the training targets.
pub fn prepare_gt(full_mask: &MaskGrid, cfg: &GtConfig, operator: EdgeOperator) -> Result<GtLabel> {
    cfg.validate()?;
    if full_mask.dims() != cfg.source_size {
        return Err(Error::Dimension(format!(
            "mask is {}x{} but the configured source size is {}x{}",
            full_mask.height(),
            full_mask.width(),
            cfg.source_size.0,
            cfg.source_size.1
        )));
    }
    if !full_mask.is_binary() {
        return Err(Error::Validation(
            "full-resolution masks must be strictly binary (0.0 or 1.0)".into(),
        ));
    }
    let (th, tw) = cfg.target_size;
    let mask_raw = resize_bilinear(full_mask, th, tw)?;
    let filtered = box_filter(&mask_raw, cfg.box_size, cfg.padding)?;
    let mask_smoothed = if cfg.smoothing_enabled {
        filtered.clone()
    } else {
        mask_raw.clone()
    };
    let edge_source = if cfg.edge_from_raw {
        &mask_raw
    } else {
        &filtered
    };
    let edge_target = extract_edges(edge_source, operator, cfg.padding)?;
    Ok(GtLabel {
        mask_smoothed,
        mask_raw,
        edge_target,
    })
}

/// Vertical trapezoid in pixel coordinates: a top edge at `row_top` spanning
/// `top.0..=top.1` and a bottom edge at `row_bottom` spanning
/// `bottom.0..=bottom.1`, with the sides linearly interpolated between them.
/// This is the synthetic stand-in for a rail viewed head-on: narrow near the
/// horizon, wide near the camera.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Trapezoid {
    pub row_top: usize,
    pub row_bottom: usize,
    /// `(left_x, right_x)` of the top edge.
    pub top: (f64, f64),
    /// `(left_x, right_x)` of the bottom edge.
    pub bottom: (f64, f64),
}

impl Trapezoid {
    fn validate(&self, size: (usize, usize)) -> Result<()> {
        let (height, width) = size;
        if self.row_top >= self.row_bottom {
            return Err(Error::Validation(format!(
                "row_top {} must lie strictly above row_bottom {}",
                self.row_top, self.row_bottom
            )));
        }
        if self.row_bottom >= height {
            return Err(Error::Validation(format!(
                "row_bottom {} outside a grid of height {height}",
                self.row_bottom
            )));
        }
        for (name, (left, right)) in [("top", self.top), ("bottom", self.bottom)] {
            if !left.is_finite() || !right.is_finite() {
                return Err(Error::Validation(format!("{name} edge has non-finite x")));
            }
            if left >= right {
                return Err(Error::Validation(format!(
                    "{name} edge needs left < right, got ({left}, {right})"
                )));
            }
            if left < 0.0 || right > (width - 1) as f64 {
                return Err(Error::Validation(format!(
                    "{name} edge ({left}, {right}) outside columns 0..{}",
                    width - 1
                )));
            }
        }
        Ok(())
    }
}

/// Rasterizes a trapezoid into a binary mask of the given `(height, width)`.
///
/// A pixel (centered at integer coordinates) is foreground when its row lies
/// in `row_top..=row_bottom` and its column lies in the interpolated
/// `[left, right]` span of that row, both ends inclusive.
pub fn rasterize_trapezoid(trapezoid: &Trapezoid, size: (usize, usize)) -> Result<MaskGrid> {
    let (height, width) = size;
    if height == 0 || width == 0 {
        return Err(Error::Validation(format!(
            "raster size must be positive, got {height}x{width}"
        )));
    }
    trapezoid.validate(size)?;
    let span = (trapezoid.row_bottom - trapezoid.row_top) as f64;
    MaskGrid::from_fn(height, width, |row, col| {
        if row < trapezoid.row_top || row > trapezoid.row_bottom {
            return 0.0;
        }
        let t = (row - trapezoid.row_top) as f64 / span;
        let left = trapezoid.top.0 + t * (trapezoid.bottom.0 - trapezoid.top.0);
        let right = trapezoid.top.1 + t * (trapezoid.bottom.1 - trapezoid.top.1);
        let x = col as f64;
        if x >= left && x <= right {
            1.0
        } else {
            0.0
        }
    })
}
