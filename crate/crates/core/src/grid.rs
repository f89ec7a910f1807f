//! Dense row-major grids and the primitive transforms the rest of the crate
//! builds on: fixed-kernel cross-correlation, bilinear resampling, and box
//! filtering.
//!
//! Pixel centers sit at integer `(row, col)` coordinates. All windowed
//! operations produce same-size output and resolve out-of-bounds reads via a
//! [`PaddingMode`].

use crate::error::{Error, Result};

/// Row-major 2D grid of finite `f64` values.
///
/// The same type carries binary masks, soft masks, edge maps, prototypes, and
/// logits; binary-ness is a checkable property ([`MaskGrid::is_binary`]), not
/// a constructor invariant.
#[derive(Debug, Clone, PartialEq)]
pub struct MaskGrid {
    height: usize,
    width: usize,
    values: Vec<f64>,
}

impl MaskGrid {
    /// Wraps a row-major value buffer. Dimensions must be positive, the
    /// buffer length must be `height * width`, and every value finite.
    pub fn new(height: usize, width: usize, values: Vec<f64>) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(Error::Validation(format!(
                "grid dimensions must be positive, got {height}x{width}"
            )));
        }
        if values.len() != height * width {
            return Err(Error::Dimension(format!(
                "{height}x{width} grid needs {} values, got {}",
                height * width,
                values.len()
            )));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Validation(format!(
                "grid values must be finite, found {bad}"
            )));
        }
        Ok(Self {
            height,
            width,
            values,
        })
    }

    /// Grid holding `value` everywhere.
    pub fn filled(height: usize, width: usize, value: f64) -> Result<Self> {
        Self::new(height, width, vec![value; height * width])
    }

    /// All-zero grid.
    pub fn zeros(height: usize, width: usize) -> Result<Self> {
        Self::filled(height, width, 0.0)
    }

    /// Builds a grid by evaluating `f(row, col)` at every pixel in row-major
    /// order.
    pub fn from_fn(
        height: usize,
        width: usize,
        mut f: impl FnMut(usize, usize) -> f64,
    ) -> Result<Self> {
        let mut values = Vec::with_capacity(height * width);
        for row in 0..height {
            for col in 0..width {
                values.push(f(row, col));
            }
        }
        Self::new(height, width, values)
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// `(height, width)` pair.
    pub fn dims(&self) -> (usize, usize) {
        (self.height, self.width)
    }

    /// Row-major backing slice.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Value at `(row, col)`; both must be in range.
    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        debug_assert!(row < self.height && col < self.width);
        self.values[row * self.width + col]
    }

    /// True when `other` has the same height and width.
    pub fn same_dims(&self, other: &MaskGrid) -> bool {
        self.height == other.height && self.width == other.width
    }

    /// True when every value is exactly `0.0` or `1.0`.
    pub fn is_binary(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0 || v == 1.0)
    }

    /// Smallest value in the grid.
    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Largest value in the grid.
    pub fn max_value(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Applies `f` to every value, producing a new grid. `f` must return
    /// finite values.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(
            self.height,
            self.width,
            self.values.iter().map(|&v| f(v)).collect(),
        )
    }
}

/// Square odd-sized kernel applied by cross-correlation (no flip).
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    size: usize,
    coefficients: Vec<f64>,
}

impl Kernel {
    /// Wraps row-major coefficients for a `size x size` kernel. `size` must
    /// be odd and positive.
    pub fn new(size: usize, coefficients: Vec<f64>) -> Result<Self> {
        if size == 0 || size.is_multiple_of(2) {
            return Err(Error::Validation(format!(
                "kernel size must be odd and positive, got {size}"
            )));
        }
        if coefficients.len() != size * size {
            return Err(Error::Dimension(format!(
                "{size}x{size} kernel needs {} coefficients, got {}",
                size * size,
                coefficients.len()
            )));
        }
        if let Some(bad) = coefficients.iter().find(|c| !c.is_finite()) {
            return Err(Error::Validation(format!(
                "kernel coefficients must be finite, found {bad}"
            )));
        }
        Ok(Self { size, coefficients })
    }

    /// Uniform averaging kernel: every coefficient is `1 / size²`.
    pub fn boxcar(size: usize) -> Result<Self> {
        let weight = 1.0 / (size * size) as f64;
        Self::new(size, vec![weight; size * size])
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Row-major coefficient slice.
    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// Coefficient at kernel position `(i, j)`.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i < self.size && j < self.size);
        self.coefficients[i * self.size + j]
    }

    /// Sum of all coefficients.
    pub fn sum(&self) -> f64 {
        self.coefficients.iter().sum()
    }

    fn radius(&self) -> isize {
        (self.size / 2) as isize
    }
}

/// How reads outside the grid are resolved during windowed operations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PaddingMode {
    /// Out-of-bounds pixels read as `0.0`.
    Zero,
    /// Out-of-bounds reads clamp to the nearest edge pixel.
    Replicate,
}

/// Reads `grid` at possibly out-of-bounds coordinates under `padding`.
#[inline]
fn sample(grid: &MaskGrid, row: isize, col: isize, padding: PaddingMode) -> f64 {
    let h = grid.height as isize;
    let w = grid.width as isize;
    match padding {
        PaddingMode::Zero => {
            if row < 0 || col < 0 || row >= h || col >= w {
                0.0
            } else {
                grid.values[(row * w + col) as usize]
            }
        }
        PaddingMode::Replicate => {
            let r = row.clamp(0, h - 1);
            let c = col.clamp(0, w - 1);
            grid.values[(r * w + c) as usize]
        }
    }
}

fn check_kernel_fits(grid: &MaskGrid, kernel: &Kernel) -> Result<()> {
    if kernel.size > grid.height || kernel.size > grid.width {
        return Err(Error::Dimension(format!(
            "{}x{} kernel does not fit a {}x{} grid",
            kernel.size, kernel.size, grid.height, grid.width
        )));
    }
    Ok(())
}

/// Cross-correlates `grid` with `kernel`, producing a same-size output.
///
/// No kernel flip is applied: `out[r][c] = Σ_{i,j} K[i][j] · grid[r+i-ρ][c+j-ρ]`
/// with ρ the kernel radius and out-of-bounds reads resolved by `padding`.
/// The kernel accumulation order is fixed (row-major), so results are
/// bit-reproducible across runs.
pub fn correlate(grid: &MaskGrid, kernel: &Kernel, padding: PaddingMode) -> Result<MaskGrid> {
    check_kernel_fits(grid, kernel)?;
    let radius = kernel.radius();
    let mut out = Vec::with_capacity(grid.values.len());
    for row in 0..grid.height as isize {
        for col in 0..grid.width as isize {
            let mut acc = 0.0;
            for i in 0..kernel.size {
                for j in 0..kernel.size {
                    let value = sample(
                        grid,
                        row + i as isize - radius,
                        col + j as isize - radius,
                        padding,
                    );
                    acc += kernel.get(i, j) * value;
                }
            }
            out.push(acc);
        }
    }
    MaskGrid::new(grid.height, grid.width, out)
}

/// Adjoint of [`correlate`] as a linear map in the grid argument: scatters
/// `grad_output` back through exactly the reads the forward pass performed,
/// including padding behavior (Replicate folds out-of-bounds contributions
/// onto the clamped edge pixel; Zero drops them).
pub(crate) fn correlate_adjoint(
    grad_output: &MaskGrid,
    kernel: &Kernel,
    padding: PaddingMode,
) -> Result<MaskGrid> {
    check_kernel_fits(grad_output, kernel)?;
    let h = grad_output.height as isize;
    let w = grad_output.width as isize;
    let radius = kernel.radius();
    let mut acc = vec![0.0; grad_output.values.len()];
    for row in 0..h {
        for col in 0..w {
            let g = grad_output.values[(row * w + col) as usize];
            for i in 0..kernel.size {
                for j in 0..kernel.size {
                    let src_row = row + i as isize - radius;
                    let src_col = col + j as isize - radius;
                    let (r, c) = match padding {
                        PaddingMode::Zero => {
                            if src_row < 0 || src_col < 0 || src_row >= h || src_col >= w {
                                continue;
                            }
                            (src_row, src_col)
                        }
                        PaddingMode::Replicate => {
                            (src_row.clamp(0, h - 1), src_col.clamp(0, w - 1))
                        }
                    };
                    acc[(r * w + c) as usize] += kernel.get(i, j) * g;
                }
            }
        }
    }
    MaskGrid::new(grad_output.height, grad_output.width, acc)
}

/// Linear interpolation; exact at `t = 0` and for `a == b`.
#[inline]
fn lerp(a: f64, b: f64, t: f64) -> f64 {
    a + t * (b - a)
}

/// Bilinearly resamples `grid` to `out_height x out_width`.
///
/// Uses half-pixel alignment: destination pixel `d` maps to source coordinate
/// `(d + 0.5) · in/out − 0.5`, clamped into the source index range. Each
/// output value is clamped to the min/max of the four source corners it was
/// interpolated from, so the output range never escapes the input range.
pub fn resize_bilinear(grid: &MaskGrid, out_height: usize, out_width: usize) -> Result<MaskGrid> {
    if out_height == 0 || out_width == 0 {
        return Err(Error::Validation(format!(
            "resize target must be positive, got {out_height}x{out_width}"
        )));
    }
    let scale_r = grid.height as f64 / out_height as f64;
    let scale_c = grid.width as f64 / out_width as f64;
    let max_r = (grid.height - 1) as f64;
    let max_c = (grid.width - 1) as f64;
    let mut out = Vec::with_capacity(out_height * out_width);
    for row in 0..out_height {
        let src_r = ((row as f64 + 0.5) * scale_r - 0.5).clamp(0.0, max_r);
        let r0 = src_r.floor() as usize;
        let r1 = (r0 + 1).min(grid.height - 1);
        let tr = src_r - r0 as f64;
        for col in 0..out_width {
            let src_c = ((col as f64 + 0.5) * scale_c - 0.5).clamp(0.0, max_c);
            let c0 = src_c.floor() as usize;
            let c1 = (c0 + 1).min(grid.width - 1);
            let tc = src_c - c0 as f64;
            let a = grid.get(r0, c0);
            let b = grid.get(r0, c1);
            let c = grid.get(r1, c0);
            let d = grid.get(r1, c1);
            let top = lerp(a, b, tc);
            let bottom = lerp(c, d, tc);
            let value = lerp(top, bottom, tr);
            let lo = a.min(b).min(c).min(d);
            let hi = a.max(b).max(c).max(d);
            out.push(value.clamp(lo, hi));
        }
    }
    MaskGrid::new(out_height, out_width, out)
}

/// Averages each pixel over the `size x size` window centered on it.
///
/// `size` must be odd; `size == 1` is the identity. Windows that see a single
/// constant value reproduce that constant exactly; mixed windows are computed
/// as window sum divided by `size²`.
pub fn box_filter(grid: &MaskGrid, size: usize, padding: PaddingMode) -> Result<MaskGrid> {
    if size == 0 || size.is_multiple_of(2) {
        return Err(Error::Validation(format!(
            "box filter size must be odd and positive, got {size}"
        )));
    }
    if size > grid.height || size > grid.width {
        return Err(Error::Dimension(format!(
            "{size}x{size} box filter does not fit a {}x{} grid",
            grid.height, grid.width
        )));
    }
    if size == 1 {
        return Ok(grid.clone());
    }
    let radius = (size / 2) as isize;
    let area = (size * size) as f64;
    let mut out = Vec::with_capacity(grid.values.len());
    for row in 0..grid.height as isize {
        for col in 0..grid.width as isize {
            let first = sample(grid, row - radius, col - radius, padding);
            let mut sum = 0.0;
            let mut constant = true;
            for i in -radius..=radius {
                for j in -radius..=radius {
                    let value = sample(grid, row + i, col + j, padding);
                    constant &= value == first;
                    sum += value;
                }
            }
            // A constant window must average to that constant exactly, which
            // naive summation does not guarantee in floating point.
            out.push(if constant { first } else { sum / area });
        }
    }
    MaskGrid::new(grid.height, grid.width, out)
}
