//! Fixed-kernel edge extraction.
//!
//! Masks are turned into edge-strength maps by cross-correlating with either
//! the Sobel pair or the 4-neighbor Laplacian, then normalizing the response
//! into `[0, 1]` so it can be consumed by binary cross-entropy.

use crate::error::Result;
use crate::grid::{correlate, Kernel, MaskGrid, PaddingMode};

/// Which fixed kernel produces the edge response.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeOperator {
    /// Gradient magnitude from the horizontal/vertical Sobel pair.
    Sobel,
    /// Absolute response of the 4-neighbor Laplacian.
    Laplacian,
}

/// Divisor taking Sobel gradient magnitudes of `[0, 1]` grids into `[0, 1]`:
/// each component is bounded by 4, so the magnitude is bounded by `4·√2`.
pub const SOBEL_NORMALIZER: f64 = 4.0 * std::f64::consts::SQRT_2;

/// Divisor taking absolute Laplacian responses of `[0, 1]` grids into
/// `[0, 1]`: the response is bounded by 4.
pub const LAPLACIAN_NORMALIZER: f64 = 4.0;

/// Normalized edge-strength map together with the operator that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeMap {
    grid: MaskGrid,
    operator: EdgeOperator,
}

impl EdgeMap {
    /// Edge strengths in `[0, 1]`, same shape as the source mask.
    pub fn grid(&self) -> &MaskGrid {
        &self.grid
    }

    pub fn operator(&self) -> EdgeOperator {
        self.operator
    }

    pub fn into_grid(self) -> MaskGrid {
        self.grid
    }
}

fn kernel3(coefficients: [f64; 9]) -> Kernel {
    Kernel::new(3, coefficients.to_vec()).expect("3x3 literal kernel is valid")
}

/// The Sobel pair `(S_x, S_y)`: `S_x` responds to horizontal change (vertical
/// edges), `S_y` to vertical change.
pub fn sobel_kernels() -> (Kernel, Kernel) {
    let sx = kernel3([1.0, 0.0, -1.0, 2.0, 0.0, -2.0, 1.0, 0.0, -1.0]);
    let sy = kernel3([1.0, 2.0, 1.0, 0.0, 0.0, 0.0, -1.0, -2.0, -1.0]);
    (sx, sy)
}

/// The 4-neighbor Laplacian kernel.
pub fn laplacian_kernel() -> Kernel {
    kernel3([0.0, 1.0, 0.0, 1.0, -4.0, 1.0, 0.0, 1.0, 0.0])
}

/// Applies `operator` to `mask` and normalizes the response into `[0, 1]`.
///
/// Sobel: `min(1, √(Gx² + Gy²) / (4·√2))` per pixel. Laplacian:
/// `min(1, |L| / 4)`. For masks already in `[0, 1]` the clamp is a no-op;
/// it only guards inputs outside that range.
pub fn extract_edges(
    mask: &MaskGrid,
    operator: EdgeOperator,
    padding: PaddingMode,
) -> Result<EdgeMap> {
    let grid = match operator {
        EdgeOperator::Sobel => {
            let (sx, sy) = sobel_kernels();
            let gx = correlate(mask, &sx, padding)?;
            let gy = correlate(mask, &sy, padding)?;
            let values = gx
                .values()
                .iter()
                .zip(gy.values())
                .map(|(&x, &y)| (x.hypot(y) / SOBEL_NORMALIZER).clamp(0.0, 1.0))
                .collect();
            MaskGrid::new(mask.height(), mask.width(), values)?
        }
        EdgeOperator::Laplacian => {
            let response = correlate(mask, &laplacian_kernel(), padding)?;
            let values = response
                .values()
                .iter()
                .map(|&v| (v.abs() / LAPLACIAN_NORMALIZER).clamp(0.0, 1.0))
                .collect();
            MaskGrid::new(mask.height(), mask.width(), values)?
        }
    };
    Ok(EdgeMap { grid, operator })
}
