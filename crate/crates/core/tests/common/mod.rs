//! Brute-force reference implementations ("oracles") used to validate the
//! library code, plus deterministic random-input helpers. These are written
//! as plainly as possible — nested vectors, explicit loops, no sharing with
//! the code under test.

#![allow(dead_code)]
// Oracles intentionally index with explicit loop counters so they read like
// the defining equations rather than idiomatic iterator chains.
#![allow(clippy::needless_range_loop)]

use railmask_core::{MaskGrid, PaddingMode};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub type Matrix = Vec<Vec<f64>>;

pub fn to_matrix(grid: &MaskGrid) -> Matrix {
    (0..grid.height())
        .map(|r| (0..grid.width()).map(|c| grid.get(r, c)).collect())
        .collect()
}

/// Reads a matrix at possibly out-of-bounds coordinates.
pub fn read_padded(m: &Matrix, row: isize, col: isize, padding: PaddingMode) -> f64 {
    let height = m.len() as isize;
    let width = m[0].len() as isize;
    match padding {
        PaddingMode::Zero => {
            if row < 0 || row >= height || col < 0 || col >= width {
                0.0
            } else {
                m[row as usize][col as usize]
            }
        }
        PaddingMode::Replicate => {
            let mut r = row;
            let mut c = col;
            if r < 0 {
                r = 0;
            }
            if r >= height {
                r = height - 1;
            }
            if c < 0 {
                c = 0;
            }
            if c >= width {
                c = width - 1;
            }
            m[r as usize][c as usize]
        }
    }
}

/// Quadruple-loop cross-correlation with same-size output.
pub fn correlate_oracle(input: &Matrix, kernel: &Matrix, padding: PaddingMode) -> Matrix {
    let height = input.len();
    let width = input[0].len();
    let k = kernel.len();
    let radius = (k / 2) as isize;
    let mut out = vec![vec![0.0; width]; height];
    for r in 0..height {
        for c in 0..width {
            let mut acc = 0.0;
            for i in 0..k {
                for j in 0..k {
                    let rr = r as isize + i as isize - radius;
                    let cc = c as isize + j as isize - radius;
                    acc += kernel[i][j] * read_padded(input, rr, cc, padding);
                }
            }
            out[r][c] = acc;
        }
    }
    out
}

/// Windowed average computed directly per pixel.
pub fn box_filter_oracle(input: &Matrix, size: usize, padding: PaddingMode) -> Matrix {
    let height = input.len();
    let width = input[0].len();
    let radius = (size / 2) as isize;
    let mut out = vec![vec![0.0; width]; height];
    for r in 0..height {
        for c in 0..width {
            let mut sum = 0.0;
            for i in -radius..=radius {
                for j in -radius..=radius {
                    sum += read_padded(input, r as isize + i, c as isize + j, padding);
                }
            }
            out[r][c] = sum / (size * size) as f64;
        }
    }
    out
}

/// Half-pixel-aligned bilinear resampling in the expanded four-term form.
pub fn resize_oracle(input: &Matrix, out_height: usize, out_width: usize) -> Matrix {
    let in_height = input.len();
    let in_width = input[0].len();
    let mut out = vec![vec![0.0; out_width]; out_height];
    for r in 0..out_height {
        let mut sr = (r as f64 + 0.5) * in_height as f64 / out_height as f64 - 0.5;
        if sr < 0.0 {
            sr = 0.0;
        }
        if sr > (in_height - 1) as f64 {
            sr = (in_height - 1) as f64;
        }
        let r0 = sr as usize;
        let r1 = if r0 + 1 < in_height { r0 + 1 } else { r0 };
        let fr = sr - r0 as f64;
        for c in 0..out_width {
            let mut sc = (c as f64 + 0.5) * in_width as f64 / out_width as f64 - 0.5;
            if sc < 0.0 {
                sc = 0.0;
            }
            if sc > (in_width - 1) as f64 {
                sc = (in_width - 1) as f64;
            }
            let c0 = sc as usize;
            let c1 = if c0 + 1 < in_width { c0 + 1 } else { c0 };
            let fc = sc - c0 as f64;
            out[r][c] = (1.0 - fr) * (1.0 - fc) * input[r0][c0]
                + (1.0 - fr) * fc * input[r0][c1]
                + fr * (1.0 - fc) * input[r1][c0]
                + fr * fc * input[r1][c1];
        }
    }
    out
}

pub fn random_grid(
    rng: &mut ChaCha8Rng,
    height: usize,
    width: usize,
    lo: f64,
    hi: f64,
) -> MaskGrid {
    let values = (0..height * width)
        .map(|_| rng.gen_range(lo..=hi))
        .collect();
    MaskGrid::new(height, width, values).expect("random grid is valid")
}

pub fn random_binary_grid(
    rng: &mut ChaCha8Rng,
    height: usize,
    width: usize,
    p_fg: f64,
) -> MaskGrid {
    let values = (0..height * width)
        .map(|_| if rng.gen::<f64>() < p_fg { 1.0 } else { 0.0 })
        .collect();
    MaskGrid::new(height, width, values).expect("random binary grid is valid")
}

pub fn random_kernel(rng: &mut ChaCha8Rng, size: usize) -> Matrix {
    (0..size)
        .map(|_| (0..size).map(|_| rng.gen_range(-2.0..=2.0)).collect())
        .collect()
}

/// Largest absolute elementwise difference between a grid and a matrix.
pub fn max_abs_diff(grid: &MaskGrid, reference: &Matrix) -> f64 {
    let mut worst = 0.0_f64;
    for r in 0..grid.height() {
        for c in 0..grid.width() {
            worst = worst.max((grid.get(r, c) - reference[r][c]).abs());
        }
    }
    worst
}
