//! Two-dimensional FFTs on row-major complex grids.

use num_complex::Complex64 as C64;
use rustfft::{Fft, FftDirection, FftPlanner};

use crate::par::for_each_row;

fn transform_rows(data: &mut [C64], nx: usize, fft: &dyn Fft<f64>) {
    for_each_row(data, nx, |_, row| fft.process(row));
}

fn transpose(data: &[C64], nx: usize, ny: usize) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); data.len()];
    for iy in 0..ny {
        for ix in 0..nx {
            out[ix * ny + iy] = data[iy * nx + ix];
        }
    }
    out
}

/// Unnormalised 2D DFT in place; `data` is `ny` rows of `nx` samples.
pub(crate) fn fft2(data: &mut [C64], nx: usize, ny: usize, direction: FftDirection) {
    let mut planner = FftPlanner::new();
    let row_fft = planner.plan_fft(nx, direction);
    let col_fft = planner.plan_fft(ny, direction);
    transform_rows(data, nx, row_fft.as_ref());
    let mut t = transpose(data, nx, ny);
    transform_rows(&mut t, ny, col_fft.as_ref());
    data.copy_from_slice(&transpose(&t, ny, nx));
}

/// Angular frequency of DFT bin `k` for `n` samples with spacing `d`.
pub(crate) fn angular_frequency(k: usize, n: usize, d: f64) -> f64 {
    let signed = if k <= (n - 1) / 2 { k as f64 } else { k as f64 - n as f64 };
    2.0 * std::f64::consts::PI * signed / (n as f64 * d)
}
