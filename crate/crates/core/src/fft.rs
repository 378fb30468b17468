//! Thin wrappers over rustfft for the strided layouts used by the grids.

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

pub(crate) struct Plans {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Plans {
    pub(crate) fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    /// In-place unnormalized transform of every contiguous chunk of length `n`.
    pub(crate) fn run(&self, data: &mut [Complex64], inverse: bool) {
        if inverse {
            self.inverse.process(data);
        } else {
            self.forward.process(data);
        }
    }
}

/// Unnormalized 2D transform of an `nx × ny` plane stored x-fastest.
pub(crate) fn fft2_plane(plane: &mut [Complex64], nx: usize, ny: usize, rows: &Plans, cols: &Plans, inverse: bool) {
    debug_assert_eq!(plane.len(), nx * ny);
    rows.run(plane, inverse);
    let mut column = vec![Complex64::default(); ny];
    for i in 0..nx {
        for (j, c) in column.iter_mut().enumerate() {
            *c = plane[j * nx + i];
        }
        cols.run(&mut column, inverse);
        for (j, c) in column.iter().enumerate() {
            plane[j * nx + i] = *c;
        }
    }
}
