//! Shared fixtures for the benchmarks.

use crt_core::{render_bumps_2d, render_bumps_3d, AxisSpec, BumpSpec, RealGrid2D, RealGrid3D};

pub fn bump_image(n: usize) -> RealGrid2D {
    let a = AxisSpec::new(n, -1.0, 1.0).expect("valid axis");
    render_bumps_2d(&[BumpSpec::new_2d(0.2, 0.1, 0.25, 1.0)], a, a).expect("bump inside")
}

pub fn bump_volume(n: usize) -> RealGrid3D {
    let a = AxisSpec::new(n, -1.0, 1.0).expect("valid axis");
    render_bumps_3d(&[BumpSpec::new_3d(0.2, 0.1, 0.0, 0.25, 1.0)], [a, a, a]).expect("bump inside")
}
