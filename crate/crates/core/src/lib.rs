//! Conical Radon transforms with a fixed half-opening angle and vertical axis.
//!
//! In 2D the transform integrates along the two upward rays of a "V" with
//! apex at each vertex; in 3D it integrates over the surface of a circular
//! cone opening upward. Both have exact inversion formulas, implemented here
//! alongside forward projectors, independent oracles, phantoms and metrics.
//!
//! Modules:
//! - [`grid`]: uniform grids, geometry, interpolation, differences, quadrature
//! - [`specfun`]: Bessel J₀/J₁ and DFT frequency axes
//! - [`vline`]: 2D forward/inverse transform and the per-frequency oracle
//! - [`cone`]: 3D forward transform and spectral inversion
//! - [`phantom`]: bump phantoms, scene files and error metrics

pub mod cone;
pub mod error;
mod fft;
pub mod grid;
pub mod phantom;
pub mod specfun;
pub mod vline;

pub use cone::{
    apply_h, cone_forward, cone_invert, dft2_slices, dft2_slices_padded, invert_frequency_profile, kernel_eval,
    KernelParams, SpectralStack,
};
pub use error::{CrtError, Result};
pub use grid::{
    cumint_from_top, diff2_x_central, diff_y_forward, sample_linear_2d, sample_linear_xy, AxisSpec, ConeGeometry,
    RealGrid2D, RealGrid3D,
};
pub use num_complex::Complex64;
pub use phantom::{
    max_abs_error, parse_scene, relative_l2, relative_l2_masked, render_bumps_2d, render_bumps_3d, support_mask_2d,
    BumpSpec,
};
pub use specfun::{bessel_j0, bessel_j1, frequency_axis, FrequencyAxis};
pub use vline::{fourier_relation_check, vline_forward, vline_invert, vline_spectral_oracle, VLineProjection};

/// Half-opening angle used throughout the reference experiments.
pub const DEFAULT_BETA: f64 = std::f64::consts::PI / 8.0;
