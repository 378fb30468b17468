//! The V-line transform: integrals of a 2D function along two upward rays
//! leaving a common vertex at ±β from the vertical, and its exact inversion
//!
//! ```text
//! f(x, y) = -(cos β / 2) (∂g/∂y + tan²β ∫_y^{y_max} ∂²g/∂x² dt)
//! ```
//!
//! A second forward route works per x-frequency λ, where the transform
//! reduces to `ĝ_λ(y_v) = (2 / cos β) ∫_{y_v} f̂_λ(y) cos(λ (y − y_v) tan β) dy`.
//! It shares no interpolation code with [`vline_forward`] and serves as an
//! independent check.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{CrtError, Result};
use crate::fft::Plans;
use crate::grid::{cumint_from_top, diff2_x_central, diff_y_forward, AxisSpec, ConeGeometry, RealGrid2D};

/// V-line data: `grid` holds g at each vertex (x_v, y_v).
#[derive(Debug, Clone, PartialEq)]
pub struct VLineProjection {
    grid: RealGrid2D,
    geometry: ConeGeometry,
}

impl VLineProjection {
    pub fn new(grid: RealGrid2D, geometry: ConeGeometry) -> Self {
        Self { grid, geometry }
    }

    pub fn grid(&self) -> &RealGrid2D {
        &self.grid
    }

    pub fn geometry(&self) -> &ConeGeometry {
        &self.geometry
    }

    pub fn into_grid(self) -> RealGrid2D {
        self.grid
    }
}

/// Trapezoid weights (in units of the step) for levels `start..n`.
#[inline]
fn trapezoid_weight(j: usize, start: usize, n: usize) -> f64 {
    if j == start || j + 1 == n {
        0.5
    } else {
        1.0
    }
}

/// Sub-steps per vertex-grid row so that a ray advances at most
/// `1 / RAY_STEPS_PER_CELL` of an x cell between samples.
pub const RAY_STEPS_PER_CELL: f64 = 4.0;

fn ray_substeps(geometry: &ConeGeometry, dy: f64, dx: f64) -> usize {
    ((RAY_STEPS_PER_CELL * geometry.tan_beta() * dy / dx).ceil() as usize).max(1)
}

/// Forward V-line transform of `f` evaluated at every node of the vertex grid
/// `vertex_x × vertex_y`.
///
/// Each ray integral is a trapezoid in y from the vertex to the top of the
/// vertex grid, with `f` sampled bilinearly (zero outside its rectangle). Every
/// y-level is a sample, subdivided further so that steep rays are still
/// sampled several times per x cell. The vertex grid must reach at least as
/// high as `f` so every ray leaves the support.
pub fn vline_forward(
    f: &RealGrid2D,
    geometry: &ConeGeometry,
    vertex_x: AxisSpec,
    vertex_y: AxisSpec,
) -> Result<VLineProjection> {
    ConeGeometry::new(geometry.beta())?;
    let fy = f.y_axis();
    if vertex_y.max() < fy.max() - 1e-12 * fy.spacing() {
        return Err(CrtError::Precondition(format!(
            "vertex grid top {} lies below the image top {}",
            vertex_y.max(),
            fy.max()
        )));
    }
    let (nxv, nyv) = (vertex_x.n_samples(), vertex_y.n_samples());
    let dy = vertex_y.spacing();
    let dx = f.x_axis().spacing();
    let substeps = ray_substeps(geometry, dy, dx);
    // per fine step: horizontal ray offset in f's x index units, and advance in f's y index units
    let step_x = dy * geometry.tan_beta() / dx / substeps as f64;
    let step_y = dy / fy.spacing() / substeps as f64;

    let col_index: Vec<f64> = if vertex_x == *f.x_axis() {
        (0..nxv).map(|i| i as f64).collect()
    } else {
        vertex_x.coordinates().map(|x| f.x_axis().fractional_index(x)).collect()
    };
    let level_index: Vec<f64> = vertex_y.coordinates().map(|y| fy.fractional_index(y)).collect();

    // whether the stretch from level j up to level j + 1 touches a nonzero row of f
    let row_live: Vec<bool> = f
        .values()
        .chunks_exact(f.nx())
        .map(|row| row.iter().any(|&v| v != 0.0))
        .collect();
    let last_row = (f.ny() - 1) as f64;
    let live_between = |lo: f64, hi: f64| -> bool {
        if hi < 0.0 || lo > last_row {
            return false;
        }
        let a = lo.max(0.0).floor() as usize;
        let b = hi.min(last_row).ceil() as usize;
        row_live[a..=b].iter().any(|&v| v)
    };
    let interval_live: Vec<bool> = (0..nyv)
        .map(|j| {
            let hi = if j + 1 < nyv {
                level_index[j + 1]
            } else {
                level_index[j]
            };
            live_between(level_index[j], hi)
        })
        .collect();

    let scale = dy / substeps as f64 / geometry.cos_beta();
    let mut values = vec![0.0; nxv * nyv];
    values.par_chunks_mut(nxv).enumerate().for_each(|(jv, row)| {
        let last = (nyv - 1 - jv) * substeps;
        for (i, out) in row.iter_mut().enumerate() {
            let ci = col_index[i];
            let mut acc = 0.0;
            for j in jv..nyv {
                if !interval_live[j] {
                    continue;
                }
                let sub_end = if j + 1 == nyv { 1 } else { substeps };
                for s in 0..sub_end {
                    let m = (j - jv) * substeps + s;
                    let d = m as f64 * step_x;
                    let fj = level_index[j] + s as f64 * step_y;
                    let w = if m == 0 || m == last { 0.5 } else { 1.0 };
                    acc += w * (f.sample_index(ci + d, fj) + f.sample_index(ci - d, fj));
                }
            }
            *out = acc * scale;
        }
    });
    Ok(VLineProjection::new(
        RealGrid2D::from_parts(vertex_x, vertex_y, values),
        *geometry,
    ))
}

/// Exact inversion: forward difference in y, central second difference in x,
/// trapezoidal integration from each row to the top of the grid.
pub fn vline_invert(g: &VLineProjection) -> Result<RealGrid2D> {
    let grid = &g.grid;
    if grid.nx() < 3 || grid.ny() < 2 {
        return Err(CrtError::InvalidGrid(format!(
            "inversion needs n_x >= 3 and n_y >= 2, got {} x {}",
            grid.nx(),
            grid.ny()
        )));
    }
    let (nx, ny) = (grid.nx(), grid.ny());
    let g_y = diff_y_forward(grid)?;
    let g_xx = diff2_x_central(grid)?;
    let t2 = g.geometry.tan_beta().powi(2);
    let c = -0.5 * g.geometry.cos_beta();
    let h = grid.y_axis().spacing();

    let columns: Vec<Vec<f64>> = (0..nx)
        .into_par_iter()
        .map(|i| {
            let col: Vec<f64> = (0..ny).map(|j| g_xx.get(i, j)).collect();
            cumint_from_top(&col, h)
        })
        .collect::<Result<_>>()?;

    let mut out = vec![0.0; nx * ny];
    for j in 0..ny {
        for i in 0..nx {
            out[j * nx + i] = c * (g_y.get(i, j) + t2 * columns[i][j]);
        }
    }
    Ok(RealGrid2D::from_parts(*grid.x_axis(), *grid.y_axis(), out))
}

/// Row-wise DFT in x of `grid`, zero-padded to `len`, scaled by Δx so bins
/// approximate the continuous transform ∫ v(x) e^{−iλx} dx (x measured from
/// the first node).
fn rows_spectrum(grid: &RealGrid2D, len: usize, plans: &Plans) -> Vec<Complex64> {
    let nx = grid.nx();
    let dx = grid.x_axis().spacing();
    let mut out = vec![Complex64::default(); len * grid.ny()];
    for (src, dst) in grid.values().chunks_exact(nx).zip(out.chunks_exact_mut(len)) {
        for (d, &s) in dst.iter_mut().zip(src) {
            *d = Complex64::new(s * dx, 0.0);
        }
        plans.run(dst, false);
    }
    out
}

/// Forward V-line transform on `f`'s own grid computed per x-frequency.
///
/// `f` is zero-padded in x to `pad_factor × n_x` samples; the padding must be
/// wide enough that no ray reaches a periodic image of the support.
pub fn vline_spectral_oracle(f: &RealGrid2D, geometry: &ConeGeometry, pad_factor: usize) -> Result<VLineProjection> {
    ConeGeometry::new(geometry.beta())?;
    if pad_factor == 0 {
        return Err(CrtError::InvalidInput("pad factor must be at least 1".into()));
    }
    let (nx, ny) = (f.nx(), f.ny());
    let dx = f.x_axis().spacing();
    let dy = f.y_axis().spacing();
    let t = geometry.tan_beta();

    let support = (0..nx).filter(|&i| (0..ny).any(|j| f.get(i, j) != 0.0));
    let (mut lo, mut hi) = (usize::MAX, 0usize);
    for i in support {
        lo = lo.min(i);
        hi = hi.max(i);
    }
    if lo == usize::MAX {
        return Ok(VLineProjection::new(
            RealGrid2D::zeros(*f.x_axis(), *f.y_axis()),
            *geometry,
        ));
    }
    let len = pad_factor * nx;
    let period = len as f64 * dx;
    let span = hi.max(nx - 1 - lo) as f64 * dx;
    let reach = (ny - 1) as f64 * dy * t;
    if period - span < reach {
        return Err(CrtError::Precondition(format!(
            "zero padding too small: wrap distance {:.6} < ray reach {:.6}; increase the pad factor",
            period - span,
            reach
        )));
    }

    let plans = Plans::new(len);
    let mut g_hat = oracle_spectrum(f, geometry, len, &plans)?;
    let norm = 1.0 / (len as f64 * dx);
    let mut values = vec![0.0; nx * ny];
    for (src, dst) in g_hat.chunks_exact_mut(len).zip(values.chunks_exact_mut(nx)) {
        plans.run(src, true);
        for (d, s) in dst.iter_mut().zip(src.iter()) {
            *d = s.re * norm;
        }
    }
    Ok(VLineProjection::new(
        RealGrid2D::from_parts(*f.x_axis(), *f.y_axis(), values),
        *geometry,
    ))
}

/// ĝ_λ(y_v) = (2 / cos β) ∫_{y_v} f̂_λ(y) cos(λ (y − y_v) tan β) dy for every
/// bin of the `len`-point padded row transform, rows stacked.
fn oracle_spectrum(f: &RealGrid2D, geometry: &ConeGeometry, len: usize, plans: &Plans) -> Result<Vec<Complex64>> {
    let ny = f.ny();
    let dy = f.y_axis().spacing();
    let t = geometry.tan_beta();
    let f_hat = rows_spectrum(f, len, plans);
    let freq = crate::specfun::frequency_axis(len, f.x_axis().spacing())?;
    let scale = 2.0 * dy / geometry.cos_beta();

    let mut g_hat = vec![Complex64::default(); len * ny];
    g_hat.par_chunks_mut(len).enumerate().for_each(|(jv, row)| {
        for (k, out) in row.iter_mut().enumerate() {
            let lam = freq.frequency(k);
            let mut acc = Complex64::default();
            for j in jv..ny {
                let w = trapezoid_weight(j, jv, ny);
                let phase = (lam * (j - jv) as f64 * dy * t).cos();
                acc += f_hat[j * len + k] * (w * phase);
            }
            *out = acc * scale;
        }
    });
    Ok(g_hat)
}

/// Bins whose image energy falls below this fraction of the strongest bin are
/// skipped by [`fourier_relation_check`]; their relative residual is noise.
pub const RELATION_ENERGY_FLOOR: f64 = 1e-2;

/// Fourth-order first derivative: five-point central stencil in the interior,
/// second-order one-sided stencils at the two ends on each side.
fn derivative_4th(v: &[Complex64], h: f64) -> Vec<Complex64> {
    let n = v.len();
    let mut out = vec![Complex64::default(); n];
    for j in 2..n - 2 {
        out[j] = (v[j - 2] - v[j + 2] + (v[j + 1] - v[j - 1]) * 8.0) / (12.0 * h);
    }
    for j in [0, 1] {
        out[j] = (v[j + 1] * 4.0 - v[j] * 3.0 - v[j + 2]) / (2.0 * h);
    }
    for j in [n - 2, n - 1] {
        out[j] = (v[j] * 3.0 - v[j - 1] * 4.0 + v[j - 2]) / (2.0 * h);
    }
    out
}

/// Largest per-frequency relative residual of
/// `f̂_λ(z) = −G′_λ(z) + (λ tan β)² ∫_z^{y_max} G_λ`, with `G_λ = ĝ_λ cos β / 2`.
///
/// Derivatives and integrals in y are fourth-order accurate so the residual
/// reflects the data rather than the check. Only bins carrying at least
/// [`RELATION_ENERGY_FLOOR`] of the peak bin norm of f̂ are scored. If `f` is
/// identically zero the absolute norm of the right-hand side is returned
/// instead.
pub fn fourier_relation_check(f: &RealGrid2D, g: &VLineProjection) -> Result<f64> {
    if !f.same_axes(&g.grid) {
        return Err(CrtError::AxisMismatch("image and projection must share axes".into()));
    }
    let (nx, ny) = (f.nx(), f.ny());
    if ny < 5 {
        return Err(CrtError::InvalidGrid("relation check needs n_y >= 5".into()));
    }
    let dy = f.y_axis().spacing();
    let t = g.geometry.tan_beta();
    let plans = Plans::new(nx);
    let f_hat = rows_spectrum(f, nx, &plans);
    let g_hat = rows_spectrum(&g.grid, nx, &plans);
    let freq = crate::specfun::frequency_axis(nx, f.x_axis().spacing())?;
    let half_cos = 0.5 * g.geometry.cos_beta();

    let per_bin: Vec<(f64, f64)> = (0..nx)
        .into_par_iter()
        .map(|k| {
            let lhs: Vec<Complex64> = (0..ny).map(|j| f_hat[j * nx + k]).collect();
            let big_g: Vec<Complex64> = (0..ny).map(|j| g_hat[j * nx + k] * half_cos).collect();
            let deriv = derivative_4th(&big_g, dy);
            let trapezoid = cumint_from_top(&big_g, dy).expect("ny >= 5");
            let lt2 = (freq.frequency(k) * t).powi(2);
            let mut num = 0.0;
            let mut den = 0.0;
            for j in 0..ny {
                // Euler-Maclaurin end correction; G′ vanishes at the top
                let integral = trapezoid[j] + deriv[j] * (dy * dy / 12.0);
                let rhs = -deriv[j] + integral * lt2;
                num += (lhs[j] - rhs).norm_sqr();
                den += lhs[j].norm_sqr();
            }
            (num.sqrt(), den.sqrt())
        })
        .collect();

    let peak = per_bin.iter().map(|&(_, d)| d).fold(0.0, f64::max);
    if peak == 0.0 {
        return Ok(per_bin.iter().map(|&(n, _)| n).fold(0.0, f64::max));
    }
    Ok(per_bin
        .iter()
        .filter(|&&(_, d)| d >= RELATION_ENERGY_FLOOR * peak)
        .map(|&(n, d)| n / d)
        .fold(0.0, f64::max))
}
