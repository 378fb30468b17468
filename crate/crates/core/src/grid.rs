//! Uniform grids, cone geometry and the calculus primitives shared by the
//! 2D and 3D transforms.
//!
//! Values are stored row-major with x varying fastest, then y, then z.
//! Points outside a grid's rectangle sample as zero: every function handled
//! here is assumed compactly supported inside its grid.

use std::ops::{Add, Mul, Sub};

use crate::error::{CrtError, Result};

/// Scalars the differencing and quadrature routines can operate on
/// (`f64` and `Complex64`).
pub trait Sample: Copy + Default + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {}

impl<T> Sample for T where T: Copy + Default + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T> {}

/// Fractional indices closer than this to an integer are snapped onto it, so
/// coordinates that coincide with grid nodes up to roundoff hit them exactly.
const SNAP: f64 = 1e-9;

/// A uniformly sampled coordinate axis from `min` to `max` inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisSpec {
    n_samples: usize,
    min: f64,
    max: f64,
}

impl AxisSpec {
    pub fn new(n_samples: usize, min: f64, max: f64) -> Result<Self> {
        if n_samples < 2 {
            return Err(CrtError::InvalidGrid(format!(
                "axis needs at least 2 samples, got {n_samples}"
            )));
        }
        if !(min.is_finite() && max.is_finite()) || max <= min {
            return Err(CrtError::InvalidGrid(format!(
                "axis bounds must be finite with max > min, got [{min}, {max}]"
            )));
        }
        Ok(Self { n_samples, min, max })
    }

    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    pub fn min(&self) -> f64 {
        self.min
    }

    pub fn max(&self) -> f64 {
        self.max
    }

    pub fn spacing(&self) -> f64 {
        (self.max - self.min) / (self.n_samples - 1) as f64
    }

    /// Coordinate of node `i`; the last node returns `max` exactly.
    pub fn coordinate(&self, i: usize) -> f64 {
        if i + 1 == self.n_samples {
            self.max
        } else {
            self.min + i as f64 * self.spacing()
        }
    }

    pub fn coordinates(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_samples).map(move |i| self.coordinate(i))
    }

    /// Same spacing and top coordinate, with `extra` additional nodes below `min`.
    pub fn extended_below(&self, extra: usize) -> AxisSpec {
        let h = self.spacing();
        AxisSpec {
            n_samples: self.n_samples + extra,
            min: self.min - extra as f64 * h,
            max: self.max,
        }
    }

    /// Position of `c` in index units (not range-checked).
    pub fn fractional_index(&self, c: f64) -> f64 {
        let t = (c - self.min) / self.spacing();
        let r = t.round();
        if (t - r).abs() < SNAP {
            r
        } else {
            t
        }
    }

    /// Index of the node nearest to `c`, clamped into the axis.
    pub fn nearest_index(&self, c: f64) -> usize {
        let t = self.fractional_index(c).round();
        t.clamp(0.0, (self.n_samples - 1) as f64) as usize
    }

    /// Lower node and weight of the upper node for linear interpolation at
    /// fractional index `t`, or `None` outside `[0, n-1]`.
    #[inline]
    pub(crate) fn bracket(&self, t: f64) -> Option<(usize, f64)> {
        let last = (self.n_samples - 1) as f64;
        // rounding noise must not push samples on the end nodes off the grid
        let t = if (-SNAP..0.0).contains(&t) {
            0.0
        } else if t > last && t <= last + SNAP {
            last
        } else {
            t
        };
        if !(0.0..=last).contains(&t) {
            return None;
        }
        let i0 = (t.floor() as usize).min(self.n_samples - 2);
        Some((i0, t - i0 as f64))
    }
}

/// Half-opening angle of the V-lines / cones; the central axis is vertical.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeGeometry {
    beta: f64,
    tan_beta: f64,
    cos_beta: f64,
}

impl ConeGeometry {
    pub fn new(beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta < std::f64::consts::FRAC_PI_2) {
            return Err(CrtError::Domain(format!(
                "half-opening angle must lie in (0, pi/2), got {beta}"
            )));
        }
        Ok(Self {
            beta,
            tan_beta: beta.tan(),
            cos_beta: beta.cos(),
        })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn tan_beta(&self) -> f64 {
        self.tan_beta
    }

    pub fn cos_beta(&self) -> f64 {
        self.cos_beta
    }
}

fn check_values(values: &[f64], expected: usize) -> Result<()> {
    if values.len() != expected {
        return Err(CrtError::InvalidGrid(format!(
            "expected {expected} values, got {}",
            values.len()
        )));
    }
    if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
        return Err(CrtError::InvalidGrid(format!("non-finite value at index {pos}")));
    }
    Ok(())
}

/// A real function sampled on an axis-aligned rectangle.
#[derive(Debug, Clone, PartialEq)]
pub struct RealGrid2D {
    x_axis: AxisSpec,
    y_axis: AxisSpec,
    values: Vec<f64>,
}

impl RealGrid2D {
    pub fn new(x_axis: AxisSpec, y_axis: AxisSpec, values: Vec<f64>) -> Result<Self> {
        check_values(&values, x_axis.n_samples() * y_axis.n_samples())?;
        Ok(Self { x_axis, y_axis, values })
    }

    pub fn zeros(x_axis: AxisSpec, y_axis: AxisSpec) -> Self {
        Self {
            x_axis,
            y_axis,
            values: vec![0.0; x_axis.n_samples() * y_axis.n_samples()],
        }
    }

    /// Samples `f(x, y)` at every node. Panics if `f` returns a non-finite value.
    pub fn from_fn(x_axis: AxisSpec, y_axis: AxisSpec, mut f: impl FnMut(f64, f64) -> f64) -> Self {
        let mut values = Vec::with_capacity(x_axis.n_samples() * y_axis.n_samples());
        for j in 0..y_axis.n_samples() {
            let y = y_axis.coordinate(j);
            for i in 0..x_axis.n_samples() {
                values.push(f(x_axis.coordinate(i), y));
            }
        }
        Self::new(x_axis, y_axis, values).expect("from_fn produced a non-finite value")
    }

    /// Internal constructor for values computed by this crate from finite inputs.
    pub(crate) fn from_parts(x_axis: AxisSpec, y_axis: AxisSpec, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), x_axis.n_samples() * y_axis.n_samples());
        Self { x_axis, y_axis, values }
    }

    pub fn x_axis(&self) -> &AxisSpec {
        &self.x_axis
    }

    pub fn y_axis(&self) -> &AxisSpec {
        &self.y_axis
    }

    pub fn nx(&self) -> usize {
        self.x_axis.n_samples()
    }

    pub fn ny(&self) -> usize {
        self.y_axis.n_samples()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.nx() + i]
    }

    pub fn same_axes(&self, other: &RealGrid2D) -> bool {
        self.x_axis == other.x_axis && self.y_axis == other.y_axis
    }

    /// Bilinear interpolation at fractional node indices; zero outside the grid.
    #[inline]
    pub fn sample_index(&self, fi: f64, fj: f64) -> f64 {
        let (Some((i0, wx)), Some((j0, wy))) = (self.x_axis.bracket(fi), self.y_axis.bracket(fj)) else {
            return 0.0;
        };
        let nx = self.nx();
        let row0 = j0 * nx + i0;
        let row1 = row0 + nx;
        let v00 = self.values[row0];
        let v10 = self.values[row0 + 1];
        let v01 = self.values[row1];
        let v11 = self.values[row1 + 1];
        (1.0 - wy) * ((1.0 - wx) * v00 + wx * v10) + wy * ((1.0 - wx) * v01 + wx * v11)
    }

    /// Rows `j_start..j_start + y_axis.n_samples()` of this grid, on `y_axis`.
    pub fn crop_rows(&self, j_start: usize, y_axis: AxisSpec) -> Result<RealGrid2D> {
        let nx = self.nx();
        let end = j_start + y_axis.n_samples();
        if end > self.ny() {
            return Err(CrtError::InvalidGrid(format!(
                "row range {j_start}..{end} exceeds {} rows",
                self.ny()
            )));
        }
        Ok(Self::from_parts(
            self.x_axis,
            y_axis,
            self.values[j_start * nx..end * nx].to_vec(),
        ))
    }
}

/// A real function sampled on an axis-aligned box.
#[derive(Debug, Clone, PartialEq)]
pub struct RealGrid3D {
    x_axis: AxisSpec,
    y_axis: AxisSpec,
    z_axis: AxisSpec,
    values: Vec<f64>,
}

impl RealGrid3D {
    pub fn new(x_axis: AxisSpec, y_axis: AxisSpec, z_axis: AxisSpec, values: Vec<f64>) -> Result<Self> {
        check_values(&values, x_axis.n_samples() * y_axis.n_samples() * z_axis.n_samples())?;
        Ok(Self {
            x_axis,
            y_axis,
            z_axis,
            values,
        })
    }

    pub fn zeros(x_axis: AxisSpec, y_axis: AxisSpec, z_axis: AxisSpec) -> Self {
        let n = x_axis.n_samples() * y_axis.n_samples() * z_axis.n_samples();
        Self {
            x_axis,
            y_axis,
            z_axis,
            values: vec![0.0; n],
        }
    }

    /// Samples `f(x, y, z)` at every node. Panics if `f` returns a non-finite value.
    pub fn from_fn(
        x_axis: AxisSpec,
        y_axis: AxisSpec,
        z_axis: AxisSpec,
        mut f: impl FnMut(f64, f64, f64) -> f64,
    ) -> Self {
        let mut values = Vec::with_capacity(x_axis.n_samples() * y_axis.n_samples() * z_axis.n_samples());
        for k in 0..z_axis.n_samples() {
            let z = z_axis.coordinate(k);
            for j in 0..y_axis.n_samples() {
                let y = y_axis.coordinate(j);
                for i in 0..x_axis.n_samples() {
                    values.push(f(x_axis.coordinate(i), y, z));
                }
            }
        }
        Self::new(x_axis, y_axis, z_axis, values).expect("from_fn produced a non-finite value")
    }

    pub(crate) fn from_parts(x_axis: AxisSpec, y_axis: AxisSpec, z_axis: AxisSpec, values: Vec<f64>) -> Self {
        debug_assert_eq!(
            values.len(),
            x_axis.n_samples() * y_axis.n_samples() * z_axis.n_samples()
        );
        Self {
            x_axis,
            y_axis,
            z_axis,
            values,
        }
    }

    pub fn x_axis(&self) -> &AxisSpec {
        &self.x_axis
    }

    pub fn y_axis(&self) -> &AxisSpec {
        &self.y_axis
    }

    pub fn z_axis(&self) -> &AxisSpec {
        &self.z_axis
    }

    pub fn nx(&self) -> usize {
        self.x_axis.n_samples()
    }

    pub fn ny(&self) -> usize {
        self.y_axis.n_samples()
    }

    pub fn nz(&self) -> usize {
        self.z_axis.n_samples()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.values[(k * self.ny() + j) * self.nx() + i]
    }

    pub fn same_axes(&self, other: &RealGrid3D) -> bool {
        self.x_axis == other.x_axis && self.y_axis == other.y_axis && self.z_axis == other.z_axis
    }

    /// The z-slice `k` as a 2D grid.
    pub fn slice_z(&self, k: usize) -> Result<RealGrid2D> {
        if k >= self.nz() {
            return Err(CrtError::Index {
                index: k,
                len: self.nz(),
            });
        }
        let plane = self.nx() * self.ny();
        Ok(RealGrid2D::from_parts(
            self.x_axis,
            self.y_axis,
            self.values[k * plane..(k + 1) * plane].to_vec(),
        ))
    }

    /// Bilinear interpolation inside slice `k` at fractional (x, y) indices.
    #[inline]
    pub(crate) fn sample_index_xy(&self, fi: f64, fj: f64, k: usize) -> f64 {
        let (Some((i0, wx)), Some((j0, wy))) = (self.x_axis.bracket(fi), self.y_axis.bracket(fj)) else {
            return 0.0;
        };
        let nx = self.nx();
        let row0 = (k * self.ny() + j0) * nx + i0;
        let row1 = row0 + nx;
        let v00 = self.values[row0];
        let v10 = self.values[row0 + 1];
        let v01 = self.values[row1];
        let v11 = self.values[row1 + 1];
        (1.0 - wy) * ((1.0 - wx) * v00 + wx * v10) + wy * ((1.0 - wx) * v01 + wx * v11)
    }
}

/// Bilinear interpolation of `grid` at `(x, y)`; zero outside the rectangle.
pub fn sample_linear_2d(grid: &RealGrid2D, x: f64, y: f64) -> f64 {
    grid.sample_index(grid.x_axis.fractional_index(x), grid.y_axis.fractional_index(y))
}

/// Bilinear interpolation within z-slice `z_index` of `volume`.
pub fn sample_linear_xy(volume: &RealGrid3D, x: f64, y: f64, z_index: usize) -> Result<f64> {
    if z_index >= volume.nz() {
        return Err(CrtError::Index {
            index: z_index,
            len: volume.nz(),
        });
    }
    Ok(volume.sample_index_xy(
        volume.x_axis.fractional_index(x),
        volume.y_axis.fractional_index(y),
        z_index,
    ))
}

/// First-order forward difference in y. The top row repeats the row below it.
pub fn diff_y_forward(grid: &RealGrid2D) -> Result<RealGrid2D> {
    let (nx, ny) = (grid.nx(), grid.ny());
    if ny < 2 {
        return Err(CrtError::InvalidGrid("forward difference in y needs n_y >= 2".into()));
    }
    let inv_h = 1.0 / grid.y_axis.spacing();
    let v = &grid.values;
    let mut out = vec![0.0; nx * ny];
    for j in 0..ny - 1 {
        for i in 0..nx {
            out[j * nx + i] = (v[(j + 1) * nx + i] - v[j * nx + i]) * inv_h;
        }
    }
    let (body, last) = out.split_at_mut((ny - 1) * nx);
    last.copy_from_slice(&body[(ny - 2) * nx..]);
    Ok(RealGrid2D::from_parts(grid.x_axis, grid.y_axis, out))
}

/// Second-order central second difference in x. Boundary columns repeat
/// their interior neighbour.
pub fn diff2_x_central(grid: &RealGrid2D) -> Result<RealGrid2D> {
    let (nx, ny) = (grid.nx(), grid.ny());
    if nx < 3 {
        return Err(CrtError::InvalidGrid(
            "central second difference in x needs n_x >= 3".into(),
        ));
    }
    let h = grid.x_axis.spacing();
    let inv_h2 = 1.0 / (h * h);
    let mut out = vec![0.0; nx * ny];
    for (row_in, row_out) in grid.values.chunks_exact(nx).zip(out.chunks_exact_mut(nx)) {
        for i in 1..nx - 1 {
            row_out[i] = (row_in[i - 1] - 2.0 * row_in[i] + row_in[i + 1]) * inv_h2;
        }
        row_out[0] = row_out[1];
        row_out[nx - 1] = row_out[nx - 2];
    }
    Ok(RealGrid2D::from_parts(grid.x_axis, grid.y_axis, out))
}

/// Trapezoidal integral from each sample to the last one: `out[k] ≈ ∫_{t_k}^{t_last}`.
pub fn cumint_from_top<T: Sample>(profile: &[T], spacing: f64) -> Result<Vec<T>> {
    if profile.len() < 2 {
        return Err(CrtError::InvalidInput(format!(
            "cumulative integral needs at least 2 samples, got {}",
            profile.len()
        )));
    }
    if !(spacing > 0.0 && spacing.is_finite()) {
        return Err(CrtError::InvalidInput(format!(
            "spacing must be positive, got {spacing}"
        )));
    }
    let n = profile.len();
    let half = 0.5 * spacing;
    let mut out = vec![T::default(); n];
    for k in (0..n - 1).rev() {
        out[k] = out[k + 1] + (profile[k] + profile[k + 1]) * half;
    }
    Ok(out)
}
