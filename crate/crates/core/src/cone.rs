//! The 3D conical Radon transform over circular cones with vertical axis,
//! and its inversion frequency by frequency.
//!
//! After a 2D Fourier transform in (x_v, y_v) the transform decouples into
//! one Volterra equation per transverse frequency (λ, μ):
//!
//! ```text
//! G(z_v) = ∫_{z_v}^{z_max} f̂(z) (z − z_v) J₀(u (z − z_v)) dz,
//! G = cos β / (2π tan β) · ĝ,   u = tan β · √(λ² + μ²)
//! ```
//!
//! which is solved by
//!
//! ```text
//! f̂(t) = ∫_t^{z_max} J₀(u (t − x)) ℋ²(∫_x^{z_max} G) dx,   ℋ = d²/dx² + u²
//! ```
//!
//! At u = 0 the kernel degenerates to (z − z_v) and the solution is f̂ = G″.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{CrtError, Result};
use crate::fft::{fft2_plane, Plans};
use crate::grid::{cumint_from_top, AxisSpec, ConeGeometry, RealGrid3D, Sample};
use crate::specfun::{frequency_axis, j0, FrequencyAxis};

/// Per-slice 2D spectra, indexed `(kx, ky, z)` with `kx` fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralStack {
    x_freqs: FrequencyAxis,
    y_freqs: FrequencyAxis,
    z_axis: AxisSpec,
    values: Vec<Complex64>,
}

impl SpectralStack {
    pub fn x_freqs(&self) -> &FrequencyAxis {
        &self.x_freqs
    }

    pub fn y_freqs(&self) -> &FrequencyAxis {
        &self.y_freqs
    }

    pub fn z_axis(&self) -> &AxisSpec {
        &self.z_axis
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    fn nkx(&self) -> usize {
        self.x_freqs.n_samples()
    }

    fn nky(&self) -> usize {
        self.y_freqs.n_samples()
    }

    #[inline]
    pub fn get(&self, kx: usize, ky: usize, z: usize) -> Complex64 {
        self.values[(z * self.nky() + ky) * self.nkx() + kx]
    }

    /// Largest |v(−k) − conj v(k)| over the stack.
    pub fn conjugate_asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for z in 0..self.z_axis.n_samples() {
            for ky in 0..self.nky() {
                let my = self.y_freqs.mirror_bin(ky);
                for kx in 0..self.nkx() {
                    let mx = self.x_freqs.mirror_bin(kx);
                    worst = worst.max((self.get(mx, my, z) - self.get(kx, ky, z).conj()).norm());
                }
            }
        }
        worst
    }

    /// Σ |v|² for each z-slice.
    pub fn slice_energies(&self) -> Vec<f64> {
        let plane = self.nkx() * self.nky();
        self.values
            .chunks_exact(plane)
            .map(|s| s.iter().map(|c| c.norm_sqr()).sum())
            .collect()
    }
}

/// 2D DFT of every z-slice with the e^{−iλx} sign, scaled by Δx·Δy so bins
/// approximate the continuous transform (coordinates measured from the first
/// node of each axis).
pub fn dft2_slices(g: &RealGrid3D) -> SpectralStack {
    dft2_slices_padded(g, 1).expect("pad factor 1 is valid")
}

/// [`dft2_slices`] after zero-padding each slice to `pad_factor × (n_x, n_y)`.
pub fn dft2_slices_padded(g: &RealGrid3D, pad_factor: usize) -> Result<SpectralStack> {
    if pad_factor == 0 {
        return Err(CrtError::InvalidInput("pad factor must be at least 1".into()));
    }
    let (nx, ny, nz) = (g.nx(), g.ny(), g.nz());
    let (px, py) = (pad_factor * nx, pad_factor * ny);
    let (dx, dy) = (g.x_axis().spacing(), g.y_axis().spacing());
    let scale = dx * dy;
    let rows = Plans::new(px);
    let cols = Plans::new(py);
    let mut values = vec![Complex64::default(); px * py * nz];
    values.par_chunks_mut(px * py).enumerate().for_each(|(k, plane)| {
        for j in 0..ny {
            for i in 0..nx {
                plane[j * px + i] = Complex64::new(g.get(i, j, k) * scale, 0.0);
            }
        }
        fft2_plane(plane, px, py, &rows, &cols, false);
    });
    Ok(SpectralStack {
        x_freqs: frequency_axis(px, dx)?,
        y_freqs: frequency_axis(py, dy)?,
        z_axis: *g.z_axis(),
        values,
    })
}

/// Inverse of [`dft2_slices_padded`], cropped back to `nx × ny` and
/// reduced to the real part.
fn idft2_slices(mut stack: SpectralStack, x_axis: AxisSpec, y_axis: AxisSpec) -> RealGrid3D {
    let (px, py) = (stack.nkx(), stack.nky());
    let (nx, ny, nz) = (x_axis.n_samples(), y_axis.n_samples(), stack.z_axis.n_samples());
    let norm = 1.0 / (px as f64 * py as f64 * stack.x_freqs.spacing() * stack.y_freqs.spacing());
    let rows = Plans::new(px);
    let cols = Plans::new(py);
    let mut out = vec![0.0; nx * ny * nz];
    stack
        .values
        .par_chunks_mut(px * py)
        .zip(out.par_chunks_mut(nx * ny))
        .for_each(|(plane, dst)| {
            fft2_plane(plane, px, py, &rows, &cols, true);
            for j in 0..ny {
                for i in 0..nx {
                    dst[j * nx + i] = plane[j * px + i].re * norm;
                }
            }
        });
    RealGrid3D::from_parts(x_axis, y_axis, stack.z_axis, out)
}

/// Effective radial frequency of one transverse frequency pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelParams {
    u: f64,
    geometry: ConeGeometry,
}

impl KernelParams {
    pub fn new(geometry: ConeGeometry, lambda: f64, mu: f64) -> Self {
        Self {
            u: geometry.tan_beta() * lambda.hypot(mu),
            geometry,
        }
    }

    pub fn u(&self) -> f64 {
        self.u
    }

    pub fn geometry(&self) -> &ConeGeometry {
        &self.geometry
    }
}

/// K(z, z_v) = (2π tan β / cos β) (z − z_v) J₀(u (z − z_v)).
pub fn kernel_eval(params: &KernelParams, z: f64, z_v: f64) -> Result<f64> {
    if z.is_nan() || z_v.is_nan() || z < z_v {
        return Err(CrtError::Domain(format!(
            "kernel needs z >= z_v, got z = {z}, z_v = {z_v}"
        )));
    }
    let g = &params.geometry;
    let h = z - z_v;
    Ok(2.0 * PI * g.tan_beta() / g.cos_beta() * h * j0(params.u * h))
}

/// Central second difference with replicated boundary values.
fn second_difference<T: Sample>(profile: &[T], spacing: f64) -> Vec<T> {
    let n = profile.len();
    let inv_h2 = 1.0 / (spacing * spacing);
    let mut out = vec![T::default(); n];
    for k in 1..n - 1 {
        out[k] = (profile[k - 1] + profile[k + 1] - profile[k] * 2.0) * inv_h2;
    }
    out[0] = out[1];
    out[n - 1] = out[n - 2];
    out
}

/// ℋF = F″ + u²F, with F″ by central differences (replicated at the ends).
pub fn apply_h<T: Sample>(profile: &[T], spacing: f64, u: f64) -> Result<Vec<T>> {
    if profile.len() < 3 {
        return Err(CrtError::InvalidInput(format!(
            "operator H needs at least 3 samples, got {}",
            profile.len()
        )));
    }
    if spacing.is_nan() || spacing <= 0.0 {
        return Err(CrtError::InvalidInput(format!(
            "spacing must be positive, got {spacing}"
        )));
    }
    let u2 = u * u;
    let mut out = second_difference(profile, spacing);
    for (o, &p) in out.iter_mut().zip(profile) {
        *o = *o + p * u2;
    }
    Ok(out)
}

/// Recovers f̂(z) on `z_axis` from the normalized data G(z_v) of one frequency.
pub fn invert_frequency_profile<T: Sample>(g: &[T], z_axis: &AxisSpec, u: f64) -> Result<Vec<T>> {
    let n = g.len();
    if n < 5 || n != z_axis.n_samples() {
        return Err(CrtError::InvalidInput(format!(
            "profile of length {n} does not fit a z axis of {} samples (minimum 5)",
            z_axis.n_samples()
        )));
    }
    if !(u >= 0.0 && u.is_finite()) {
        return Err(CrtError::InvalidInput(format!(
            "u must be finite and non-negative, got {u}"
        )));
    }
    let h = z_axis.spacing();
    if u == 0.0 {
        return Ok(second_difference(g, h));
    }
    let p = cumint_from_top(g, h)?;
    let mut q = apply_h(&apply_h(&p, h, u)?, h, u)?;
    // The outer difference at indices 1 and n-2 reads the inner operator's
    // replicated ends, so only indices 2..n-2 carry a full five-point stencil.
    for k in [0, 1] {
        q[k] = q[2];
        q[n - 1 - k] = q[n - 3];
    }
    let bessel: Vec<f64> = (0..n).map(|k| j0(u * k as f64 * h)).collect();
    let mut out = vec![T::default(); n];
    for (m, o) in out.iter_mut().enumerate().take(n - 1) {
        // trapezoid over x_m..x_{n-1} of J0(u (t_m - x)) Q(x)
        let mut acc = q[m] * (0.5 * bessel[0]) + q[n - 1] * (0.5 * bessel[n - 1 - m]);
        for x in m + 1..n - 1 {
            acc = acc + q[x] * bessel[x - m];
        }
        *o = acc * h;
    }
    Ok(out)
}

/// Angular sample count on a circle of radius `r` (in x units): at least 16,
/// about one sample per grid cell of arc, and a multiple of 4 so the sample
/// set is invariant under quarter turns and mirror reflections.
fn angular_samples(r: f64, dx: f64) -> usize {
    let n = ((2.0 * PI * r / dx).ceil() as usize).max(16);
    n.div_ceil(4) * 4
}

/// Forward cone transform of `f`, with vertices at every node of `f`'s grid.
///
/// The surface integral is split into circles: trapezoid in z over grid
/// levels, a uniform angular mean on each circle (radius (z − z_v) tan β),
/// bilinear sampling within the z-slice.
pub fn cone_forward(f: &RealGrid3D, geometry: &ConeGeometry) -> Result<RealGrid3D> {
    ConeGeometry::new(geometry.beta())?;
    let (nx, ny, nz) = (f.nx(), f.ny(), f.nz());
    let (dx, dy, dz) = (f.x_axis().spacing(), f.y_axis().spacing(), f.z_axis().spacing());
    let t = geometry.tan_beta();

    // circle offsets in index units for each level offset m = k - k_v
    let circles: Vec<Vec<(f64, f64)>> = (0..nz)
        .map(|m| {
            let r = m as f64 * dz * t;
            if m == 0 {
                return vec![(0.0, 0.0)];
            }
            let n_phi = angular_samples(r, dx.min(dy));
            (0..n_phi)
                .map(|q| {
                    let phi = 2.0 * PI * q as f64 / n_phi as f64;
                    (r * phi.cos() / dx, r * phi.sin() / dy)
                })
                .collect()
        })
        .collect();

    // bounding box of nonzero nodes per slice, in index units
    let plane = nx * ny;
    let boxes: Vec<Option<[f64; 4]>> = (0..nz)
        .map(|k| {
            let mut b: Option<[f64; 4]> = None;
            for j in 0..ny {
                for i in 0..nx {
                    if f.values()[k * plane + j * nx + i] != 0.0 {
                        let (fi, fj) = (i as f64, j as f64);
                        b = Some(match b {
                            None => [fi, fi, fj, fj],
                            Some([a, c, d, e]) => [a.min(fi), c.max(fi), d.min(fj), e.max(fj)],
                        });
                    }
                }
            }
            b
        })
        .collect();

    let mut values = vec![0.0; nx * ny * nz];
    values.par_chunks_mut(nx).enumerate().for_each(|(row, out)| {
        let (jv, kv) = (row % ny, row / ny);
        for (iv, o) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (k, bbox) in boxes.iter().enumerate().skip(kv) {
                let Some([x0, x1, y0, y1]) = *bbox else { continue };
                let m = k - kv;
                let circle = &circles[m];
                let ri = circle[0].0.abs().max(circle[0].1.abs()) + 1.0;
                let (ci, cj) = (iv as f64, jv as f64);
                // circle's index-space radius is ri - 1 (first sample at φ = 0)
                if ci + ri < x0 || ci - ri > x1 + 1.0 || cj + ri < y0 || cj - ri > y1 + 1.0 {
                    continue;
                }
                let mean = circle
                    .iter()
                    .map(|&(ox, oy)| f.sample_index_xy(ci + ox, cj + oy, k))
                    .sum::<f64>()
                    / circle.len() as f64;
                let w = if k == kv || k + 1 == nz { 0.5 } else { 1.0 };
                acc += w * m as f64 * dz * mean;
            }
            *o = acc * 2.0 * PI * dz * t / geometry.cos_beta();
        }
    });
    Ok(RealGrid3D::from_parts(*f.x_axis(), *f.y_axis(), *f.z_axis(), values))
}

/// Inverts cone data on `g`'s grid: zero-padded slice DFTs, per-frequency
/// profile inversion, inverse DFTs. Frequencies outside the transverse
/// Nyquist circle are discarded.
pub fn cone_invert(g: &RealGrid3D, geometry: &ConeGeometry, pad_factor: usize) -> Result<RealGrid3D> {
    ConeGeometry::new(geometry.beta())?;
    if g.nx() < 4 || g.ny() < 4 || g.nz() < 5 {
        return Err(CrtError::InvalidGrid(format!(
            "cone inversion needs n_x, n_y >= 4 and n_z >= 5, got {} x {} x {}",
            g.nx(),
            g.ny(),
            g.nz()
        )));
    }
    let mut stack = dft2_slices_padded(g, pad_factor)?;
    let (nkx, nky, nz) = (stack.nkx(), stack.nky(), g.nz());
    let plane = nkx * nky;
    let nyquist = stack.x_freqs.nyquist().min(stack.y_freqs.nyquist());
    let normalization = geometry.cos_beta() / (2.0 * PI * geometry.tan_beta());
    let z_axis = *g.z_axis();

    let profiles: Vec<Vec<Complex64>> = (0..plane)
        .into_par_iter()
        .map(|bin| {
            let (kx, ky) = (bin % nkx, bin / nkx);
            let (lam, mu) = (stack.x_freqs.frequency(kx), stack.y_freqs.frequency(ky));
            if lam.hypot(mu) > nyquist {
                return Ok(vec![Complex64::default(); nz]);
            }
            let params = KernelParams::new(*geometry, lam, mu);
            let big_g: Vec<Complex64> = (0..nz).map(|z| stack.values[z * plane + bin] * normalization).collect();
            invert_frequency_profile(&big_g, &z_axis, params.u())
        })
        .collect::<Result<_>>()?;

    for (bin, prof) in profiles.into_iter().enumerate() {
        for (z, v) in prof.into_iter().enumerate() {
            stack.values[z * plane + bin] = v;
        }
    }
    Ok(idft2_slices(stack, *g.x_axis(), *g.y_axis()))
}
