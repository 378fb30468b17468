//! Smooth bump phantoms, the scene-file format describing them, and error
//! metrics for comparing reconstructions against ground truth.
//!
//! A bump of radius r centred at c is `exp(−r² / (r² − ρ²))` for ρ = |p − c| < r
//! and zero elsewhere. It is C∞ with compact support and peaks at e⁻¹.

use crate::error::{CrtError, Result};
use crate::grid::{AxisSpec, RealGrid2D, RealGrid3D};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BumpSpec {
    center: [f64; 3],
    dim: usize,
    radius: f64,
    intensity: f64,
}

impl BumpSpec {
    /// Panics unless `radius` is positive and everything is finite; use
    /// [`BumpSpec::try_new`] for untrusted input.
    pub fn new_2d(cx: f64, cy: f64, radius: f64, intensity: f64) -> Self {
        Self::try_new(&[cx, cy], radius, intensity).expect("invalid bump")
    }

    pub fn new_3d(cx: f64, cy: f64, cz: f64, radius: f64, intensity: f64) -> Self {
        Self::try_new(&[cx, cy, cz], radius, intensity).expect("invalid bump")
    }

    pub fn try_new(center: &[f64], radius: f64, intensity: f64) -> Result<Self> {
        if !(center.len() == 2 || center.len() == 3) {
            return Err(CrtError::InvalidSpec(format!(
                "bump center needs 2 or 3 coordinates, got {}",
                center.len()
            )));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(CrtError::InvalidSpec(format!(
                "bump radius must be positive, got {radius}"
            )));
        }
        if !intensity.is_finite() || center.iter().any(|c| !c.is_finite()) {
            return Err(CrtError::InvalidSpec("bump parameters must be finite".into()));
        }
        let mut c = [0.0; 3];
        c[..center.len()].copy_from_slice(center);
        Ok(Self {
            center: c,
            dim: center.len(),
            radius,
            intensity,
        })
    }

    pub fn center(&self) -> &[f64] {
        &self.center[..self.dim]
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn intensity(&self) -> f64 {
        self.intensity
    }

    /// Same bump with a different radius.
    pub fn with_radius(&self, radius: f64) -> Result<Self> {
        Self::try_new(self.center(), radius, self.intensity)
    }

    #[inline]
    fn profile(&self, rho2: f64) -> f64 {
        let r2 = self.radius * self.radius;
        if rho2 < r2 {
            self.intensity * (-r2 / (r2 - rho2)).exp()
        } else {
            0.0
        }
    }

    fn check_inside(&self, axes: &[&AxisSpec]) -> Result<()> {
        for (c, a) in self.center().iter().zip(axes) {
            if !(c - self.radius > a.min() && c + self.radius < a.max()) {
                return Err(CrtError::InvalidSpec(format!(
                    "bump at {:?} with radius {} leaves the grid [{}, {}]",
                    self.center(),
                    self.radius,
                    a.min(),
                    a.max()
                )));
            }
        }
        Ok(())
    }
}

/// Sum of 2D bumps sampled on `x_axis × y_axis`.
pub fn render_bumps_2d(specs: &[BumpSpec], x_axis: AxisSpec, y_axis: AxisSpec) -> Result<RealGrid2D> {
    for s in specs {
        if s.dim != 2 {
            return Err(CrtError::InvalidSpec("3D bump passed to the 2D renderer".into()));
        }
        s.check_inside(&[&x_axis, &y_axis])?;
    }
    Ok(RealGrid2D::from_fn(x_axis, y_axis, |x, y| {
        specs
            .iter()
            .map(|s| {
                let (dx, dy) = (x - s.center[0], y - s.center[1]);
                s.profile(dx * dx + dy * dy)
            })
            .sum()
    }))
}

/// Sum of 3D bumps sampled on the box spanned by `axes`.
pub fn render_bumps_3d(specs: &[BumpSpec], axes: [AxisSpec; 3]) -> Result<RealGrid3D> {
    for s in specs {
        if s.dim != 3 {
            return Err(CrtError::InvalidSpec("2D bump passed to the 3D renderer".into()));
        }
        s.check_inside(&[&axes[0], &axes[1], &axes[2]])?;
    }
    Ok(RealGrid3D::from_fn(axes[0], axes[1], axes[2], |x, y, z| {
        specs
            .iter()
            .map(|s| {
                let (dx, dy, dz) = (x - s.center[0], y - s.center[1], z - s.center[2]);
                s.profile(dx * dx + dy * dy + dz * dz)
            })
            .sum()
    }))
}

/// Parses a scene file: one bump per line as `cx cy [cz] r intensity`,
/// blank lines and `#` comments ignored. All bumps must share a dimension.
pub fn parse_scene(text: &str) -> Result<Vec<BumpSpec>> {
    let mut specs: Vec<BumpSpec> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let nums = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<f64>().map_err(|_| {
                    CrtError::InvalidSpec(format!("line {}: cannot parse '{tok}' as a number", lineno + 1))
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        let spec = match nums.len() {
            4 | 5 => {
                let (center, rest) = nums.split_at(nums.len() - 2);
                BumpSpec::try_new(center, rest[0], rest[1])
                    .map_err(|e| CrtError::InvalidSpec(format!("line {}: {e}", lineno + 1)))?
            }
            n => {
                return Err(CrtError::InvalidSpec(format!(
                    "line {}: expected 4 or 5 fields, got {n}",
                    lineno + 1
                )))
            }
        };
        if let Some(first) = specs.first() {
            if first.dim != spec.dim {
                return Err(CrtError::InvalidSpec(format!(
                    "line {}: mixes 2D and 3D bumps",
                    lineno + 1
                )));
            }
        }
        specs.push(spec);
    }
    if specs.is_empty() {
        return Err(CrtError::InvalidSpec("scene contains no bumps".into()));
    }
    Ok(specs)
}

/// Grids the metrics can compare.
pub trait SampledGrid {
    fn samples(&self) -> &[f64];
    fn axes_match(&self, other: &Self) -> bool;
}

impl SampledGrid for RealGrid2D {
    fn samples(&self) -> &[f64] {
        self.values()
    }

    fn axes_match(&self, other: &Self) -> bool {
        self.same_axes(other)
    }
}

impl SampledGrid for RealGrid3D {
    fn samples(&self) -> &[f64] {
        self.values()
    }

    fn axes_match(&self, other: &Self) -> bool {
        self.same_axes(other)
    }
}

fn check_axes<G: SampledGrid>(a: &G, b: &G) -> Result<()> {
    if a.axes_match(b) {
        Ok(())
    } else {
        Err(CrtError::AxisMismatch("compared grids must share axes".into()))
    }
}

/// ‖a − b‖₂ / ‖b‖₂, or ‖a‖₂ when b is identically zero.
pub fn relative_l2<G: SampledGrid>(a: &G, b: &G) -> Result<f64> {
    check_axes(a, b)?;
    relative_l2_slices(a.samples(), b.samples(), None)
}

/// [`relative_l2`] restricted to nodes where `mask` is set.
pub fn relative_l2_masked<G: SampledGrid>(a: &G, b: &G, mask: &[bool]) -> Result<f64> {
    check_axes(a, b)?;
    if mask.len() != a.samples().len() {
        return Err(CrtError::InvalidInput(format!(
            "mask has {} entries for {} samples",
            mask.len(),
            a.samples().len()
        )));
    }
    relative_l2_slices(a.samples(), b.samples(), Some(mask))
}

fn relative_l2_slices(a: &[f64], b: &[f64], mask: Option<&[bool]>) -> Result<f64> {
    let mut diff = 0.0;
    let mut norm_a = 0.0;
    let mut norm_b = 0.0;
    for (k, (&x, &y)) in a.iter().zip(b).enumerate() {
        if mask.is_some_and(|m| !m[k]) {
            continue;
        }
        diff += (x - y) * (x - y);
        norm_a += x * x;
        norm_b += y * y;
    }
    if norm_b == 0.0 {
        Ok(norm_a.sqrt())
    } else {
        Ok((diff / norm_b).sqrt())
    }
}

pub fn max_abs_error<G: SampledGrid>(a: &G, b: &G) -> Result<f64> {
    check_axes(a, b)?;
    Ok(a.samples()
        .iter()
        .zip(b.samples())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max))
}

/// Nodes within `margin` of any bump's support ball.
pub fn support_mask_2d(specs: &[BumpSpec], x_axis: &AxisSpec, y_axis: &AxisSpec, margin: f64) -> Vec<bool> {
    let mut mask = Vec::with_capacity(x_axis.n_samples() * y_axis.n_samples());
    for y in y_axis.coordinates() {
        for x in x_axis.coordinates() {
            mask.push(specs.iter().any(|s| {
                let (dx, dy) = (x - s.center[0], y - s.center[1]);
                (dx * dx + dy * dy).sqrt() <= s.radius + margin
            }));
        }
    }
    mask
}
