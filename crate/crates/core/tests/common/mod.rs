//! Reference computations shared by the integration suites.
//!
//! Nothing here calls into the transform implementations: Bessel values come
//! from their integral representations and projections from direct quadrature
//! of the analytic phantom.

#![allow(dead_code)]

use std::f64::consts::PI;

use crt_core::{AxisSpec, BumpSpec, ConeGeometry};

/// J₀(x) = (1/2π) ∫₀^{2π} cos(x cos θ) dθ by the periodic trapezoid rule.
pub fn j0_quad(x: f64, nodes: usize) -> f64 {
    let h = 2.0 * PI / nodes as f64;
    (0..nodes).map(|k| (x * (k as f64 * h).cos()).cos()).sum::<f64>() / nodes as f64
}

/// J₁(x) = (1/2π) ∫₀^{2π} cos(θ − x sin θ) dθ by the periodic trapezoid rule.
pub fn j1_quad(x: f64, nodes: usize) -> f64 {
    let h = 2.0 * PI / nodes as f64;
    (0..nodes)
        .map(|k| {
            let th = k as f64 * h;
            (th - x * th.sin()).cos()
        })
        .sum::<f64>()
        / nodes as f64
}

/// Analytic value of a sum of bumps at a 2D or 3D point.
pub fn bump_value(specs: &[BumpSpec], p: &[f64]) -> f64 {
    specs
        .iter()
        .map(|s| {
            let r2 = s.radius() * s.radius();
            let d2: f64 = s.center().iter().zip(p).map(|(c, x)| (x - c) * (x - c)).sum();
            if d2 < r2 {
                s.intensity() * (-r2 / (r2 - d2)).exp()
            } else {
                0.0
            }
        })
        .sum()
}

/// V-line projection of analytic bumps at one vertex by marching both rays in
/// arclength steps of `step` up to height `y_top`.
pub fn vline_ray_march(specs: &[BumpSpec], geo: &ConeGeometry, xv: f64, yv: f64, y_top: f64, step: f64) -> f64 {
    if yv >= y_top {
        return 0.0;
    }
    let length = (y_top - yv) / geo.cos_beta();
    let n = (length / step).ceil() as usize;
    let h = length / n as f64;
    let (s, c) = geo.beta().sin_cos();
    let mut acc = 0.0;
    for k in 0..=n {
        let r = k as f64 * h;
        let w = if k == 0 || k == n { 0.5 } else { 1.0 };
        acc += w * (bump_value(specs, &[xv + r * s, yv + r * c]) + bump_value(specs, &[xv - r * s, yv + r * c]));
    }
    acc * h
}

/// Cone projection of analytic bumps at one vertex: trapezoid in z with `nz`
/// intervals up to `z_top`, `n_phi` angles on each circle.
pub fn cone_quadrature(
    specs: &[BumpSpec],
    geo: &ConeGeometry,
    v: [f64; 3],
    z_top: f64,
    nz: usize,
    n_phi: usize,
) -> f64 {
    if v[2] >= z_top {
        return 0.0;
    }
    let t = geo.tan_beta();
    let h = (z_top - v[2]) / nz as f64;
    let mut acc = 0.0;
    for k in 0..=nz {
        let dz = k as f64 * h;
        let r = dz * t;
        let w = if k == 0 || k == nz { 0.5 } else { 1.0 };
        let ring: f64 = (0..n_phi)
            .map(|q| {
                let phi = 2.0 * PI * q as f64 / n_phi as f64;
                bump_value(specs, &[v[0] + r * phi.cos(), v[1] + r * phi.sin(), v[2] + dz])
            })
            .sum::<f64>()
            * (2.0 * PI / n_phi as f64);
        // surface element: dl dz / cos β with dl = r dφ
        acc += w * ring * r;
    }
    acc * h / geo.cos_beta()
}

/// G(z_v) = ∫_{z_v}^{top} f(z) (z − z_v) J₀(u (z − z_v)) dz by fine trapezoid,
/// with J₀ from its integral representation tabulated on a fine grid.
pub fn volterra_data(f: impl Fn(f64) -> f64, support: (f64, f64), axis: &AxisSpec, u: f64, fine: usize) -> Vec<f64> {
    bessel_moment(f, support, axis, u, fine, true)
}

/// ∫_{z_v}^{top} f(z) [(z − z_v)] J₀(u (z − z_v)) dz, the bracket present when
/// `weighted` is set.
pub fn bessel_moment(
    f: impl Fn(f64) -> f64,
    support: (f64, f64),
    axis: &AxisSpec,
    u: f64,
    fine: usize,
    weighted: bool,
) -> Vec<f64> {
    // J₀ table on [0, u·span] with linear interpolation at spacing span/8192
    let span = axis.max() - axis.min();
    let table_n = 8192;
    let arg_max = (u * span).max(1e-12);
    let table: Vec<f64> = (0..=table_n)
        .map(|k| j0_quad(arg_max * k as f64 / table_n as f64, 256))
        .collect();
    let j0_interp = |a: f64| -> f64 {
        let t = a / arg_max * table_n as f64;
        let i = (t.floor() as usize).min(table_n - 1);
        let w = t - i as f64;
        (1.0 - w) * table[i] + w * table[i + 1]
    };
    axis.coordinates()
        .map(|zv| {
            let lo = zv.max(support.0);
            let hi = support.1;
            if lo >= hi {
                return 0.0;
            }
            let h = (hi - lo) / fine as f64;
            (0..=fine)
                .map(|k| {
                    let z = lo + k as f64 * h;
                    let w = if k == 0 || k == fine { 0.5 } else { 1.0 };
                    let lever = if weighted { z - zv } else { 1.0 };
                    w * f(z) * lever * j0_interp(u * (z - zv))
                })
                .sum::<f64>()
                * h
        })
        .collect()
}

pub fn rel_l2(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    let den: f64 = b.iter().map(|y| y * y).sum();
    (num / den).sqrt()
}

pub fn symmetric_axis(n: usize) -> AxisSpec {
    AxisSpec::new(n, -1.0, 1.0).unwrap()
}

pub fn fig4_bump() -> BumpSpec {
    BumpSpec::new_2d(0.2, 0.1, 0.25, 1.0)
}

pub fn bump_3d() -> BumpSpec {
    BumpSpec::new_3d(0.2, 0.1, 0.0, 0.25, 1.0)
}

pub fn table1_scene() -> Vec<BumpSpec> {
    vec![
        BumpSpec::new_2d(0.5, 0.3, 0.25, 3.0),
        BumpSpec::new_2d(-0.2, -0.2, 0.25, 4.0),
    ]
}
