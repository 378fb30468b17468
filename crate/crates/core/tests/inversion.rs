mod common;

use std::f64::consts::PI;

use common::*;
use crt_core::*;

fn fhat(z: f64) -> f64 {
    let d2 = (z - 0.1) * (z - 0.1);
    if d2 < 0.25 {
        (-0.25 / (0.25 - d2)).exp()
    } else {
        0.0
    }
}

#[test]
fn profile_inversion_recovers_transform() {
    let z = symmetric_axis(512);
    let truth: Vec<f64> = z.coordinates().map(fhat).collect();
    for u in [0.0, 0.5, 3.0, 10.0] {
        let g = volterra_data(fhat, (-0.4, 0.6), &z, u, 20_000);
        let out = invert_frequency_profile(&g, &z, u).unwrap();
        let e = rel_l2(&out, &truth);
        assert!(e <= 1e-2, "u {u}: {e}");
    }
}

#[test]
fn profile_inversion_handles_complex_profiles() {
    let z = symmetric_axis(256);
    let u = 2.0;
    let g = volterra_data(fhat, (-0.4, 0.6), &z, u, 8_000);
    let phase = Complex64::from_polar(1.0, 0.7);
    let gc: Vec<Complex64> = g.iter().map(|&v| phase * v).collect();
    let real = invert_frequency_profile(&g, &z, u).unwrap();
    let cplx = invert_frequency_profile(&gc, &z, u).unwrap();
    for (r, c) in real.iter().zip(&cplx) {
        assert!((phase * *r - c).norm() <= 1e-8);
    }
}

#[test]
fn dc_bin_is_continuous_with_neighbours() {
    let z = symmetric_axis(256);
    let g0 = volterra_data(fhat, (-0.4, 0.6), &z, 0.0, 8_000);
    let g1 = volterra_data(fhat, (-0.4, 0.6), &z, 1e-3, 8_000);
    let a = invert_frequency_profile(&g0, &z, 0.0).unwrap();
    let b = invert_frequency_profile(&g1, &z, 1e-3).unwrap();
    assert!(rel_l2(&a, &b) <= 1e-3);
}

#[test]
fn operator_identity_converges() {
    // ℋ(∫_x G) = ∫_x f̂(z) J₀(u (z − x)) dz
    let u = 4.0;
    let mut last = f64::INFINITY;
    for n in [128, 256, 512] {
        let z = symmetric_axis(n);
        let g = volterra_data(fhat, (-0.4, 0.6), &z, u, 20_000);
        let p = cumint_from_top(&g, z.spacing()).unwrap();
        let lhs = apply_h(&p, z.spacing(), u).unwrap();
        let rhs = bessel_moment(fhat, (-0.4, 0.6), &z, u, 20_000, false);
        // interior samples; the ends carry one-sided stencils
        let e = rel_l2(&lhs[2..n - 2], &rhs[2..n - 2]);
        assert!(e < last, "n {n}: {e} after {last}");
        last = e;
    }
    assert!(last <= 1e-3, "{last}");
}

#[test]
fn fourier_relation_holds_for_forward_data() {
    let geo = ConeGeometry::new(PI / 8.0).unwrap();
    // shadow of this bump stays inside the grid in x
    let specs = [BumpSpec::new_2d(0.0, 0.4, 0.25, 1.0)];
    let mut last = f64::INFINITY;
    for n in [120, 240] {
        let a = symmetric_axis(n);
        let f = render_bumps_2d(&specs, a, a).unwrap();
        let g = vline_forward(&f, &geo, a, a).unwrap();
        let r = fourier_relation_check(&f, &g).unwrap();
        assert!(r < last, "n {n}: {r}");
        last = r;
    }
    assert!(last <= 0.05, "{last}");

    let a = symmetric_axis(120);
    let f = render_bumps_2d(&specs, a, a).unwrap();
    let shifted = render_bumps_2d(&[BumpSpec::new_2d(0.0, 0.1, 0.25, 1.0)], a, a).unwrap();
    let g = vline_forward(&shifted, &geo, a, a).unwrap();
    assert!(fourier_relation_check(&f, &g).unwrap() > 0.5);
}

#[test]
fn vline_round_trip_converges() {
    let geo = ConeGeometry::new(PI / 8.0).unwrap();
    let specs = [fig4_bump()];
    let mut errors = Vec::new();
    for n in [60, 120, 240] {
        let a = symmetric_axis(n);
        let f = render_bumps_2d(&specs, a, a).unwrap();
        let r = vline_invert(&vline_forward(&f, &geo, a, a).unwrap()).unwrap();
        errors.push(relative_l2(&r, &f).unwrap());
    }
    assert!(errors[0] > errors[1] && errors[1] > errors[2], "{errors:?}");
    assert!(errors[1] <= 0.15);
}

#[test]
fn extended_vertex_grid_inverts_the_same() {
    let geo = ConeGeometry::new(PI / 8.0).unwrap();
    let a = symmetric_axis(60);
    let f = render_bumps_2d(&[fig4_bump()], a, a).unwrap();
    let plain = vline_invert(&vline_forward(&f, &geo, a, a).unwrap()).unwrap();
    let wide = vline_invert(&vline_forward(&f, &geo, a, a.extended_below(10)).unwrap()).unwrap();
    let tail = wide.crop_rows(10, a).unwrap();
    assert!(max_abs_error(&tail, &plain).unwrap() <= 1e-12);
}

#[test]
fn cone_round_trip_converges() {
    let geo = ConeGeometry::new(PI / 8.0).unwrap();
    let specs = [bump_3d()];
    let mut errors = Vec::new();
    for n in [32, 48, 64] {
        let a = symmetric_axis(n);
        let f = render_bumps_3d(&specs, [a, a, a]).unwrap();
        let r = cone_invert(&cone_forward(&f, &geo).unwrap(), &geo, 2).unwrap();
        errors.push(relative_l2(&r, &f).unwrap());
    }
    assert!(errors[0] > errors[1] && errors[1] > errors[2], "{errors:?}");
    assert!(errors[1] <= 0.25);
}
