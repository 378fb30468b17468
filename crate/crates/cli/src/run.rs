//! Command execution.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crt_core::{
    cone_forward, cone_invert, fourier_relation_check, max_abs_error, parse_scene, relative_l2, relative_l2_masked,
    render_bumps_2d, render_bumps_3d, support_mask_2d, vline_forward, vline_invert, vline_spectral_oracle, AxisSpec,
    BumpSpec, ConeGeometry, CrtError, RealGrid2D, RealGrid3D, VLineProjection,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use thiserror::Error;

use crate::args::{Cli, Command, Common, SceneArgs};
use crate::gridio::{encode_csv, read_grid, write_grid, Grid};
use crate::heatmap::export_heatmap;
use crate::report::{HeatmapFile, OutputFile, Report};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Input(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn usage(e: CrtError) -> CliError {
    CliError::Usage(e.to_string())
}

fn input(e: CrtError) -> CliError {
    CliError::Input(e.to_string())
}

/// Sets the worker count from `CRT_THREADS` (unset or 0: all cores).
pub fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("CRT_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("CRT_THREADS must be a non-negative integer, got '{raw}'")))?;
    if n > 0 {
        // a pool built earlier in the same process keeps its size
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

struct Ctx {
    out: PathBuf,
    csv: bool,
    report: Report,
}

impl Ctx {
    fn new(command: &str, common: &Common) -> Result<Self> {
        fs::create_dir_all(&common.out).map_err(|e| CliError::Input(format!("{}: {e}", common.out.display())))?;
        let mut report = Report::new(command);
        report.param("beta", common.beta.radians);
        report.param("beta_text", common.beta.text.clone());
        report.param("seed", common.seed);
        Ok(Self {
            out: common.out.clone(),
            csv: common.csv,
            report,
        })
    }

    fn timed<T>(&mut self, stage: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let v = f();
        let ms = start.elapsed().as_secs_f64() * 1e3;
        eprintln!("crt: {stage} {:.1} ms", ms);
        self.report.timings_ms.insert(stage.to_string(), json!(ms));
        v
    }

    fn save(&mut self, name: &str, grid: Grid) -> Result<()> {
        finite(grid.values(), name)?;
        let file = format!("{name}.crtg");
        write_grid(&self.out.join(&file), &grid).map_err(|e| io_error(&self.out.join(&file), e))?;
        self.report.outputs.push(OutputFile {
            file,
            format: "crtg",
            dims: grid.dims(),
        });
        if self.csv {
            let file = format!("{name}.csv");
            let path = self.out.join(&file);
            fs::write(&path, encode_csv(&grid)).map_err(|e| io_error(&path, e))?;
            self.report.outputs.push(OutputFile {
                file,
                format: "csv",
                dims: grid.dims(),
            });
        }
        Ok(())
    }

    fn heatmap(&mut self, name: &str, source: &str, grid: &RealGrid2D) -> Result<()> {
        finite(grid.values(), name)?;
        let file = format!("{name}.pgm");
        let path = self.out.join(&file);
        let bounds = export_heatmap(grid, &path).map_err(|e| io_error(&path, e))?;
        self.report.heatmaps.push(HeatmapFile {
            file,
            source: source.to_string(),
            bounds,
        });
        Ok(())
    }

    fn finish(self) -> Result<Report> {
        let path = self.out.join("report.json");
        fs::write(&path, self.report.to_json()).map_err(|e| io_error(&path, e))?;
        Ok(self.report)
    }
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::Input(format!("{}: {e}", path.display()))
}

fn finite(values: &[f64], what: &str) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(k) => Err(CliError::Numerical(format!("{what}: non-finite value at index {k}"))),
        None => Ok(()),
    }
}

fn axes(common: &Common, dim: usize, ctx: &mut Ctx) -> Result<Vec<AxisSpec>> {
    let n = common.n.map(|n| n as usize).unwrap_or(if dim == 2 { 120 } else { 48 });
    let bounds = match &common.domain {
        Some(d) if d.0.len() == 2 * dim => d.0.clone(),
        Some(d) => {
            return Err(CliError::Usage(format!(
                "a {dim}D run needs {} domain bounds, got {}",
                2 * dim,
                d.0.len()
            )))
        }
        None => [-1.0, 1.0].repeat(dim),
    };
    ctx.report.param("n", n);
    ctx.report.param("domain", bounds.clone());
    bounds
        .chunks(2)
        .map(|b| AxisSpec::new(n, b[0], b[1]).map_err(usage))
        .collect()
}

fn scene(args: &SceneArgs, dim: Option<usize>, ctx: &mut Ctx) -> Result<Vec<BumpSpec>> {
    let specs = match &args.phantom {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
            let specs = parse_scene(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            if let Some(d) = dim {
                if specs[0].dim() != d {
                    return Err(CliError::Input(format!(
                        "{}: scene is {}D, command needs {d}D",
                        path.display(),
                        specs[0].dim()
                    )));
                }
            }
            ctx.report.param("phantom", path.display().to_string());
            specs
        }
        None => {
            let center: &[f64] = if dim == Some(3) { &[0.2, 0.1, 0.0] } else { &[0.2, 0.1] };
            vec![BumpSpec::try_new(center, args.radius, 1.0).map_err(usage)?]
        }
    };
    let listed: Vec<Value> = specs
        .iter()
        .map(|s| json!({ "center": s.center(), "radius": s.radius(), "intensity": s.intensity() }))
        .collect();
    ctx.report.param("bumps", listed);
    Ok(specs)
}

fn geometry(common: &Common) -> ConeGeometry {
    ConeGeometry::new(common.beta.radians).expect("angle validated by the parser")
}

fn slice_index(z: &AxisSpec, slice_z: Option<f64>) -> usize {
    z.nearest_index(slice_z.unwrap_or(0.5 * (z.min() + z.max())))
}

fn render_2d(specs: &[BumpSpec], a: &[AxisSpec], ctx: &mut Ctx) -> Result<RealGrid2D> {
    ctx.timed("render", || render_bumps_2d(specs, a[0], a[1]))
        .map_err(usage)
}

fn render_3d(specs: &[BumpSpec], a: &[AxisSpec], ctx: &mut Ctx) -> Result<RealGrid3D> {
    ctx.timed("render", || render_bumps_3d(specs, [a[0], a[1], a[2]]))
        .map_err(usage)
}

fn load_plane(path: &Path) -> Result<RealGrid2D> {
    match read_grid(path).map_err(|e| CliError::Input(e.to_string()))? {
        Grid::Plane(g) => Ok(g),
        Grid::Volume(_) => Err(CliError::Input(format!("{}: expected a 2D grid", path.display()))),
    }
}

fn load_volume(path: &Path) -> Result<RealGrid3D> {
    match read_grid(path).map_err(|e| CliError::Input(e.to_string()))? {
        Grid::Volume(g) => Ok(g),
        Grid::Plane(_) => Err(CliError::Input(format!("{}: expected a 3D grid", path.display()))),
    }
}

fn forward_2d(f: &RealGrid2D, geo: &ConeGeometry, extend: u32, ctx: &mut Ctx) -> Result<VLineProjection> {
    ctx.report.param("vertex_extend", extend);
    let vy = f.y_axis().extended_below(extend as usize);
    ctx.timed("forward", || vline_forward(f, geo, *f.x_axis(), vy))
        .map_err(usage)
}

fn save_slice(ctx: &mut Ctx, name: &str, source: &str, g: &RealGrid3D, k: usize) -> Result<()> {
    let slice = g.slice_z(k).map_err(usage)?;
    ctx.heatmap(name, source, &slice)
}

fn peak(values: &[f64]) -> f64 {
    values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
}

pub fn run(cli: Cli) -> Result<Report> {
    match cli.command {
        Command::Phantom(a) => {
            let mut ctx = Ctx::new("phantom", &a.common)?;
            let fixed = a.scene.phantom.is_none().then_some(a.dim as usize);
            let specs = scene(&a.scene, fixed, &mut ctx)?;
            let dim = specs[0].dim();
            let ax = axes(&a.common, dim, &mut ctx)?;
            if dim == 2 {
                let f = render_2d(&specs, &ax, &mut ctx)?;
                ctx.heatmap("phantom", "phantom", &f)?;
                ctx.report.metric("peak", peak(f.values()));
                ctx.save("phantom", Grid::Plane(f))?;
            } else {
                let f = render_3d(&specs, &ax, &mut ctx)?;
                let k = slice_index(&ax[2], a.slice.slice_z);
                ctx.report.param("slice_z", ax[2].coordinate(k));
                save_slice(&mut ctx, "phantom_slice", "phantom", &f, k)?;
                ctx.report.metric("peak", peak(f.values()));
                ctx.save("phantom", Grid::Volume(f))?;
            }
            ctx.finish()
        }
        Command::Forward2d(a) => {
            let mut ctx = Ctx::new("forward2d", &a.common)?;
            let f = match &a.input {
                Some(p) => {
                    ctx.report.param("input", p.display().to_string());
                    load_plane(p)?
                }
                None => {
                    let specs = scene(&a.scene, Some(2), &mut ctx)?;
                    let ax = axes(&a.common, 2, &mut ctx)?;
                    render_2d(&specs, &ax, &mut ctx)?
                }
            };
            let g = forward_2d(&f, &geometry(&a.common), a.vertex_extend, &mut ctx)?;
            ctx.heatmap("projection", "projection", g.grid())?;
            ctx.save("projection", Grid::Plane(g.into_grid()))?;
            ctx.finish()
        }
        Command::Invert2d(a) => {
            let mut ctx = Ctx::new("invert2d", &a.common)?;
            ctx.report.param("input", a.input.display().to_string());
            let g = VLineProjection::new(load_plane(&a.input)?, geometry(&a.common));
            let r = ctx.timed("invert", || vline_invert(&g)).map_err(input)?;
            ctx.heatmap("reconstruction", "reconstruction", &r)?;
            ctx.save("reconstruction", Grid::Plane(r))?;
            ctx.finish()
        }
        Command::Roundtrip2d(a) => {
            let mut ctx = Ctx::new("roundtrip2d", &a.common)?;
            let specs = scene(&a.scene, Some(2), &mut ctx)?;
            let ax = axes(&a.common, 2, &mut ctx)?;
            let f = render_2d(&specs, &ax, &mut ctx)?;
            let g = forward_2d(&f, &geometry(&a.common), a.vertex_extend, &mut ctx)?;
            let wide = ctx.timed("invert", || vline_invert(&g)).map_err(usage)?;
            finite(wide.values(), "reconstruction")?;
            let r = wide.crop_rows(a.vertex_extend as usize, ax[1]).map_err(usage)?;
            let mask = support_mask_2d(&specs, &ax[0], &ax[1], 2.0 * ax[0].spacing());
            let outside = r
                .values()
                .iter()
                .zip(&mask)
                .filter(|(_, m)| !**m)
                .map(|(v, _)| v.abs())
                .fold(0.0, f64::max);
            ctx.report.metric("relative_l2", relative_l2(&r, &f).map_err(usage)?);
            ctx.report
                .metric("relative_l2_support", relative_l2_masked(&r, &f, &mask).map_err(usage)?);
            ctx.report
                .metric("max_abs_error", max_abs_error(&r, &f).map_err(usage)?);
            ctx.report.metric("peak_phantom", peak(f.values()));
            ctx.report.metric("peak_reconstruction", peak(r.values()));
            ctx.report.metric("max_abs_outside_support", outside);
            ctx.heatmap("phantom", "phantom", &f)?;
            ctx.heatmap("projection", "projection", g.grid())?;
            ctx.heatmap("reconstruction", "reconstruction", &r)?;
            ctx.save("phantom", Grid::Plane(f))?;
            ctx.save("projection", Grid::Plane(g.into_grid()))?;
            ctx.save("reconstruction", Grid::Plane(r))?;
            ctx.finish()
        }
        Command::Forward3d(a) => {
            let mut ctx = Ctx::new("forward3d", &a.common)?;
            let f = match &a.input {
                Some(p) => {
                    ctx.report.param("input", p.display().to_string());
                    load_volume(p)?
                }
                None => {
                    let specs = scene(&a.scene, Some(3), &mut ctx)?;
                    let ax = axes(&a.common, 3, &mut ctx)?;
                    render_3d(&specs, &ax, &mut ctx)?
                }
            };
            let geo = geometry(&a.common);
            let g = ctx.timed("forward", || cone_forward(&f, &geo)).map_err(usage)?;
            let k = slice_index(g.z_axis(), a.slice.slice_z);
            ctx.report.param("slice_z", g.z_axis().coordinate(k));
            save_slice(&mut ctx, "projection_slice", "projection", &g, k)?;
            ctx.save("projection", Grid::Volume(g))?;
            ctx.finish()
        }
        Command::Invert3d(a) => {
            let mut ctx = Ctx::new("invert3d", &a.common)?;
            ctx.report.param("input", a.input.display().to_string());
            ctx.report.param("pad_factor", a.pad.pad_factor);
            let g = load_volume(&a.input)?;
            let geo = geometry(&a.common);
            let r = ctx
                .timed("invert", || cone_invert(&g, &geo, a.pad.pad_factor as usize))
                .map_err(input)?;
            let k = slice_index(r.z_axis(), a.slice.slice_z);
            ctx.report.param("slice_z", r.z_axis().coordinate(k));
            save_slice(&mut ctx, "reconstruction_slice", "reconstruction", &r, k)?;
            ctx.save("reconstruction", Grid::Volume(r))?;
            ctx.finish()
        }
        Command::Roundtrip3d(a) => {
            let mut ctx = Ctx::new("roundtrip3d", &a.common)?;
            ctx.report.param("pad_factor", a.pad.pad_factor);
            let specs = scene(&a.scene, Some(3), &mut ctx)?;
            let ax = axes(&a.common, 3, &mut ctx)?;
            let f = render_3d(&specs, &ax, &mut ctx)?;
            let geo = geometry(&a.common);
            let g = ctx.timed("forward", || cone_forward(&f, &geo)).map_err(usage)?;
            let r = ctx
                .timed("invert", || cone_invert(&g, &geo, a.pad.pad_factor as usize))
                .map_err(usage)?;
            finite(r.values(), "reconstruction")?;
            ctx.report.metric("relative_l2", relative_l2(&r, &f).map_err(usage)?);
            ctx.report
                .metric("max_abs_error", max_abs_error(&r, &f).map_err(usage)?);
            ctx.report.metric("peak_phantom", peak(f.values()));
            ctx.report.metric("peak_reconstruction", peak(r.values()));
            let k = slice_index(&ax[2], a.slice.slice_z);
            ctx.report.param("slice_z", ax[2].coordinate(k));
            save_slice(&mut ctx, "phantom_slice", "phantom", &f, k)?;
            save_slice(&mut ctx, "projection_slice", "projection", &g, k)?;
            save_slice(&mut ctx, "reconstruction_slice", "reconstruction", &r, k)?;
            ctx.save("phantom", Grid::Volume(f))?;
            ctx.save("projection", Grid::Volume(g))?;
            ctx.save("reconstruction", Grid::Volume(r))?;
            ctx.finish()
        }
        Command::OracleCheck(a) => {
            let mut ctx = Ctx::new("oracle-check", &a.common)?;
            ctx.report.param("pad_factor", a.pad.pad_factor);
            let specs = scene(&a.scene, Some(2), &mut ctx)?;
            let ax = axes(&a.common, 2, &mut ctx)?;
            let f = render_2d(&specs, &ax, &mut ctx)?;
            let geo = geometry(&a.common);
            let g = ctx
                .timed("forward", || vline_forward(&f, &geo, ax[0], ax[1]))
                .map_err(usage)?;
            let s = ctx
                .timed("spectral_oracle", || {
                    vline_spectral_oracle(&f, &geo, a.pad.pad_factor as usize)
                })
                .map_err(usage)?;
            finite(s.grid().values(), "spectral oracle")?;
            ctx.report.metric(
                "spectral_oracle_relative_l2",
                relative_l2(s.grid(), g.grid()).map_err(usage)?,
            );
            let residual = ctx
                .timed("relation", || fourier_relation_check(&f, &g))
                .map_err(usage)?;
            ctx.report.metric("fourier_relation_residual", residual);
            let lin = ctx.timed("linearity", || linearity_residual(&ax, &geo, a.common.seed))?;
            ctx.report.metric("linearity_residual", lin);
            ctx.save("projection", Grid::Plane(g.into_grid()))?;
            ctx.save("spectral_projection", Grid::Plane(s.into_grid()))?;
            ctx.finish()
        }
    }
}

/// max |F(a u + b v) − a F(u) − b F(v)| / max |F(a u + b v)| on seeded
/// random images.
fn linearity_residual(ax: &[AxisSpec], geo: &ConeGeometry, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut image = || RealGrid2D::from_fn(ax[0], ax[1], |_, _| rng.gen_range(-1.0..1.0));
    let (u, v) = (image(), image());
    let (s, t) = (1.7, -0.6);
    let mix = RealGrid2D::new(
        ax[0],
        ax[1],
        u.values().iter().zip(v.values()).map(|(x, y)| s * x + t * y).collect(),
    )
    .map_err(usage)?;
    let fwd = |g: &RealGrid2D| vline_forward(g, geo, ax[0], ax[1]).map(|p| p.into_grid().into_values());
    let (fu, fv, fm) = (
        fwd(&u).map_err(usage)?,
        fwd(&v).map_err(usage)?,
        fwd(&mix).map_err(usage)?,
    );
    let scale = fm.iter().fold(0.0_f64, |m, x| m.max(x.abs())).max(f64::MIN_POSITIVE);
    Ok(fm
        .iter()
        .zip(fu.iter().zip(&fv))
        .map(|(m, (x, y))| (m - s * x - t * y).abs())
        .fold(0.0, f64::max)
        / scale)
}
