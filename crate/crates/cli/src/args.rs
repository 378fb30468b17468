//! Command-line surface.

use std::f64::consts::{FRAC_PI_2, PI};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "crt",
    version,
    about = "Conical Radon transforms: phantoms, projections, exact inversion"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Render a bump phantom.
    Phantom(PhantomArgs),
    /// V-line projections of a 2D phantom.
    Forward2d(Forward2dArgs),
    /// Reconstruct a 2D image from V-line projections.
    Invert2d(InvertArgs),
    /// Render, project and reconstruct a 2D phantom; report the error.
    Roundtrip2d(Roundtrip2dArgs),
    /// Cone projections of a 3D phantom.
    Forward3d(Forward3dArgs),
    /// Reconstruct a 3D volume from cone projections.
    Invert3d(Invert3dArgs),
    /// Render, project and reconstruct a 3D phantom; report the error.
    Roundtrip3d(Roundtrip3dArgs),
    /// Compare the 2D projector with its independent references.
    OracleCheck(OracleArgs),
}

/// Half-opening angle, keeping the text it was given as.
#[derive(Debug, Clone, PartialEq)]
pub struct Angle {
    pub radians: f64,
    pub text: String,
}

/// Accepts plain radians, `pi/<k>` or `<m>pi/<k>`.
pub fn parse_angle(s: &str) -> Result<Angle, String> {
    let t = s.trim();
    let radians = if let Some((head, tail)) = t.split_once("pi/") {
        let k: f64 = tail.parse().map_err(|_| format!("cannot parse divisor in '{s}'"))?;
        let m: f64 = match head.trim_end_matches('*') {
            "" => 1.0,
            h => h.parse().map_err(|_| format!("cannot parse multiplier in '{s}'"))?,
        };
        m * PI / k
    } else {
        t.parse::<f64>()
            .map_err(|_| format!("'{s}' is neither radians nor pi/<k>"))?
    };
    if !(radians > 0.0 && radians < FRAC_PI_2) {
        return Err(format!("angle {radians} rad lies outside (0, pi/2)"));
    }
    Ok(Angle {
        radians,
        text: t.to_string(),
    })
}

/// Axis bounds as consecutive (min, max) pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct Domain(pub Vec<f64>);

/// Comma-separated bounds: `xmin,xmax,ymin,ymax[,zmin,zmax]`.
pub fn parse_domain(s: &str) -> Result<Domain, String> {
    let v = s
        .split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| format!("cannot parse '{p}' in domain"))
        })
        .collect::<Result<Vec<f64>, String>>()?;
    if v.len() != 4 && v.len() != 6 {
        return Err(format!("domain needs 4 or 6 numbers, got {}", v.len()));
    }
    for pair in v.chunks(2) {
        if !(pair[0].is_finite() && pair[1].is_finite() && pair[0] < pair[1]) {
            return Err(format!("domain interval [{}, {}] is empty", pair[0], pair[1]));
        }
    }
    Ok(Domain(v))
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Half-opening angle: radians or pi/<k>.
    #[arg(long, default_value = "pi/8", value_parser = parse_angle)]
    pub beta: Angle,
    /// Samples per axis (default 120 in 2D, 48 in 3D).
    #[arg(long, value_parser = clap::value_parser!(u32).range(8..))]
    pub n: Option<u32>,
    /// Bounds xmin,xmax,ymin,ymax[,zmin,zmax]; defaults to [-1, 1] per axis.
    #[arg(long, value_parser = parse_domain, allow_hyphen_values = true)]
    pub domain: Option<Domain>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Seed for randomized checks.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also write each grid as CSV.
    #[arg(long)]
    pub csv: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SceneArgs {
    /// Scene file, one bump per line: cx cy [cz] radius intensity.
    #[arg(long, visible_alias = "scene")]
    pub phantom: Option<PathBuf>,
    /// Radius of the built-in bump used when no scene is given.
    #[arg(long, default_value_t = 0.25)]
    pub radius: f64,
}

#[derive(Debug, Clone, Args)]
pub struct PadArgs {
    /// Zero-padding factor of the transverse spectra.
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..=4))]
    pub pad_factor: u32,
}

#[derive(Debug, Clone, Args)]
pub struct SliceArgs {
    /// Height of the z-slice exported as heatmap (default: mid-domain).
    #[arg(long, allow_hyphen_values = true)]
    pub slice_z: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct PhantomArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub scene: SceneArgs,
    #[command(flatten)]
    pub slice: SliceArgs,
    /// Phantom dimension when no scene file fixes it.
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(2..=3))]
    pub dim: u8,
}

#[derive(Debug, Clone, Args)]
pub struct Forward2dArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub scene: SceneArgs,
    /// Phantom grid file; rendered from the scene when absent.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Extra vertex rows below the image.
    #[arg(long, default_value_t = 0)]
    pub vertex_extend: u32,
}

#[derive(Debug, Clone, Args)]
pub struct InvertArgs {
    #[command(flatten)]
    pub common: Common,
    /// Projection grid file.
    #[arg(long)]
    pub input: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct Roundtrip2dArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub scene: SceneArgs,
    /// Extra vertex rows below the image.
    #[arg(long, default_value_t = 0)]
    pub vertex_extend: u32,
}

#[derive(Debug, Clone, Args)]
pub struct Forward3dArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub scene: SceneArgs,
    #[command(flatten)]
    pub slice: SliceArgs,
    /// Phantom grid file; rendered from the scene when absent.
    #[arg(long)]
    pub input: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct Invert3dArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub pad: PadArgs,
    #[command(flatten)]
    pub slice: SliceArgs,
    /// Projection grid file.
    #[arg(long)]
    pub input: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct Roundtrip3dArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub scene: SceneArgs,
    #[command(flatten)]
    pub pad: PadArgs,
    #[command(flatten)]
    pub slice: SliceArgs,
}

#[derive(Debug, Clone, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub scene: SceneArgs,
    #[command(flatten)]
    pub pad: PadArgs,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angles() {
        assert!((parse_angle("pi/8").unwrap().radians - PI / 8.0).abs() < 1e-15);
        assert!((parse_angle("3pi/8").unwrap().radians - 3.0 * PI / 8.0).abs() < 1e-15);
        assert!((parse_angle("0.3").unwrap().radians - 0.3).abs() < 1e-15);
        assert!(parse_angle("pi/2").is_err());
        assert!(parse_angle("0").is_err());
        assert!(parse_angle("pi/x").is_err());
        assert!(parse_angle("degrees").is_err());
    }

    #[test]
    fn domains() {
        assert_eq!(parse_domain("-1,1,-2,2").unwrap().0, vec![-1.0, 1.0, -2.0, 2.0]);
        assert!(parse_domain("0,1,0").is_err());
        assert!(parse_domain("1,0,0,1").is_err());
    }
}
