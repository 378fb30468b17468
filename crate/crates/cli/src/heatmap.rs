//! 8-bit binary graymaps (PGM, "P5") of 2D grids.

use std::fs;
use std::io;
use std::path::Path;

use crt_core::RealGrid2D;
use serde::Serialize;

/// Range mapped onto 0..=255.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HeatmapBounds {
    pub min: f64,
    pub max: f64,
}

/// Encodes `grid` min-max normalized, highest y row first so the image is
/// upright. A constant grid renders as uniform 128. Returns `None` if the
/// grid holds a non-finite value.
pub fn encode_p5(grid: &RealGrid2D) -> Option<(Vec<u8>, HeatmapBounds)> {
    let values = grid.values();
    if values.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let (nx, ny) = (grid.nx(), grid.ny());
    let mut out = format!("P5\n{nx} {ny}\n255\n").into_bytes();
    out.reserve(nx * ny);
    for j in (0..ny).rev() {
        for i in 0..nx {
            let px = if max > min {
                ((grid.get(i, j) - min) / (max - min) * 255.0).round() as u8
            } else {
                128
            };
            out.push(px);
        }
    }
    Some((out, HeatmapBounds { min, max }))
}

pub fn export_heatmap(grid: &RealGrid2D, path: &Path) -> io::Result<HeatmapBounds> {
    let (bytes, bounds) =
        encode_p5(grid).ok_or_else(|| io::Error::new(io::ErrorKind::InvalidData, "grid holds non-finite values"))?;
    fs::write(path, bytes)?;
    Ok(bounds)
}
