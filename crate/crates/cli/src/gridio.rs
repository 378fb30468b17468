//! Binary grid files.
//!
//! Layout, all little-endian:
//!
//! | bytes          | content                                  |
//! |----------------|------------------------------------------|
//! | 4              | magic `CRTG`                             |
//! | 2              | version (u16, currently 1)               |
//! | 2              | rank (u16, 2 or 3)                       |
//! | 4 × rank       | samples per axis (u32), x first          |
//! | 16 × rank      | axis min, max (f64 pairs), x first       |
//! | 8 × Π dims     | values (f64), x fastest                  |
//!
//! A rank-2 header is 16 bytes; rank 3 adds one more u32.

use std::fs;
use std::io;
use std::path::Path;

use crt_core::{AxisSpec, RealGrid2D, RealGrid3D};
use thiserror::Error;

pub const MAGIC: [u8; 4] = *b"CRTG";
pub const VERSION: u16 = 1;

/// A grid of either rank as stored on disk.
#[derive(Debug, Clone, PartialEq)]
pub enum Grid {
    Plane(RealGrid2D),
    Volume(RealGrid3D),
}

impl Grid {
    pub fn rank(&self) -> usize {
        match self {
            Grid::Plane(_) => 2,
            Grid::Volume(_) => 3,
        }
    }

    pub fn axes(&self) -> Vec<AxisSpec> {
        match self {
            Grid::Plane(g) => vec![*g.x_axis(), *g.y_axis()],
            Grid::Volume(g) => vec![*g.x_axis(), *g.y_axis(), *g.z_axis()],
        }
    }

    pub fn values(&self) -> &[f64] {
        match self {
            Grid::Plane(g) => g.values(),
            Grid::Volume(g) => g.values(),
        }
    }

    pub fn dims(&self) -> Vec<usize> {
        self.axes().iter().map(|a| a.n_samples()).collect()
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum FormatError {
    #[error("bad magic {found:?}, expected \"CRTG\"")]
    BadMagic { found: [u8; 4] },
    #[error("unsupported format version {0}")]
    UnsupportedVersion(u16),
    #[error("unsupported rank {0}, expected 2 or 3")]
    UnsupportedRank(u16),
    #[error("truncated at byte offset {offset}: {section} needs {needed} bytes, {available} left")]
    Truncated {
        offset: usize,
        section: &'static str,
        needed: usize,
        available: usize,
    },
    #[error("axis {axis} has {n} samples, at least 2 required")]
    BadDimension { axis: usize, n: u32 },
    #[error("axis {axis} bounds [{min}, {max}] are invalid")]
    BadBounds { axis: usize, min: f64, max: f64 },
    #[error("non-finite value at byte offset {offset}")]
    NonFinite { offset: usize },
    #[error("{extra} unexpected bytes after the payload at byte offset {offset}")]
    TrailingBytes { offset: usize, extra: usize },
}

#[derive(Debug, Error)]
pub enum ReadError {
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("{path}: {source}")]
    Format { path: String, source: FormatError },
}

pub fn encode(grid: &Grid) -> Vec<u8> {
    let axes = grid.axes();
    let values = grid.values();
    let mut out = Vec::with_capacity(8 + 20 * axes.len() + 8 * values.len());
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(axes.len() as u16).to_le_bytes());
    for a in &axes {
        out.extend_from_slice(&(a.n_samples() as u32).to_le_bytes());
    }
    for a in &axes {
        out.extend_from_slice(&a.min().to_le_bytes());
        out.extend_from_slice(&a.max().to_le_bytes());
    }
    for v in values {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

struct Cursor<'a> {
    bytes: &'a [u8],
    offset: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize, section: &'static str) -> Result<&'a [u8], FormatError> {
        let available = self.bytes.len() - self.offset;
        if available < n {
            return Err(FormatError::Truncated {
                offset: self.offset,
                section,
                needed: n,
                available,
            });
        }
        let s = &self.bytes[self.offset..self.offset + n];
        self.offset += n;
        Ok(s)
    }

    fn u16(&mut self, section: &'static str) -> Result<u16, FormatError> {
        Ok(u16::from_le_bytes(self.take(2, section)?.try_into().unwrap()))
    }

    fn u32(&mut self, section: &'static str) -> Result<u32, FormatError> {
        Ok(u32::from_le_bytes(self.take(4, section)?.try_into().unwrap()))
    }

    fn f64(&mut self, section: &'static str) -> Result<f64, FormatError> {
        Ok(f64::from_le_bytes(self.take(8, section)?.try_into().unwrap()))
    }
}

pub fn decode(bytes: &[u8]) -> Result<Grid, FormatError> {
    let mut c = Cursor { bytes, offset: 0 };
    let magic: [u8; 4] = c.take(4, "magic")?.try_into().unwrap();
    if magic != MAGIC {
        return Err(FormatError::BadMagic { found: magic });
    }
    let version = c.u16("version")?;
    if version != VERSION {
        return Err(FormatError::UnsupportedVersion(version));
    }
    let rank = c.u16("rank")?;
    if rank != 2 && rank != 3 {
        return Err(FormatError::UnsupportedRank(rank));
    }
    let mut dims = Vec::with_capacity(rank as usize);
    for axis in 0..rank as usize {
        let n = c.u32("dimensions")?;
        if n < 2 {
            return Err(FormatError::BadDimension { axis, n });
        }
        dims.push(n as usize);
    }
    let mut axes = Vec::with_capacity(rank as usize);
    for (axis, &n) in dims.iter().enumerate() {
        let min = c.f64("axis bounds")?;
        let max = c.f64("axis bounds")?;
        axes.push(AxisSpec::new(n, min, max).map_err(|_| FormatError::BadBounds { axis, min, max })?);
    }
    let count = dims
        .iter()
        .try_fold(1usize, |acc, &n| acc.checked_mul(n))
        .filter(|n| n.checked_mul(8).is_some());
    let Some(count) = count else {
        return Err(FormatError::Truncated {
            offset: c.offset,
            section: "payload",
            needed: usize::MAX,
            available: bytes.len() - c.offset,
        });
    };
    let start = c.offset;
    let payload = c.take(8 * count, "payload")?;
    let mut values = Vec::with_capacity(count);
    for (k, chunk) in payload.chunks_exact(8).enumerate() {
        let v = f64::from_le_bytes(chunk.try_into().unwrap());
        if !v.is_finite() {
            return Err(FormatError::NonFinite { offset: start + 8 * k });
        }
        values.push(v);
    }
    if c.offset != bytes.len() {
        return Err(FormatError::TrailingBytes {
            offset: c.offset,
            extra: bytes.len() - c.offset,
        });
    }
    // sizes and finiteness were checked above
    Ok(match rank {
        2 => Grid::Plane(RealGrid2D::new(axes[0], axes[1], values).expect("checked payload")),
        _ => Grid::Volume(RealGrid3D::new(axes[0], axes[1], axes[2], values).expect("checked payload")),
    })
}

pub fn write_grid(path: &Path, grid: &Grid) -> io::Result<()> {
    fs::write(path, encode(grid))
}

pub fn read_grid(path: &Path) -> Result<Grid, ReadError> {
    let shown = path.display().to_string();
    let bytes = fs::read(path).map_err(|source| ReadError::Io {
        path: shown.clone(),
        source,
    })?;
    decode(&bytes).map_err(|source| ReadError::Format { path: shown, source })
}

/// Text export: one `x,y[,z],value` row per node in file order, values with
/// 17 significant digits.
pub fn encode_csv(grid: &Grid) -> String {
    let axes = grid.axes();
    let mut out = String::new();
    out.push_str(match grid.rank() {
        2 => "x,y,value\n",
        _ => "x,y,z,value\n",
    });
    let (nx, ny) = (axes[0].n_samples(), axes[1].n_samples());
    for (q, v) in grid.values().iter().enumerate() {
        let (i, j, k) = (q % nx, (q / nx) % ny, q / (nx * ny));
        out.push_str(&format!(
            "{:.16e},{:.16e},",
            axes[0].coordinate(i),
            axes[1].coordinate(j)
        ));
        if grid.rank() == 3 {
            out.push_str(&format!("{:.16e},", axes[2].coordinate(k)));
        }
        out.push_str(&format!("{v:.16e}\n"));
    }
    out
}
