use crt_cli::{decode, encode, encode_csv, read_grid, write_grid, FormatError, Grid};
use crt_core::{AxisSpec, RealGrid2D, RealGrid3D};
use proptest::prelude::*;

fn plane(nx: usize, ny: usize, values: Vec<f64>) -> Grid {
    let (x, y) = (
        AxisSpec::new(nx, -1.0, 1.0).unwrap(),
        AxisSpec::new(ny, -0.5, 2.0).unwrap(),
    );
    Grid::Plane(RealGrid2D::new(x, y, values).unwrap())
}

fn volume(n: usize, values: Vec<f64>) -> Grid {
    let a = AxisSpec::new(n, -1.0, 1.0).unwrap();
    Grid::Volume(RealGrid3D::new(a, a, AxisSpec::new(n, 0.0, 3.0).unwrap(), values).unwrap())
}

fn same_bits(a: &Grid, b: &Grid) -> bool {
    a.axes() == b.axes()
        && a.values()
            .iter()
            .zip(b.values())
            .all(|(x, y)| x.to_bits() == y.to_bits())
}

proptest! {
    #[test]
    fn round_trip_is_bit_exact(nx in 2usize..9, ny in 2usize..9, seed in any::<u64>()) {
        let mut s = seed;
        let values: Vec<f64> = (0..nx * ny)
            .map(|_| {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let v = f64::from_bits(s);
                if v.is_finite() { v } else { -0.0 }
            })
            .collect();
        let g = plane(nx, ny, values);
        prop_assert!(same_bits(&decode(&encode(&g)).unwrap(), &g));
    }
}

#[test]
fn header_layout() {
    let g = plane(3, 2, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
    let bytes = encode(&g);
    assert_eq!(&bytes[..4], b"CRTG");
    assert_eq!(u16::from_le_bytes([bytes[4], bytes[5]]), 1);
    assert_eq!(u16::from_le_bytes([bytes[6], bytes[7]]), 2);
    assert_eq!(u32::from_le_bytes(bytes[8..12].try_into().unwrap()), 3);
    assert_eq!(u32::from_le_bytes(bytes[12..16].try_into().unwrap()), 2);
    assert_eq!(f64::from_le_bytes(bytes[16..24].try_into().unwrap()), -1.0);
    assert_eq!(f64::from_le_bytes(bytes[40..48].try_into().unwrap()), 2.0);
    assert_eq!(f64::from_le_bytes(bytes[48..56].try_into().unwrap()), 1.0);
    assert_eq!(bytes.len(), 16 + 32 + 48);

    let v = volume(2, (0..8).map(f64::from).collect());
    let bytes = encode(&v);
    assert_eq!(bytes.len(), 20 + 48 + 64);
    assert!(same_bits(&decode(&bytes).unwrap(), &v));
}

#[test]
fn file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.crtg");
    let g = volume(3, (0..27).map(|k| k as f64 * 0.1 - 1.3).collect());
    write_grid(&path, &g).unwrap();
    assert!(same_bits(&read_grid(&path).unwrap(), &g));
    assert!(read_grid(&dir.path().join("missing.crtg")).is_err());
}

#[test]
fn truncation_names_the_offset() {
    let bytes = encode(&plane(2, 2, vec![1.0; 4]));
    for cut in [3, 10, 20, bytes.len() - 1] {
        match decode(&bytes[..cut]) {
            Err(e @ FormatError::Truncated { .. }) => {
                let msg = e.to_string();
                assert!(msg.contains("byte offset"), "{msg}");
            }
            other => panic!("cut {cut}: {other:?}"),
        }
    }
    match decode(&bytes[..bytes.len() - 1]) {
        Err(FormatError::Truncated { offset, .. }) => assert_eq!(offset, 48),
        other => panic!("{other:?}"),
    }
}

#[test]
fn malformed_headers_are_rejected() {
    let good = encode(&plane(2, 2, vec![1.0; 4]));

    let mut magic = good.clone();
    magic[0] = b'X';
    assert!(matches!(decode(&magic), Err(FormatError::BadMagic { .. })));

    let mut zero = good.clone();
    zero[8..12].copy_from_slice(&0u32.to_le_bytes());
    assert_eq!(decode(&zero), Err(FormatError::BadDimension { axis: 0, n: 0 }));

    let mut rank = good.clone();
    rank[6..8].copy_from_slice(&4u16.to_le_bytes());
    assert_eq!(decode(&rank), Err(FormatError::UnsupportedRank(4)));

    let mut version = good.clone();
    version[4..6].copy_from_slice(&9u16.to_le_bytes());
    assert_eq!(decode(&version), Err(FormatError::UnsupportedVersion(9)));

    let mut bounds = good.clone();
    bounds[16..24].copy_from_slice(&5.0f64.to_le_bytes());
    assert!(matches!(decode(&bounds), Err(FormatError::BadBounds { axis: 0, .. })));

    let mut nan = good.clone();
    nan[56..64].copy_from_slice(&f64::NAN.to_le_bytes());
    assert_eq!(decode(&nan), Err(FormatError::NonFinite { offset: 56 }));

    let mut long = good.clone();
    long.push(0);
    assert!(matches!(
        decode(&long),
        Err(FormatError::TrailingBytes { extra: 1, .. })
    ));
}

#[test]
fn csv_keeps_seventeen_digits() {
    let g = plane(2, 2, vec![0.1, 1.0 / 3.0, -2.5, 1e-300]);
    let text = encode_csv(&g);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "x,y,value");
    assert_eq!(lines.len(), 5);
    let third: f64 = lines[2].split(',').nth(2).unwrap().parse().unwrap();
    assert_eq!(third.to_bits(), (1.0f64 / 3.0).to_bits());
    let x: f64 = lines[2].split(',').next().unwrap().parse().unwrap();
    assert_eq!(x, 1.0);
    assert_eq!(encode_csv(&volume(2, vec![0.0; 8])).lines().next(), Some("x,y,z,value"));
}
