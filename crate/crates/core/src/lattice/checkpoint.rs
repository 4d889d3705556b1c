//! Binary field checkpoints.
//!
//! Layout (all little-endian):
//!
//! | offset | size | content                                    |
//! |--------|------|--------------------------------------------|
//! | 0      | 8    | magic `RARITAKT`                           |
//! | 8      | 4    | format version (`u32`, currently 1)        |
//! | 12     | 4    | `n`, sites per axis (`u32`)                |
//! | 16     | 8    | `h`, lattice spacing (`f64`)               |
//! | 24     | 4    | field kind (`u32`): 1 spinor-hom, 2 connection |
//! | 28     | 4    | reserved, zero                             |
//! | 32     | 8    | number of complex pairs (`u64`)            |
//! | 40     | ...  | `(re, im)` pairs as `f64`                  |
//!
//! Sites are in lattice index order. A spinor-hom site is its 2×3 matrix in
//! row-major order (6 pairs); a connection site is `a₁, a₂, a₃` stored as
//! complex numbers with zero imaginary part (3 pairs).
//!
//! Next to `path` a text sidecar `path.meta` holds `key = value` lines: the
//! header fields in readable form plus caller-supplied entries.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use crate::clifford::C64;
use crate::error::{Error, Result};
use crate::lattice::{LatticeGeometry, SpinorHomField, U1Connection};
use crate::spinor_hom::SpinorHom;

pub const MAGIC: &[u8; 8] = b"RARITAKT";
pub const VERSION: u32 = 1;
const HEADER_LEN: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    SpinorHom,
    Connection,
}

impl FieldKind {
    fn code(self) -> u32 {
        match self {
            FieldKind::SpinorHom => 1,
            FieldKind::Connection => 2,
        }
    }

    fn name(self) -> &'static str {
        match self {
            FieldKind::SpinorHom => "spinor_hom",
            FieldKind::Connection => "connection",
        }
    }

    fn pairs_per_site(self) -> usize {
        match self {
            FieldKind::SpinorHom => 6,
            FieldKind::Connection => 3,
        }
    }
}

pub fn meta_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".meta");
    PathBuf::from(s)
}

fn encode(geom: &LatticeGeometry, kind: FieldKind, pairs: &[C64]) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + 16 * pairs.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(geom.n as u32).to_le_bytes());
    out.extend_from_slice(&geom.h.to_le_bytes());
    out.extend_from_slice(&kind.code().to_le_bytes());
    out.extend_from_slice(&0u32.to_le_bytes());
    out.extend_from_slice(&(pairs.len() as u64).to_le_bytes());
    for z in pairs {
        out.extend_from_slice(&z.re.to_le_bytes());
        out.extend_from_slice(&z.im.to_le_bytes());
    }
    out
}

fn read_u32(b: &[u8], at: usize) -> u32 {
    u32::from_le_bytes(b[at..at + 4].try_into().expect("4 bytes"))
}

fn read_u64(b: &[u8], at: usize) -> u64 {
    u64::from_le_bytes(b[at..at + 8].try_into().expect("8 bytes"))
}

fn read_f64(b: &[u8], at: usize) -> f64 {
    f64::from_le_bytes(b[at..at + 8].try_into().expect("8 bytes"))
}

fn decode(path: &Path, bytes: &[u8], kind: FieldKind) -> Result<(LatticeGeometry, Vec<C64>)> {
    let bad = |reason: String| Error::Checkpoint {
        path: path.to_path_buf(),
        reason,
    };
    if bytes.len() < HEADER_LEN {
        return Err(bad(format!("file too short ({} bytes)", bytes.len())));
    }
    if &bytes[..8] != MAGIC {
        return Err(bad("bad magic".into()));
    }
    let version = read_u32(bytes, 8);
    if version != VERSION {
        return Err(bad(format!("unsupported version {version}")));
    }
    let n = read_u32(bytes, 12) as usize;
    let h = read_f64(bytes, 16);
    let code = read_u32(bytes, 24);
    if code != kind.code() {
        return Err(bad(format!("field kind {code}, expected {}", kind.code())));
    }
    let count = read_u64(bytes, 32) as usize;
    let geom = LatticeGeometry { n, h };
    if n < 4 || n & 1 == 1 || !(h > 0.0) {
        return Err(bad(format!("invalid geometry n={n} h={h}")));
    }
    if count != geom.sites() * kind.pairs_per_site() {
        return Err(bad(format!("{count} pairs do not match n={n}")));
    }
    if bytes.len() != HEADER_LEN + 16 * count {
        return Err(bad(format!(
            "payload length {} does not match header",
            bytes.len()
        )));
    }
    let pairs = (0..count)
        .map(|k| {
            let at = HEADER_LEN + 16 * k;
            C64::new(read_f64(bytes, at), read_f64(bytes, at + 8))
        })
        .collect();
    Ok((geom, pairs))
}

fn write_meta(
    path: &Path,
    geom: &LatticeGeometry,
    kind: FieldKind,
    extra: &BTreeMap<String, String>,
) -> Result<()> {
    let mut text = String::new();
    text.push_str("format = rarita-checkpoint\n");
    text.push_str(&format!("version = {VERSION}\n"));
    text.push_str(&format!("kind = {}\n", kind.name()));
    text.push_str(&format!("n = {}\n", geom.n));
    text.push_str(&format!("h = {:e}\n", geom.h));
    text.push_str(&format!("h_bits = {:016x}\n", geom.h.to_bits()));
    text.push_str(&format!(
        "complex_pairs = {}\n",
        geom.sites() * kind.pairs_per_site()
    ));
    for (k, v) in extra {
        text.push_str(&format!("{k} = {v}\n"));
    }
    let mp = meta_path(path);
    fs::write(&mp, text).map_err(|e| Error::io(mp, e))
}

fn write_pairs(
    path: &Path,
    geom: &LatticeGeometry,
    kind: FieldKind,
    pairs: &[C64],
    extra: &BTreeMap<String, String>,
) -> Result<()> {
    fs::write(path, encode(geom, kind, pairs)).map_err(|e| Error::io(path, e))?;
    write_meta(path, geom, kind, extra)
}

pub fn write_spinor_field(
    path: &Path,
    field: &SpinorHomField,
    extra: &BTreeMap<String, String>,
) -> Result<()> {
    let mut pairs = Vec::with_capacity(6 * field.values.len());
    for v in &field.values {
        for r in 0..2 {
            for c in 0..3 {
                pairs.push(v.m[(r, c)]);
            }
        }
    }
    write_pairs(path, &field.geom, FieldKind::SpinorHom, &pairs, extra)
}

pub fn write_connection(
    path: &Path,
    conn: &U1Connection,
    extra: &BTreeMap<String, String>,
) -> Result<()> {
    let pairs: Vec<C64> = conn.a.iter().flatten().map(|x| C64::new(*x, 0.0)).collect();
    write_pairs(path, &conn.geom, FieldKind::Connection, &pairs, extra)
}

fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::io(path, e))
}

pub fn read_spinor_field(path: &Path) -> Result<SpinorHomField> {
    let (geom, pairs) = decode(path, &read_bytes(path)?, FieldKind::SpinorHom)?;
    let values = pairs
        .chunks_exact(6)
        .map(|c| SpinorHom::from_rows([c[0], c[1], c[2]], [c[3], c[4], c[5]]))
        .collect();
    Ok(SpinorHomField { geom, values })
}

pub fn read_connection(path: &Path) -> Result<U1Connection> {
    let (geom, pairs) = decode(path, &read_bytes(path)?, FieldKind::Connection)?;
    let a = pairs
        .chunks_exact(3)
        .map(|c| [c[0].re, c[1].re, c[2].re])
        .collect();
    Ok(U1Connection { geom, a })
}

/// Parse the sidecar of `path` into key/value pairs.
pub fn read_meta(path: &Path) -> Result<BTreeMap<String, String>> {
    let mp = meta_path(path);
    let text = fs::read_to_string(&mp).map_err(|e| Error::io(&mp, e))?;
    let mut out = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let (k, v) = line.split_once(" = ").ok_or_else(|| Error::Checkpoint {
            path: mp.clone(),
            reason: format!("line {}: expected `key = value`", lineno + 1),
        })?;
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{gaussian_spinor_hom, normal, rng_for};

    #[test]
    fn spinor_field_round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("psi.bin");
        let geom = LatticeGeometry::new(4, 1.7).unwrap();
        let mut rng = rng_for(31, "ckpt");
        let field = SpinorHomField {
            geom,
            values: (0..geom.sites())
                .map(|_| gaussian_spinor_hom(&mut rng))
                .collect(),
        };
        let mut extra = BTreeMap::new();
        extra.insert("seed".to_string(), "31".to_string());
        write_spinor_field(&path, &field, &extra).unwrap();
        let back = read_spinor_field(&path).unwrap();
        assert_eq!(back.geom.h.to_bits(), geom.h.to_bits());
        for (x, y) in field.values.iter().zip(&back.values) {
            for (p, q) in x.m.iter().zip(y.m.iter()) {
                assert_eq!(p.re.to_bits(), q.re.to_bits());
                assert_eq!(p.im.to_bits(), q.im.to_bits());
            }
        }
        let meta = read_meta(&path).unwrap();
        assert_eq!(meta["kind"], "spinor_hom");
        assert_eq!(meta["seed"], "31");
        assert_eq!(meta["complex_pairs"], (6 * 64).to_string());
    }

    #[test]
    fn connection_round_trip_and_kind_check() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.bin");
        let geom = LatticeGeometry::new(4, 2.0).unwrap();
        let mut rng = rng_for(32, "ckpt");
        let conn = U1Connection::from_fn(geom, |_| [0.0; 3]);
        let conn = U1Connection {
            a: conn
                .a
                .iter()
                .map(|_| [normal(&mut rng), normal(&mut rng), -0.0])
                .collect(),
            ..conn
        };
        write_connection(&path, &conn, &BTreeMap::new()).unwrap();
        let back = read_connection(&path).unwrap();
        let bits =
            |c: &U1Connection| -> Vec<u64> { c.a.iter().flatten().map(|x| x.to_bits()).collect() };
        assert_eq!(bits(&conn), bits(&back));
        assert!(matches!(
            read_spinor_field(&path),
            Err(Error::Checkpoint { .. })
        ));
    }

    #[test]
    fn header_layout() {
        let geom = LatticeGeometry::new(4, 1.0).unwrap();
        let bytes = encode(&geom, FieldKind::Connection, &[C64::new(1.5, 0.0)]);
        assert_eq!(&bytes[..8], b"RARITAKT");
        assert_eq!(read_u32(&bytes, 8), 1);
        assert_eq!(read_u32(&bytes, 12), 4);
        assert_eq!(read_f64(&bytes, 16), 0.25);
        assert_eq!(read_u32(&bytes, 24), 2);
        assert_eq!(read_u64(&bytes, 32), 1);
        assert_eq!(read_f64(&bytes, 40), 1.5);
    }

    #[test]
    fn truncated_file_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.bin");
        fs::write(&path, b"RARITAKT").unwrap();
        assert!(matches!(
            read_connection(&path),
            Err(Error::Checkpoint { .. })
        ));
        let missing = dir.path().join("missing.bin");
        assert!(matches!(read_connection(&missing), Err(Error::Io { .. })));
    }
}
