//! Versioned binary snapshots of spectral fields.
//!
//! Layout (all integers and floats little-endian):
//!
//! ```text
//! offset  size  field
//!      0     8  magic  b"ZKSNAP\0\0"
//!      8     4  format version (u32, currently 1)
//!     12     4  d (u32)
//!     16     4  Nx (u32)
//!     20     4  Nt1 (u32)
//!     24     4  Nt2 (u32, 1 when d = 1)
//!     28     1  transverse bc (0 dirichlet, 1 periodic)
//!     29     1  parity of axis y (0 standard, 1 companion)
//!     30     1  parity of axis z
//!     31     1  reserved (0)
//!     32     8  simulation time t (f64)
//!     40     8  step index (u64)
//!     48     -  payload: Nx·Nt1·Nt2 complex coefficients as (re, im) f64 pairs
//! ```
//!
//! The payload walks the coefficient array in row-major order (x slot slowest,
//! z slot fastest); x slots are in FFT order, sine slots hold `n = 1..Nt1`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::sync::Arc;

use ndarray::Array3;

use crate::domain::{build_domain, Basis, DomainSpec, Parity, SpectralField, TransverseBc};
use crate::error::{Error, Result};
use crate::C64;

pub const MAGIC: [u8; 8] = *b"ZKSNAP\0\0";
pub const VERSION: u32 = 1;
pub const HEADER_LEN: usize = 48;

/// A field together with its time stamp.
#[derive(Clone, Debug)]
pub struct Snapshot {
    pub field: SpectralField,
    pub t: f64,
    pub step: u64,
}

fn parity_byte(p: Parity) -> u8 {
    match p {
        Parity::Standard => 0,
        Parity::Companion => 1,
    }
}

/// Encodes a snapshot into bytes.
pub fn encode_snapshot(u: &SpectralField, t: f64, step: u64) -> Vec<u8> {
    let spec = u.basis().spec().normalized();
    let mut out = Vec::with_capacity(HEADER_LEN + 16 * u.coeffs().len());
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    for v in [spec.d, spec.nx, spec.nt1, spec.nt2] {
        out.extend_from_slice(&(v as u32).to_le_bytes());
    }
    out.push(match spec.transverse_bc {
        TransverseBc::Dirichlet => 0,
        TransverseBc::Periodic => 1,
    });
    let [py, pz] = u.parity();
    out.extend_from_slice(&[parity_byte(py), parity_byte(pz), 0]);
    out.extend_from_slice(&t.to_le_bytes());
    out.extend_from_slice(&step.to_le_bytes());
    for c in u.coeffs().iter() {
        out.extend_from_slice(&c.re.to_le_bytes());
        out.extend_from_slice(&c.im.to_le_bytes());
    }
    out
}

/// Writes `u` with time stamp `(t, step)` to `path`.
pub fn write_snapshot(u: &SpectralField, t: f64, step: u64, path: &Path) -> Result<()> {
    let bytes = encode_snapshot(u, t, step);
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    w.write_all(&bytes).map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

fn u32_at(b: &[u8], off: usize) -> u32 {
    u32::from_le_bytes(b[off..off + 4].try_into().unwrap())
}

fn f64_at(b: &[u8], off: usize) -> f64 {
    f64::from_le_bytes(b[off..off + 8].try_into().unwrap())
}

/// Decodes a snapshot; `path` only labels errors.
pub fn decode_snapshot(bytes: &[u8], path: &Path) -> Result<Snapshot> {
    let corrupt = |reason: String| Error::CorruptSnapshot {
        path: path.to_path_buf(),
        reason,
    };
    if bytes.len() < HEADER_LEN {
        return Err(corrupt(format!("header truncated ({} bytes)", bytes.len())));
    }
    if bytes[..8] != MAGIC {
        return Err(corrupt("bad magic".to_string()));
    }
    let version = u32_at(bytes, 8);
    if version != VERSION {
        return Err(corrupt(format!("unsupported format version {version}")));
    }
    let [d, nx, nt1, nt2] = [12, 16, 20, 24].map(|o| u32_at(bytes, o) as usize);
    let bc = match bytes[28] {
        0 => TransverseBc::Dirichlet,
        1 => TransverseBc::Periodic,
        b => return Err(corrupt(format!("unknown transverse bc code {b}"))),
    };
    let parity = |b: u8| match b {
        0 => Ok(Parity::Standard),
        1 => Ok(Parity::Companion),
        _ => Err(corrupt(format!("unknown parity code {b}"))),
    };
    let par = [parity(bytes[29])?, parity(bytes[30])?];
    let t = f64_at(bytes, 32);
    let step = u64::from_le_bytes(bytes[40..48].try_into().unwrap());
    let spec = DomainSpec {
        d,
        nx,
        nt1,
        nt2,
        transverse_bc: bc,
    };
    let basis = build_domain(spec).map_err(|e| corrupt(format!("invalid header: {e}")))?;
    let (a, b, c) = basis.shape();
    let count = a * b * c;
    let expected = HEADER_LEN + 16 * count;
    if bytes.len() != expected {
        return Err(corrupt(format!(
            "payload has {} bytes, expected {}",
            bytes.len() - HEADER_LEN,
            expected - HEADER_LEN
        )));
    }
    let payload = &bytes[HEADER_LEN..];
    let values: Vec<C64> = (0..count)
        .map(|i| C64::new(f64_at(payload, 16 * i), f64_at(payload, 16 * i + 8)))
        .collect();
    let coeffs = Array3::from_shape_vec((a, b, c), values).expect("length checked");
    let field = SpectralField::from_coeffs(&basis, coeffs)?.with_parity(par);
    Ok(Snapshot { field, t, step })
}

/// Reads a snapshot, building the domain recorded in its header.
pub fn read_snapshot(path: &Path) -> Result<Snapshot> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut bytes = Vec::new();
    BufReader::new(file)
        .read_to_end(&mut bytes)
        .map_err(|e| Error::io(path, e))?;
    decode_snapshot(&bytes, path)
}

/// Reads a snapshot onto an existing basis; the header must describe the same
/// domain exactly. Use [`SpectralField::resample`] for resolution changes.
pub fn read_snapshot_into(path: &Path, basis: &Arc<Basis>) -> Result<Snapshot> {
    let snap = read_snapshot(path)?;
    let (have, want) = (snap.field.basis().spec().normalized(), basis.spec().normalized());
    if have != want {
        return Err(Error::Dimension(format!(
            "snapshot {} holds d={} Nx={} Nt1={} Nt2={} {}, domain is d={} Nx={} Nt1={} Nt2={} {}",
            path.display(),
            have.d,
            have.nx,
            have.nt1,
            have.nt2,
            have.transverse_bc.as_str(),
            want.d,
            want.nx,
            want.nt1,
            want.nt2,
            want.transverse_bc.as_str()
        )));
    }
    let field = SpectralField::from_coeffs(basis, snap.field.coeffs().clone())?.with_parity(snap.field.parity());
    Ok(Snapshot { field, ..snap })
}
