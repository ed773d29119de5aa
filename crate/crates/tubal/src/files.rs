//! On-disk formats: the `TNS3` binary tensor container, transform matrices
//! as JSON, and sampled op tables for cross-process discovery.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::{make_transform, BlackBoxOp, TransformKind};
use crate::linalg::CMatrix;
use crate::tensor::Tensor3;
use crate::transform::{validate_transform, TransformSpec, DEFAULT_TOL};
use crate::tube::Tube;

const MAGIC: &[u8; 4] = b"TNS3";
const VERSION: u32 = 1;
/// Refuse payloads over this size instead of trusting header dimensions.
const MAX_ELEMS: u64 = 1 << 32;

#[derive(Debug, Error)]
pub enum FileError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Format(String),
}

/// Write a tensor: magic, version u32, dims m/p/n as u64, then the payload
/// as little-endian f64 in slice-major order. Bit-exact round trip.
pub fn write_tensor(path: impl AsRef<Path>, t: &Tensor3) -> Result<(), FileError> {
    let mut w = BufWriter::new(File::create(path)?);
    let (m, p, n) = t.dims();
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    for dim in [m, p, n] {
        w.write_all(&(dim as u64).to_le_bytes())?;
    }
    for v in t.data() {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_tensor(path: impl AsRef<Path>) -> Result<Tensor3, FileError> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)
        .map_err(|_| FileError::Format("file too short for a tensor header".into()))?;
    if &magic != MAGIC {
        return Err(FileError::Format(format!(
            "bad magic {magic:02x?}, expected \"TNS3\""
        )));
    }
    let mut u32buf = [0u8; 4];
    r.read_exact(&mut u32buf)?;
    let version = u32::from_le_bytes(u32buf);
    if version != VERSION {
        return Err(FileError::Format(format!("unsupported version {version}")));
    }
    let mut u64buf = [0u8; 8];
    let mut dims = [0u64; 3];
    for d in dims.iter_mut() {
        r.read_exact(&mut u64buf)?;
        *d = u64::from_le_bytes(u64buf);
    }
    let [m, p, n] = dims;
    let count = m
        .checked_mul(p)
        .and_then(|x| x.checked_mul(n))
        .filter(|&c| c > 0 && c <= MAX_ELEMS)
        .ok_or_else(|| FileError::Format(format!("implausible dimensions {m}x{p}x{n}")))?;
    let mut data = Vec::with_capacity(count as usize);
    let mut f64buf = [0u8; 8];
    for _ in 0..count {
        r.read_exact(&mut f64buf)
            .map_err(|_| FileError::Format("payload shorter than the header dimensions".into()))?;
        data.push(f64::from_le_bytes(f64buf));
    }
    if r.read(&mut [0u8; 1])? != 0 {
        return Err(FileError::Format("trailing bytes after the payload".into()));
    }
    Ok(Tensor3::from_data(m as usize, p as usize, n as usize, data))
}

#[derive(Serialize, Deserialize)]
struct TransformJson {
    n: usize,
    /// Row-major entries as [re, im] pairs.
    rows: Vec<Vec<[f64; 2]>>,
}

pub fn read_transform_matrix(path: impl AsRef<Path>) -> Result<CMatrix, FileError> {
    let file: TransformJson = serde_json::from_reader(BufReader::new(File::open(path)?))?;
    if file.rows.len() != file.n || file.rows.iter().any(|r| r.len() != file.n) {
        return Err(FileError::Format(format!(
            "transform must be {0}x{0} to match \"n\"",
            file.n
        )));
    }
    Ok(CMatrix::from_rows(
        &file
            .rows
            .iter()
            .map(|row| row.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
            .collect::<Vec<_>>(),
    ))
}

pub fn write_transform_matrix(path: impl AsRef<Path>, m: &CMatrix) -> Result<(), FileError> {
    let file = TransformJson {
        n: m.rows(),
        rows: matrix_rows(m),
    };
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, &file)?;
    w.flush()?;
    Ok(())
}

/// Row-major [re, im] pairs, the JSON wire form of a complex matrix.
pub fn matrix_rows(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.rows())
        .map(|i| m.row(i).iter().map(|z| [z.re, z.im]).collect())
        .collect()
}

/// Resolve a CLI-facing transform name at tube length `n`:
/// `dft`, `skew-dft`, `wht`, `split-complex`, `complex-field`, `identity`,
/// `canonical:n,m`, or `file:PATH`.
pub fn parse_transform(name: &str, n: usize) -> Result<TransformSpec, FileError> {
    let kind = match name {
        "dft" => TransformKind::Dft,
        "skew-dft" => TransformKind::SkewDft,
        "wht" => TransformKind::WalshHadamard,
        "split-complex" => TransformKind::SplitComplex,
        "complex-field" => TransformKind::ComplexField,
        "identity" => TransformKind::Identity,
        other => {
            if let Some(spec) = other.strip_prefix("canonical:") {
                let (cn, cm) = spec
                    .split_once(',')
                    .ok_or_else(|| FileError::Format("expected canonical:n,m".into()))?;
                let cn: usize = cn
                    .trim()
                    .parse()
                    .map_err(|_| FileError::Format("bad n in canonical:n,m".into()))?;
                let cm: usize = cm
                    .trim()
                    .parse()
                    .map_err(|_| FileError::Format("bad m in canonical:n,m".into()))?;
                if cn != n {
                    return Err(FileError::Format(format!(
                        "canonical transform is {cn}-dimensional but the data needs {n}"
                    )));
                }
                TransformKind::Canonical { m: cm }
            } else if let Some(path) = other.strip_prefix("file:") {
                let matrix = read_transform_matrix(path)?;
                if matrix.rows() != n {
                    return Err(FileError::Format(format!(
                        "transform file is {}-dimensional but the data needs {n}",
                        matrix.rows()
                    )));
                }
                return validate_transform(matrix, DEFAULT_TOL)
                    .map_err(|e| FileError::Format(e.to_string()));
            } else {
                return Err(FileError::Format(format!("unknown transform \"{other}\"")));
            }
        }
    };
    make_transform(kind, n).map_err(|e| FileError::Format(e.to_string()))
}

#[derive(Serialize, Deserialize)]
struct OpTableJson {
    n: usize,
    /// (a, b, op(a, b)) probes. Must include every standard-basis pair.
    probes: Vec<(Vec<f64>, Vec<f64>, Vec<f64>)>,
}

/// Sample an op into a table of all standard-basis probes.
pub fn write_op_table(path: impl AsRef<Path>, op: &BlackBoxOp) -> Result<(), FileError> {
    let n = op.n();
    let mut probes = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let a = Tube::basis(n, i);
            let b = Tube::basis(n, j);
            let c = op.eval(&a, &b);
            probes.push((
                a.as_slice().to_vec(),
                b.as_slice().to_vec(),
                c.as_slice().to_vec(),
            ));
        }
    }
    let table = OpTableJson { n, probes };
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer(&mut w, &table)?;
    w.flush()?;
    Ok(())
}

/// Rebuild a bilinear op from its sampled table. Basis probes define the
/// structure constants; any additional probes are re-evaluated through them
/// and must agree, which rejects tables sampled from non-bilinear ops.
pub fn read_op_table(path: impl AsRef<Path>) -> Result<BlackBoxOp, FileError> {
    let table: OpTableJson = serde_json::from_reader(BufReader::new(File::open(path)?))?;
    let n = table.n;
    if n == 0 {
        return Err(FileError::Format("op table has dimension 0".into()));
    }
    // structure[i][j] = op(e_i, e_j)
    let mut structure: Vec<Vec<Option<Vec<f64>>>> = vec![vec![None; n]; n];
    let mut extras = Vec::new();
    for (a, b, c) in &table.probes {
        if a.len() != n || b.len() != n || c.len() != n {
            return Err(FileError::Format("probe length mismatch".into()));
        }
        match (basis_index(a), basis_index(b)) {
            (Some(i), Some(j)) => structure[i][j] = Some(c.clone()),
            _ => extras.push((a.clone(), b.clone(), c.clone())),
        }
    }
    let mut constants = Vec::with_capacity(n * n);
    for (i, row) in structure.into_iter().enumerate() {
        for (j, entry) in row.into_iter().enumerate() {
            constants.push(entry.ok_or_else(|| {
                FileError::Format(format!("missing basis probe (e{i}, e{j})"))
            })?);
        }
    }
    let eval = move |a: &[f64], b: &[f64]| -> Vec<f64> {
        let mut out = vec![0.0; n];
        for (i, &ai) in a.iter().enumerate() {
            if ai == 0.0 {
                continue;
            }
            for (j, &bj) in b.iter().enumerate() {
                let w = ai * bj;
                if w == 0.0 {
                    continue;
                }
                for (o, c) in out.iter_mut().zip(&constants[i * n + j]) {
                    *o += w * c;
                }
            }
        }
        out
    };
    for (a, b, c) in &extras {
        let got = eval(a, b);
        let scale = 1.0 + c.iter().map(|v| v.abs()).fold(0.0, f64::max);
        let diff = got
            .iter()
            .zip(c)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        if diff > 1e-8 * scale {
            return Err(FileError::Format(format!(
                "probe inconsistent with bilinear expansion (residual {diff:.3e})"
            )));
        }
    }
    Ok(BlackBoxOp::new(n, "table", eval))
}

fn basis_index(v: &[f64]) -> Option<usize> {
    let mut idx = None;
    for (i, &x) in v.iter().enumerate() {
        if x == 1.0 {
            if idx.is_some() {
                return None;
            }
            idx = Some(i);
        } else if x != 0.0 {
            return None;
        }
    }
    idx
}
