//! Binary container for TT cores, used for propagator checkpoints.
//!
//! Layout (all integers little-endian):
//!
//! ```text
//! magic   4 bytes  b"TTCR"
//! version u32      1
//! kind    u8       0 = vector, 1 = operator
//! ncores  u32
//! per core: u32 r_left, u32 n [, u32 m], u32 r_right
//! data    f64 LE, cores in order, each row-major
//! ```

use std::io::{Read, Write};

use ndarray::{Array3, Array4};

use super::{TtError, TtOperator, TtVector};

const MAGIC: &[u8; 4] = b"TTCR";
const VERSION: u32 = 1;

fn write_u32<W: Write>(w: &mut W, v: u32) -> Result<(), TtError> {
    w.write_all(&v.to_le_bytes())?;
    Ok(())
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32, TtError> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf)?;
    Ok(u32::from_le_bytes(buf))
}

fn write_data<W: Write>(w: &mut W, data: &[f64]) -> Result<(), TtError> {
    for x in data {
        w.write_all(&x.to_le_bytes())?;
    }
    Ok(())
}

fn read_data<R: Read>(r: &mut R, len: usize) -> Result<Vec<f64>, TtError> {
    let mut out = Vec::with_capacity(len);
    let mut buf = [0u8; 8];
    for _ in 0..len {
        r.read_exact(&mut buf)?;
        out.push(f64::from_le_bytes(buf));
    }
    Ok(out)
}

pub fn write_tt_vector<W: Write>(w: &mut W, v: &TtVector) -> Result<(), TtError> {
    w.write_all(MAGIC)?;
    write_u32(w, VERSION)?;
    w.write_all(&[0u8])?;
    write_u32(w, v.ndim() as u32)?;
    for c in v.cores() {
        let (r, n, rr) = c.dim();
        write_u32(w, r as u32)?;
        write_u32(w, n as u32)?;
        write_u32(w, rr as u32)?;
    }
    for c in v.cores() {
        write_data(w, c.as_slice().expect("contiguous core"))?;
    }
    Ok(())
}

pub fn write_tt_operator<W: Write>(w: &mut W, op: &TtOperator) -> Result<(), TtError> {
    w.write_all(MAGIC)?;
    write_u32(w, VERSION)?;
    w.write_all(&[1u8])?;
    write_u32(w, op.ndim() as u32)?;
    for c in op.cores() {
        let (r, n, m, rr) = c.dim();
        write_u32(w, r as u32)?;
        write_u32(w, n as u32)?;
        write_u32(w, m as u32)?;
        write_u32(w, rr as u32)?;
    }
    for c in op.cores() {
        write_data(w, c.as_slice().expect("contiguous core"))?;
    }
    Ok(())
}

fn read_header<R: Read>(r: &mut R, want_kind: u8) -> Result<u32, TtError> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(TtError::Corrupt("bad magic".into()));
    }
    let version = read_u32(r)?;
    if version != VERSION {
        return Err(TtError::Corrupt(format!("unsupported version {version}")));
    }
    let mut kind = [0u8; 1];
    r.read_exact(&mut kind)?;
    if kind[0] != want_kind {
        return Err(TtError::Corrupt(format!(
            "container kind {} does not match expected {}",
            kind[0], want_kind
        )));
    }
    read_u32(r)
}

pub fn read_tt_vector<R: Read>(r: &mut R) -> Result<TtVector, TtError> {
    let ncores = read_header(r, 0)? as usize;
    if ncores == 0 {
        return Err(TtError::Corrupt("no cores".into()));
    }
    let mut shapes = Vec::with_capacity(ncores);
    for _ in 0..ncores {
        let rl = read_u32(r)? as usize;
        let n = read_u32(r)? as usize;
        let rr = read_u32(r)? as usize;
        shapes.push((rl, n, rr));
    }
    let mut cores = Vec::with_capacity(ncores);
    for (rl, n, rr) in shapes {
        let data = read_data(r, rl * n * rr)?;
        cores.push(
            Array3::from_shape_vec((rl, n, rr), data)
                .map_err(|e| TtError::Corrupt(e.to_string()))?,
        );
    }
    TtVector::new(cores)
}

pub fn read_tt_operator<R: Read>(r: &mut R) -> Result<TtOperator, TtError> {
    let ncores = read_header(r, 1)? as usize;
    if ncores == 0 {
        return Err(TtError::Corrupt("no cores".into()));
    }
    let mut shapes = Vec::with_capacity(ncores);
    for _ in 0..ncores {
        let rl = read_u32(r)? as usize;
        let n = read_u32(r)? as usize;
        let m = read_u32(r)? as usize;
        let rr = read_u32(r)? as usize;
        shapes.push((rl, n, m, rr));
    }
    let mut cores = Vec::with_capacity(ncores);
    for (rl, n, m, rr) in shapes {
        let data = read_data(r, rl * n * m * rr)?;
        cores.push(
            Array4::from_shape_vec((rl, n, m, rr), data)
                .map_err(|e| TtError::Corrupt(e.to_string()))?,
        );
    }
    TtOperator::new(cores)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{DenseTensor, TruncationPolicy};

    #[test]
    fn vector_roundtrip_is_bit_exact() {
        let d = DenseTensor::from_fn(vec![4, 4, 4], |ix| {
            ((ix[0] * 17 + ix[1] * 5 + ix[2]) as f64).sin()
        })
        .unwrap();
        let v = TtVector::from_dense(&d, &TruncationPolicy::tol(1e-10)).unwrap();
        let mut buf = Vec::new();
        write_tt_vector(&mut buf, &v).unwrap();
        let back = read_tt_vector(&mut buf.as_slice()).unwrap();
        assert_eq!(v.ndim(), back.ndim());
        for (a, b) in v.cores().iter().zip(back.cores()) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn operator_roundtrip_is_bit_exact() {
        let id = TtOperator::identity(&[2, 2, 2]).scale(3.5);
        let mut buf = Vec::new();
        write_tt_operator(&mut buf, &id).unwrap();
        let back = read_tt_operator(&mut buf.as_slice()).unwrap();
        for (a, b) in id.cores().iter().zip(back.cores()) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn rejects_wrong_kind_and_magic() {
        let id = TtOperator::identity(&[2]);
        let mut buf = Vec::new();
        write_tt_operator(&mut buf, &id).unwrap();
        assert!(matches!(
            read_tt_vector(&mut buf.as_slice()),
            Err(TtError::Corrupt(_))
        ));
        buf[0] = b'X';
        assert!(matches!(
            read_tt_operator(&mut buf.as_slice()),
            Err(TtError::Corrupt(_))
        ));
    }
}
