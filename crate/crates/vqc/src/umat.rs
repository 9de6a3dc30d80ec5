//! UMAT text format for unitaries.
//!
//! ```text
//! UMAT 1 <n>
//! <re im re im ...>   2^n lines, 2^(n+1) numbers each, row-major
//! ```
//!
//! Numbers are written with 17 significant digits, so a write/read cycle is
//! bit-exact. Lines end with LF.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::qmat::{ComplexMatrix, C64};
use crate::tol;

pub fn to_string(u: &ComplexMatrix) -> Result<String> {
    let d = u.rows();
    if !u.is_square() || d == 0 || !d.is_power_of_two() {
        return Err(Error::Dimension(format!("UMAT needs a 2^n square matrix, got {}x{}", u.rows(), u.cols())));
    }
    let n = d.trailing_zeros();
    let mut s = format!("UMAT 1 {n}\n");
    for i in 0..d {
        for (k, z) in u.row(i).iter().enumerate() {
            if k > 0 {
                s.push(' ');
            }
            write!(s, "{:.16e} {:.16e}", z.re, z.im).expect("write to String");
        }
        s.push('\n');
    }
    Ok(s)
}

/// Parses and checks `‖U†U − I‖_F ≤ 1e-8`.
pub fn from_str(text: &str) -> Result<ComplexMatrix> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::Data("empty UMAT file".into()))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let n: u32 = match fields.as_slice() {
        ["UMAT", "1", n] => n.parse().map_err(|_| Error::Data(format!("bad qubit count {n:?}")))?,
        _ => return Err(Error::Data(format!("bad UMAT header {header:?}"))),
    };
    if n == 0 || n > 12 {
        return Err(Error::Data(format!("UMAT qubit count {n} out of range")));
    }
    let d = 1usize << n;
    let mut data = Vec::with_capacity(d * d);
    for i in 0..d {
        let line = lines.next().ok_or_else(|| Error::Data(format!("UMAT row {} missing", i + 1)))?;
        let nums = line
            .split_whitespace()
            .map(|t| t.parse::<f64>().map_err(|_| Error::Data(format!("bad number {t:?} in UMAT row {}", i + 1))))
            .collect::<Result<Vec<_>>>()?;
        if nums.len() != 2 * d {
            return Err(Error::Data(format!("UMAT row {} has {} numbers, expected {}", i + 1, nums.len(), 2 * d)));
        }
        data.extend(nums.chunks_exact(2).map(|c| C64::new(c[0], c[1])));
    }
    if lines.any(|l| !l.trim().is_empty()) {
        return Err(Error::Data("trailing content after UMAT rows".into()));
    }
    let u = ComplexMatrix::from_vec(d, d, data)?;
    if !u.is_finite() {
        return Err(Error::Data("non-finite entry in UMAT file".into()));
    }
    let residual = u.unitary_residual();
    if residual > tol::UNITARY_LOAD {
        return Err(Error::NotUnitary { residual });
    }
    Ok(u)
}

pub fn write(path: &Path, u: &ComplexMatrix) -> Result<()> {
    std::fs::write(path, to_string(u)?).map_err(|e| Error::Data(format!("{}: {e}", path.display())))
}

pub fn read(path: &Path) -> Result<ComplexMatrix> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Data(format!("{}: {e}", path.display())))?;
    from_str(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ukm::{random_unitary, Mode};

    #[test]
    fn round_trip_is_bit_exact() {
        for n in 1..=3 {
            let u = random_unitary(1 << n, Mode::Complex, n as u64).unwrap();
            let text = to_string(&u).unwrap();
            assert!(text.starts_with(&format!("UMAT 1 {n}\n")));
            assert_eq!(text.lines().count(), 1 + (1 << n));
            assert!(!text.contains('\r'));
            let back = from_str(&text).unwrap();
            for (a, b) in u.data().iter().zip(back.data()) {
                assert_eq!(a.re.to_bits(), b.re.to_bits());
                assert_eq!(a.im.to_bits(), b.im.to_bits());
            }
        }
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("u.umat");
        let u = random_unitary(4, Mode::Real, 3).unwrap();
        write(&path, &u).unwrap();
        assert_eq!(read(&path).unwrap(), u);
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(matches!(from_str(""), Err(Error::Data(_))));
        assert!(matches!(from_str("UMAT 2 1\n1 0 0 0\n0 0 1 0\n"), Err(Error::Data(_))));
        assert!(matches!(from_str("UMAT 1 1\n1 0 0 0\n"), Err(Error::Data(_))));
        assert!(matches!(from_str("UMAT 1 1\n1 0 0\n0 0 1 0\n"), Err(Error::Data(_))));
        assert!(matches!(from_str("UMAT 1 1\n2 0 0 0\n0 0 1 0\n"), Err(Error::NotUnitary { .. })));
        assert!(from_str("UMAT 1 1\n1 0 0 0\n0 0 0 1\n").is_ok());
    }

    #[test]
    fn rejects_non_power_of_two() {
        assert!(to_string(&ComplexMatrix::identity(3)).is_err());
    }
}
