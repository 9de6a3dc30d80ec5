//! Gate constructors on `n` qubits.
//!
//! Qubits are numbered from 1, and qubit 1 is the most significant bit of
//! the basis index, so `embed1(g, 1)` is `g ⊗ I ⊗ … ⊗ I`.

use crate::error::{Error, Result};
use crate::qmat::{kron, ComplexMatrix, C64, I, ONE, ZERO};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// A 1-based qubit index valid in an `n`-qubit register.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QubitIndex {
    value: usize,
    n: usize,
}

impl QubitIndex {
    pub fn new(value: usize, n: usize) -> Result<Self> {
        if value == 0 || value > n {
            return Err(Error::QubitRange { index: value, n });
        }
        Ok(Self { value, n })
    }

    pub fn value(self) -> usize {
        self.value
    }

    pub fn n(self) -> usize {
        self.n
    }

    /// Bit mask of this qubit inside a basis index.
    pub fn mask(self) -> usize {
        1 << (self.n - self.value)
    }
}

pub fn pauli(axis: Axis) -> ComplexMatrix {
    match axis {
        Axis::X => ComplexMatrix::from_rows(&[[ZERO, ONE], [ONE, ZERO]]),
        Axis::Y => ComplexMatrix::from_rows(&[[ZERO, -I], [I, ZERO]]),
        Axis::Z => ComplexMatrix::diag(&[ONE, -ONE]),
    }
}

/// `exp(−i φ σ/2)` about the given axis.
pub fn rot(axis: Axis, phi: f64) -> ComplexMatrix {
    let (s, c) = (phi / 2.0).sin_cos();
    match axis {
        Axis::X => ComplexMatrix::from_rows(&[
            [C64::new(c, 0.0), C64::new(0.0, -s)],
            [C64::new(0.0, -s), C64::new(c, 0.0)],
        ]),
        Axis::Y => ComplexMatrix::from_rows(&[
            [C64::new(c, 0.0), C64::new(-s, 0.0)],
            [C64::new(s, 0.0), C64::new(c, 0.0)],
        ]),
        Axis::Z => ComplexMatrix::diag(&[C64::from_polar(1.0, -phi / 2.0), C64::from_polar(1.0, phi / 2.0)]),
    }
}

/// `R^z(ω) R^y(θ) R^z(φ)`.
pub fn rot3d(phi: f64, theta: f64, omega: f64) -> ComplexMatrix {
    rot(Axis::Z, omega).matmul(&rot(Axis::Y, theta)).matmul(&rot(Axis::Z, phi))
}

/// `e^{−iλ} I` on `n` qubits.
pub fn global_phase(lambda: f64, n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(1 << n).scale(C64::from_polar(1.0, -lambda))
}

/// `|0⟩⟨0|` and `|1⟩⟨1|`.
pub fn projector(bit: u8) -> ComplexMatrix {
    if bit == 0 {
        ComplexMatrix::diag(&[ONE, ZERO])
    } else {
        ComplexMatrix::diag(&[ZERO, ONE])
    }
}

fn check_2x2(g: &ComplexMatrix) -> Result<()> {
    if g.rows() != 2 || g.cols() != 2 {
        return Err(Error::Dimension(format!(
            "expected a 2x2 gate, got {}x{}",
            g.rows(),
            g.cols()
        )));
    }
    Ok(())
}

/// `I^{⊗(i−1)} ⊗ g ⊗ I^{⊗(n−i)}`.
pub fn embed1(g: &ComplexMatrix, i: QubitIndex) -> Result<ComplexMatrix> {
    check_2x2(g)?;
    let left = ComplexMatrix::identity(1 << (i.value - 1));
    let right = ComplexMatrix::identity(1 << (i.n - i.value));
    Ok(kron(&kron(&left, g), &right))
}

/// `Ct_c[g_t] = P⁰_c + P¹_c g_t`.
pub fn controlled(control: QubitIndex, target: QubitIndex, g: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_2x2(g)?;
    if control.n != target.n {
        return Err(Error::Dimension("control and target from different registers".into()));
    }
    if control.value == target.value {
        return Err(Error::SameQubit(control.value));
    }
    let p0 = embed1(&projector(0), control)?;
    let p1 = embed1(&projector(1), control)?;
    Ok(p0.add(&p1.matmul(&embed1(g, target)?)))
}

/// `[[a, b], [c, d]]` entries of a 2×2 gate.
pub(crate) fn entries(g: &ComplexMatrix) -> [C64; 4] {
    [g[(0, 0)], g[(0, 1)], g[(1, 0)], g[(1, 1)]]
}

/// In-place `v ← (embedded g) v`, optionally restricted to `control = 1`.
pub(crate) fn apply_vec(v: &mut [C64], g: [C64; 4], target_mask: usize, control_mask: usize) {
    for i in 0..v.len() {
        if i & target_mask != 0 || i & control_mask != control_mask {
            continue;
        }
        let j = i | target_mask;
        let (a, b) = (v[i], v[j]);
        v[i] = g[0] * a + g[1] * b;
        v[j] = g[2] * a + g[3] * b;
    }
}

/// In-place `M ← (embedded g) M` for a square row-major `M`.
pub(crate) fn apply_left(m: &mut ComplexMatrix, g: [C64; 4], target_mask: usize, control_mask: usize) {
    let d = m.rows();
    let data = m.data_mut();
    for i in 0..d {
        if i & target_mask != 0 || i & control_mask != control_mask {
            continue;
        }
        let j = i | target_mask;
        for k in 0..d {
            let (a, b) = (data[i * d + k], data[j * d + k]);
            data[i * d + k] = g[0] * a + g[1] * b;
            data[j * d + k] = g[2] * a + g[3] * b;
        }
    }
}

/// In-place `M ← M (embedded g)` for a square row-major `M`.
pub(crate) fn apply_right(m: &mut ComplexMatrix, g: [C64; 4], target_mask: usize, control_mask: usize) {
    let d = m.rows();
    let data = m.data_mut();
    for k in 0..d {
        let row = &mut data[k * d..(k + 1) * d];
        for i in 0..d {
            if i & target_mask != 0 || i & control_mask != control_mask {
                continue;
            }
            let j = i | target_mask;
            let (a, b) = (row[i], row[j]);
            row[i] = a * g[0] + b * g[2];
            row[j] = a * g[1] + b * g[3];
        }
    }
}
