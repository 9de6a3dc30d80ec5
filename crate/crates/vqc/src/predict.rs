//! Prediction head, losses and the classifier-as-kernel identity.

use crate::error::{Error, Result};
use crate::gates::{self, Axis, QubitIndex};
use crate::qmat::{ComplexMatrix, ComplexVector};
use crate::tol;

/// A Hermitian observable `O_j` with weight `ξ_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct Observable {
    pub matrix: ComplexMatrix,
    pub weight: f64,
}

impl Observable {
    pub fn new(matrix: ComplexMatrix, weight: f64) -> Result<Self> {
        let residual = matrix.hermitian_residual();
        if residual > tol::HERMITIAN {
            return Err(Error::NotHermitian { residual });
        }
        Ok(Self { matrix, weight })
    }

    /// `Z` on qubit 1 with `ξ = 1`, the default readout.
    pub fn z1(n: usize) -> Self {
        let q = QubitIndex::new(1, n).expect("n >= 1");
        Self {
            matrix: gates::embed1(&gates::pauli(Axis::Z), q).expect("2x2 gate"),
            weight: 1.0,
        }
    }
}

/// `Σ_j ξ_j O_j`.
pub fn weighted_observable(obs: &[Observable]) -> Result<ComplexMatrix> {
    let first = obs.first().ok_or(Error::Empty("observable list"))?;
    let d = first.matrix.rows();
    let mut w = ComplexMatrix::zeros(d, d);
    for o in obs {
        if o.matrix.rows() != d {
            return Err(Error::Dimension("observables of different sizes".into()));
        }
        w = w.add(&o.matrix.scale(o.weight.into()));
    }
    Ok(w)
}

/// `Σ_j ξ_j Re(ψ†U†O_jUψ) + θ_b`. `u` need not be unitary.
pub fn f_pred(u: &ComplexMatrix, psi: &ComplexVector, obs: &[Observable], theta_b: f64) -> Result<f64> {
    if u.cols() != psi.dim() || !u.is_square() {
        return Err(Error::Dimension(format!(
            "operator {}x{} on state of dimension {}",
            u.rows(),
            u.cols(),
            psi.dim()
        )));
    }
    let phi = u.mul_vec(psi);
    let mut acc = theta_b;
    for o in obs {
        if o.matrix.rows() != phi.dim() {
            return Err(Error::Dimension("observable does not match operator".into()));
        }
        acc += o.weight * phi.dot(&o.matrix.mul_vec(&phi)).re;
    }
    Ok(acc)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LossKind {
    SquaredError,
    Hinge,
    /// Labels in `{0, 1}` and predictions in `(0, 1)`.
    CrossEntropy,
}

fn check_label(kind: LossKind, y: f64) -> Result<()> {
    let ok = match kind {
        LossKind::CrossEntropy => y == 0.0 || y == 1.0,
        _ => y == 1.0 || y == -1.0,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::Label(y))
    }
}

pub fn loss(kind: LossKind, y: f64, z: f64) -> Result<f64> {
    check_label(kind, y)?;
    match kind {
        LossKind::SquaredError => Ok(0.5 * (y - z) * (y - z)),
        LossKind::Hinge => Ok((1.0 - y * z).max(0.0)),
        LossKind::CrossEntropy => {
            if !(z > 0.0 && z < 1.0) {
                return Err(Error::CrossEntropyDomain(z));
            }
            Ok(-y * z.ln() - (1.0 - y) * (1.0 - z).ln())
        }
    }
}

/// `dℓ/dz`. The hinge subgradient is 0 at the kink `yz = 1`.
pub fn loss_grad(kind: LossKind, y: f64, z: f64) -> Result<f64> {
    check_label(kind, y)?;
    match kind {
        LossKind::SquaredError => Ok(-(y - z)),
        LossKind::Hinge => Ok(if y * z < 1.0 { -y } else { 0.0 }),
        LossKind::CrossEntropy => {
            if !(z > 0.0 && z < 1.0) {
                return Err(Error::CrossEntropyDomain(z));
            }
            Ok(-y / z + (1.0 - y) / (1.0 - z))
        }
    }
}

/// `|f_pred(x; U, 0) − Σ_{kl} w_kl ψ_k* ψ_l|` with `w = Σ_j ξ_j U†O_jU`.
pub fn correspondence_check(u: &ComplexMatrix, obs: &[Observable], psi: &ComplexVector) -> Result<f64> {
    let f = f_pred(u, psi, obs, 0.0)?;
    let w = u.adjoint().matmul(&weighted_observable(obs)?).matmul(u);
    let amp = psi.data();
    let mut sum = num_complex::Complex64::new(0.0, 0.0);
    for (k, ak) in amp.iter().enumerate() {
        for (l, al) in amp.iter().enumerate() {
            sum += w[(k, l)] * ak.conj() * al;
        }
    }
    Ok((f - sum.re).abs().max(sum.im.abs()))
}

/// `sign(z) = y` rate, with `sign(0) = +1`.
pub fn accuracy(predictions: &[f64], labels: &[f64]) -> Result<f64> {
    if predictions.is_empty() {
        return Err(Error::Empty("predictions"));
    }
    if predictions.len() != labels.len() {
        return Err(Error::Dimension(format!(
            "{} predictions for {} labels",
            predictions.len(),
            labels.len()
        )));
    }
    let hits = predictions
        .iter()
        .zip(labels)
        .filter(|(&z, &y)| sign(z) == y)
        .count();
    Ok(hits as f64 / predictions.len() as f64)
}

pub fn sign(z: f64) -> f64 {
    if z >= 0.0 {
        1.0
    } else {
        -1.0
    }
}
