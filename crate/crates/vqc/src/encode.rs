//! Amplitude encoding with zero padding to `2^n` entries, `n = ⌈log₂ M⌉`.

use crate::error::{Error, Result};
use crate::qmat::{ComplexVector, C64};

/// `⌈log₂ M⌉`, at least 1.
pub fn qubits_for(m: usize) -> usize {
    assert!(m >= 1, "feature dimension must be positive");
    let mut n = 0;
    while (1usize << n) < m {
        n += 1;
    }
    n.max(1)
}

/// `x / ‖x‖` padded with zeros to dimension `2^n`.
pub fn amplitude_encode(x: &[f64]) -> Result<ComplexVector> {
    if x.is_empty() {
        return Err(Error::Empty("feature vector"));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("feature vector"));
    }
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::ZeroVector);
    }
    let mut amps = vec![C64::new(0.0, 0.0); 1 << qubits_for(x.len())];
    for (a, &v) in amps.iter_mut().zip(x) {
        a.re = v / norm;
    }
    Ok(ComplexVector::new(amps))
}

/// Amplitude-encoded samples with `±1` labels.
#[derive(Clone, Debug)]
pub struct EncodedSet {
    pub states: Vec<ComplexVector>,
    pub labels: Vec<f64>,
    pub n_qubits: usize,
}

impl EncodedSet {
    /// Encodes every row; rows must share one dimension and labels must be `±1`.
    pub fn new<R: AsRef<[f64]>>(rows: &[R], labels: &[f64]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Empty("dataset"));
        }
        if rows.len() != labels.len() {
            return Err(Error::Dimension(format!("{} rows for {} labels", rows.len(), labels.len())));
        }
        if let Some(&bad) = labels.iter().find(|&&y| y != 1.0 && y != -1.0) {
            return Err(Error::Label(bad));
        }
        let m = rows[0].as_ref().len();
        let states = rows
            .iter()
            .map(|r| {
                if r.as_ref().len() != m {
                    return Err(Error::Dimension("ragged feature rows".into()));
                }
                amplitude_encode(r.as_ref())
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            states,
            labels: labels.to_vec(),
            n_qubits: qubits_for(m),
        })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }
}
