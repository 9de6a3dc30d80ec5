//! Layered parameterized circuits and their exact derivatives.
//!
//! Each layer applies its entangler first and then one `rot3d` per qubit:
//! `U_i = [∏_j R³ᵈ_j(φ, θ, ω)] · U_ent` and `U = U_L ⋯ U_1`.
//!
//! Parameter layout, for layer `i` (0-based) and qubit `j` (1-based):
//!
//! * `theta[i·B + 3(j−1) + {0,1,2}]` is `(φ, θ, ω)` of the rotation on qubit `j`,
//! * for [`AnsatzKind::CRotBased`] only, `theta[i·B + 3n + 3(j−1) + {0,1,2}]` is the
//!   `(φ, θ, ω)` of the controlled rotation `Ct_j[R³ᵈ_{j+1}]`,
//!
//! where the block size `B` is `3n`, or `6n` for `CRotBased`.
//!
//! A `rot3d(φ, θ, ω) = R^z(ω) R^y(θ) R^z(φ)` is compiled as three elementary
//! rotations applied in the order `R^z(φ)`, `R^y(θ)`, `R^z(ω)`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gates::{self, Axis, QubitIndex};
use crate::predict::Observable;
use crate::qmat::{herm_expm, kron, ComplexMatrix, ComplexVector, C64, ZERO};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AnsatzKind {
    CnotBased,
    CRotBased,
    Heis1d,
    HeisFC,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnsatzSpec {
    pub kind: AnsatzKind,
    pub n: usize,
    pub layers: usize,
    /// Evolution time of the Heisenberg entangler.
    pub dt: f64,
}

impl AnsatzSpec {
    pub const DEFAULT_DT: f64 = 0.1;

    pub fn new(kind: AnsatzKind, n: usize, layers: usize) -> Result<Self> {
        let spec = Self {
            kind,
            n,
            layers,
            dt: Self::DEFAULT_DT,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Config("ansatz needs at least one qubit".into()));
        }
        if self.n > 12 {
            return Err(Error::Config(format!("{} qubits exceeds the dense simulator", self.n)));
        }
        if self.layers == 0 {
            return Err(Error::Config("ansatz needs at least one layer".into()));
        }
        if matches!(self.kind, AnsatzKind::Heis1d | AnsatzKind::HeisFC) && !(self.dt > 0.0) {
            return Err(Error::Config(format!("Heisenberg dt must be positive, got {}", self.dt)));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    /// Parameters per layer.
    pub fn block(&self) -> usize {
        match self.kind {
            AnsatzKind::CRotBased => 6 * self.n,
            _ => 3 * self.n,
        }
    }
}

pub fn param_count(spec: &AnsatzSpec) -> usize {
    spec.block() * spec.layers
}

/// I.i.d. uniform angles on `[0, 2π)`.
pub fn init_params(spec: &AnsatzSpec, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..param_count(spec)).map(|_| rng.random_range(0.0..2.0 * PI)).collect()
}

/// One elementary operation of a compiled circuit.
#[derive(Clone, Debug)]
pub enum Op {
    /// Parameter-free dense operator.
    Dense(Arc<ComplexMatrix>),
    /// CNOT as a controlled Pauli X.
    Cx { control: usize, target: usize },
    /// `exp(−iθσ/2)` on `target`, optionally controlled (`control = 0` means none).
    Rot {
        axis: Axis,
        target: usize,
        control: usize,
        param: usize,
    },
}

/// Gate sequence of an ansatz, in application order.
///
/// Qubit fields hold 1-based indices. Angles are read from the parameter
/// vector at evaluation time.
#[derive(Clone, Debug)]
pub struct Circuit {
    spec: AnsatzSpec,
    layer_ops: Vec<Vec<Op>>,
}

fn mask(n: usize, q: usize) -> usize {
    if q == 0 {
        0
    } else {
        1 << (n - q)
    }
}

fn rot_entries(axis: Axis, angle: f64) -> [C64; 4] {
    gates::entries(&gates::rot(axis, angle))
}

/// `−(i/2) σ R(angle)`.
fn rot_deriv_entries(axis: Axis, angle: f64) -> [C64; 4] {
    let d = gates::pauli(axis)
        .matmul(&gates::rot(axis, angle))
        .scale(C64::new(0.0, -0.5));
    gates::entries(&d)
}

fn adjoint_entries(g: [C64; 4]) -> [C64; 4] {
    [g[0].conj(), g[2].conj(), g[1].conj(), g[3].conj()]
}

const X_ENTRIES: [C64; 4] = [ZERO, C64::new(1.0, 0.0), C64::new(1.0, 0.0), ZERO];

/// `Σ_{i<j} J_ij σ⃗_i·σ⃗_j` with the 1d or fully-connected couplings.
pub fn heisenberg_hamiltonian(kind: AnsatzKind, n: usize) -> Result<ComplexMatrix> {
    let d = 1 << n;
    let mut h = ComplexMatrix::zeros(d, d);
    for i in 1..=n {
        for j in i + 1..=n {
            let coupling = match kind {
                AnsatzKind::Heis1d if j == i + 1 => 1.0,
                AnsatzKind::Heis1d => continue,
                AnsatzKind::HeisFC => 1.0 / n as f64,
                _ => return Err(Error::Config("not a Heisenberg ansatz".into())),
            };
            for axis in [Axis::X, Axis::Y, Axis::Z] {
                let s = gates::pauli(axis);
                let si = gates::embed1(&s, QubitIndex::new(i, n)?)?;
                let sj = gates::embed1(&s, QubitIndex::new(j, n)?)?;
                h = h.add(&si.matmul(&sj).scale(C64::new(coupling, 0.0)));
            }
        }
    }
    Ok(h)
}

impl Circuit {
    pub fn compile(spec: &AnsatzSpec) -> Result<Self> {
        spec.validate()?;
        let n = spec.n;
        let heis = match spec.kind {
            AnsatzKind::Heis1d | AnsatzKind::HeisFC => {
                let h = heisenberg_hamiltonian(spec.kind, n)?;
                Some(Arc::new(herm_expm(&h, spec.dt)?))
            }
            _ => None,
        };
        let block = spec.block();
        let mut layer_ops = Vec::with_capacity(spec.layers);
        for layer in 0..spec.layers {
            let base = layer * block;
            let mut ops = Vec::new();
            // Ring order: Ct_1[·_2] acts first, Ct_n[·_1] last; no ring for n = 1.
            match spec.kind {
                AnsatzKind::CnotBased if n > 1 => {
                    for j in 1..=n {
                        ops.push(Op::Cx {
                            control: j,
                            target: j % n + 1,
                        });
                    }
                }
                AnsatzKind::CRotBased if n > 1 => {
                    for j in 1..=n {
                        let p = base + 3 * n + 3 * (j - 1);
                        for (k, axis) in [Axis::Z, Axis::Y, Axis::Z].into_iter().enumerate() {
                            ops.push(Op::Rot {
                                axis,
                                target: j % n + 1,
                                control: j,
                                param: p + k,
                            });
                        }
                    }
                }
                AnsatzKind::Heis1d | AnsatzKind::HeisFC => {
                    ops.push(Op::Dense(heis.clone().expect("Heisenberg entangler")));
                }
                _ => {}
            }
            for j in 1..=n {
                let p = base + 3 * (j - 1);
                for (k, axis) in [Axis::Z, Axis::Y, Axis::Z].into_iter().enumerate() {
                    ops.push(Op::Rot {
                        axis,
                        target: j,
                        control: 0,
                        param: p + k,
                    });
                }
            }
            layer_ops.push(ops);
        }
        Ok(Self { spec: *spec, layer_ops })
    }

    pub fn spec(&self) -> &AnsatzSpec {
        &self.spec
    }

    pub fn layers(&self) -> &[Vec<Op>] {
        &self.layer_ops
    }

    pub fn ops(&self) -> impl DoubleEndedIterator<Item = &Op> + Clone {
        self.layer_ops.iter().flatten()
    }

    fn check_len(&self, theta: &[f64]) -> Result<()> {
        let expected = param_count(&self.spec);
        if theta.len() != expected {
            return Err(Error::ParamLength {
                expected,
                got: theta.len(),
            });
        }
        Ok(())
    }

    fn apply_op_vec(&self, op: &Op, theta: &[f64], v: &mut Vec<C64>, adjoint: bool) {
        let n = self.spec.n;
        match op {
            Op::Dense(m) => {
                let m = if adjoint { m.adjoint() } else { (**m).clone() };
                *v = m.mul_vec(&ComplexVector::new(std::mem::take(v))).data().to_vec();
            }
            Op::Cx { control, target } => gates::apply_vec(v, X_ENTRIES, mask(n, *target), mask(n, *control)),
            Op::Rot {
                axis,
                target,
                control,
                param,
            } => {
                let g = rot_entries(*axis, theta[*param]);
                let g = if adjoint { adjoint_entries(g) } else { g };
                gates::apply_vec(v, g, mask(n, *target), mask(n, *control));
            }
        }
    }

    fn apply_op_left(&self, op: &Op, theta: &[f64], m: &mut ComplexMatrix) {
        let n = self.spec.n;
        match op {
            Op::Dense(g) => *m = g.matmul(m),
            Op::Cx { control, target } => gates::apply_left(m, X_ENTRIES, mask(n, *target), mask(n, *control)),
            Op::Rot {
                axis,
                target,
                control,
                param,
            } => gates::apply_left(m, rot_entries(*axis, theta[*param]), mask(n, *target), mask(n, *control)),
        }
    }

    fn apply_op_left_adjoint(&self, op: &Op, theta: &[f64], m: &mut ComplexMatrix) {
        let n = self.spec.n;
        match op {
            Op::Dense(g) => *m = g.adjoint().matmul(m),
            Op::Cx { control, target } => gates::apply_left(m, X_ENTRIES, mask(n, *target), mask(n, *control)),
            Op::Rot {
                axis,
                target,
                control,
                param,
            } => gates::apply_left(
                m,
                adjoint_entries(rot_entries(*axis, theta[*param])),
                mask(n, *target),
                mask(n, *control),
            ),
        }
    }

    fn apply_op_right(&self, op: &Op, theta: &[f64], m: &mut ComplexMatrix) {
        let n = self.spec.n;
        match op {
            Op::Dense(g) => *m = m.matmul(g),
            Op::Cx { control, target } => gates::apply_right(m, X_ENTRIES, mask(n, *target), mask(n, *control)),
            Op::Rot {
                axis,
                target,
                control,
                param,
            } => gates::apply_right(m, rot_entries(*axis, theta[*param]), mask(n, *target), mask(n, *control)),
        }
    }

    /// `∂G/∂θ` applied from the left; zero on the control-0 subspace.
    fn apply_deriv_left(&self, op: &Op, theta: &[f64], m: &mut ComplexMatrix) {
        let n = self.spec.n;
        if let Op::Rot {
            axis,
            target,
            control,
            param,
        } = op
        {
            let cm = mask(n, *control);
            gates::apply_left(m, rot_deriv_entries(*axis, theta[*param]), mask(n, *target), cm);
            let d = m.rows();
            for i in 0..d {
                if i & cm != cm {
                    m.data_mut()[i * d..(i + 1) * d].fill(ZERO);
                }
            }
        } else {
            unreachable!("derivative of a parameter-free op");
        }
    }

    fn apply_deriv_vec(&self, op: &Op, theta: &[f64], v: &mut [C64]) {
        let n = self.spec.n;
        if let Op::Rot {
            axis,
            target,
            control,
            param,
        } = op
        {
            let cm = mask(n, *control);
            gates::apply_vec(v, rot_deriv_entries(*axis, theta[*param]), mask(n, *target), cm);
            for (i, z) in v.iter_mut().enumerate() {
                if i & cm != cm {
                    *z = ZERO;
                }
            }
        } else {
            unreachable!("derivative of a parameter-free op");
        }
    }

    pub fn unitary(&self, theta: &[f64]) -> Result<ComplexMatrix> {
        self.check_len(theta)?;
        let mut u = ComplexMatrix::identity(self.spec.dim());
        for op in self.ops() {
            self.apply_op_left(op, theta, &mut u);
        }
        Ok(u)
    }

    /// `U(θ) ψ`.
    pub fn apply(&self, theta: &[f64], psi: &ComplexVector) -> Result<ComplexVector> {
        self.check_len(theta)?;
        if psi.dim() != self.spec.dim() {
            return Err(Error::Dimension(format!(
                "state of dimension {} for a {}-qubit circuit",
                psi.dim(),
                self.spec.n
            )));
        }
        let mut v = psi.data().to_vec();
        for op in self.ops() {
            self.apply_op_vec(op, theta, &mut v, false);
        }
        Ok(ComplexVector::new(v))
    }

    /// Exact `∂U/∂θ_j`.
    pub fn derivative(&self, theta: &[f64], j: usize) -> Result<ComplexMatrix> {
        self.check_len(theta)?;
        if j >= theta.len() {
            return Err(Error::Config(format!("parameter index {j} out of range")));
        }
        let ops: Vec<&Op> = self.ops().collect();
        let mut m = ComplexMatrix::identity(self.spec.dim());
        let mut found = false;
        for op in ops {
            match op {
                Op::Rot { param, .. } if *param == j => {
                    self.apply_deriv_left(op, theta, &mut m);
                    found = true;
                }
                _ => self.apply_op_left(op, theta, &mut m),
            }
        }
        if !found {
            // Only reachable for the dead entangler block of a one-qubit CRot ansatz.
            return Ok(ComplexMatrix::zeros(self.spec.dim(), self.spec.dim()));
        }
        Ok(m)
    }

    /// `∂/∂θ_j Tr[M U(θ)]` for every `j`, plus `U(θ)`.
    ///
    /// Walks the gate list backwards, recovering each prefix product from the
    /// next one by `F_{k−1} = G_k† F_k`, so memory stays at a few `d×d` buffers.
    pub fn trace_gradient(&self, theta: &[f64], m: &ComplexMatrix) -> Result<(ComplexMatrix, Vec<C64>)> {
        let u = self.unitary(theta)?;
        let d = self.spec.dim();
        let mut grad = vec![ZERO; theta.len()];
        let mut f = u.clone();
        let mut r = m.clone();
        let mut scratch = ComplexMatrix::zeros(d, d);
        for op in self.ops().rev() {
            self.apply_op_left_adjoint(op, theta, &mut f);
            if let Op::Rot { param, .. } = op {
                scratch.data_mut().copy_from_slice(f.data());
                self.apply_deriv_left(op, theta, &mut scratch);
                grad[*param] += trace_product(&r, &scratch);
            }
            self.apply_op_right(op, theta, &mut r);
        }
        Ok((u, grad))
    }
}

/// `Tr[A B]` for square matrices of equal size.
pub(crate) fn trace_product(a: &ComplexMatrix, b: &ComplexMatrix) -> C64 {
    let d = a.rows();
    let mut acc = ZERO;
    for i in 0..d {
        let ar = a.row(i);
        for (k, &x) in ar.iter().enumerate() {
            acc += x * b.data()[k * d + i];
        }
    }
    acc
}

/// Dense entangler of one layer. `CRotBased` takes the layer's `3n`
/// controlled-rotation angles; the other kinds take none.
pub fn entangler(spec: &AnsatzSpec, layer_params: Option<&[f64]>) -> Result<ComplexMatrix> {
    spec.validate()?;
    let n = spec.n;
    let needed = if spec.kind == AnsatzKind::CRotBased { 3 * n } else { 0 };
    let got = layer_params.map_or(0, <[f64]>::len);
    if got != needed {
        return Err(Error::ParamLength { expected: needed, got });
    }
    let d = spec.dim();
    match spec.kind {
        AnsatzKind::CnotBased | AnsatzKind::CRotBased => {
            let mut u = ComplexMatrix::identity(d);
            if n == 1 {
                return Ok(u);
            }
            for j in 1..=n {
                let c = QubitIndex::new(j, n)?;
                let t = QubitIndex::new(j % n + 1, n)?;
                let g = match (spec.kind, layer_params) {
                    (AnsatzKind::CRotBased, Some(p)) => {
                        let a = &p[3 * (j - 1)..3 * j];
                        gates::rot3d(a[0], a[1], a[2])
                    }
                    _ => gates::pauli(Axis::X),
                };
                u = gates::controlled(c, t, &g)?.matmul(&u);
            }
            Ok(u)
        }
        AnsatzKind::Heis1d | AnsatzKind::HeisFC => herm_expm(&heisenberg_hamiltonian(spec.kind, n)?, spec.dt),
    }
}

/// Assembles `U_c(θ)` from dense gate matrices, layer by layer.
///
/// This is the reference path; [`Circuit::unitary`] applies the same gates
/// in structured form.
pub fn build_unitary(spec: &AnsatzSpec, theta: &[f64]) -> Result<ComplexMatrix> {
    spec.validate()?;
    let expected = param_count(spec);
    if theta.len() != expected {
        return Err(Error::ParamLength {
            expected,
            got: theta.len(),
        });
    }
    let n = spec.n;
    let block = spec.block();
    let mut u = ComplexMatrix::identity(spec.dim());
    for layer in theta.chunks(block) {
        let ent_params = (spec.kind == AnsatzKind::CRotBased).then(|| &layer[3 * n..]);
        let ent = entangler(spec, ent_params)?;
        let mut rots = ComplexMatrix::identity(1);
        for j in 0..n {
            let a = &layer[3 * j..3 * j + 3];
            rots = kron(&rots, &gates::rot3d(a[0], a[1], a[2]));
        }
        u = rots.matmul(&ent).matmul(&u);
    }
    Ok(u)
}

pub fn unitary_derivative(spec: &AnsatzSpec, theta: &[f64], j: usize) -> Result<ComplexMatrix> {
    Circuit::compile(spec)?.derivative(theta, j)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GradMethod {
    /// Adjoint sweep over the product-rule derivative of every gate.
    Analytic,
    /// `½[f(θ+π/2) − f(θ−π/2)]` for plain rotations; controlled rotations
    /// fall back to the analytic derivative.
    ParameterShift,
}

/// `Σ_j ξ_j Re ψ†U†O_jUψ`.
pub fn circuit_expectation(circuit: &Circuit, theta: &[f64], psi: &ComplexVector, obs: &[Observable]) -> Result<f64> {
    let phi = circuit.apply(theta, psi)?;
    weighted_expectation(obs, &phi)
}

fn weighted_expectation(obs: &[Observable], phi: &ComplexVector) -> Result<f64> {
    let mut acc = 0.0;
    for o in obs {
        if o.matrix.rows() != phi.dim() {
            return Err(Error::Dimension("observable does not match circuit".into()));
        }
        acc += o.weight * phi.dot(&o.matrix.mul_vec(phi)).re;
    }
    Ok(acc)
}

/// `∂/∂θ_j Σ_k ξ_k ⟨O_k⟩` for all parameters.
pub fn expectation_gradient_with(
    circuit: &Circuit,
    theta: &[f64],
    psi: &ComplexVector,
    obs: &[Observable],
    method: GradMethod,
) -> Result<Vec<f64>> {
    let phi = circuit.apply(theta, psi)?;
    let mut grad = vec![0.0; theta.len()];
    let mut lambda = ComplexVector::zeros(phi.dim());
    for o in obs {
        if o.matrix.rows() != phi.dim() {
            return Err(Error::Dimension("observable does not match circuit".into()));
        }
        let ov = o.matrix.mul_vec(&phi);
        for (l, x) in lambda.data_mut().iter_mut().zip(ov.data()) {
            *l += x * o.weight;
        }
    }
    let mut lam = lambda.data().to_vec();
    let mut state = phi.data().to_vec();
    let mut scratch = vec![ZERO; state.len()];
    let ops: Vec<&Op> = circuit.ops().collect();
    for op in ops.iter().rev() {
        circuit.apply_op_vec(op, theta, &mut state, true);
        if let Op::Rot { param, control, .. } = op {
            let shifted = method == GradMethod::ParameterShift && *control == 0;
            if !shifted {
                scratch.copy_from_slice(&state);
                circuit.apply_deriv_vec(op, theta, &mut scratch);
                let ip: C64 = lam.iter().zip(&scratch).map(|(a, b)| a.conj() * b).sum();
                grad[*param] += 2.0 * ip.re;
            }
        }
        circuit.apply_op_vec(op, theta, &mut lam, true);
    }
    if method == GradMethod::ParameterShift {
        let mut shifted = theta.to_vec();
        for op in &ops {
            if let Op::Rot { param, control: 0, .. } = op {
                let j = *param;
                shifted[j] = theta[j] + FRAC_PI_2;
                let plus = circuit_expectation(circuit, &shifted, psi, obs)?;
                shifted[j] = theta[j] - FRAC_PI_2;
                let minus = circuit_expectation(circuit, &shifted, psi, obs)?;
                shifted[j] = theta[j];
                grad[j] += 0.5 * (plus - minus);
            }
        }
    }
    Ok(grad)
}

/// Analytic gradient of the weighted expectation through `build_unitary(spec, θ)`.
pub fn expectation_gradient(spec: &AnsatzSpec, theta: &[f64], psi: &ComplexVector, obs: &[Observable]) -> Result<Vec<f64>> {
    expectation_gradient_with(&Circuit::compile(spec)?, theta, psi, obs, GradMethod::Analytic)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmat::frobenius_norm;

    fn spec(kind: AnsatzKind, n: usize, l: usize) -> AnsatzSpec {
        AnsatzSpec::new(kind, n, l).unwrap()
    }

    const KINDS: [AnsatzKind; 4] = [
        AnsatzKind::CnotBased,
        AnsatzKind::CRotBased,
        AnsatzKind::Heis1d,
        AnsatzKind::HeisFC,
    ];

    fn random_state(seed: u64, dim: usize) -> ComplexVector {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = ComplexVector::new(
            (0..dim)
                .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect(),
        );
        let n = v.norm();
        v.scale(C64::new(1.0 / n, 0.0))
    }

    #[test]
    fn param_counts() {
        assert_eq!(param_count(&spec(AnsatzKind::CnotBased, 2, 5)), 30);
        assert_eq!(param_count(&spec(AnsatzKind::CRotBased, 4, 5)), 120);
        assert_eq!(param_count(&spec(AnsatzKind::Heis1d, 6, 5)), 90);
    }

    #[test]
    fn spec_validation() {
        assert!(AnsatzSpec::new(AnsatzKind::CnotBased, 2, 0).is_err());
        assert!(AnsatzSpec::new(AnsatzKind::CnotBased, 0, 1).is_err());
        let mut s = spec(AnsatzKind::Heis1d, 2, 1);
        s.dt = 0.0;
        assert!(s.validate().is_err());
    }

    #[test]
    fn cnot_ring_two_qubits() {
        let x = gates::pauli(Axis::X);
        let q = |v| QubitIndex::new(v, 2).unwrap();
        let c12 = gates::controlled(q(1), q(2), &x).unwrap();
        let c21 = gates::controlled(q(2), q(1), &x).unwrap();
        let expected = c21.matmul(&c12);
        let got = entangler(&spec(AnsatzKind::CnotBased, 2, 1), None).unwrap();
        assert_eq!(got, expected);
    }

    #[test]
    fn crot_entangler_zero_angles_is_identity() {
        let s = spec(AnsatzKind::CRotBased, 3, 1);
        let e = entangler(&s, Some(&[0.0; 9])).unwrap();
        assert!(frobenius_norm(&e.sub(&ComplexMatrix::identity(8))) < 1e-15);
        assert!(matches!(entangler(&s, None), Err(Error::ParamLength { .. })));
    }

    #[test]
    fn heisenberg_entangler_conserves_total_z() {
        for kind in [AnsatzKind::Heis1d, AnsatzKind::HeisFC] {
            let s = spec(kind, 3, 1);
            let e = entangler(&s, None).unwrap();
            assert!(e.unitary_residual() < 1e-12);
            let mut sz = ComplexMatrix::zeros(8, 8);
            for q in 1..=3 {
                sz = sz.add(&gates::embed1(&gates::pauli(Axis::Z), QubitIndex::new(q, 3).unwrap()).unwrap());
            }
            let comm = e.matmul(&sz).sub(&sz.matmul(&e));
            assert!(frobenius_norm(&comm) < 1e-12);
        }
    }

    #[test]
    fn heisenberg_couplings() {
        // Open chain on three qubits couples (1,2) and (2,3) only.
        let h1 = heisenberg_hamiltonian(AnsatzKind::Heis1d, 3).unwrap();
        let hf = heisenberg_hamiltonian(AnsatzKind::HeisFC, 3).unwrap();
        // Tr[(σ⃗·σ⃗)²] = 3·d per pair, and pairs are orthogonal.
        assert!((h1.matmul(&h1).trace().re - 2.0 * 3.0 * 8.0).abs() < 1e-12);
        assert!((hf.matmul(&hf).trace().re - 3.0 * 3.0 * 8.0 / 9.0).abs() < 1e-12);
    }

    #[test]
    fn zero_angle_crot_circuit_is_identity() {
        let s = spec(AnsatzKind::CRotBased, 2, 3);
        let u = build_unitary(&s, &vec![0.0; param_count(&s)]).unwrap();
        assert!(frobenius_norm(&u.sub(&ComplexMatrix::identity(4))) < 1e-15);
    }

    #[test]
    fn single_qubit_cnot_ring_is_bare_rotation() {
        let s = spec(AnsatzKind::CnotBased, 1, 1);
        let u = build_unitary(&s, &[0.3, 1.1, -0.4]).unwrap();
        assert!(frobenius_norm(&u.sub(&gates::rot3d(0.3, 1.1, -0.4))) < 1e-15);
    }

    #[test]
    fn structured_unitary_matches_dense_assembly() {
        for kind in KINDS {
            for n in 1..=3 {
                let s = spec(kind, n, 2);
                let theta = init_params(&s, 11 + n as u64);
                let dense = build_unitary(&s, &theta).unwrap();
                let fast = Circuit::compile(&s).unwrap().unitary(&theta).unwrap();
                assert!(frobenius_norm(&dense.sub(&fast)) < 1e-12, "{kind:?} n={n}");
            }
        }
    }

    #[test]
    fn unitarity_over_random_parameters() {
        for kind in KINDS {
            let s = spec(kind, 3, 4);
            let c = Circuit::compile(&s).unwrap();
            for seed in 0..100 {
                let u = c.unitary(&init_params(&s, seed)).unwrap();
                assert!(u.unitary_residual() < 1e-10);
            }
        }
    }

    #[test]
    fn derivative_matches_central_difference() {
        let h = 1e-6;
        for kind in KINDS {
            let s = spec(kind, 2, 2);
            let c = Circuit::compile(&s).unwrap();
            let theta = init_params(&s, 5);
            for j in 0..theta.len() {
                let d = c.derivative(&theta, j).unwrap();
                let mut tp = theta.clone();
                tp[j] += h;
                let mut tm = theta.clone();
                tm[j] -= h;
                let fd = build_unitary(&s, &tp)
                    .unwrap()
                    .sub(&build_unitary(&s, &tm).unwrap())
                    .scale(C64::new(0.5 / h, 0.0));
                let err = frobenius_norm(&d.sub(&fd));
                assert!(err <= 1e-6 * frobenius_norm(&d).max(1.0), "{kind:?} j={j} err={err}");
            }
        }
    }

    #[test]
    fn derivative_of_single_qubit_first_angle() {
        // ∂/∂φ [Rz(ω) Ry(θ) Rz(φ)] = Rz(ω) Ry(θ) (−i/2) Z Rz(φ).
        let s = spec(AnsatzKind::CnotBased, 1, 1);
        let (p, t, w) = (0.2, 0.9, -1.3);
        let d = unitary_derivative(&s, &[p, t, w], 0).unwrap();
        let expected = gates::rot(Axis::Z, w)
            .matmul(&gates::rot(Axis::Y, t))
            .matmul(&gates::pauli(Axis::Z).scale(C64::new(0.0, -0.5)))
            .matmul(&gates::rot(Axis::Z, p));
        assert!(frobenius_norm(&d.sub(&expected)) < 1e-15);
    }

    #[test]
    fn controlled_angle_derivative_at_zero_is_projected_generator() {
        // With every angle 0, ∂U/∂(first controlled φ) = P¹_1 ⊗ (−i/2)Z on qubit 2.
        let s = spec(AnsatzKind::CRotBased, 2, 1);
        let theta = vec![0.0; param_count(&s)];
        let d = unitary_derivative(&s, &theta, 6).unwrap();
        let expected = kron(&gates::projector(1), &gates::pauli(Axis::Z)).scale(C64::new(0.0, -0.5));
        assert!(frobenius_norm(&d.sub(&expected)) < 1e-15);
    }

    #[test]
    fn rx_expectation_gradient_closed_form() {
        // Rz(−π/2) Ry(θ) Rz(π/2) = Rx(θ); d⟨Z⟩/dθ = −sin θ.
        let s = spec(AnsatzKind::CnotBased, 1, 1);
        let theta = [FRAC_PI_2, PI / 4.0, -FRAC_PI_2];
        let c = Circuit::compile(&s).unwrap();
        let u = c.unitary(&theta).unwrap();
        assert!(frobenius_norm(&u.sub(&gates::rot(Axis::X, PI / 4.0))) < 1e-15);
        let psi = ComplexVector::basis(2, 0);
        let obs = [Observable::z1(1)];
        for method in [GradMethod::Analytic, GradMethod::ParameterShift] {
            let g = expectation_gradient_with(&c, &theta, &psi, &obs, method).unwrap();
            assert!((g[1] + (PI / 4.0).sin()).abs() < 1e-14);
        }
    }

    #[test]
    fn identity_observable_has_zero_gradient() {
        let s = spec(AnsatzKind::HeisFC, 2, 2);
        let theta = init_params(&s, 3);
        let obs = [Observable::new(ComplexMatrix::identity(4), 1.0).unwrap()];
        let g = expectation_gradient(&s, &theta, &random_state(1, 4), &obs).unwrap();
        assert!(g.iter().all(|x| x.abs() < 1e-14));
    }

    #[test]
    fn trace_gradient_matches_dense_derivatives() {
        for kind in KINDS {
            let s = spec(kind, 2, 2);
            let c = Circuit::compile(&s).unwrap();
            let theta = init_params(&s, 17);
            let m = ComplexMatrix::from_fn(4, 4, |i, j| C64::new(i as f64 - 0.5 * j as f64, 0.3 * (i * j) as f64));
            let (u, g) = c.trace_gradient(&theta, &m).unwrap();
            assert!(frobenius_norm(&u.sub(&build_unitary(&s, &theta).unwrap())) < 1e-12);
            for (j, gj) in g.iter().enumerate() {
                let direct = m.matmul(&c.derivative(&theta, j).unwrap()).trace();
                assert!((gj - direct).norm() < 1e-11, "{kind:?} j={j}");
            }
        }
    }

    #[test]
    fn init_params_range_and_determinism() {
        let s = spec(AnsatzKind::CRotBased, 3, 2);
        let a = init_params(&s, 9);
        assert_eq!(a, init_params(&s, 9));
        assert!(a.iter().all(|&x| (0.0..2.0 * PI).contains(&x)));
    }
}
