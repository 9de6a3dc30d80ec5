//! Variational circuit realization: fit a layered ansatz and a global phase
//! to a target unitary.
//!
//! With `A(θ, λ) = e^{−iλ} U_c(θ)` the cost is `‖C‖_F^p` where `C = U†A − I`
//! ([`CostKind::Relative`]) or `C = A − U` ([`CostKind::Difference`]). Both
//! agree whenever `U_c` is unitary.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::ansatz::{param_count, AnsatzKind, AnsatzSpec, Circuit, Op};
use crate::error::{Error, Result};
use crate::gates::{self, Axis, QubitIndex};
use crate::optim::{bfgs_minimize, LineSearchCfg};
use crate::qmat::{ComplexMatrix, C64, ZERO};
use crate::{ansatz, tol};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum CostKind {
    /// `‖U†A − I‖_F^p`.
    #[default]
    Relative,
    /// `‖U − A‖_F^p`.
    Difference,
}

#[derive(Clone, Debug)]
pub struct VcrProblem {
    pub target: ComplexMatrix,
    /// Kind, qubit count and `dt`; `layers` is set per synthesis.
    pub spec: AnsatzSpec,
    pub p: f64,
    pub cost: CostKind,
    pub restarts: usize,
    pub seed: u64,
    pub max_iters: usize,
    pub grad_tol: f64,
}

impl VcrProblem {
    /// Defaults: `p = 2`, 20 restarts, 2000 BFGS iterations, gradient tolerance 1e-9.
    pub fn new(target: ComplexMatrix, spec: AnsatzSpec) -> Result<Self> {
        let problem = Self {
            target,
            spec,
            p: 2.0,
            cost: CostKind::Relative,
            restarts: 20,
            seed: 0,
            max_iters: 2000,
            grad_tol: 1e-9,
        };
        problem.validate()?;
        Ok(problem)
    }

    pub fn validate(&self) -> Result<()> {
        self.spec.validate()?;
        if self.target.rows() != self.spec.dim() || !self.target.is_square() {
            return Err(Error::Dimension(format!(
                "{}x{} target for {} qubits",
                self.target.rows(),
                self.target.cols(),
                self.spec.n
            )));
        }
        let residual = self.target.unitary_residual();
        if residual > tol::UNITARY_LOAD {
            return Err(Error::NotUnitary { residual });
        }
        if !(self.p > 0.0) {
            return Err(Error::Config(format!("cost exponent p must be positive, got {}", self.p)));
        }
        if self.restarts == 0 {
            return Err(Error::Config("at least one restart is required".into()));
        }
        Ok(())
    }

    fn with_layers(&self, layers: usize) -> Result<AnsatzSpec> {
        let spec = AnsatzSpec { layers, ..self.spec };
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Clone, Debug)]
pub struct VcrResult {
    pub theta: Vec<f64>,
    pub lambda: f64,
    pub cost: f64,
    pub layers: usize,
    pub converged: bool,
    /// Index of the winning restart.
    pub restart: usize,
    pub iterations: usize,
    /// Cost at the start and after every BFGS iteration of the winning restart.
    pub trace: Vec<f64>,
}

/// Cost and gradient at `(θ, λ)`; the gradient has `λ` as its last entry.
pub fn vcr_cost(problem: &VcrProblem, circuit: &Circuit, theta: &[f64], lambda: f64) -> Result<(f64, Vec<f64>)> {
    let d = problem.spec.dim();
    let phase = C64::from_polar(1.0, -lambda);
    let uc = circuit.unitary(theta)?;
    let a = uc.scale(phase);
    let (c, m_base) = match problem.cost {
        CostKind::Relative => (problem.target.adjoint().matmul(&a).sub(&ComplexMatrix::identity(d)), problem.target.adjoint()),
        CostKind::Difference => (a.sub(&problem.target), ComplexMatrix::identity(d)),
    };
    // ∂C/∂θ_j = e^{−iλ} B ∂U_c, with B = U† or I.
    let m = c.adjoint().matmul(&m_base).scale(phase);
    let (_, dtr) = circuit.trace_gradient(theta, &m)?;
    let sq: f64 = c.data().iter().map(|z| z.norm_sqr()).sum();
    // ∂C/∂λ = −i e^{−iλ} B U_c.
    let dc_lambda = m_base.matmul(&a).scale(C64::new(0.0, -1.0));
    let mut dl = ZERO;
    for (x, y) in c.data().iter().zip(dc_lambda.data()) {
        dl += x.conj() * y;
    }
    let p = problem.p;
    let cost = sq.powf(p / 2.0);
    let outer = if p == 2.0 {
        1.0
    } else if sq == 0.0 {
        0.0
    } else {
        0.5 * p * sq.powf(p / 2.0 - 1.0)
    };
    let mut grad: Vec<f64> = dtr.iter().map(|z| outer * 2.0 * z.re).collect();
    grad.push(outer * 2.0 * dl.re);
    if !cost.is_finite() || grad.iter().any(|g| !g.is_finite()) {
        return Err(Error::NonFinite("VCR cost"));
    }
    Ok((cost, grad))
}

fn restart_init(seed: u64, restart: usize, len: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(restart as u64);
    (0..len).map(|_| rng.random_range(0.0..2.0 * PI)).collect()
}

/// Best of `restarts` BFGS runs at `layers` layers; ties go to the lowest restart index.
pub fn vcr_synthesize(problem: &VcrProblem, layers: usize) -> Result<VcrResult> {
    problem.validate()?;
    let spec = problem.with_layers(layers)?;
    let circuit = Circuit::compile(&spec)?;
    let np = param_count(&spec);
    let cfg = LineSearchCfg::bfgs();
    let runs: Vec<Result<VcrResult>> = (0..problem.restarts)
        .into_par_iter()
        .map(|restart| {
            let x0 = restart_init(problem.seed, restart, np + 1);
            let mut objective = |x: &[f64]| match vcr_cost(problem, &circuit, &x[..np], x[np]) {
                Ok(v) => v,
                Err(_) => (f64::NAN, vec![f64::NAN; np + 1]),
            };
            let report = bfgs_minimize(&mut objective, &x0, problem.max_iters, problem.grad_tol, &cfg)?;
            Ok(VcrResult {
                theta: report.x[..np].to_vec(),
                lambda: report.x[np],
                cost: report.f,
                layers,
                converged: report.converged && !report.aborted,
                restart,
                iterations: report.iterations,
                trace: report.trace,
            })
        })
        .collect();
    let mut best: Option<VcrResult> = None;
    for run in runs {
        let run = run?;
        let better = match &best {
            None => true,
            Some(b) => run.cost < b.cost || (b.cost.is_nan() && !run.cost.is_nan()),
        };
        if better {
            best = Some(run);
        }
    }
    let mut best = best.expect("at least one restart");
    if !best.cost.is_finite() {
        best.converged = false;
    }
    Ok(best)
}

#[derive(Clone, Debug)]
pub enum LDelta {
    /// Smallest grid `L` with `ε_L ≤ δ`.
    Found(VcrResult),
    /// No grid `L` met `δ`; holds the lowest-cost attempt.
    NotFound(VcrResult),
}

pub fn l_delta_search(problem: &VcrProblem, delta: f64, grid: &[usize]) -> Result<LDelta> {
    if grid.is_empty() {
        return Err(Error::Empty("layer grid"));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config("layer grid must be strictly ascending".into()));
    }
    let mut best: Option<VcrResult> = None;
    for &l in grid {
        let r = vcr_synthesize(problem, l)?;
        if r.cost <= delta {
            return Ok(LDelta::Found(r));
        }
        if best.as_ref().is_none_or(|b| r.cost < b.cost) {
            best = Some(r);
        }
    }
    Ok(LDelta::NotFound(best.expect("nonempty grid")))
}

/// Gate list of `e^{−iλ} U_c(θ)`, one gate per line in application order.
///
/// Grammar, fields separated by single spaces:
///
/// ```text
/// # comment
/// <layer> <control> CX <target>
/// <layer> <control> CR3D <target> <φ> <θ> <ω>
/// <layer> 0 HEIS1D <dt>
/// <layer> 0 HEISFC <dt>
/// <layer> <qubit> R3D <φ> <θ> <ω>
/// 0 0 PHASE <λ>
/// ```
///
/// `R3D(φ, θ, ω) = Rz(ω) Ry(θ) Rz(φ)`, qubits are 1-based with qubit 1 the
/// most significant bit, and `PHASE(λ)` is `e^{−iλ} I`.
pub fn gate_list(spec: &AnsatzSpec, theta: &[f64], lambda: f64) -> Result<String> {
    use std::fmt::Write as _;
    let circuit = Circuit::compile(spec)?;
    if theta.len() != param_count(spec) {
        return Err(Error::ParamLength {
            expected: param_count(spec),
            got: theta.len(),
        });
    }
    let mut s = String::new();
    let kind = match spec.kind {
        AnsatzKind::CnotBased => "cnot",
        AnsatzKind::CRotBased => "crot",
        AnsatzKind::Heis1d => "heis1d",
        AnsatzKind::HeisFC => "heisfc",
    };
    writeln!(s, "# qubits {} layers {} ansatz {kind}", spec.n, spec.layers).expect("write to String");
    for (l, ops) in circuit.layers().iter().enumerate() {
        let layer = l + 1;
        let mut i = 0;
        while i < ops.len() {
            match &ops[i] {
                Op::Cx { control, target } => {
                    writeln!(s, "{layer} {control} CX {target}").expect("write to String");
                    i += 1;
                }
                Op::Dense(_) => {
                    let name = if spec.kind == AnsatzKind::HeisFC { "HEISFC" } else { "HEIS1D" };
                    writeln!(s, "{layer} 0 {name} {:.16e}", spec.dt).expect("write to String");
                    i += 1;
                }
                Op::Rot {
                    target, control, param, ..
                } => {
                    // Compiled rotations come in Z, Y, Z triples over consecutive parameters.
                    let (a, b, c) = (theta[*param], theta[param + 1], theta[param + 2]);
                    if *control == 0 {
                        writeln!(s, "{layer} {target} R3D {a:.16e} {b:.16e} {c:.16e}").expect("write to String");
                    } else {
                        writeln!(s, "{layer} {control} CR3D {target} {a:.16e} {b:.16e} {c:.16e}").expect("write to String");
                    }
                    i += 3;
                }
            }
        }
    }
    writeln!(s, "0 0 PHASE {lambda:.16e}").expect("write to String");
    Ok(s)
}

/// Rebuilds the operator described by a gate list on `n` qubits.
pub fn parse_gate_list(text: &str, n: usize) -> Result<ComplexMatrix> {
    if n == 0 || n > 12 {
        return Err(Error::Config(format!("gate list qubit count {n} out of range")));
    }
    let d = 1usize << n;
    let mut u = ComplexMatrix::identity(d);
    let bad = |lineno: usize, why: &str| Error::Data(format!("gate list line {lineno}: {why}"));
    for (k, line) in text.lines().enumerate() {
        let lineno = k + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() < 3 {
            return Err(bad(lineno, "expected `layer qubit gate args...`"));
        }
        f[0].parse::<usize>().map_err(|_| bad(lineno, "bad layer"))?;
        let q: usize = f[1].parse().map_err(|_| bad(lineno, "bad qubit"))?;
        let nums = |args: &[&str], count: usize| -> Result<Vec<f64>> {
            if args.len() != count {
                return Err(bad(lineno, &format!("expected {count} arguments")));
            }
            args.iter()
                .map(|t| t.parse::<f64>().map_err(|_| bad(lineno, &format!("bad number {t:?}"))))
                .collect()
        };
        let qubit = |v: usize| QubitIndex::new(v, n).map_err(|_| bad(lineno, &format!("qubit {v} out of range")));
        let g = match f[2] {
            "CX" => {
                let t = nums(&f[3..], 1)?[0];
                gates::controlled(qubit(q)?, qubit(t as usize)?, &gates::pauli(Axis::X))?
            }
            "CR3D" => {
                let a = nums(&f[3..], 4)?;
                gates::controlled(qubit(q)?, qubit(a[0] as usize)?, &gates::rot3d(a[1], a[2], a[3]))?
            }
            "R3D" => {
                let a = nums(&f[3..], 3)?;
                gates::embed1(&gates::rot3d(a[0], a[1], a[2]), qubit(q)?)?
            }
            "HEIS1D" | "HEISFC" => {
                let dt = nums(&f[3..], 1)?[0];
                let kind = if f[2] == "HEISFC" { AnsatzKind::HeisFC } else { AnsatzKind::Heis1d };
                let spec = AnsatzSpec { kind, n, layers: 1, dt };
                spec.validate()?;
                ansatz::entangler(&spec, None)?
            }
            "PHASE" => gates::global_phase(nums(&f[3..], 1)?[0], n),
            other => return Err(bad(lineno, &format!("unknown gate {other:?}"))),
        };
        u = g.matmul(&u);
    }
    Ok(u)
}
