//! Unitary kernel method.
//!
//! The operator `X` is optimized directly under a unitarity constraint by the
//! splitting loop
//!
//! ```text
//! X ← argmin J_cost(X, θ_b) + (r/2)‖X − P + D‖_F²   (K' CG iterations)
//! P ← OU(X + D)
//! D ← D + X − P
//! ```
//!
//! CG runs on a flat real vector. Complex mode interleaves
//! `(Re X_00, Im X_00, Re X_01, …)` row-major; real mode stores only the real
//! parts. With a bias, `θ_b` is the last entry.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::encode::EncodedSet;
use crate::error::{Error, Result};
use crate::optim::{self, LineSearchCfg, OptimReport};
use crate::predict::{self, LossKind, Observable};
use crate::qmat::{frobenius_norm, svd, ComplexMatrix, ComplexVector, C64, ZERO};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Real,
    Complex,
}

#[derive(Clone, Debug, PartialEq)]
pub struct UkmCfg {
    pub mode: Mode,
    pub use_bias: bool,
    pub r: f64,
    /// Outer splitting iterations `K`.
    pub outer: usize,
    /// CG iterations per X-step `K'`.
    pub inner: usize,
    /// Start from a seeded random unitary instead of `P₀ = I`.
    pub random_p0: bool,
    pub seed: u64,
    pub line_search: LineSearchCfg,
}

impl Default for UkmCfg {
    fn default() -> Self {
        Self {
            mode: Mode::Complex,
            use_bias: false,
            r: 0.010,
            outer: 30,
            inner: 10,
            random_p0: false,
            seed: 0,
            line_search: LineSearchCfg::cg(),
        }
    }
}

impl UkmCfg {
    pub fn validate(&self) -> Result<()> {
        if !(self.r > 0.0) || self.outer == 0 || self.inner == 0 {
            return Err(Error::Config("UKM needs r > 0, K >= 1 and K' >= 1".into()));
        }
        self.line_search.validate()
    }
}

/// Iterate of the splitting loop.
#[derive(Clone, Debug)]
pub struct SocState {
    pub x: ComplexMatrix,
    pub p: ComplexMatrix,
    pub d: ComplexMatrix,
    pub theta_b: f64,
    pub r: f64,
    /// Completed outer iterations.
    pub k: usize,
}

impl SocState {
    /// `P₀ = I` (or a random unitary), `D₀ = 0`, `X₀ = P₀`, `θ_b = 0`.
    pub fn init(dim: usize, cfg: &UkmCfg) -> Result<Self> {
        let p = if cfg.random_p0 {
            random_unitary(dim, cfg.mode, cfg.seed)?
        } else {
            ComplexMatrix::identity(dim)
        };
        Ok(Self {
            x: p.clone(),
            d: ComplexMatrix::zeros(dim, dim),
            p,
            theta_b: 0.0,
            r: cfg.r,
            k: 0,
        })
    }
}

/// `OU(Y) = K₁K₂†` from `Y = K₁ΣK₂†`.
pub fn ou(y: &ComplexMatrix) -> Result<ComplexMatrix> {
    let s = svd(y)?;
    Ok(s.k1.matmul(&s.k2dag))
}

/// Nearest unitary to a seeded Gaussian matrix; real orthogonal in real mode.
pub fn random_unitary(dim: usize, mode: Mode, seed: u64) -> Result<ComplexMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = ComplexMatrix::from_fn(dim, dim, |_, _| {
        let re = rng.random_range(-1.0..1.0);
        let im = if mode == Mode::Complex { rng.random_range(-1.0..1.0) } else { 0.0 };
        C64::new(re, im)
    });
    ou(&g)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    X,
    P,
    OuOfX,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::X, Variant::P, Variant::OuOfX];

    pub fn label(self) -> &'static str {
        match self {
            Variant::X => "X",
            Variant::P => "P",
            Variant::OuOfX => "OU(X)",
        }
    }
}

/// A reported operator with the bias and iteration it was taken at.
#[derive(Clone, Debug)]
pub struct Snapshot {
    pub operator: ComplexMatrix,
    pub theta_b: f64,
    pub train_acc: f64,
    /// Outer iteration, 1-based.
    pub iter: usize,
}

#[derive(Clone, Debug)]
pub struct UkmModel {
    pub x: Snapshot,
    pub p: Snapshot,
    pub oux: Snapshot,
    pub obs: Vec<Observable>,
}

impl UkmModel {
    pub fn snapshot(&self, v: Variant) -> &Snapshot {
        match v {
            Variant::X => &self.x,
            Variant::P => &self.p,
            Variant::OuOfX => &self.oux,
        }
    }
}

/// One outer iteration.
#[derive(Clone, Debug)]
pub struct OuterRecord {
    /// Training accuracy of X, P and OU(X), in [`Variant::ALL`] order.
    pub train_acc: [f64; 3],
    /// `J_SOC` before and after each CG iteration of the X-step.
    pub jsoc: Vec<f64>,
    /// `‖P†P − I‖_F` after the P-update.
    pub unitarity: f64,
}

#[derive(Clone, Debug)]
pub struct UkmFit {
    pub model: UkmModel,
    pub trace: Vec<OuterRecord>,
    pub state: SocState,
}

pub fn ukm_predict(variant: Variant, model: &UkmModel, psi: &ComplexVector) -> Result<f64> {
    let s = model.snapshot(variant);
    predict::f_pred(&s.operator, psi, &model.obs, s.theta_b)
}

/// Objective of the X-step over the flattened vector.
pub struct SocObjective<'a> {
    data: &'a EncodedSet,
    obs: &'a [Observable],
    loss: LossKind,
    mode: Mode,
    use_bias: bool,
    r: f64,
    /// `P − D`, the penalty anchor.
    anchor: ComplexMatrix,
    dim: usize,
}

/// Samples per parallel chunk; partial sums are reduced in chunk order.
const CHUNK: usize = 32;

impl<'a> SocObjective<'a> {
    pub fn new(state: &SocState, data: &'a EncodedSet, obs: &'a [Observable], loss: LossKind, cfg: &UkmCfg) -> Result<Self> {
        let dim = state.x.rows();
        if data.dim() != dim {
            return Err(Error::Dimension(format!("{}-dimensional data for a {dim}x{dim} operator", data.dim())));
        }
        if loss == LossKind::CrossEntropy {
            return Err(Error::Config("cross-entropy is not supported for ±1 labels".into()));
        }
        if cfg.mode == Mode::Real {
            let complex_data = data.states.iter().any(|s| s.data().iter().any(|z| z.im != 0.0));
            let complex_obs = obs.iter().any(|o| o.matrix.max_abs_imag() != 0.0);
            if complex_data || complex_obs {
                return Err(Error::Config("real mode needs real states and observables".into()));
            }
        }
        Ok(Self {
            data,
            obs,
            loss,
            mode: cfg.mode,
            use_bias: cfg.use_bias,
            r: cfg.r,
            anchor: state.p.sub(&state.d),
            dim,
        })
    }

    pub fn len(&self) -> usize {
        let per = if self.mode == Mode::Complex { 2 } else { 1 };
        per * self.dim * self.dim + usize::from(self.use_bias)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn flatten(&self, x: &ComplexMatrix, theta_b: f64) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.len());
        for z in x.data() {
            v.push(z.re);
            if self.mode == Mode::Complex {
                v.push(z.im);
            }
        }
        if self.use_bias {
            v.push(theta_b);
        }
        v
    }

    pub fn unflatten(&self, v: &[f64]) -> (ComplexMatrix, f64) {
        let d = self.dim;
        let data: Vec<C64> = match self.mode {
            Mode::Complex => v[..2 * d * d].chunks(2).map(|c| C64::new(c[0], c[1])).collect(),
            Mode::Real => v[..d * d].iter().map(|&re| C64::new(re, 0.0)).collect(),
        };
        let theta_b = if self.use_bias { v[v.len() - 1] } else { 0.0 };
        (ComplexMatrix::from_vec(d, d, data).expect("flattened length"), theta_b)
    }

    /// `J_SOC` and its gradient.
    pub fn eval(&self, v: &[f64]) -> Result<(f64, Vec<f64>)> {
        let (x, theta_b) = self.unflatten(v);
        let d = self.dim;
        let n = self.data.len();
        // Per chunk: Σℓ, Σℓ', Σ ℓ'·(Σ_j ξ_j O_j X ψ)ψ†.
        let partials: Vec<(f64, f64, Vec<C64>)> = (0..n)
            .collect::<Vec<_>>()
            .par_chunks(CHUNK)
            .map(|idx| {
                let mut g = vec![ZERO; d * d];
                let (mut l_sum, mut dl_sum) = (0.0, 0.0);
                for &i in idx {
                    let psi = &self.data.states[i];
                    let phi = x.mul_vec(psi);
                    let mut ov = vec![ZERO; d];
                    for o in self.obs {
                        for (acc, z) in ov.iter_mut().zip(o.matrix.mul_vec(&phi).data()) {
                            *acc += z * o.weight;
                        }
                    }
                    let f: f64 = phi.data().iter().zip(&ov).map(|(a, b)| (a.conj() * b).re).sum::<f64>() + theta_b;
                    let y = self.data.labels[i];
                    l_sum += predict::loss(self.loss, y, f)?;
                    let dl = predict::loss_grad(self.loss, y, f)?;
                    dl_sum += dl;
                    if dl != 0.0 {
                        for (k, ok) in ov.iter().enumerate() {
                            let row = &mut g[k * d..(k + 1) * d];
                            let s = ok * dl;
                            for (gl, pl) in row.iter_mut().zip(psi.data()) {
                                *gl += s * pl.conj();
                            }
                        }
                    }
                }
                Ok((l_sum, dl_sum, g))
            })
            .collect::<Result<_>>()?;
        let inv_n = 1.0 / n as f64;
        let mut loss = 0.0;
        let mut dl_total = 0.0;
        let mut g = vec![ZERO; d * d];
        for (l, dl, part) in &partials {
            loss += l;
            dl_total += dl;
            for (a, b) in g.iter_mut().zip(part) {
                *a += b;
            }
        }
        let resid = x.sub(&self.anchor);
        let penalty = 0.5 * self.r * frobenius_norm(&resid).powi(2);
        let value = loss * inv_n + penalty;
        let mut grad = Vec::with_capacity(self.len());
        for (gk, rk) in g.iter().zip(resid.data()) {
            grad.push(2.0 * gk.re * inv_n + self.r * rk.re);
            if self.mode == Mode::Complex {
                grad.push(2.0 * gk.im * inv_n + self.r * rk.im);
            }
        }
        if self.use_bias {
            grad.push(dl_total * inv_n);
        }
        Ok((value, grad))
    }
}

/// Runs `K'` CG iterations on `J_SOC` and stores the new `X` and `θ_b`.
pub fn soc_x_step(state: &mut SocState, data: &EncodedSet, obs: &[Observable], loss: LossKind, cfg: &UkmCfg) -> Result<OptimReport> {
    let objective = SocObjective::new(state, data, obs, loss, cfg)?;
    let x0 = objective.flatten(&state.x, state.theta_b);
    let mut failure = None;
    let mut f = |v: &[f64]| match objective.eval(v) {
        Ok(r) => r,
        Err(e) => {
            failure.get_or_insert(e);
            (f64::NAN, vec![f64::NAN; v.len()])
        }
    };
    let report = optim::cg_minimize(&mut f, &x0, cfg.inner, &cfg.line_search)?;
    if let Some(e) = failure {
        return Err(e);
    }
    if report.aborted {
        return Err(Error::NonFinite("UKM X-step objective"));
    }
    let (x, theta_b) = objective.unflatten(&report.x);
    state.x = x;
    state.theta_b = theta_b;
    Ok(report)
}

fn accuracy_of(op: &ComplexMatrix, theta_b: f64, data: &EncodedSet, obs: &[Observable]) -> Result<f64> {
    let preds: Vec<f64> = data
        .states
        .par_iter()
        .map(|s| predict::f_pred(op, s, obs, theta_b))
        .collect::<Result<_>>()?;
    predict::accuracy(&preds, &data.labels)
}

pub fn ukm_fit(data: &EncodedSet, cfg: &UkmCfg, loss: LossKind) -> Result<UkmFit> {
    ukm_fit_with_obs(data, cfg, loss, vec![Observable::z1(data.n_qubits)])
}

/// Runs `K` outer iterations and keeps, per variant, the snapshot with the
/// highest training accuracy (the latest one on ties).
pub fn ukm_fit_with_obs(data: &EncodedSet, cfg: &UkmCfg, loss: LossKind, obs: Vec<Observable>) -> Result<UkmFit> {
    cfg.validate()?;
    if data.is_empty() {
        return Err(Error::Empty("training set"));
    }
    let mut state = SocState::init(data.dim(), cfg)?;
    let mut trace = Vec::with_capacity(cfg.outer);
    let mut best: [Option<Snapshot>; 3] = [None, None, None];
    for k in 1..=cfg.outer {
        let report = soc_x_step(&mut state, data, &obs, loss, cfg)?;
        state.p = ou(&state.x.add(&state.d))?;
        state.d = state.d.add(&state.x).sub(&state.p);
        state.k = k;
        let oux = ou(&state.x)?;
        let ops = [&state.x, &state.p, &oux];
        let mut accs = [0.0; 3];
        for (slot, op) in ops.iter().enumerate() {
            let acc = accuracy_of(op, state.theta_b, data, &obs)?;
            accs[slot] = acc;
            if best[slot].as_ref().is_none_or(|b| acc >= b.train_acc) {
                best[slot] = Some(Snapshot {
                    operator: (*op).clone(),
                    theta_b: state.theta_b,
                    train_acc: acc,
                    iter: k,
                });
            }
        }
        trace.push(OuterRecord {
            train_acc: accs,
            jsoc: report.trace,
            unitarity: state.p.unitary_residual(),
        });
    }
    let [x, p, oux] = best.map(|b| b.expect("outer >= 1"));
    Ok(UkmFit {
        model: UkmModel { x, p, oux, obs },
        trace,
        state,
    })
}
