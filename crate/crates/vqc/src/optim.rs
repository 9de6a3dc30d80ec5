//! Line searches, Fletcher-Reeves nonlinear CG and BFGS over flat real vectors.
//!
//! Objectives are closures returning `(f(x), ∇f(x))`.

use crate::error::{Error, Result};
use crate::tol;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineSearchCfg {
    pub c1: f64,
    pub c2: f64,
    pub rho: f64,
    pub alpha0: f64,
    /// Cap on trial steps per search.
    pub max_backtracks: usize,
    /// Require the strong Wolfe curvature condition as well as Armijo.
    pub strong_wolfe: bool,
}

impl LineSearchCfg {
    /// Armijo backtracking, the CG default.
    pub fn cg() -> Self {
        Self {
            c1: 1e-4,
            c2: 0.4,
            rho: 0.5,
            alpha0: 1.0,
            max_backtracks: 50,
            strong_wolfe: false,
        }
    }

    /// Strong Wolfe, the BFGS default.
    pub fn bfgs() -> Self {
        Self {
            c2: 0.9,
            strong_wolfe: true,
            ..Self::cg()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = 0.0 < self.c1
            && self.c1 < self.c2
            && self.c2 < 1.0
            && 0.0 < self.rho
            && self.rho < 1.0
            && self.alpha0 > 0.0
            && self.max_backtracks >= 1;
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid line search settings {self:?}")))
        }
    }
}

impl Default for LineSearchCfg {
    fn default() -> Self {
        Self::cg()
    }
}

/// Result of one line search.
#[derive(Clone, Debug)]
pub struct LineSearch {
    pub alpha: f64,
    pub x: Vec<f64>,
    pub f: f64,
    pub grad: Vec<f64>,
    pub evals: usize,
    /// The trial budget ran out before the conditions held.
    pub exhausted: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(x: &[f64], alpha: f64, d: &[f64]) -> Vec<f64> {
    x.iter().zip(d).map(|(a, b)| a + alpha * b).collect()
}

fn finite(f: f64, g: &[f64]) -> bool {
    f.is_finite() && g.iter().all(|v| v.is_finite())
}

/// Backtracking search along descent direction `d` from `x`.
///
/// Armijo mode shrinks `α ← ρα` until `f(x+αd) ≤ f(x) + c₁α∇f·d`. Strong Wolfe
/// mode brackets and bisects until `|∇f(x+αd)·d| ≤ c₂|∇f·d|` also holds. When
/// the budget runs out the smallest Armijo-feasible trial is returned, or the
/// smallest trial if none was feasible, with `exhausted` set.
pub fn backtracking_search<F>(f: &mut F, x: &[f64], fx: f64, gx: &[f64], d: &[f64], cfg: &LineSearchCfg) -> Result<LineSearch>
where
    F: FnMut(&[f64]) -> (f64, Vec<f64>),
{
    let slope = dot(gx, d);
    if !(slope < 0.0) {
        return Err(Error::NotDescent(slope));
    }
    let armijo = |alpha: f64, fa: f64| fa <= fx + cfg.c1 * alpha * slope;
    let mut evals = 0;
    let mut best: Option<LineSearch> = None;
    let mut last: Option<LineSearch> = None;

    let mut trial = |alpha: f64, evals: &mut usize| {
        let xa = axpy(x, alpha, d);
        let (fa, ga) = f(&xa);
        *evals += 1;
        LineSearch {
            alpha,
            x: xa,
            f: fa,
            grad: ga,
            evals: 0,
            exhausted: false,
        }
    };

    if !cfg.strong_wolfe {
        let mut alpha = cfg.alpha0;
        for _ in 0..cfg.max_backtracks {
            let t = trial(alpha, &mut evals);
            if finite(t.f, &t.grad) && armijo(alpha, t.f) {
                return Ok(LineSearch { evals, ..t });
            }
            last = Some(t);
            alpha *= cfg.rho;
        }
    } else {
        // Bracket [lo, hi] with lo Armijo-feasible; expand while no upper bound exists.
        let (mut lo, mut hi) = (0.0f64, f64::INFINITY);
        let mut f_lo = fx;
        let mut alpha = cfg.alpha0;
        for _ in 0..cfg.max_backtracks {
            let t = trial(alpha, &mut evals);
            let ok = finite(t.f, &t.grad);
            if !ok || !armijo(alpha, t.f) || (t.f >= f_lo && lo > 0.0) {
                hi = alpha;
            } else {
                let da = dot(&t.grad, d);
                if da.abs() <= cfg.c2 * slope.abs() {
                    return Ok(LineSearch { evals, ..t });
                }
                if best.as_ref().is_none_or(|b| t.f < b.f) {
                    best = Some(t.clone());
                }
                if da > 0.0 {
                    hi = alpha;
                } else {
                    lo = alpha;
                    f_lo = t.f;
                }
            }
            last = Some(t);
            alpha = if hi.is_finite() { 0.5 * (lo + hi) } else { 2.0 * alpha };
        }
    }
    let pick = best.or_else(|| last.filter(|t| finite(t.f, &t.grad) && armijo(t.alpha, t.f)));
    match pick {
        Some(t) => Ok(LineSearch {
            evals,
            exhausted: true,
            ..t
        }),
        None => {
            // Smallest trial step; the caller decides whether to move.
            let alpha = cfg.alpha0 * cfg.rho.powi(cfg.max_backtracks as i32);
            let t = trial(alpha, &mut evals);
            Ok(LineSearch {
                evals,
                exhausted: true,
                ..t
            })
        }
    }
}

/// Outcome of a minimization run.
#[derive(Clone, Debug, Default)]
pub struct OptimReport {
    pub x: Vec<f64>,
    pub f: f64,
    pub grad_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    /// `f` at the start and after every iteration.
    pub trace: Vec<f64>,
    /// Line searches that hit their trial budget.
    pub line_search_failures: usize,
    /// A non-finite value stopped the run.
    pub aborted: bool,
}

fn aborted(x: Vec<f64>, f: f64, g: &[f64], iterations: usize, trace: Vec<f64>, failures: usize) -> OptimReport {
    OptimReport {
        x,
        f,
        grad_norm: norm(g),
        iterations,
        converged: false,
        trace,
        line_search_failures: failures,
        aborted: true,
    }
}

/// Fletcher-Reeves nonlinear CG with exactly `iters` iterations.
///
/// `d ← −∇f + β d` with `β = ‖∇f_k‖²/‖∇f_{k−1}‖²`; the direction restarts at
/// `−∇f` whenever it is not a descent direction. A failed search that does
/// not decrease `f` leaves `x` in place and restarts the direction.
pub fn cg_minimize<F>(f: &mut F, x0: &[f64], iters: usize, cfg: &LineSearchCfg) -> Result<OptimReport>
where
    F: FnMut(&[f64]) -> (f64, Vec<f64>),
{
    cfg.validate()?;
    let mut x = x0.to_vec();
    let (mut fx, mut g) = f(&x);
    if g.len() != x.len() {
        return Err(Error::Dimension(format!("gradient length {} for dimension {}", g.len(), x.len())));
    }
    let mut trace = vec![fx];
    if !finite(fx, &g) {
        return Ok(aborted(x, fx, &g, 0, trace, 0));
    }
    let mut d: Vec<f64> = g.iter().map(|v| -v).collect();
    let mut failures = 0;
    for k in 0..iters {
        let gg = dot(&g, &g);
        if gg == 0.0 {
            return Ok(OptimReport {
                x,
                f: fx,
                grad_norm: 0.0,
                iterations: k,
                converged: true,
                trace,
                line_search_failures: failures,
                aborted: false,
            });
        }
        if dot(&g, &d) >= 0.0 {
            d = g.iter().map(|v| -v).collect();
        }
        let ls = backtracking_search(f, &x, fx, &g, &d, cfg)?;
        if ls.exhausted {
            failures += 1;
        }
        if !finite(ls.f, &ls.grad) {
            return Ok(aborted(x, fx, &g, k, trace, failures));
        }
        if ls.exhausted && ls.f > fx {
            d = g.iter().map(|v| -v).collect();
            trace.push(fx);
            continue;
        }
        let beta = dot(&ls.grad, &ls.grad) / gg;
        x = ls.x;
        fx = ls.f;
        g = ls.grad;
        for (di, gi) in d.iter_mut().zip(&g) {
            *di = -gi + beta * *di;
        }
        trace.push(fx);
    }
    Ok(OptimReport {
        grad_norm: norm(&g),
        x,
        f: fx,
        iterations: iters,
        converged: true,
        trace,
        line_search_failures: failures,
        aborted: false,
    })
}

/// `H ← (I − ρsyᵀ) H (I − ρysᵀ) + ρssᵀ` on a dense symmetric `H`.
///
/// Returns `false` and leaves `H` untouched when `sᵀy ≤` the curvature guard.
pub fn bfgs_update(h: &mut [f64], dim: usize, s: &[f64], y: &[f64]) -> bool {
    let sy = dot(s, y);
    if sy <= tol::BFGS_CURVATURE {
        return false;
    }
    let rho = 1.0 / sy;
    let hy: Vec<f64> = (0..dim).map(|i| dot(&h[i * dim..(i + 1) * dim], y)).collect();
    let yhy = dot(y, &hy);
    let c = rho * rho * yhy + rho;
    for i in 0..dim {
        for j in 0..dim {
            h[i * dim + j] += -rho * (s[i] * hy[j] + hy[i] * s[j]) + c * s[i] * s[j];
        }
    }
    true
}

/// BFGS in inverse-Hessian form.
///
/// Starts from `H₀ = I`, rescaled to `(sᵀy/yᵀy) I` before the first update.
/// Stops when `‖∇f‖ ≤ grad_tol` or after `max_iters` iterations.
pub fn bfgs_minimize<F>(f: &mut F, x0: &[f64], max_iters: usize, grad_tol: f64, cfg: &LineSearchCfg) -> Result<OptimReport>
where
    F: FnMut(&[f64]) -> (f64, Vec<f64>),
{
    cfg.validate()?;
    let dim = x0.len();
    let mut x = x0.to_vec();
    let (mut fx, mut g) = f(&x);
    if g.len() != dim {
        return Err(Error::Dimension(format!("gradient length {} for dimension {dim}", g.len())));
    }
    let mut trace = vec![fx];
    if !finite(fx, &g) {
        return Ok(aborted(x, fx, &g, 0, trace, 0));
    }
    let mut h = vec![0.0; dim * dim];
    for i in 0..dim {
        h[i * dim + i] = 1.0;
    }
    let mut first = true;
    let mut failures = 0;
    for k in 0..max_iters {
        if norm(&g) <= grad_tol {
            return Ok(OptimReport {
                grad_norm: norm(&g),
                x,
                f: fx,
                iterations: k,
                converged: true,
                trace,
                line_search_failures: failures,
                aborted: false,
            });
        }
        let mut d: Vec<f64> = (0..dim).map(|i| -dot(&h[i * dim..(i + 1) * dim], &g)).collect();
        if dot(&d, &g) >= 0.0 {
            // Lost positive definiteness to rounding; fall back to steepest descent.
            h.iter_mut().enumerate().for_each(|(idx, v)| *v = if idx % (dim + 1) == 0 { 1.0 } else { 0.0 });
            first = true;
            d = g.iter().map(|v| -v).collect();
        }
        let ls = backtracking_search(f, &x, fx, &g, &d, cfg)?;
        if ls.exhausted {
            failures += 1;
        }
        if !finite(ls.f, &ls.grad) {
            return Ok(aborted(x, fx, &g, k, trace, failures));
        }
        if ls.exhausted && ls.f >= fx {
            // No progress along this direction; reset curvature and retry once from steepest descent.
            if first {
                trace.push(fx);
                return Ok(OptimReport {
                    grad_norm: norm(&g),
                    x,
                    f: fx,
                    iterations: k + 1,
                    converged: false,
                    trace,
                    line_search_failures: failures,
                    aborted: false,
                });
            }
            h.iter_mut().enumerate().for_each(|(idx, v)| *v = if idx % (dim + 1) == 0 { 1.0 } else { 0.0 });
            first = true;
            trace.push(fx);
            continue;
        }
        let s: Vec<f64> = ls.x.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = ls.grad.iter().zip(&g).map(|(a, b)| a - b).collect();
        if first {
            let sy = dot(&s, &y);
            let yy = dot(&y, &y);
            if sy > tol::BFGS_CURVATURE && yy > 0.0 {
                let scale = sy / yy;
                h.iter_mut().for_each(|v| *v *= scale);
                first = false;
            }
        }
        bfgs_update(&mut h, dim, &s, &y);
        x = ls.x;
        fx = ls.f;
        g = ls.grad;
        trace.push(fx);
    }
    let gn = norm(&g);
    Ok(OptimReport {
        grad_norm: gn,
        x,
        f: fx,
        iterations: max_iters,
        converged: gn <= grad_tol,
        trace,
        line_search_failures: failures,
        aborted: false,
    })
}
