//! Kernel ridge classification with explicit linear or quadratic features.
//!
//! The dual coefficients solve `(K + λN I) a = y` with `K = ΦΦᵀ`, and a point
//! is scored by `aᵀk(x)` where `k(x)_i = φ(x_i)ᵀφ(x)`.

use crate::error::{Error, Result};
use crate::tol;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FeatureKind {
    Linear,
    /// `x` followed by every `x_i x_j` with `i ≤ j`.
    Poly2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FeatureMap {
    pub kind: FeatureKind,
    /// Divide `x` by `‖x‖` before expanding.
    pub normalize: bool,
    /// Append a constant 1.
    pub bias: bool,
}

impl FeatureMap {
    pub fn linear() -> Self {
        Self {
            kind: FeatureKind::Linear,
            normalize: false,
            bias: false,
        }
    }

    pub fn dim(&self, m: usize) -> usize {
        let base = match self.kind {
            FeatureKind::Linear => m,
            FeatureKind::Poly2 => m + m * (m + 1) / 2,
        };
        base + usize::from(self.bias)
    }
}

pub fn feature_map(map: &FeatureMap, x: &[f64]) -> Result<Vec<f64>> {
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("feature vector"));
    }
    let mut base = x.to_vec();
    if map.normalize {
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::ZeroVector);
        }
        base.iter_mut().for_each(|v| *v /= norm);
    }
    let mut out = Vec::with_capacity(map.dim(x.len()));
    out.extend_from_slice(&base);
    if map.kind == FeatureKind::Poly2 {
        for i in 0..base.len() {
            for j in i..base.len() {
                out.push(base[i] * base[j]);
            }
        }
    }
    if map.bias {
        out.push(1.0);
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct KernelModel {
    pub map: FeatureMap,
    pub lambda: f64,
    /// Dual coefficients, one per training sample.
    pub a: Vec<f64>,
    /// Training features `Φ`, one row per sample.
    pub features: Vec<Vec<f64>>,
    /// Input dimension `M`.
    pub m: usize,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Lower-triangular `L` with `A = LLᵀ`, row-major. `None` if `A` is not positive definite.
fn cholesky(a: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let s = a[i * n + j] - dot(&l[i * n..i * n + j], &l[j * n..j * n + j]);
            if i == j {
                if !(s > 0.0) {
                    return None;
                }
                l[i * n + i] = s.sqrt();
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    Some(l)
}

fn cholesky_solve(l: &[f64], n: usize, b: &[f64]) -> Vec<f64> {
    let mut z = vec![0.0; n];
    for i in 0..n {
        z[i] = (b[i] - dot(&l[i * n..i * n + i], &z[..i])) / l[i * n + i];
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| l[k * n + i] * x[k]).sum();
        x[i] = (z[i] - s) / l[i * n + i];
    }
    x
}

/// Gram matrix `ΦΦᵀ`, row-major.
pub fn gram(features: &[Vec<f64>]) -> Vec<f64> {
    let n = features.len();
    let mut k = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let v = dot(&features[i], &features[j]);
            k[i * n + j] = v;
            k[j * n + i] = v;
        }
    }
    k
}

pub fn kernel_fit<R: AsRef<[f64]>>(xs: &[R], ys: &[f64], map: &FeatureMap, lambda: f64) -> Result<KernelModel> {
    if xs.is_empty() {
        return Err(Error::Empty("training set"));
    }
    if xs.len() != ys.len() {
        return Err(Error::Dimension(format!("{} samples for {} labels", xs.len(), ys.len())));
    }
    if !(lambda > 0.0) {
        return Err(Error::Config(format!("ridge lambda must be positive, got {lambda}")));
    }
    if let Some(&bad) = ys.iter().find(|&&y| y != 1.0 && y != -1.0) {
        return Err(Error::Label(bad));
    }
    let m = xs[0].as_ref().len();
    let features = xs
        .iter()
        .map(|x| {
            if x.as_ref().len() != m {
                return Err(Error::Dimension("ragged feature rows".into()));
            }
            feature_map(map, x.as_ref())
        })
        .collect::<Result<Vec<_>>>()?;
    let n = features.len();
    let mut system = gram(&features);
    let shift = lambda * n as f64;
    for i in 0..n {
        system[i * n + i] += shift;
    }
    let l = cholesky(&system, n).ok_or_else(|| Error::Config("ridge system is not positive definite".into()))?;
    let a = cholesky_solve(&l, n, ys);
    let residual: f64 = (0..n)
        .map(|i| (dot(&system[i * n..(i + 1) * n], &a) - ys[i]).powi(2))
        .sum::<f64>()
        .sqrt();
    if residual > tol::RIDGE_RESIDUAL * (n as f64).sqrt() {
        return Err(Error::Config(format!("ridge solve residual {residual:.3e}")));
    }
    Ok(KernelModel {
        map: *map,
        lambda,
        a,
        features,
        m,
    })
}

pub fn kernel_predict(model: &KernelModel, x: &[f64]) -> Result<f64> {
    if x.len() != model.m {
        return Err(Error::Dimension(format!("{} features, model trained on {}", x.len(), model.m)));
    }
    let phi = feature_map(&model.map, x)?;
    Ok(model.features.iter().zip(&model.a).map(|(f, a)| a * dot(f, &phi)).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_set(seed: u64, n: usize, m: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let xs: Vec<Vec<f64>> = (0..n).map(|_| (0..m).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
        let ys = xs.iter().map(|x| if x[0] + 0.3 * x[1] > 0.0 { 1.0 } else { -1.0 }).collect();
        (xs, ys)
    }

    #[test]
    fn feature_map_examples() {
        let lin = FeatureMap {
            normalize: true,
            ..FeatureMap::linear()
        };
        let v = feature_map(&lin, &[3.0, 4.0]).unwrap();
        assert!((v[0] - 0.6).abs() < 1e-15 && (v[1] - 0.8).abs() < 1e-15);
        let poly = FeatureMap {
            kind: FeatureKind::Poly2,
            normalize: false,
            bias: false,
        };
        assert_eq!(feature_map(&poly, &[2.0, 3.0]).unwrap(), vec![2.0, 3.0, 4.0, 6.0, 9.0]);
        assert_eq!(poly.dim(4), 14);
        assert_eq!(FeatureMap { bias: true, ..poly }.dim(4), 15);
        assert!(matches!(feature_map(&lin, &[0.0, 0.0]), Err(Error::ZeroVector)));
    }

    #[test]
    fn scalar_fit() {
        let m = kernel_fit(&[vec![1.0]], &[1.0], &FeatureMap::linear(), 1.0).unwrap();
        assert!((m.a[0] - 0.5).abs() < 1e-15);
        let m = kernel_fit(&[vec![1.0]], &[-1.0], &FeatureMap::linear(), 1.0).unwrap();
        assert!((m.a[0] + 0.5).abs() < 1e-15);
    }

    #[test]
    fn tiny_lambda_interpolates() {
        let (xs, ys) = random_set(1, 6, 8);
        let m = kernel_fit(&xs, &ys, &FeatureMap::linear(), 1e-8).unwrap();
        for (x, y) in xs.iter().zip(&ys) {
            assert!((kernel_predict(&m, x).unwrap() - y).abs() < 1e-5);
        }
    }

    #[test]
    fn dual_matches_primal_and_is_stationary() {
        let (xs, ys) = random_set(2, 30, 4);
        let map = FeatureMap {
            kind: FeatureKind::Poly2,
            normalize: false,
            bias: true,
        };
        let lambda = 0.05;
        let m = kernel_fit(&xs, &ys, &map, lambda).unwrap();
        let p = map.dim(4);
        let v: Vec<f64> = (0..p).map(|k| m.features.iter().zip(&m.a).map(|(f, a)| a * f[k]).sum()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let x: Vec<f64> = (0..4).map(|_| rng.random_range(-1.0..1.0)).collect();
            let primal = dot(&v, &feature_map(&map, &x).unwrap());
            assert!((primal - kernel_predict(&m, &x).unwrap()).abs() < 1e-10);
        }
        // Stationarity of (1/N)‖y − Φv‖² + λ‖v‖² at v = Φᵀa.
        let n = xs.len() as f64;
        let resid: Vec<f64> = m.features.iter().zip(&ys).map(|(f, y)| y - dot(f, &v)).collect();
        for k in 0..p {
            let g = -2.0 / n * m.features.iter().zip(&resid).map(|(f, r)| f[k] * r).sum::<f64>() + 2.0 * lambda * v[k];
            assert!(g.abs() < 1e-8);
        }
    }

    #[test]
    fn label_flip_negates_predictions() {
        let (xs, ys) = random_set(4, 20, 3);
        let neg: Vec<f64> = ys.iter().map(|y| -y).collect();
        let a = kernel_fit(&xs, &ys, &FeatureMap::linear(), 0.1).unwrap();
        let b = kernel_fit(&xs, &neg, &FeatureMap::linear(), 0.1).unwrap();
        for x in &xs {
            assert!((kernel_predict(&a, x).unwrap() + kernel_predict(&b, x).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn gram_is_symmetric_psd() {
        let (xs, _) = random_set(5, 12, 3);
        let k = gram(&xs);
        let m = nalgebra::DMatrix::from_row_slice(12, 12, &k);
        assert_eq!(m, m.transpose());
        assert!(m.symmetric_eigenvalues().min() > -1e-12);
    }

    #[test]
    fn regularized_objective_grows_with_lambda() {
        let (xs, ys) = random_set(6, 25, 3);
        let objective = |lambda: f64| {
            let m = kernel_fit(&xs, &ys, &FeatureMap::linear(), lambda).unwrap();
            let v: Vec<f64> = (0..3).map(|k| m.features.iter().zip(&m.a).map(|(f, a)| a * f[k]).sum()).collect();
            let n = xs.len() as f64;
            let loss: f64 = m.features.iter().zip(&ys).map(|(f, y)| (y - dot(f, &v)).powi(2)).sum::<f64>() / n;
            loss + lambda * dot(&v, &v)
        };
        let mut prev = objective(0.01);
        for lambda in [0.02, 0.04, 0.08, 0.16] {
            let cur = objective(lambda);
            assert!(cur >= prev);
            prev = cur;
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let xs = [vec![1.0, 2.0]];
        assert!(matches!(kernel_fit(&xs, &[1.0], &FeatureMap::linear(), 0.0), Err(Error::Config(_))));
        assert!(matches!(kernel_fit(&xs, &[0.5], &FeatureMap::linear(), 1.0), Err(Error::Label(_))));
        let m = kernel_fit(&xs, &[1.0], &FeatureMap::linear(), 1.0).unwrap();
        assert!(matches!(kernel_predict(&m, &[1.0]), Err(Error::Dimension(_))));
    }
}
