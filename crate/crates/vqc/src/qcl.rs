//! Quantum circuit learning: minibatch SGD on ansatz angles and an optional bias.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::ansatz::{self, AnsatzSpec, Circuit, GradMethod};
use crate::encode::EncodedSet;
use crate::error::{Error, Result};
use crate::predict::{self, LossKind, Observable};
use crate::qmat::ComplexVector;

#[derive(Clone, Debug)]
pub struct QclModel {
    pub spec: AnsatzSpec,
    pub theta: Vec<f64>,
    /// Always 0 when `use_bias` is false.
    pub theta_b: f64,
    pub use_bias: bool,
    pub obs: Vec<Observable>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SgdCfg {
    /// `None` means `min(32, N)`.
    pub batch: Option<usize>,
    pub eta: f64,
    pub iters: usize,
    pub seed: u64,
}

impl Default for SgdCfg {
    fn default() -> Self {
        Self {
            batch: None,
            eta: 0.1,
            iters: 300,
            seed: 0,
        }
    }
}

/// Per-iteration record; entry 0 is the initialization.
#[derive(Clone, Debug, Default)]
pub struct QclTrace {
    pub train_acc: Vec<f64>,
    /// Mean minibatch loss of each update.
    pub batch_loss: Vec<f64>,
    /// Index into `train_acc` of the returned snapshot.
    pub best_iter: usize,
}

/// Seed offset separating the minibatch stream from parameter initialization.
const BATCH_STREAM: u64 = 0x9E37_79B9_7F4A_7C15;

pub fn qcl_predict(model: &QclModel, psi: &ComplexVector) -> Result<f64> {
    let circuit = Circuit::compile(&model.spec)?;
    predict_with(&circuit, model, psi)
}

fn predict_with(circuit: &Circuit, model: &QclModel, psi: &ComplexVector) -> Result<f64> {
    Ok(ansatz::circuit_expectation(circuit, &model.theta, psi, &model.obs)? + model.theta_b)
}

/// Predictions for every state, in order.
pub fn qcl_predict_all(model: &QclModel, states: &[ComplexVector]) -> Result<Vec<f64>> {
    let circuit = Circuit::compile(&model.spec)?;
    states.par_iter().map(|s| predict_with(&circuit, model, s)).collect()
}

/// Trains by plain minibatch SGD and returns the snapshot with the highest
/// full-training-set accuracy, the latest one on ties.
pub fn qcl_fit(
    data: &EncodedSet,
    spec: &AnsatzSpec,
    loss: LossKind,
    cfg: &SgdCfg,
    use_bias: bool,
) -> Result<(QclModel, QclTrace)> {
    qcl_fit_with_obs(data, spec, loss, cfg, use_bias, vec![Observable::z1(spec.n)])
}

pub fn qcl_fit_with_obs(
    data: &EncodedSet,
    spec: &AnsatzSpec,
    loss: LossKind,
    cfg: &SgdCfg,
    use_bias: bool,
    obs: Vec<Observable>,
) -> Result<(QclModel, QclTrace)> {
    if data.is_empty() {
        return Err(Error::Empty("training set"));
    }
    if data.n_qubits != spec.n {
        return Err(Error::Dimension(format!(
            "{}-qubit data for a {}-qubit ansatz",
            data.n_qubits, spec.n
        )));
    }
    if !(cfg.eta > 0.0) || cfg.batch == Some(0) {
        return Err(Error::Config("SGD needs eta > 0 and batch >= 1".into()));
    }
    if loss == LossKind::CrossEntropy {
        return Err(Error::Config("cross-entropy needs {0,1} labels and outputs in (0,1); QCL trains on ±1".into()));
    }
    let circuit = Circuit::compile(spec)?;
    let n = data.len();
    let batch = cfg.batch.unwrap_or(32).min(n);
    let mut model = QclModel {
        spec: *spec,
        theta: ansatz::init_params(spec, cfg.seed),
        theta_b: 0.0,
        use_bias,
        obs,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ BATCH_STREAM);
    let mut order: Vec<usize> = (0..n).collect();

    let train_accuracy = |m: &QclModel| -> Result<f64> {
        let preds: Vec<f64> = data
            .states
            .par_iter()
            .map(|s| predict_with(&circuit, m, s))
            .collect::<Result<_>>()?;
        predict::accuracy(&preds, &data.labels)
    };

    let mut trace = QclTrace::default();
    let acc0 = train_accuracy(&model)?;
    trace.train_acc.push(acc0);
    let mut best = (acc0, model.clone());

    for it in 1..=cfg.iters {
        // Partial Fisher-Yates: the first `batch` slots become the sample.
        for i in 0..batch {
            let j = rng.random_range(i..n);
            order.swap(i, j);
        }
        let idx = &order[..batch];
        let terms: Vec<(f64, f64, Vec<f64>)> = idx
            .par_iter()
            .map(|&i| {
                let psi = &data.states[i];
                let y = data.labels[i];
                let z = predict_with(&circuit, &model, psi)?;
                let dl = predict::loss_grad(loss, y, z)?;
                let g = ansatz::expectation_gradient_with(&circuit, &model.theta, psi, &model.obs, GradMethod::Analytic)?;
                Ok((predict::loss(loss, y, z)?, dl, g))
            })
            .collect::<Result<_>>()?;
        let scale = 1.0 / batch as f64;
        let mut grad = vec![0.0; model.theta.len()];
        let mut grad_b = 0.0;
        let mut batch_loss = 0.0;
        for (l, dl, g) in &terms {
            batch_loss += l;
            grad_b += dl;
            for (acc, gj) in grad.iter_mut().zip(g) {
                *acc += dl * gj;
            }
        }
        for (t, g) in model.theta.iter_mut().zip(&grad) {
            *t -= cfg.eta * g * scale;
        }
        if use_bias {
            model.theta_b -= cfg.eta * grad_b * scale;
        }
        if model.theta.iter().any(|t| !t.is_finite()) || !model.theta_b.is_finite() {
            return Err(Error::NonFinite("QCL parameters"));
        }
        trace.batch_loss.push(batch_loss * scale);
        let acc = train_accuracy(&model)?;
        trace.train_acc.push(acc);
        if acc >= best.0 {
            best = (acc, model.clone());
            trace.best_iter = it;
        }
    }
    Ok((best.1, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::AnsatzKind;
    use crate::qmat::C64;

    fn toy() -> EncodedSet {
        EncodedSet::new(&[vec![1.0, 0.2], vec![0.1, 1.0]], &[1.0, -1.0]).unwrap()
    }

    #[test]
    fn zero_iterations_returns_initialization() {
        let spec = AnsatzSpec::new(AnsatzKind::CnotBased, 1, 2).unwrap();
        let cfg = SgdCfg {
            iters: 0,
            seed: 4,
            ..SgdCfg::default()
        };
        let (m, t) = qcl_fit(&toy(), &spec, LossKind::SquaredError, &cfg, false).unwrap();
        assert_eq!(m.theta, ansatz::init_params(&spec, 4));
        assert_eq!(t.train_acc.len(), 1);
    }

    #[test]
    fn full_batch_small_step_decreases_loss() {
        let spec = AnsatzSpec::new(AnsatzKind::CnotBased, 1, 1).unwrap();
        let data = toy();
        let cfg = SgdCfg {
            batch: Some(2),
            eta: 0.05,
            iters: 10,
            seed: 1,
        };
        let (_, t) = qcl_fit(&data, &spec, LossKind::SquaredError, &cfg, false).unwrap();
        // batch_loss[k] is the loss before update k; with full batches it is the training loss.
        assert!(t.batch_loss.windows(2).all(|w| w[1] < w[0]), "{:?}", t.batch_loss);
    }

    #[test]
    fn training_is_reproducible_and_snapshot_is_best() {
        let spec = AnsatzSpec::new(AnsatzKind::CRotBased, 1, 2).unwrap();
        let cfg = SgdCfg {
            iters: 25,
            seed: 9,
            ..SgdCfg::default()
        };
        let (a, ta) = qcl_fit(&toy(), &spec, LossKind::Hinge, &cfg, true).unwrap();
        let (b, _) = qcl_fit(&toy(), &spec, LossKind::Hinge, &cfg, true).unwrap();
        assert_eq!(a.theta, b.theta);
        assert_eq!(a.theta_b.to_bits(), b.theta_b.to_bits());
        let best = ta.train_acc[ta.best_iter];
        assert!(ta.train_acc.iter().all(|&x| x <= best));
    }

    #[test]
    fn zero_angle_crot_model_predicts_one_plus_bias() {
        let spec = AnsatzSpec::new(AnsatzKind::CRotBased, 2, 1).unwrap();
        let model = QclModel {
            spec,
            theta: vec![0.0; ansatz::param_count(&spec)],
            theta_b: 0.25,
            use_bias: true,
            obs: vec![Observable::z1(2)],
        };
        let z = qcl_predict(&model, &ComplexVector::basis(4, 0)).unwrap();
        assert!((z - 1.25).abs() < 1e-15);
    }

    #[test]
    fn prediction_matches_assembled_unitary() {
        let spec = AnsatzSpec::new(AnsatzKind::Heis1d, 2, 3).unwrap();
        let model = QclModel {
            spec,
            theta: ansatz::init_params(&spec, 2),
            theta_b: -0.1,
            use_bias: true,
            obs: vec![Observable::z1(2)],
        };
        let psi = ComplexVector::new(vec![C64::new(0.5, 0.0), C64::new(0.5, 0.0), C64::new(0.0, 0.5), C64::new(-0.5, 0.0)]);
        let u = ansatz::build_unitary(&spec, &model.theta).unwrap();
        let direct = predict::f_pred(&u, &psi, &model.obs, model.theta_b).unwrap();
        let z = qcl_predict(&model, &psi).unwrap();
        assert!((z - direct).abs() < 1e-12);
        assert!((-1.1..=0.9).contains(&z));
    }

    #[test]
    fn rejects_bad_config() {
        let spec = AnsatzSpec::new(AnsatzKind::CnotBased, 2, 1).unwrap();
        let cfg = SgdCfg::default();
        assert!(matches!(
            qcl_fit(&toy(), &spec, LossKind::SquaredError, &cfg, false),
            Err(Error::Dimension(_))
        ));
        let spec1 = AnsatzSpec::new(AnsatzKind::CnotBased, 1, 1).unwrap();
        let bad = SgdCfg { eta: 0.0, ..cfg };
        assert!(matches!(
            qcl_fit(&toy(), &spec1, LossKind::SquaredError, &bad, false),
            Err(Error::Config(_))
        ));
    }
}
