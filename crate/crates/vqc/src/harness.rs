//! Dataset ingestion, k-fold cross-validation and accuracy aggregation.

use std::io::Read;
use std::path::Path;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::ansatz::{AnsatzKind, AnsatzSpec};
use crate::encode::EncodedSet;
use crate::error::{Error, Result};
use crate::kernel::{self, FeatureKind, FeatureMap};
use crate::predict::{self, LossKind};
use crate::qcl::{self, SgdCfg};
use crate::ukm::{self, UkmCfg, Variant};

/// Labelled samples; labels are `±1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub x: Vec<Vec<f64>>,
    pub y: Vec<f64>,
}

impl Dataset {
    /// Checks shape, finiteness, `±1` labels and that both classes occur.
    pub fn new(name: impl Into<String>, x: Vec<Vec<f64>>, y: Vec<f64>) -> Result<Self> {
        if x.is_empty() {
            return Err(Error::Data("dataset has no rows".into()));
        }
        if x.len() != y.len() {
            return Err(Error::Data(format!("{} rows for {} labels", x.len(), y.len())));
        }
        let m = x[0].len();
        if m == 0 {
            return Err(Error::Data("dataset has no feature columns".into()));
        }
        if let Some(i) = x.iter().position(|r| r.len() != m) {
            return Err(Error::Data(format!("row {} has {} features, expected {m}", i + 1, x[i].len())));
        }
        if x.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Data("non-finite feature value".into()));
        }
        if let Some(&bad) = y.iter().find(|&&v| v != 1.0 && v != -1.0) {
            return Err(Error::Label(bad));
        }
        if !(y.contains(&1.0) && y.contains(&-1.0)) {
            return Err(Error::Data("dataset needs both classes".into()));
        }
        Ok(Self { name: name.into(), x, y })
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// Feature count `M`.
    pub fn features(&self) -> usize {
        self.x[0].len()
    }

    pub fn select(&self, idx: &[usize]) -> (Vec<&[f64]>, Vec<f64>) {
        (idx.iter().map(|&i| self.x[i].as_slice()).collect(), idx.iter().map(|&i| self.y[i]).collect())
    }

    pub fn encode(&self, idx: &[usize]) -> Result<EncodedSet> {
        let (rows, labels) = self.select(idx);
        EncodedSet::new(&rows, &labels)
    }
}

/// Parses headerless CSV: feature columns, then an integer label in `{0, 1}` or `{−1, 1}`.
pub fn parse_csv<R: Read>(name: &str, reader: R) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).flexible(true).from_reader(reader);
    let mut x = Vec::new();
    let mut raw = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::Data(format!("{name}: {e}")))?;
        let vals = rec
            .iter()
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Data(format!("{name} row {}: bad number {t:?}", i + 1)))
            })
            .collect::<Result<Vec<f64>>>()?;
        if vals.len() < 2 {
            return Err(Error::Data(format!("{name} row {}: needs features and a label", i + 1)));
        }
        let (label, features) = vals.split_last().expect("len >= 2");
        raw.push(*label);
        x.push(features.to_vec());
    }
    if x.is_empty() {
        return Err(Error::Data(format!("{name}: empty file")));
    }
    let zero_one = raw.iter().all(|&v| v == 0.0 || v == 1.0);
    let pm_one = raw.iter().all(|&v| v == -1.0 || v == 1.0);
    let y = if zero_one {
        raw.iter().map(|&v| 2.0 * v - 1.0).collect()
    } else if pm_one {
        raw
    } else {
        let bad = raw.into_iter().find(|&v| v != 0.0 && v != 1.0 && v != -1.0).unwrap_or(0.0);
        return Err(Error::Data(format!("{name}: labels must be {{0,1}} or {{-1,1}} (found {bad})")));
    };
    Dataset::new(name, x, y)
}

/// Loads a dataset named after the file stem.
pub fn load_csv(path: &Path) -> Result<Dataset> {
    let file = std::fs::File::open(path).map_err(|e| Error::Data(format!("{}: {e}", path.display())))?;
    let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("dataset");
    parse_csv(name, std::io::BufReader::new(file))
}

const MNIST_SIDE: usize = 28;
const COARSE_SIDE: usize = 16;

/// Row `I` holds the overlap of source pixels with `[1.75 I, 1.75 (I+1))`, normalized to sum 1.
fn coarse_weights() -> Vec<[f64; MNIST_SIDE]> {
    let w = MNIST_SIDE as f64 / COARSE_SIDE as f64;
    (0..COARSE_SIDE)
        .map(|i| {
            let (lo, hi) = (i as f64 * w, (i + 1) as f64 * w);
            let mut row = [0.0; MNIST_SIDE];
            for (s, r) in row.iter_mut().enumerate() {
                let overlap = (hi.min(s as f64 + 1.0) - lo.max(s as f64)).max(0.0);
                *r = overlap / w;
            }
            row
        })
        .collect()
}

/// Area-weighted 28×28 → 16×16 downsampling; input and output are row-major.
pub fn coarse_grain_mnist(img: &[f64]) -> Result<Vec<f64>> {
    if img.len() != MNIST_SIDE * MNIST_SIDE {
        return Err(Error::Dimension(format!("expected 784 pixels, got {}", img.len())));
    }
    let w = coarse_weights();
    let mut out = vec![0.0; COARSE_SIDE * COARSE_SIDE];
    for (i, wi) in w.iter().enumerate() {
        for (j, wj) in w.iter().enumerate() {
            let mut acc = 0.0;
            for (r, &a) in wi.iter().enumerate().filter(|(_, a)| **a > 0.0) {
                for (c, &b) in wj.iter().enumerate().filter(|(_, b)| **b > 0.0) {
                    acc += a * b * img[r * MNIST_SIDE + c];
                }
            }
            out[i * COARSE_SIDE + j] = acc;
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CvPlan {
    pub folds: usize,
    /// One model initialization per seed; every seed reuses the same split.
    pub seeds: Vec<u64>,
    pub split_seed: u64,
}

impl Default for CvPlan {
    fn default() -> Self {
        Self {
            folds: 5,
            seeds: (0..5).collect(),
            split_seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fold {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// Seeded Fisher-Yates permutation cut into `k` contiguous chunks; the first
/// `n mod k` chunks hold one extra index. Index lists are sorted.
pub fn kfold_split(n: usize, k: usize, seed: u64) -> Result<Vec<Fold>> {
    if k < 2 {
        return Err(Error::Config(format!("need at least 2 folds, got {k}")));
    }
    if n < k {
        return Err(Error::Config(format!("{n} samples cannot fill {k} folds")));
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        perm.swap(i, j);
    }
    let (base, extra) = (n / k, n % k);
    let mut folds = Vec::with_capacity(k);
    let mut start = 0;
    for f in 0..k {
        let len = base + usize::from(f < extra);
        let mut test = perm[start..start + len].to_vec();
        test.sort_unstable();
        let mut train: Vec<usize> = perm[..start].iter().chain(&perm[start + len..]).copied().collect();
        train.sort_unstable();
        folds.push(Fold { train, test });
        start += len;
    }
    Ok(folds)
}

/// Largest register simulated without `extended`; 8-qubit rows take hours of dense optimization.
pub const DESK_MAX_QUBITS: usize = 7;

/// Rejects datasets that need more than [`DESK_MAX_QUBITS`] qubits unless `extended` is set.
pub fn check_scale(data: &Dataset, extended: bool) -> Result<()> {
    let n = crate::encode::qubits_for(data.features());
    if n > DESK_MAX_QUBITS && !extended {
        return Err(Error::Config(format!(
            "{} needs {n} qubits; runs above {DESK_MAX_QUBITS} qubits require the extended flag",
            data.name
        )));
    }
    Ok(())
}

/// Model seed of one `(seed, fold)` task.
pub fn task_seed(seed: u64, fold: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(fold as u64)
}

#[derive(Clone, Debug)]
pub enum AlgoSpec {
    Qcl {
        spec: AnsatzSpec,
        loss: LossKind,
        /// `seed` is replaced per task.
        sgd: SgdCfg,
        use_bias: bool,
    },
    Ukm {
        /// `seed` is replaced per task.
        cfg: UkmCfg,
        loss: LossKind,
    },
    Kernel {
        map: FeatureMap,
        lambda: f64,
    },
}

impl AlgoSpec {
    pub fn name(&self) -> &'static str {
        match self {
            AlgoSpec::Qcl { .. } => "qcl",
            AlgoSpec::Ukm { .. } => "ukm",
            AlgoSpec::Kernel { .. } => "kernel",
        }
    }
}

pub fn ansatz_label(kind: AnsatzKind) -> &'static str {
    match kind {
        AnsatzKind::CnotBased => "cnot",
        AnsatzKind::CRotBased => "crot",
        AnsatzKind::Heis1d => "heis1d",
        AnsatzKind::HeisFC => "heisfc",
    }
}

pub fn feature_label(map: &FeatureMap) -> String {
    let base = match map.kind {
        FeatureKind::Linear => "linear",
        FeatureKind::Poly2 => "poly2",
    };
    let mut s = base.to_string();
    if map.normalize {
        s.push_str("+norm");
    }
    if map.bias {
        s.push_str("+bias");
    }
    s
}

/// One trained model evaluated on one fold.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunRecord {
    pub algo: String,
    pub variant: String,
    pub dataset: String,
    pub fold: usize,
    pub seed: u64,
    pub train_acc: f64,
    pub test_acc: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub best_iter: Option<usize>,
    /// Last minibatch loss for QCL, last `J_SOC` for UKM.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub final_cost: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    /// Largest rise of `J_SOC` between consecutive CG iterates of any X-step.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_jsoc_rise: Option<f64>,
    /// Seconds spent on the whole task; not reproducible, so optional.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Aggregate {
    pub algo: String,
    pub variant: String,
    pub dataset: String,
    pub runs: usize,
    pub train_acc: f64,
    pub test_acc: f64,
}

#[derive(Clone, Debug)]
pub struct Experiment {
    pub records: Vec<RunRecord>,
    pub aggregates: Vec<Aggregate>,
}

fn accuracy_of(preds: Vec<Result<f64>>, labels: &[f64]) -> Result<f64> {
    let preds = preds.into_iter().collect::<Result<Vec<_>>>()?;
    predict::accuracy(&preds, labels)
}

fn run_task(algo: &AlgoSpec, data: &Dataset, fold_idx: usize, fold: &Fold, seed: u64) -> Result<Vec<RunRecord>> {
    let record = |variant: String, train_acc: f64, test_acc: f64| RunRecord {
        algo: algo.name().into(),
        variant,
        dataset: data.name.clone(),
        fold: fold_idx,
        seed,
        train_acc,
        test_acc,
        best_iter: None,
        final_cost: None,
        iterations: None,
        max_jsoc_rise: None,
        wall_time: None,
    };
    let model_seed = task_seed(seed, fold_idx);
    match algo {
        AlgoSpec::Qcl {
            spec,
            loss,
            sgd,
            use_bias,
        } => {
            let train = data.encode(&fold.train)?;
            let test = data.encode(&fold.test)?;
            let cfg = SgdCfg { seed: model_seed, ..*sgd };
            let (model, trace) = qcl::qcl_fit(&train, spec, *loss, &cfg, *use_bias)?;
            let test_preds = qcl::qcl_predict_all(&model, &test.states)?;
            let mut r = record(
                ansatz_label(spec.kind).into(),
                trace.train_acc[trace.best_iter],
                predict::accuracy(&test_preds, &test.labels)?,
            );
            r.best_iter = Some(trace.best_iter);
            r.final_cost = trace.batch_loss.last().copied();
            r.iterations = Some(cfg.iters);
            Ok(vec![r])
        }
        AlgoSpec::Ukm { cfg, loss } => {
            let train = data.encode(&fold.train)?;
            let test = data.encode(&fold.test)?;
            let cfg = UkmCfg {
                seed: model_seed,
                ..cfg.clone()
            };
            let fit = ukm::ukm_fit(&train, &cfg, *loss)?;
            let final_cost = fit.trace.last().and_then(|o| o.jsoc.last().copied());
            let rise = fit
                .trace
                .iter()
                .flat_map(|o| o.jsoc.windows(2).map(|w| w[1] - w[0]))
                .fold(f64::NEG_INFINITY, f64::max);
            Variant::ALL
                .iter()
                .map(|&v| {
                    let snap = fit.model.snapshot(v);
                    let preds = test.states.iter().map(|s| ukm::ukm_predict(v, &fit.model, s)).collect();
                    let mut r = record(v.label().into(), snap.train_acc, accuracy_of(preds, &test.labels)?);
                    r.best_iter = Some(snap.iter);
                    r.final_cost = final_cost;
                    r.iterations = Some(cfg.outer);
                    r.max_jsoc_rise = rise.is_finite().then_some(rise);
                    Ok(r)
                })
                .collect()
        }
        AlgoSpec::Kernel { map, lambda } => {
            let (xtr, ytr) = data.select(&fold.train);
            let (xte, yte) = data.select(&fold.test);
            let model = kernel::kernel_fit(&xtr, &ytr, map, *lambda)?;
            let train_preds = xtr.iter().map(|x| kernel::kernel_predict(&model, x)).collect();
            let test_preds = xte.iter().map(|x| kernel::kernel_predict(&model, x)).collect();
            Ok(vec![record(
                feature_label(map),
                accuracy_of(train_preds, &ytr)?,
                accuracy_of(test_preds, &yte)?,
            )])
        }
    }
}

/// Runs every `(seed, fold)` task in parallel.
///
/// Records are sorted by `(dataset, algo, seed, fold)` and keep the variant
/// order within a task. `wall_time` is filled in for every record.
pub fn run_experiment(algo: &AlgoSpec, data: &Dataset, plan: &CvPlan) -> Result<Experiment> {
    if plan.seeds.is_empty() {
        return Err(Error::Config("CV plan needs at least one seed".into()));
    }
    let folds = kfold_split(data.len(), plan.folds, plan.split_seed)?;
    let tasks: Vec<(u64, usize)> = plan
        .seeds
        .iter()
        .flat_map(|&s| (0..folds.len()).map(move |f| (s, f)))
        .collect();
    let results: Vec<Vec<RunRecord>> = tasks
        .par_iter()
        .map(|&(seed, f)| {
            let start = Instant::now();
            let mut recs = run_task(algo, data, f, &folds[f], seed)?;
            let t = start.elapsed().as_secs_f64();
            recs.iter_mut().for_each(|r| r.wall_time = Some(t));
            Ok(recs)
        })
        .collect::<Result<_>>()?;
    let mut records: Vec<RunRecord> = results.into_iter().flatten().collect();
    records.sort_by(|a, b| (&a.dataset, &a.algo, a.seed, a.fold).cmp(&(&b.dataset, &b.algo, b.seed, b.fold)));
    let aggregates = aggregate(&records);
    Ok(Experiment { records, aggregates })
}

/// Arithmetic means per `(dataset, algo, variant)`, in first-appearance order.
pub fn aggregate(records: &[RunRecord]) -> Vec<Aggregate> {
    let mut out: Vec<Aggregate> = Vec::new();
    for r in records {
        match out
            .iter_mut()
            .find(|a| a.dataset == r.dataset && a.algo == r.algo && a.variant == r.variant)
        {
            Some(a) => {
                a.runs += 1;
                a.train_acc += r.train_acc;
                a.test_acc += r.test_acc;
            }
            None => out.push(Aggregate {
                algo: r.algo.clone(),
                variant: r.variant.clone(),
                dataset: r.dataset.clone(),
                runs: 1,
                train_acc: r.train_acc,
                test_acc: r.test_acc,
            }),
        }
    }
    for a in &mut out {
        a.train_acc /= a.runs as f64;
        a.test_acc /= a.runs as f64;
    }
    out
}

/// Markdown table with `train/test` cells rounded to 4 decimals.
pub fn render_table(aggregates: &[Aggregate]) -> String {
    let mut s = String::from("| dataset | algo | variant | train/test |\n|---|---|---|---|\n");
    for a in aggregates {
        s.push_str(&format!(
            "| {} | {} | {} | {:.4}/{:.4} |\n",
            a.dataset, a.algo, a.variant, a.train_acc, a.test_acc
        ));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn toy_csv_round_trips_exactly() {
        let text = "0.1,2.5,1\n-3.25,1e-3,0\n";
        let d = parse_csv("toy", text.as_bytes()).unwrap();
        assert_eq!(d.x, vec![vec![0.1, 2.5], vec![-3.25, 1e-3]]);
        assert_eq!(d.y, vec![1.0, -1.0]);
        let pm = parse_csv("toy", "1,2,-1\n3,4,1\n".as_bytes()).unwrap();
        assert_eq!(pm.y, vec![-1.0, 1.0]);
    }

    #[test]
    fn csv_errors() {
        assert!(matches!(parse_csv("e", "".as_bytes()), Err(Error::Data(_))));
        assert!(matches!(parse_csv("r", "1,2,1\n3,0\n".as_bytes()), Err(Error::Data(_))));
        assert!(matches!(parse_csv("l", "1,2,2\n3,4,0\n".as_bytes()), Err(Error::Data(_))));
        assert!(matches!(parse_csv("m", "1,2,0\n3,4,-1\n".as_bytes()), Err(Error::Data(_))));
        assert!(matches!(parse_csv("n", "1,x,0\n3,4,1\n".as_bytes()), Err(Error::Data(_))));
        assert!(matches!(parse_csv("c", "1,2,1\n3,4,1\n".as_bytes()), Err(Error::Data(_))));
    }

    #[test]
    fn shipped_snapshots_have_expected_shapes() {
        let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data");
        for (file, n, m) in [
            ("iris01.csv", 100, 4),
            ("iris0n0.csv", 150, 4),
            ("iris1n1.csv", 150, 4),
            ("cancer01.csv", 569, 30),
            ("wine0n0.csv", 178, 13),
        ] {
            let d = load_csv(&root.join(file)).unwrap();
            assert_eq!((d.len(), d.features()), (n, m), "{file}");
        }
    }

    #[test]
    fn scale_gate() {
        let wide = Dataset::new("wide", vec![vec![1.0; 256], vec![0.5; 256]], vec![1.0, -1.0]).unwrap();
        assert!(matches!(check_scale(&wide, false), Err(Error::Config(_))));
        assert!(check_scale(&wide, true).is_ok());
        let narrow = Dataset::new("narrow", vec![vec![1.0; 30], vec![0.5; 30]], vec![1.0, -1.0]).unwrap();
        assert!(check_scale(&narrow, false).is_ok());
    }

    #[test]
    fn coarse_graining_preserves_constants() {
        for c in [0.0, 1.0, 0.37] {
            let out = coarse_grain_mnist(&[c; 784]).unwrap();
            assert_eq!(out.len(), 256);
            assert!(out.iter().all(|v| (v - c).abs() < 1e-14));
        }
        assert!(coarse_grain_mnist(&[0.0; 783]).is_err());
        for row in coarse_weights() {
            assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn coarse_graining_preserves_mass_up_to_area_ratio() {
        let img: Vec<f64> = (0..784).map(|i| ((i * 37) % 255) as f64 / 255.0).collect();
        let out = coarse_grain_mnist(&img).unwrap();
        let ratio = (16.0f64 / 28.0).powi(2);
        assert!((out.iter().sum::<f64>() - ratio * img.iter().sum::<f64>()).abs() < 1e-9);
    }

    #[test]
    fn kfold_examples() {
        let folds = kfold_split(100, 5, 3).unwrap();
        assert!(folds.iter().all(|f| f.test.len() == 20 && f.train.len() == 80));
        assert_eq!(folds, kfold_split(100, 5, 3).unwrap());
        assert_ne!(folds, kfold_split(100, 5, 4).unwrap());
        assert!(kfold_split(3, 5, 0).is_err());
        assert!(kfold_split(10, 1, 0).is_err());
    }

    proptest! {
        #[test]
        fn kfold_partitions(n in 2usize..200, k in 2usize..10, seed in any::<u64>()) {
            prop_assume!(n >= k);
            let folds = kfold_split(n, k, seed).unwrap();
            let mut all: Vec<usize> = folds.iter().flat_map(|f| f.test.clone()).collect();
            all.sort_unstable();
            prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
            let sizes: Vec<usize> = folds.iter().map(|f| f.test.len()).collect();
            prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
            for f in &folds {
                prop_assert!(f.test.iter().all(|i| f.train.binary_search(i).is_err()));
                prop_assert_eq!(f.train.len() + f.test.len(), n);
            }
        }
    }

    fn rec(variant: &str, tr: f64, te: f64) -> RunRecord {
        RunRecord {
            algo: "kernel".into(),
            variant: variant.into(),
            dataset: "d".into(),
            fold: 0,
            seed: 0,
            train_acc: tr,
            test_acc: te,
            best_iter: None,
            final_cost: None,
            iterations: None,
            max_jsoc_rise: None,
            wall_time: None,
        }
    }

    #[test]
    fn aggregate_of_identical_records_is_the_record() {
        let a = aggregate(&[rec("v", 0.9, 0.8), rec("v", 0.9, 0.8), rec("v", 0.9, 0.8)]);
        assert_eq!(a.len(), 1);
        assert_eq!(a[0].runs, 3);
        assert!((a[0].train_acc - 0.9).abs() < 1e-15 && (a[0].test_acc - 0.8).abs() < 1e-15);
        let t = render_table(&aggregate(&[rec("v", 1.0, 0.95491)]));
        assert!(t.contains("| d | kernel | v | 1.0000/0.9549 |"));
    }

    #[test]
    fn iris_kernel_linear_is_perfect() {
        let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data");
        let d = load_csv(&root.join("iris01.csv")).unwrap();
        let algo = AlgoSpec::Kernel {
            map: FeatureMap::linear(),
            lambda: 0.01,
        };
        let exp = run_experiment(&algo, &d, &CvPlan::default()).unwrap();
        assert_eq!(exp.records.len(), 25);
        assert_eq!(exp.aggregates.len(), 1);
        assert_eq!((exp.aggregates[0].train_acc, exp.aggregates[0].test_acc), (1.0, 1.0));
        let keys: Vec<(u64, usize)> = exp.records.iter().map(|r| (r.seed, r.fold)).collect();
        let mut sorted = keys.clone();
        sorted.sort_unstable();
        assert_eq!(keys, sorted);
    }

    #[test]
    fn ukm_task_emits_three_variants() {
        let x: Vec<Vec<f64>> = (0..12).map(|i| vec![1.0 + i as f64 * 0.1, if i % 2 == 0 { 0.2 } else { 1.5 }]).collect();
        let y: Vec<f64> = (0..12).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let d = Dataset::new("toy", x, y).unwrap();
        let algo = AlgoSpec::Ukm {
            cfg: UkmCfg {
                mode: ukm::Mode::Real,
                outer: 3,
                inner: 3,
                ..UkmCfg::default()
            },
            loss: LossKind::SquaredError,
        };
        let plan = CvPlan {
            folds: 3,
            seeds: vec![0],
            split_seed: 1,
        };
        let exp = run_experiment(&algo, &d, &plan).unwrap();
        assert_eq!(exp.records.len(), 9);
        let variants: Vec<&str> = exp.records[..3].iter().map(|r| r.variant.as_str()).collect();
        assert_eq!(variants, ["X", "P", "OU(X)"]);
        assert!(exp.records.iter().all(|r| (0.0..=1.0).contains(&r.test_acc) && r.wall_time.is_some()));
    }
}
