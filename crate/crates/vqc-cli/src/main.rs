//! `vqc` command-line runner.
//!
//! Every subcommand prints JSON-lines records first, then an optional table.
//! Exit codes: 0 success, 2 configuration error, 3 data error, 4 numerical failure.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use vqc::ansatz::{AnsatzKind, AnsatzSpec};
use vqc::harness::{self, AlgoSpec, CvPlan, Dataset, RunRecord};
use vqc::kernel::{FeatureKind, FeatureMap};
use vqc::predict::LossKind;
use vqc::qcl::SgdCfg;
use vqc::ukm::{self, Mode, UkmCfg, Variant};
use vqc::vcr::{self, CostKind, LDelta, VcrProblem, VcrResult};
use vqc::{umat, Error};

#[derive(Parser)]
#[command(name = "vqc", version, about = "Variational quantum classifiers on a classical simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Quantum circuit learning under k-fold cross-validation.
    Qcl(QclArgs),
    /// Unitary kernel method under k-fold cross-validation.
    Ukm(UkmArgs),
    /// Kernel ridge baseline under k-fold cross-validation.
    Kernel(KernelArgs),
    /// Fit a layered circuit to a UMAT unitary.
    Vcr(VcrArgs),
    /// Every table configuration for one dataset.
    Cv(CvArgs),
}

#[derive(Args, Clone)]
struct DataArgs {
    /// Headerless CSV: features, then a {0,1} or {-1,1} label.
    #[arg(long)]
    dataset: PathBuf,
    /// First model seed; seeds are seed, seed+1, ...
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 5)]
    num_seeds: u64,
    #[arg(long, default_value_t = 5)]
    folds: usize,
    #[arg(long, default_value_t = 0)]
    split_seed: u64,
    /// Allow datasets that need more than 7 qubits.
    #[arg(long)]
    extended: bool,
}

#[derive(Args, Clone)]
struct OutArgs {
    /// JSON-lines destination; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print a train/test table of the means after the records.
    #[arg(long)]
    table: bool,
    /// Keep wall-clock times in the records (breaks byte-identical output).
    #[arg(long)]
    timing: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum AnsatzArg {
    Cnot,
    Crot,
    Heis1d,
    Heisfc,
}

impl From<AnsatzArg> for AnsatzKind {
    fn from(a: AnsatzArg) -> Self {
        match a {
            AnsatzArg::Cnot => AnsatzKind::CnotBased,
            AnsatzArg::Crot => AnsatzKind::CRotBased,
            AnsatzArg::Heis1d => AnsatzKind::Heis1d,
            AnsatzArg::Heisfc => AnsatzKind::HeisFC,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum LossArg {
    Se,
    Hinge,
    Xe,
}

impl From<LossArg> for LossKind {
    fn from(l: LossArg) -> Self {
        match l {
            LossArg::Se => LossKind::SquaredError,
            LossArg::Hinge => LossKind::Hinge,
            LossArg::Xe => LossKind::CrossEntropy,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Real,
    Complex,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Real => Mode::Real,
            ModeArg::Complex => Mode::Complex,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FeatureArg {
    Linear,
    Poly2,
}

#[derive(Clone, Copy, ValueEnum)]
enum CostArg {
    Relative,
    Difference,
}

#[derive(Args)]
struct QclArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    out: OutArgs,
    #[arg(long, value_enum, default_value_t = AnsatzArg::Cnot)]
    ansatz: AnsatzArg,
    #[arg(long, default_value_t = 5)]
    layers: usize,
    /// Heisenberg evolution time.
    #[arg(long, default_value_t = AnsatzSpec::DEFAULT_DT)]
    dt: f64,
    #[arg(long, default_value_t = 300)]
    iters: usize,
    #[arg(long, value_enum, default_value_t = LossArg::Se)]
    loss: LossArg,
    #[arg(long, default_value_t = 0.1)]
    eta: f64,
    /// Minibatch size; min(32, N) when omitted.
    #[arg(long)]
    batch: Option<usize>,
    #[arg(long)]
    bias: bool,
}

#[derive(Args)]
struct UkmArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    out: OutArgs,
    #[arg(long, value_enum, default_value_t = ModeArg::Complex)]
    mode: ModeArg,
    #[arg(long, default_value_t = 0.010)]
    r: f64,
    /// Outer splitting iterations K.
    #[arg(long, default_value_t = 30)]
    soc_iters: usize,
    /// CG iterations per X-step K'.
    #[arg(long, default_value_t = 10)]
    cg_iters: usize,
    #[arg(long)]
    random_p0: bool,
    #[arg(long)]
    bias: bool,
    #[arg(long, value_enum, default_value_t = LossArg::Se)]
    loss: LossArg,
    /// Write P of the first seed on `--export-fold` as UMAT.
    #[arg(long)]
    export_p: Option<PathBuf>,
    /// Write OU(X) of the first seed on `--export-fold` as UMAT.
    #[arg(long)]
    export_oux: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    export_fold: usize,
}

#[derive(Args)]
struct KernelArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    out: OutArgs,
    #[arg(long, value_enum, default_value_t = FeatureArg::Linear)]
    feature: FeatureArg,
    #[arg(long)]
    normalize: bool,
    #[arg(long)]
    bias: bool,
    #[arg(long, default_value_t = 0.1)]
    lambda: f64,
}

#[derive(Args)]
struct VcrArgs {
    /// UMAT file holding the target unitary.
    #[arg(long)]
    target: PathBuf,
    #[arg(long, value_enum, default_value_t = AnsatzArg::Cnot)]
    ansatz: AnsatzArg,
    #[arg(long, default_value_t = AnsatzSpec::DEFAULT_DT)]
    dt: f64,
    /// Layer count; ignored when `--l-grid` is given.
    #[arg(long, default_value_t = 1)]
    layers: usize,
    /// Comma-separated ascending layer counts for the L_δ search.
    #[arg(long, value_delimiter = ',')]
    l_grid: Option<Vec<usize>>,
    #[arg(long, default_value_t = 1e-3)]
    delta: f64,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    #[arg(long, value_enum, default_value_t = CostArg::Relative)]
    cost: CostArg,
    #[arg(long, default_value_t = 20)]
    restarts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 2000)]
    max_iters: usize,
    /// Write the synthesized gate list here.
    #[arg(long)]
    gates_out: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CvArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    out: OutArgs,
    #[arg(long, default_value_t = 5)]
    layers: usize,
    #[arg(long, default_value_t = 300)]
    iters: usize,
    #[arg(long, default_value_t = 0.010)]
    r: f64,
    #[arg(long, default_value_t = 30)]
    soc_iters: usize,
    #[arg(long, default_value_t = 10)]
    cg_iters: usize,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::ParamLength { .. } | Error::QubitRange { .. } | Error::SameQubit(_) => 2,
        Error::Data(_) | Error::Label(_) | Error::Dimension(_) | Error::NotUnitary { .. } | Error::Empty(_) => 3,
        _ => 4,
    }
}

fn plan(d: &DataArgs) -> Result<CvPlan, Error> {
    if d.num_seeds == 0 {
        return Err(Error::Config("--num-seeds must be at least 1".into()));
    }
    Ok(CvPlan {
        folds: d.folds,
        seeds: (d.seed..d.seed + d.num_seeds).collect(),
        split_seed: d.split_seed,
    })
}

fn load(d: &DataArgs) -> Result<Dataset, Error> {
    let data = harness::load_csv(&d.dataset)?;
    harness::check_scale(&data, d.extended)?;
    if data.len() < d.folds {
        return Err(Error::Config(format!("{} samples cannot fill {} folds", data.len(), d.folds)));
    }
    Ok(data)
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>, Error> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Error::Data(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn io_err(e: io::Error) -> Error {
    Error::Data(format!("write failed: {e}"))
}

fn emit(records: Vec<RunRecord>, out: &OutArgs) -> Result<(), Error> {
    let mut w = sink(out.out.as_deref())?;
    let records: Vec<RunRecord> = records
        .into_iter()
        .map(|mut r| {
            if !out.timing {
                r.wall_time = None;
            }
            r
        })
        .collect();
    for r in &records {
        writeln!(w, "{}", serde_json::to_string(r).expect("record serializes")).map_err(io_err)?;
    }
    w.flush().map_err(io_err)?;
    drop(w);
    if out.table {
        print!("{}", harness::render_table(&harness::aggregate(&records)));
    }
    Ok(())
}

/// The qubit count is a placeholder until [`sized`] sees the data; the rest is validated here.
fn qcl_algo(kind: AnsatzKind, layers: usize, dt: f64, loss: LossKind, sgd: SgdCfg, bias: bool) -> Result<AlgoSpec, Error> {
    let spec = AnsatzSpec { kind, n: 1, layers, dt };
    spec.validate()?;
    Ok(AlgoSpec::Qcl {
        spec,
        loss,
        sgd,
        use_bias: bias,
    })
}

/// Fixes the qubit count of a QCL spec from the data and validates it.
fn sized(algo: AlgoSpec, data: &Dataset) -> Result<AlgoSpec, Error> {
    match algo {
        AlgoSpec::Qcl {
            spec,
            loss,
            sgd,
            use_bias,
        } => {
            let spec = AnsatzSpec {
                n: vqc::encode::qubits_for(data.features()),
                ..spec
            };
            spec.validate()?;
            Ok(AlgoSpec::Qcl {
                spec,
                loss,
                sgd,
                use_bias,
            })
        }
        other => Ok(other),
    }
}

fn validate_loss(loss: LossKind) -> Result<(), Error> {
    if loss == LossKind::CrossEntropy {
        return Err(Error::Config("cross-entropy needs {0,1} labels; QCL and UKM train on ±1".into()));
    }
    Ok(())
}

fn cmd_qcl(a: QclArgs) -> Result<(), Error> {
    validate_loss(a.loss.into())?;
    if !(a.eta > 0.0) || a.batch == Some(0) {
        return Err(Error::Config("--eta must be positive and --batch at least 1".into()));
    }
    let sgd = SgdCfg {
        batch: a.batch,
        eta: a.eta,
        iters: a.iters,
        seed: 0,
    };
    let algo = qcl_algo(a.ansatz.into(), a.layers, a.dt, a.loss.into(), sgd, a.bias)?;
    let plan = plan(&a.data)?;
    let data = load(&a.data)?;
    let algo = sized(algo, &data)?;
    emit(harness::run_experiment(&algo, &data, &plan)?.records, &a.out)
}

fn ukm_cfg(mode: Mode, r: f64, outer: usize, inner: usize, random_p0: bool, bias: bool) -> Result<UkmCfg, Error> {
    let cfg = UkmCfg {
        mode,
        use_bias: bias,
        r,
        outer,
        inner,
        random_p0,
        ..UkmCfg::default()
    };
    cfg.validate()?;
    Ok(cfg)
}

fn cmd_ukm(a: UkmArgs) -> Result<(), Error> {
    validate_loss(a.loss.into())?;
    let cfg = ukm_cfg(a.mode.into(), a.r, a.soc_iters, a.cg_iters, a.random_p0, a.bias)?;
    if a.export_fold >= a.data.folds {
        return Err(Error::Config(format!("--export-fold {} with {} folds", a.export_fold, a.data.folds)));
    }
    let plan = plan(&a.data)?;
    let data = load(&a.data)?;
    let algo = AlgoSpec::Ukm {
        cfg: cfg.clone(),
        loss: a.loss.into(),
    };
    let exp = harness::run_experiment(&algo, &data, &plan)?;
    if a.export_p.is_some() || a.export_oux.is_some() {
        // Same split and model seed as the matching record, so the export is that model.
        let folds = harness::kfold_split(data.len(), plan.folds, plan.split_seed)?;
        let cfg = UkmCfg {
            seed: harness::task_seed(plan.seeds[0], a.export_fold),
            ..cfg
        };
        let fit = ukm::ukm_fit(&data.encode(&folds[a.export_fold].train)?, &cfg, a.loss.into())?;
        if let Some(p) = &a.export_p {
            umat::write(p, &fit.model.snapshot(Variant::P).operator)?;
        }
        if let Some(p) = &a.export_oux {
            umat::write(p, &fit.model.snapshot(Variant::OuOfX).operator)?;
        }
    }
    emit(exp.records, &a.out)
}

fn feature_map(feature: FeatureArg, normalize: bool, bias: bool) -> FeatureMap {
    FeatureMap {
        kind: match feature {
            FeatureArg::Linear => FeatureKind::Linear,
            FeatureArg::Poly2 => FeatureKind::Poly2,
        },
        normalize,
        bias,
    }
}

fn cmd_kernel(a: KernelArgs) -> Result<(), Error> {
    if !(a.lambda > 0.0) {
        return Err(Error::Config(format!("--lambda must be positive, got {}", a.lambda)));
    }
    let plan = plan(&a.data)?;
    let data = load(&a.data)?;
    let algo = AlgoSpec::Kernel {
        map: feature_map(a.feature, a.normalize, a.bias),
        lambda: a.lambda,
    };
    emit(harness::run_experiment(&algo, &data, &plan)?.records, &a.out)
}

fn vcr_json(r: &VcrResult, l_delta: Option<Option<usize>>, delta: f64) -> serde_json::Value {
    let mut v = json!({
        "algo": "vcr",
        "layers": r.layers,
        "cost": r.cost,
        "lambda": r.lambda,
        "converged": r.converged,
        "restart": r.restart,
        "iterations": r.iterations,
        "trace": r.trace,
    });
    if let Some(found) = l_delta {
        v["delta"] = json!(delta);
        v["l_delta"] = json!(found);
    }
    v
}

fn cmd_vcr(a: VcrArgs) -> Result<(), Error> {
    if !(a.p > 0.0) || a.restarts == 0 {
        return Err(Error::Config("--p must be positive and --restarts at least 1".into()));
    }
    if let Some(g) = &a.l_grid {
        if g.is_empty() || g.contains(&0) || g.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("--l-grid must be nonempty, positive and strictly ascending".into()));
        }
    } else if a.layers == 0 {
        return Err(Error::Config("--layers must be at least 1".into()));
    }
    let target = umat::read(&a.target)?;
    let n = target.rows().trailing_zeros() as usize;
    let spec = AnsatzSpec::new(a.ansatz.into(), n, 1)?;
    let spec = AnsatzSpec { dt: a.dt, ..spec };
    let mut problem = VcrProblem::new(target, spec)?;
    problem.p = a.p;
    problem.restarts = a.restarts;
    problem.seed = a.seed;
    problem.max_iters = a.max_iters;
    problem.cost = match a.cost {
        CostArg::Relative => CostKind::Relative,
        CostArg::Difference => CostKind::Difference,
    };
    let (result, record) = match &a.l_grid {
        Some(grid) => match vcr::l_delta_search(&problem, a.delta, grid)? {
            LDelta::Found(r) => {
                let rec = vcr_json(&r, Some(Some(r.layers)), a.delta);
                (r, rec)
            }
            LDelta::NotFound(r) => {
                let rec = vcr_json(&r, Some(None), a.delta);
                (r, rec)
            }
        },
        None => {
            let r = vcr::vcr_synthesize(&problem, a.layers)?;
            let rec = vcr_json(&r, None, a.delta);
            (r, rec)
        }
    };
    if let Some(path) = &a.gates_out {
        let text = vcr::gate_list(&AnsatzSpec { layers: result.layers, ..spec }, &result.theta, result.lambda)?;
        std::fs::write(path, text).map_err(|e| Error::Data(format!("{}: {e}", path.display())))?;
    }
    let mut w = sink(a.out.as_deref())?;
    writeln!(w, "{record}").map_err(io_err)?;
    w.flush().map_err(io_err)?;
    if !result.cost.is_finite() {
        return Err(Error::NonFinite("VCR cost"));
    }
    Ok(())
}

fn relabel(records: Vec<RunRecord>, algo: &str) -> Vec<RunRecord> {
    records
        .into_iter()
        .map(|mut r| {
            r.algo = algo.to_string();
            r
        })
        .collect()
}

fn cmd_cv(a: CvArgs) -> Result<(), Error> {
    let plan = plan(&a.data)?;
    AnsatzSpec::new(AnsatzKind::CnotBased, 1, a.layers)?;
    let base_ukm = ukm_cfg(Mode::Complex, a.r, a.soc_iters, a.cg_iters, false, false)?;
    let data = load(&a.data)?;
    let mut configs: Vec<(String, AlgoSpec)> = Vec::new();
    for (mode, mname) in [(Mode::Complex, "complex"), (Mode::Real, "real")] {
        for bias in [false, true] {
            let cfg = UkmCfg {
                mode,
                use_bias: bias,
                ..base_ukm.clone()
            };
            let label = format!("ukm[{mname}{}]", if bias { ",bias" } else { "" });
            configs.push((
                label,
                AlgoSpec::Ukm {
                    cfg,
                    loss: LossKind::SquaredError,
                },
            ));
        }
    }
    for kind in [AnsatzArg::Cnot, AnsatzArg::Crot, AnsatzArg::Heis1d, AnsatzArg::Heisfc] {
        for bias in [false, true] {
            let sgd = SgdCfg {
                iters: a.iters,
                ..SgdCfg::default()
            };
            let algo = qcl_algo(kind.into(), a.layers, AnsatzSpec::DEFAULT_DT, LossKind::SquaredError, sgd, bias)?;
            let label = format!("qcl[{}]", if bias { "bias" } else { "no-bias" });
            configs.push((label, sized(algo, &data)?));
        }
    }
    for feature in [FeatureArg::Linear, FeatureArg::Poly2] {
        for bias in [false, true] {
            for lambda in [0.01, 0.1, 1.0] {
                configs.push((
                    format!("kernel[lambda={lambda}]"),
                    AlgoSpec::Kernel {
                        map: feature_map(feature, false, bias),
                        lambda,
                    },
                ));
            }
        }
    }
    let mut all = Vec::new();
    for (label, algo) in &configs {
        all.extend(relabel(harness::run_experiment(algo, &data, &plan)?.records, label));
    }
    emit(all, &a.out)
}

fn configure_threads() -> Result<(), Error> {
    let Ok(v) = std::env::var("VQC_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::Config(format!("VQC_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = || -> Result<(), Error> {
        configure_threads()?;
        match cli.command {
            Command::Qcl(a) => cmd_qcl(a),
            Command::Ukm(a) => cmd_ukm(a),
            Command::Kernel(a) => cmd_kernel(a),
            Command::Vcr(a) => cmd_vcr(a),
            Command::Cv(a) => cmd_cv(a),
        }
    };
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("vqc: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
