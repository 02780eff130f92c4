//! Experiment harness for the extraction laboratory.
//!
//! Subcommands wire the library end to end: corpus generation, task
//! preparation, victim training, query campaigns, substitute-model attacks,
//! parameter sweeps, loss diagnostics, and a TCP victim service. Every
//! command is deterministic given the same config and seed, and every CSV
//! row carries a hash of the full effective configuration.

mod config;

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs::{self, OpenOptions};
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process;
use std::time::{Duration, Instant};

use clap::{Parser, Subcommand};
use qnnlab::data::{
    build_task, generate_corpus, load_split, save_split, CorpusKind, PcaProjector, RawImageSet,
    Task, TaskSplit,
};
use qnnlab::extraction::{
    aggregate_all, baseline_cloudleak, baseline_cot_ensemble, baseline_coteach,
    baseline_quantumleak, distill, loss_histogram, split_co_teach, Ensemble, LabelMode, F1_GRID,
    F2_GRID, V_TH_GRID,
};
use qnnlab::jsonfmt::to_string_17;
use qnnlab::qnn::{evaluate_accuracy, Predictor, QnnModel};
use qnnlab::victim::{run_campaign, train_victim, QueriedDataset, Service, ServiceConfig};
use serde::Serialize;

use crate::config::{ExperimentConfig, Scheme};

/// Command failure, split by exit code: configuration problems exit 2,
/// runtime problems (missing files, I/O, numeric errors) exit 3.
#[derive(Debug)]
pub enum Failure {
    Config(String),
    Runtime(String),
}

impl Failure {
    pub fn config(message: impl Into<String>) -> Self {
        Failure::Config(message.into())
    }

    pub fn runtime(message: impl Into<String>) -> Self {
        Failure::Runtime(message.into())
    }

    fn message(&self) -> &str {
        match self {
            Failure::Config(m) | Failure::Runtime(m) => m,
        }
    }

    fn exit_code(&self) -> i32 {
        match self {
            Failure::Config(_) => 2,
            Failure::Runtime(_) => 3,
        }
    }
}

impl From<qnnlab::Error> for Failure {
    fn from(err: qnnlab::Error) -> Self {
        Failure::Runtime(err.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(err: std::io::Error) -> Self {
        Failure::Runtime(err.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(err: serde_json::Error) -> Self {
        Failure::Runtime(err.to_string())
    }
}

#[derive(Parser)]
#[command(
    name = "qnnlab",
    version,
    about = "Model-extraction experiments against a noisy quantum classifier service"
)]
struct Cli {
    /// JSON config file; values override defaults, flags override both.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Top-level seed override.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory override.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Task override: m01, m78, ftt, fds, fss (or "all" for prepare).
    #[arg(long, global = true)]
    task: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate both image corpora as IDX files under <out>/corpus/.
    GenData,
    /// Build train/val/test splits and a manifest for one task (or all).
    Prepare,
    /// Train the victim classifier for the configured task.
    TrainVictim,
    /// Run a query campaign against the stored victim model.
    Query,
    /// Train one substitute model from a stored campaign.
    Attack {
        /// base, qleak, cot, cot-e, or scot.
        #[arg(long)]
        scheme: Option<String>,
    },
    /// Rerun the split co-teaching attack across a parameter grid and seeds.
    Sweep {
        /// Swept parameter: v_th, f1, or f2.
        #[arg(long)]
        param: String,
        /// Comma-separated grid values; defaults to the built-in grid.
        #[arg(long)]
        grid: Option<String>,
    },
    /// Histogram one-epoch substitute losses over clean vs noisy labels.
    Losshist,
    /// Serve the victim over TCP until interrupted.
    Serve {
        /// Listen address, e.g. 127.0.0.1:7878 (port 0 picks a free port).
        #[arg(long)]
        listen: Option<String>,
    },
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    if let Err(failure) = run(cli) {
        eprintln!("error: {}", failure.message());
        process::exit(failure.exit_code());
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let mut cfg = ExperimentConfig::load(cli.config.as_deref())?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.out_dir = out.display().to_string();
    }
    if let Some(task) = &cli.task {
        cfg.task = task.clone();
    }
    match cli.command {
        Command::GenData => cmd_gen_data(&cfg),
        Command::Prepare => cmd_prepare(&cfg),
        Command::TrainVictim => cmd_train_victim(&cfg),
        Command::Query => cmd_query(&cfg),
        Command::Attack { scheme } => {
            if let Some(scheme) = scheme {
                cfg.scheme = scheme;
            }
            cmd_attack(&cfg)
        }
        Command::Sweep { param, grid } => cmd_sweep(&cfg, &param, grid.as_deref()),
        Command::Losshist => cmd_losshist(&cfg),
        Command::Serve { listen } => {
            if let Some(listen) = listen {
                cfg.listen = listen;
            }
            cmd_serve(&cfg)
        }
    }
}

fn parse_task(name: &str) -> Result<Task, Failure> {
    Task::parse(name).map_err(|e| Failure::config(e.to_string()))
}

/// Output tree under the configured directory. Filenames carry the task (and
/// seed where runs with different seeds coexist) so pipelines never collide.
struct Layout {
    root: PathBuf,
}

impl Layout {
    fn new(cfg: &ExperimentConfig) -> Self {
        Self { root: PathBuf::from(&cfg.out_dir) }
    }

    fn corpus_dir(&self, kind: CorpusKind) -> PathBuf {
        let name = match kind {
            CorpusKind::Digits => "digits",
            CorpusKind::Fashion => "fashion",
        };
        self.root.join("corpus").join(name)
    }

    fn corpus_images(&self, kind: CorpusKind) -> PathBuf {
        self.corpus_dir(kind).join("images.idx3-ubyte")
    }

    fn corpus_labels(&self, kind: CorpusKind) -> PathBuf {
        self.corpus_dir(kind).join("labels.idx1-ubyte")
    }

    fn tasks_dir(&self) -> PathBuf {
        self.root.join("tasks")
    }

    fn manifest_path(&self, task: Task) -> PathBuf {
        self.tasks_dir().join(format!("{}.manifest.json", task.name()))
    }

    fn models_dir(&self) -> PathBuf {
        self.root.join("models")
    }

    fn victim_model(&self, task: Task) -> PathBuf {
        self.models_dir().join(format!("{}.victim.json", task.name()))
    }

    fn attack_model(&self, task: Task, scheme: Scheme, seed: u64) -> PathBuf {
        let ext = match scheme {
            Scheme::Qleak | Scheme::CotEnsemble => "jsonl",
            _ => "json",
        };
        self.models_dir().join(format!("{}.{}.s{}.{}", task.name(), scheme.name(), seed, ext))
    }

    fn queries_dir(&self) -> PathBuf {
        self.root.join("queries")
    }

    fn campaign_path(&self, task: Task, seed: u64) -> PathBuf {
        self.queries_dir().join(format!("{}.s{}.jsonl", task.name(), seed))
    }

    fn results_csv(&self) -> PathBuf {
        self.root.join("results.csv")
    }

    fn sweep_csv(&self, param: &str) -> PathBuf {
        self.root.join(format!("sweep_{param}.csv"))
    }

    fn losshist_csv(&self, task: Task, seed: u64) -> PathBuf {
        self.root.join(format!("losshist_{}.s{}.csv", task.name(), seed))
    }
}

const RESULTS_HEADER: &str =
    "scheme,task,seed,v_th,f1,f2,noise_scale,val_acc,test_acc,d_r_fraction,wall_seconds,config_hash";
const SWEEP_HEADER: &str =
    "param,value,task,seed,val_acc,test_acc,d_r_fraction,wall_seconds,config_hash";

/// One line of the attack results file; optional columns print as empty cells.
struct ResultsRow<'a> {
    scheme: &'a str,
    task: Task,
    seed: u64,
    v_th: Option<f64>,
    f1: Option<f64>,
    f2: Option<f64>,
    noise_scale: Option<f64>,
    val_acc: f64,
    test_acc: f64,
    d_r_fraction: Option<f64>,
    wall_seconds: f64,
    config_hash: String,
}

fn cell(value: Option<f64>) -> String {
    value.map(|v| v.to_string()).unwrap_or_default()
}

fn append_csv(path: &Path, header: &str, row: &str) -> Result<(), Failure> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let fresh = !path.exists();
    let mut file = OpenOptions::new().create(true).append(true).open(path)?;
    if fresh {
        writeln!(file, "{header}")?;
    }
    writeln!(file, "{row}")?;
    Ok(())
}

fn append_results_row(layout: &Layout, row: &ResultsRow<'_>) -> Result<(), Failure> {
    let line = format!(
        "{},{},{},{},{},{},{},{},{},{},{:.3},{}",
        row.scheme,
        row.task.name(),
        row.seed,
        cell(row.v_th),
        cell(row.f1),
        cell(row.f2),
        cell(row.noise_scale),
        row.val_acc,
        row.test_acc,
        cell(row.d_r_fraction),
        row.wall_seconds,
        row.config_hash,
    );
    append_csv(&layout.results_csv(), RESULTS_HEADER, &line)
}

fn cmd_gen_data(cfg: &ExperimentConfig) -> Result<(), Failure> {
    let layout = Layout::new(cfg);
    for kind in [CorpusKind::Digits, CorpusKind::Fashion] {
        let set = generate_corpus(kind, cfg.per_class, cfg.seed);
        fs::create_dir_all(layout.corpus_dir(kind))?;
        set.save(&layout.corpus_images(kind), &layout.corpus_labels(kind))?;
        println!("wrote {} images under {}", set.len(), layout.corpus_dir(kind).display());
    }
    Ok(())
}

/// Everything split files alone cannot reconstruct: the seed and the exact
/// projector, so downstream runs can verify features against their origin.
#[derive(Serialize)]
struct Manifest<'a> {
    format: &'static str,
    version: u32,
    task: &'a str,
    seed: u64,
    train: usize,
    val: usize,
    test: usize,
    feature_scale: &'a [f64],
    projector: &'a PcaProjector,
}

fn cmd_prepare(cfg: &ExperimentConfig) -> Result<(), Failure> {
    let tasks: Vec<Task> = if cfg.task == "all" {
        Task::all().to_vec()
    } else {
        vec![parse_task(&cfg.task)?]
    };
    let layout = Layout::new(cfg);
    fs::create_dir_all(layout.tasks_dir())?;
    for task in tasks {
        let kind = CorpusKind::for_dataset(task.dataset());
        let raw =
            RawImageSet::load(&layout.corpus_images(kind), &layout.corpus_labels(kind)).map_err(
                |e| {
                    Failure::runtime(format!(
                        "cannot load corpus for task {}: {e} (run `qnnlab gen-data` first)",
                        task.name()
                    ))
                },
            )?;
        let bundle = build_task(&raw, task, cfg.split_counts(), cfg.seed)?;
        save_split(&bundle.split, &layout.tasks_dir())?;
        let manifest = Manifest {
            format: "task-manifest",
            version: 1,
            task: task.name(),
            seed: cfg.seed,
            train: bundle.split.train.len(),
            val: bundle.split.val.len(),
            test: bundle.split.test.len(),
            feature_scale: &bundle.feature_scale,
            projector: &bundle.projector,
        };
        let mut text = to_string_17(&manifest)?;
        text.push('\n');
        fs::write(layout.manifest_path(task), text)?;
        println!(
            "prepared {}: {} train / {} val / {} test",
            task.name(),
            bundle.split.train.len(),
            bundle.split.val.len(),
            bundle.split.test.len()
        );
    }
    Ok(())
}

fn load_split_for(layout: &Layout, task: Task) -> Result<TaskSplit, Failure> {
    load_split(&layout.tasks_dir(), task).map_err(|e| {
        Failure::runtime(format!(
            "cannot load splits for task {}: {e} (run `qnnlab prepare` first)",
            task.name()
        ))
    })
}

fn load_victim_for(layout: &Layout, task: Task) -> Result<QnnModel, Failure> {
    QnnModel::load(&layout.victim_model(task)).map_err(|e| {
        Failure::runtime(format!(
            "cannot load victim model for task {}: {e} (run `qnnlab train-victim` first)",
            task.name()
        ))
    })
}

fn load_campaign_for(layout: &Layout, task: Task, seed: u64) -> Result<QueriedDataset, Failure> {
    QueriedDataset::load(&layout.campaign_path(task, seed)).map_err(|e| {
        Failure::runtime(format!(
            "cannot load campaign for task {} seed {seed}: {e} (run `qnnlab query` first)",
            task.name()
        ))
    })
}

fn cmd_train_victim(cfg: &ExperimentConfig) -> Result<(), Failure> {
    let task = parse_task(&cfg.task)?;
    let layout = Layout::new(cfg);
    let split = load_split_for(&layout, task)?;
    let started = Instant::now();
    let report = train_victim(&split.train, &split.val, cfg.arch(), &cfg.victim_train(), cfg.seed)?;
    let wall_seconds = started.elapsed().as_secs_f64();
    let test_acc = evaluate_accuracy(&report.model, &split.test)?;
    fs::create_dir_all(layout.models_dir())?;
    report.model.save(&layout.victim_model(task))?;
    append_results_row(
        &layout,
        &ResultsRow {
            scheme: "victim",
            task,
            seed: cfg.seed,
            v_th: None,
            f1: None,
            f2: None,
            noise_scale: None,
            val_acc: report.best_val_accuracy,
            test_acc,
            d_r_fraction: None,
            wall_seconds,
            config_hash: cfg.hash(),
        },
    )?;
    println!(
        "victim {}: best epoch {} val {:.4} test {:.4} ({:.1}s)",
        task.name(),
        report.best_epoch,
        report.best_val_accuracy,
        test_acc,
        wall_seconds
    );
    Ok(())
}

fn cmd_query(cfg: &ExperimentConfig) -> Result<(), Failure> {
    let task = parse_task(&cfg.task)?;
    let layout = Layout::new(cfg);
    let split = load_split_for(&layout, task)?;
    let victim = load_victim_for(&layout, task)?;
    let features: Vec<[f64; 8]> = split.train.iter().map(|s| s.features).collect();
    let data =
        run_campaign(&victim, &features, &cfg.schedule(), cfg.m_rounds, cfg.shots, cfg.seed)?;
    fs::create_dir_all(layout.queries_dir())?;
    let path = layout.campaign_path(task, cfg.seed);
    data.save(&path)?;
    println!(
        "campaign {}: {} samples x {} rounds -> {}",
        task.name(),
        data.n_samples(),
        data.m_rounds(),
        path.display()
    );
    Ok(())
}

/// A trained substitute plus its scores; ensembles are kept whole so their
/// committee vote is what gets evaluated and saved.
enum AttackArtifact {
    Single(QnnModel),
    Committee(Ensemble),
}

struct AttackOutcome {
    val_acc: f64,
    test_acc: f64,
    d_r_fraction: Option<f64>,
    artifact: AttackArtifact,
}

fn run_scheme(
    scheme: Scheme,
    data: &QueriedDataset,
    split: &TaskSplit,
    cfg: &ExperimentConfig,
) -> Result<AttackOutcome, Failure> {
    let arch = cfg.arch();
    match scheme {
        Scheme::Base => {
            let model = baseline_cloudleak(data, arch, &cfg.attack_train(), cfg.seed)?;
            let val_acc = evaluate_accuracy(&model, &split.val)?;
            let test_acc = evaluate_accuracy(&model, &split.test)?;
            Ok(AttackOutcome {
                val_acc,
                test_acc,
                d_r_fraction: None,
                artifact: AttackArtifact::Single(model),
            })
        }
        Scheme::Qleak => {
            let ensemble = baseline_quantumleak(
                data,
                arch,
                &cfg.attack_train(),
                cfg.n_committees,
                cfg.bag_fraction,
                cfg.seed,
            )?;
            let val_acc = evaluate_accuracy(&ensemble, &split.val)?;
            let test_acc = evaluate_accuracy(&ensemble, &split.test)?;
            Ok(AttackOutcome {
                val_acc,
                test_acc,
                d_r_fraction: None,
                artifact: AttackArtifact::Committee(ensemble),
            })
        }
        Scheme::Cot => {
            let attack = baseline_coteach(data, cfg.f2, &cfg.coteach(), arch, cfg.seed, &split.val)?;
            let test_acc = evaluate_accuracy(&attack.model, &split.test)?;
            Ok(AttackOutcome {
                val_acc: attack.val_accuracy,
                test_acc,
                d_r_fraction: None,
                artifact: AttackArtifact::Single(attack.model),
            })
        }
        Scheme::CotEnsemble => {
            let ensemble = baseline_cot_ensemble(
                data,
                cfg.f2,
                &cfg.coteach(),
                arch,
                cfg.n_committees,
                cfg.bag_fraction,
                cfg.seed,
                &split.val,
            )?;
            let val_acc = evaluate_accuracy(&ensemble, &split.val)?;
            let test_acc = evaluate_accuracy(&ensemble, &split.test)?;
            Ok(AttackOutcome {
                val_acc,
                test_acc,
                d_r_fraction: None,
                artifact: AttackArtifact::Committee(ensemble),
            })
        }
        Scheme::Scot => {
            let result = split_co_teach(data, &cfg.coteach(), arch, cfg.seed, &split.val)?;
            let test_acc = evaluate_accuracy(&result.model, &split.test)?;
            Ok(AttackOutcome {
                val_acc: result.val_accuracy,
                test_acc,
                d_r_fraction: Some(result.split.robust_fraction()),
                artifact: AttackArtifact::Single(result.model),
            })
        }
    }
}

fn save_artifact(artifact: &AttackArtifact, path: &Path) -> Result<(), Failure> {
    match artifact {
        AttackArtifact::Single(model) => model.save(path)?,
        AttackArtifact::Committee(ensemble) => {
            // Members already serialize to single lines, so the committee
            // file is plain JSON-lines, one member per line.
            let mut text = String::new();
            for member in &ensemble.members {
                text.push_str(&member.to_json_string()?);
            }
            fs::write(path, text)?;
        }
    }
    Ok(())
}

/// Which knob columns a scheme actually consumed; the rest stay empty.
fn scheme_columns(scheme: Scheme, cfg: &ExperimentConfig) -> (Option<f64>, Option<f64>, Option<f64>) {
    match scheme {
        Scheme::Base | Scheme::Qleak => (None, None, None),
        Scheme::Cot | Scheme::CotEnsemble => (None, None, Some(cfg.f2)),
        Scheme::Scot => (Some(cfg.v_th), Some(cfg.f1), Some(cfg.f2)),
    }
}

fn cmd_attack(cfg: &ExperimentConfig) -> Result<(), Failure> {
    let scheme = Scheme::parse(&cfg.scheme)?;
    let task = parse_task(&cfg.task)?;
    let layout = Layout::new(cfg);
    let split = load_split_for(&layout, task)?;
    let data = load_campaign_for(&layout, task, cfg.seed)?;
    let started = Instant::now();
    let outcome = run_scheme(scheme, &data, &split, cfg)?;
    let wall_seconds = started.elapsed().as_secs_f64();
    fs::create_dir_all(layout.models_dir())?;
    save_artifact(&outcome.artifact, &layout.attack_model(task, scheme, cfg.seed))?;
    let (v_th, f1, f2) = scheme_columns(scheme, cfg);
    append_results_row(
        &layout,
        &ResultsRow {
            scheme: scheme.name(),
            task,
            seed: cfg.seed,
            v_th,
            f1,
            f2,
            noise_scale: Some(cfg.noise_scale),
            val_acc: outcome.val_acc,
            test_acc: outcome.test_acc,
            d_r_fraction: outcome.d_r_fraction,
            wall_seconds,
            config_hash: cfg.hash(),
        },
    )?;
    match outcome.d_r_fraction {
        Some(d_r) => println!(
            "attack {} on {}: val {:.4} test {:.4} d_r {:.3} ({:.1}s)",
            scheme,
            task.name(),
            outcome.val_acc,
            outcome.test_acc,
            d_r,
            wall_seconds
        ),
        None => println!(
            "attack {} on {}: val {:.4} test {:.4} ({:.1}s)",
            scheme,
            task.name(),
            outcome.val_acc,
            outcome.test_acc,
            wall_seconds
        ),
    }
    Ok(())
}

fn parse_grid(text: &str) -> Result<Vec<f64>, Failure> {
    let values: Result<Vec<f64>, _> = text.split(',').map(|s| s.trim().parse::<f64>()).collect();
    let values =
        values.map_err(|e| Failure::config(format!("invalid grid value in \"{text}\": {e}")))?;
    if values.is_empty() {
        return Err(Failure::config("grid must contain at least one value".to_string()));
    }
    Ok(values)
}

fn cmd_sweep(cfg: &ExperimentConfig, param: &str, grid_text: Option<&str>) -> Result<(), Failure> {
    let task = parse_task(&cfg.task)?;
    if !matches!(param, "v_th" | "f1" | "f2") {
        return Err(Failure::config(format!(
            "unknown sweep parameter \"{param}\" (expected v_th, f1, or f2)"
        )));
    }
    let grid = match grid_text {
        Some(text) => parse_grid(text)?,
        None => match param {
            "v_th" => V_TH_GRID.to_vec(),
            "f1" => F1_GRID.to_vec(),
            _ => F2_GRID.to_vec(),
        },
    };
    let layout = Layout::new(cfg);
    let split = load_split_for(&layout, task)?;
    let features: Vec<[f64; 8]> = split.train.iter().map(|s| s.features).collect();

    // One campaign per seed, shared across grid points: stored campaigns are
    // reused, missing ones are rebuilt in memory from the stored victim.
    let mut victim: Option<QnnModel> = None;
    let mut campaigns: Vec<(u64, QueriedDataset)> = Vec::new();
    for &seed in &cfg.seeds {
        let path = layout.campaign_path(task, seed);
        let data = if path.exists() {
            QueriedDataset::load(&path)?
        } else {
            if victim.is_none() {
                victim = Some(load_victim_for(&layout, task)?);
            }
            let model = victim.as_ref().expect("victim loaded above");
            run_campaign(model, &features, &cfg.schedule(), cfg.m_rounds, cfg.shots, seed)?
        };
        campaigns.push((seed, data));
    }

    let csv = layout.sweep_csv(param);
    for &value in &grid {
        for (seed, data) in &campaigns {
            let mut effective = cfg.clone();
            effective.seed = *seed;
            match param {
                "v_th" => effective.v_th = value,
                "f1" => effective.f1 = value,
                _ => effective.f2 = value,
            }
            let started = Instant::now();
            let result = split_co_teach(data, &effective.coteach(), cfg.arch(), *seed, &split.val)?;
            let wall_seconds = started.elapsed().as_secs_f64();
            let test_acc = evaluate_accuracy(&result.model, &split.test)?;
            let d_r = result.split.robust_fraction();
            let line = format!(
                "{param},{value},{},{seed},{},{test_acc},{d_r},{wall_seconds:.3},{}",
                task.name(),
                result.val_accuracy,
                effective.hash(),
            );
            append_csv(&csv, SWEEP_HEADER, &line)?;
            println!(
                "sweep {param}={value} seed {seed}: val {:.4} test {:.4} d_r {:.3}",
                result.val_accuracy, test_acc, d_r
            );
        }
    }
    println!("sweep rows appended to {}", csv.display());
    Ok(())
}

fn cmd_losshist(cfg: &ExperimentConfig) -> Result<(), Failure> {
    let task = parse_task(&cfg.task)?;
    let layout = Layout::new(cfg);
    let victim = load_victim_for(&layout, task)?;
    let data = load_campaign_for(&layout, task, cfg.seed)?;
    let targets = aggregate_all(&data)?;

    // Clean labels are the victim's own noiseless verdicts; a campaign label
    // that disagrees was corrupted by shot noise or drift.
    let mut reference: HashMap<u64, u8> = HashMap::with_capacity(targets.len());
    for target in &targets {
        let out = victim.predict(&target.features)?;
        reference.insert(target.sample_id, out.argmax());
    }

    let probe_cfg =
        qnnlab::victim::TrainConfig { epochs: 1, batch_size: cfg.attack_batch_size };
    let probe = distill(&targets, cfg.arch(), LabelMode::Soft, &probe_cfg, cfg.seed)?;
    let hist = loss_histogram(&probe, &targets, &reference, cfg.hist_bins)?;

    let hash = cfg.hash();
    let mut text = String::from("bin_lo,bin_hi,clean,noisy,config_hash\n");
    for i in 0..hist.n_bins() {
        writeln!(
            text,
            "{},{},{},{},{hash}",
            hist.edges[i],
            hist.edges[i + 1],
            hist.clean[i],
            hist.noisy[i]
        )
        .expect("string write");
    }
    let path = layout.losshist_csv(task, cfg.seed);
    fs::write(&path, text)?;
    println!(
        "loss histogram {}: {} samples ({} noisy-tagged) -> {}",
        task.name(),
        hist.total(),
        hist.noisy_total(),
        path.display()
    );
    Ok(())
}

fn cmd_serve(cfg: &ExperimentConfig) -> Result<(), Failure> {
    let task = parse_task(&cfg.task)?;
    let layout = Layout::new(cfg);
    let victim = load_victim_for(&layout, task)?;
    let service = Service::start(
        &cfg.listen,
        victim,
        cfg.schedule(),
        ServiceConfig { shots: cfg.shots, seed: cfg.seed },
    )?;
    println!("serving victim {} on {}", task.name(), service.local_addr());
    loop {
        std::thread::sleep(Duration::from_secs(3600));
    }
}
