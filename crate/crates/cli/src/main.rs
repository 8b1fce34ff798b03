use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gmm_credit::dataio::{read_set_file, write_set_file, LabeledSet};
use gmm_credit::eval::{logistic_fit, logistic_predict_proba, write_metrics, LogisticConfig};
use gmm_credit::pipeline::{metrics_row, prepare, run_pipeline, write_el_rows, ElRow, RunConfig};
use gmm_credit::risk::{
    approval_curve, el_report, invert_loss_budget, sample_exposures, Exposure, PortfolioSpec,
};
use gmm_credit::scoring::{write_scores_file, ScoringModel};
use gmm_credit::select::{fit_best, select_k, Criterion, N_RESTARTS};
use gmm_credit::{seed, Error};

#[derive(Parser)]
#[command(name = "gmm-credit", version, about = "Gaussian-mixture probability-of-default scoring")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load, encode, split and optionally balance a dataset into train.csv and test.csv.
    Preprocess {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Sweep the number of components and write the AIC/BIC curve.
    SelectK {
        #[arg(long)]
        train: PathBuf,
        #[arg(long, default_value_t = 1)]
        k_min: usize,
        #[arg(long, default_value_t = 15)]
        k_max: usize,
        #[arg(long, default_value = "bic")]
        criterion: Criterion,
        #[command(flatten)]
        fit: FitArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit a mixture and its cluster pay-back table; writes a model file.
    Fit {
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 0.5)]
        threshold: f64,
        #[command(flatten)]
        fit: FitArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score a labeled set with a model file.
    Score {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        set: PathBuf,
        /// Overrides the model's decision threshold.
        #[arg(long)]
        threshold: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Classification metrics of the mixture model and a logistic baseline.
    Evaluate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        test: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Expected-loss report for a labeled set, with fixed and sampled exposures.
    ElReport {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        set: PathBuf,
        #[arg(long, default_value = "set")]
        split: String,
        #[command(flatten)]
        portfolio: PortfolioArgs,
        #[arg(long, default_value_t = 1000.0)]
        exposure_mean: f64,
        #[arg(long, default_value_t = 100.0)]
        exposure_std: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Approval curve over a p_min grid, optionally solving for a loss budget.
    Threshold {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        set: PathBuf,
        #[command(flatten)]
        portfolio: PortfolioArgs,
        #[arg(long, default_value_t = 0.01)]
        grid_step: f64,
        #[arg(long, default_value_t = 1.0)]
        grid_max: f64,
        /// Print the smallest p_min whose loss bound fits this budget.
        #[arg(long)]
        budget: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run every stage and write all reports plus a manifest.
    Pipeline {
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Args)]
struct FitArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 500)]
    max_iter: usize,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long, default_value_t = 1e-6)]
    reg_covar: f64,
}

impl FitArgs {
    fn config(&self) -> gmm_credit::gmm::FitConfig {
        gmm_credit::gmm::FitConfig {
            max_iter: self.max_iter,
            tol: self.tol,
            reg_covar: self.reg_covar,
            seed: self.seed,
        }
    }
}

#[derive(Args)]
struct PortfolioArgs {
    #[arg(long, default_value_t = 1000.0)]
    exposure: f64,
    #[arg(long, default_value_t = 0.5)]
    recovery: f64,
    #[arg(long, default_value_t = 1000.0)]
    original_capital: f64,
}

impl PortfolioArgs {
    fn fixed(&self) -> gmm_credit::Result<PortfolioSpec> {
        PortfolioSpec::new(Exposure::Fixed(self.exposure), self.recovery, self.original_capital)
    }
}

/// A config file plus flag overrides; flags win.
#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    schema: Option<PathBuf>,
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Keep a seeded random subset of N raw rows.
    #[arg(long, value_name = "N")]
    subsample: Option<usize>,
    #[arg(long)]
    train_fraction: Option<f64>,
    #[arg(long, overrides_with = "no_smote")]
    smote: bool,
    #[arg(long)]
    no_smote: bool,
    #[arg(long)]
    k_min: Option<usize>,
    #[arg(long)]
    k_max: Option<usize>,
    /// Fit exactly this many components instead of selecting.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    criterion: Option<Criterion>,
    #[arg(long)]
    threshold: Option<f64>,
    #[arg(long)]
    exposure: Option<f64>,
    #[arg(long)]
    recovery: Option<f64>,
    #[arg(long)]
    grid_step: Option<f64>,
    #[arg(long)]
    grid_max: Option<f64>,
    #[arg(long)]
    loss_budget: Option<f64>,
}

impl RunArgs {
    fn config(&self) -> gmm_credit::Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::from_path(path)?,
            None => RunConfig::default(),
        };
        macro_rules! set {
            ($($field:ident),*) => {$(
                if let Some(v) = &self.$field {
                    cfg.$field = v.clone();
                }
            )*};
        }
        set!(
            schema, data, seed, train_fraction, k_min, k_max, criterion, threshold, exposure, recovery,
            grid_step, grid_max
        );
        if self.output.is_some() {
            cfg.output_dir = self.output.clone();
        }
        if self.subsample.is_some() {
            cfg.subsample = self.subsample;
        }
        if self.k.is_some() {
            cfg.k = self.k;
        }
        if self.loss_budget.is_some() {
            cfg.loss_budget = self.loss_budget;
        }
        if self.smote {
            cfg.smote = true;
        }
        if self.no_smote {
            cfg.smote = false;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn create(path: &Path) -> gmm_credit::Result<std::io::BufWriter<std::fs::File>> {
    std::fs::File::create(path)
        .map(std::io::BufWriter::new)
        .map_err(|e| io_error(path, e))
}

fn io_error(path: &Path, e: std::io::Error) -> Error {
    if e.kind() == std::io::ErrorKind::NotFound {
        Error::FileNotFound(path.to_path_buf())
    } else {
        Error::Io {
            path: path.to_path_buf(),
            source: e,
        }
    }
}

fn write_file(path: &Path, f: impl FnOnce(&mut dyn Write) -> std::io::Result<()>) -> gmm_credit::Result<()> {
    let mut w = create(path)?;
    f(&mut w).and_then(|_| w.flush()).map_err(|e| io_error(path, e))
}

fn paybacks(model: &ScoringModel, set: &LabeledSet) -> gmm_credit::Result<Vec<f64>> {
    Ok(model.score_matrix(&set.x)?.iter().map(|s| s.payback).collect())
}

fn fail(stage: &'static str) -> impl Fn(Error) -> (String, i32) {
    move |e| (format!("{stage} failed: {e}"), e.exit_code())
}

fn run(cli: Cli) -> Result<(), (String, i32)> {
    match cli.command {
        Command::Preprocess { run } => {
            let cfg = run.config().map_err(fail("config"))?;
            let dir = cfg.output_dir.clone().ok_or(("preprocess needs --output".to_string(), 1))?;
            let (train, test, balance, n, _) = prepare(&cfg).map_err(|e| (e.to_string(), e.exit_code()))?;
            std::fs::create_dir_all(&dir).map_err(|e| io_error(&dir, e)).map_err(fail("preprocess"))?;
            write_set_file(dir.join("train.csv"), &train).map_err(fail("preprocess"))?;
            write_set_file(dir.join("test.csv"), &test).map_err(fail("preprocess"))?;
            println!("{n} rows: {} train, {} test", train.len(), test.len());
            if let Some(b) = balance {
                println!("{b}");
            }
        }
        Command::SelectK {
            train,
            k_min,
            k_max,
            criterion,
            fit,
            out,
        } => {
            let set = read_set_file(&train).map_err(fail("select-k"))?;
            let ks: Vec<usize> = (k_min..=k_max).collect();
            let curve = select_k(&set.x, &ks, &fit.config(), criterion).map_err(fail("select-k"))?;
            curve.write_csv_file(&out).map_err(fail("select-k"))?;
            println!(
                "aic: {}  bic: {}",
                curve.chosen_aic.map_or("none".into(), |k| k.to_string()),
                curve.chosen_bic.map_or("none".into(), |k| k.to_string())
            );
        }
        Command::Fit {
            train,
            k,
            threshold,
            fit,
            out,
        } => {
            let set = read_set_file(&train).map_err(fail("fit"))?;
            let (gmm, _) = fit_best(&set.x, k, &fit.config(), N_RESTARTS).map_err(fail("fit"))?;
            let model = ScoringModel::train(gmm, &set.x, &set.y, threshold).map_err(fail("fit"))?;
            model.save(&out).map_err(fail("fit"))?;
            println!(
                "k={k} loglik={} iterations={}",
                model.gmm.log_likelihood, model.gmm.iterations
            );
        }
        Command::Score {
            model,
            set,
            threshold,
            out,
        } => {
            let model = ScoringModel::load(&model).map_err(fail("score"))?;
            let set = read_set_file(&set).map_err(fail("score"))?;
            let scores = model.score_matrix(&set.x).map_err(fail("score"))?;
            let t = threshold.unwrap_or(model.threshold);
            write_scores_file(&out, &set.orig_index, &scores, t).map_err(fail("score"))?;
        }
        Command::Evaluate {
            model,
            train,
            test,
            out,
        } => {
            let model = ScoringModel::load(&model).map_err(fail("evaluate"))?;
            let train = read_set_file(&train).map_err(fail("evaluate"))?;
            let test = read_set_file(&test).map_err(fail("evaluate"))?;
            let lr = logistic_fit(&train.x, &train.y, &LogisticConfig::default()).map_err(fail("evaluate"))?;
            let t = model.threshold;
            let mut rows = Vec::new();
            for (name, set) in [("train", &train), ("test", &test)] {
                let gmm_p = paybacks(&model, set).map_err(fail("evaluate"))?;
                let lr_p: Vec<f64> = set
                    .x
                    .rows()
                    .map(|r| logistic_predict_proba(&lr, r))
                    .collect::<gmm_credit::Result<_>>()
                    .map_err(fail("evaluate"))?;
                rows.push(metrics_row(name, "gmm", &gmm_p, &set.y, t).map_err(fail("evaluate"))?);
                rows.push(metrics_row(name, "lr", &lr_p, &set.y, t).map_err(fail("evaluate"))?);
            }
            write_file(&out, |w| write_metrics(w, &rows)).map_err(fail("evaluate"))?;
        }
        Command::ElReport {
            model,
            set,
            split,
            portfolio,
            exposure_mean,
            exposure_std,
            seed: root,
            out,
        } => {
            let model = ScoringModel::load(&model).map_err(fail("el-report"))?;
            let set = read_set_file(&set).map_err(fail("el-report"))?;
            let pd: Vec<f64> = model
                .score_matrix(&set.x)
                .map_err(fail("el-report"))?
                .iter()
                .map(|s| s.default)
                .collect();
            let fixed = portfolio.fixed().map_err(fail("el-report"))?;
            let draws = sample_exposures(set.len(), exposure_mean, exposure_std, seed::derive(root, "exposures"))
                .map_err(fail("el-report"))?;
            let sampled = PortfolioSpec::new(Exposure::PerLoan(draws), portfolio.recovery, portfolio.original_capital)
                .map_err(fail("el-report"))?;
            let mut rows = Vec::new();
            for (exposure, spec) in [("fixed", &fixed), ("normal", &sampled)] {
                rows.push(ElRow {
                    split: split.clone(),
                    exposure: exposure.into(),
                    model: "gmm".into(),
                    report: el_report(&pd, &set.y, spec).map_err(fail("el-report"))?,
                });
            }
            write_file(&out, |w| write_el_rows(w, &rows)).map_err(fail("el-report"))?;
        }
        Command::Threshold {
            model,
            set,
            portfolio,
            grid_step,
            grid_max,
            budget,
            out,
        } => {
            let model = ScoringModel::load(&model).map_err(fail("threshold"))?;
            let set = read_set_file(&set).map_err(fail("threshold"))?;
            let p = paybacks(&model, &set).map_err(fail("threshold"))?;
            let grid = gmm_credit::pipeline::grid_from_step(grid_step, grid_max).map_err(fail("threshold"))?;
            let spec = portfolio.fixed().map_err(fail("threshold"))?;
            let curve = approval_curve(&p, &grid, &spec, Some(&set.y)).map_err(fail("threshold"))?;
            curve.write_csv_file(&out).map_err(fail("threshold"))?;
            if let Some(b) = budget {
                let choice = invert_loss_budget(&curve, b, portfolio.exposure, portfolio.recovery)
                    .map_err(fail("threshold"))?;
                println!("p_min={} m={} bound={}", choice.p_min, choice.m, choice.bound);
            }
        }
        Command::Pipeline { run } => {
            let cfg = run.config().map_err(fail("config"))?;
            let outcome = run_pipeline(&cfg).map_err(|e| (e.to_string(), e.exit_code()))?;
            println!("k = {}", outcome.model.gmm.params.n_components());
            for r in &outcome.metrics {
                println!(
                    "{:5} {:3} accuracy {}",
                    r.split,
                    r.model,
                    r.report.accuracy.map_or("undefined".into(), |a| format!("{a:.4}"))
                );
            }
            for r in &outcome.el {
                println!(
                    "{:5} {:6} {:3} EL error {}%",
                    r.split,
                    r.exposure,
                    r.model,
                    gmm_credit::risk::fmt_percent(r.report.relative_error)
                );
            }
            if let Some(b) = &outcome.budget {
                println!("budget {} -> p_min {}", b.budget, b.train.p_min);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err((msg, code)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code as u8)
        }
    }
}
