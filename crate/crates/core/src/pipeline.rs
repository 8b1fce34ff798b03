//! End-to-end run: load, encode, split, balance, select, fit, score,
//! evaluate, expected-loss and threshold reports.

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::balance::{balance_set, BalanceReport};
use crate::dataio::{
    encode_features, load_dataset, split, write_set_file, DatasetSchema, LabelVector, LabeledSet,
};
use crate::error::{Error, Result};
use crate::eval::{
    confusion, logistic_fit, logistic_predict_proba, metrics, write_metrics, LogisticConfig,
    LogisticModel, MetricsRow,
};
use crate::gmm::{FitConfig, FittedGmm};
use crate::risk::{
    approval_curve, el_report, fmt_money, fmt_percent, invert_loss_budget, sample_exposures,
    BudgetChoice, ElReport, PortfolioSpec, ThresholdCurve,
};
use crate::scoring::{classify, write_scores_file, Score, ScoringModel};
use crate::seed;
use crate::select::{fit_best, select_k, Criterion, SelectionCurve, N_RESTARTS};

pub const MANIFEST_FORMAT: &str = "gmm-credit/manifest";
pub const MANIFEST_VERSION: u32 = 1;

/// Everything needed to reproduce a run. Relative paths in a config file are
/// resolved against the file's directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub schema: PathBuf,
    pub data: PathBuf,
    /// No files are written when absent.
    pub output_dir: Option<PathBuf>,
    pub seed: u64,
    /// Keep a seeded random subset of this many raw rows.
    pub subsample: Option<usize>,
    pub train_fraction: f64,
    pub smote: bool,
    pub k_min: usize,
    pub k_max: usize,
    /// Skips selection and fits this many components.
    pub k: Option<usize>,
    pub criterion: Criterion,
    pub max_iter: usize,
    pub tol: f64,
    pub reg_covar: f64,
    pub threshold: f64,
    pub exposure: f64,
    pub recovery: f64,
    pub original_capital: f64,
    pub exposure_mean: f64,
    pub exposure_std: f64,
    pub grid_step: f64,
    /// Largest p_min on the grid.
    pub grid_max: f64,
    pub loss_budget: Option<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let fit = FitConfig::default();
        RunConfig {
            schema: PathBuf::new(),
            data: PathBuf::new(),
            output_dir: None,
            seed: 0,
            subsample: None,
            train_fraction: 2.0 / 3.0,
            smote: false,
            k_min: 1,
            k_max: 15,
            k: None,
            criterion: Criterion::Bic,
            max_iter: fit.max_iter,
            tol: fit.tol,
            reg_covar: fit.reg_covar,
            threshold: 0.5,
            exposure: 1000.0,
            recovery: 0.5,
            original_capital: 1000.0,
            exposure_mean: 1000.0,
            exposure_std: 100.0,
            grid_step: 0.01,
            grid_max: 1.0,
            loss_budget: None,
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig =
            toml::from_str(text).map_err(|e| Error::InvalidArgument(format!("run config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_toml(&text)?;
        let base = path.parent().unwrap_or(Path::new(""));
        let resolve = |p: &Path| if p.is_relative() { base.join(p) } else { p.to_path_buf() };
        cfg.schema = resolve(&cfg.schema);
        cfg.data = resolve(&cfg.data);
        cfg.output_dir = cfg.output_dir.as_deref().map(resolve);
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::InvalidArgument(format!("run config: {e}")))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if self.schema.as_os_str().is_empty() || self.data.as_os_str().is_empty() {
            return bad("config needs both `schema` and `data`".into());
        }
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return bad(format!("train_fraction {} outside (0, 1)", self.train_fraction));
        }
        match self.k {
            Some(0) => return bad("k must be at least 1".into()),
            None if self.k_min == 0 || self.k_min > self.k_max => {
                return bad(format!("invalid k range {}..={}", self.k_min, self.k_max))
            }
            _ => {}
        }
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return bad(format!("threshold {} outside (0, 1)", self.threshold));
        }
        if self.subsample == Some(0) {
            return bad("subsample must be positive".into());
        }
        if let Some(b) = self.loss_budget {
            if !(b >= 0.0) {
                return bad(format!("loss budget {b} must be non-negative"));
            }
        }
        if !(self.exposure_std >= 0.0 && self.exposure_mean > 0.0) {
            return bad("exposure distribution needs mean > 0 and std >= 0".into());
        }
        self.fit_config(0).validate()?;
        PortfolioSpec::new(
            crate::risk::Exposure::Fixed(self.exposure),
            self.recovery,
            self.original_capital,
        )?;
        self.grid()?;
        Ok(())
    }

    pub fn fit_config(&self, seed: u64) -> FitConfig {
        FitConfig {
            max_iter: self.max_iter,
            tol: self.tol,
            reg_covar: self.reg_covar,
            seed,
        }
    }

    /// `0, step, 2·step, …, 1`; the step must divide 1.
    pub fn grid(&self) -> Result<Vec<f64>> {
        grid_from_step(self.grid_step, self.grid_max)
    }

    pub fn seeds(&self) -> StageSeeds {
        StageSeeds::new(self.seed)
    }

    pub fn fixed_portfolio(&self) -> Result<PortfolioSpec> {
        PortfolioSpec::new(
            crate::risk::Exposure::Fixed(self.exposure),
            self.recovery,
            self.original_capital,
        )
    }

    /// The settings that determine results; the output location is dropped.
    pub fn canonical(&self) -> RunConfig {
        RunConfig {
            output_dir: None,
            ..self.clone()
        }
    }

    /// SHA-256 of the canonical TOML form.
    pub fn hash(&self) -> Result<String> {
        Ok(hex::encode(Sha256::digest(self.canonical().to_toml()?.as_bytes())))
    }
}

/// `0, step, 2·step, …` up to `max`, each point built as `i / steps`.
pub fn grid_from_step(step: f64, max: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step <= 1.0) {
        return Err(Error::InvalidArgument(format!("grid step {step} outside (0, 1]")));
    }
    let steps = (1.0 / step).round();
    if (steps * step - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!("grid step {step} does not divide 1")));
    }
    if !(0.0..=1.0).contains(&max) {
        return Err(Error::InvalidArgument(format!("grid maximum {max} outside [0, 1]")));
    }
    let steps = steps as usize;
    Ok((0..=steps)
        .map(|i| i as f64 / steps as f64)
        .filter(|&p| p <= max + 1e-12)
        .collect())
}

/// Named sub-seeds of the root seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageSeeds {
    pub root: u64,
    pub subsample: u64,
    pub split: u64,
    pub smote: u64,
    /// Root of the per-restart k-means seeds.
    pub kmeans: u64,
    pub exposures_train: u64,
    pub exposures_test: u64,
}

impl StageSeeds {
    pub fn new(root: u64) -> Self {
        StageSeeds {
            root,
            subsample: seed::derive(root, "subsample"),
            split: seed::derive(root, "split"),
            smote: seed::derive(root, "smote"),
            kmeans: seed::derive(root, "kmeans"),
            exposures_train: seed::derive(root, "exposures/train"),
            exposures_test: seed::derive(root, "exposures/test"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Config,
    Load,
    Encode,
    Split,
    Balance,
    Select,
    Fit,
    Score,
    Evaluate,
    ElReport,
    Threshold,
    Write,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Stage::Config => "config",
            Stage::Load => "load",
            Stage::Encode => "encode",
            Stage::Split => "split",
            Stage::Balance => "balance",
            Stage::Select => "select-k",
            Stage::Fit => "fit",
            Stage::Score => "score",
            Stage::Evaluate => "evaluate",
            Stage::ElReport => "el-report",
            Stage::Threshold => "threshold",
            Stage::Write => "write",
        };
        f.write_str(name)
    }
}

#[derive(Debug, thiserror::Error)]
#[error("{stage} stage failed: {source}")]
pub struct StageError {
    pub stage: Stage,
    #[source]
    pub source: Error,
}

impl StageError {
    pub fn exit_code(&self) -> i32 {
        self.source.exit_code()
    }
}

trait AtStage<T> {
    fn at(self, stage: Stage) -> std::result::Result<T, StageError>;
}

impl<T> AtStage<T> for Result<T> {
    fn at(self, stage: Stage) -> std::result::Result<T, StageError> {
        self.map_err(|source| StageError { stage, source })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ElRow {
    pub split: String,
    pub exposure: String,
    pub model: String,
    pub report: ElReport,
}

/// EL rows as `split,exposure,model,total_capital,actual_loss,predicted_loss,relative_error_pct`.
pub fn write_el_rows<W: Write>(mut w: W, rows: &[ElRow]) -> std::io::Result<()> {
    writeln!(w, "split,exposure,model,total_capital,actual_loss,predicted_loss,relative_error_pct")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            r.split,
            r.exposure,
            r.model,
            fmt_money(r.report.total_capital),
            fmt_money(r.report.el_actual),
            fmt_money(r.report.el_model),
            fmt_percent(r.report.relative_error)
        )?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BudgetOutcome {
    pub budget: f64,
    pub train: BudgetChoice,
    /// Applicants approved at the chosen `p_min` on the test set.
    pub test_m: usize,
    pub test_bound: f64,
    pub test_realized_loss: f64,
}

/// In-memory results of a run.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub config: RunConfig,
    pub seeds: StageSeeds,
    pub n_rows: usize,
    pub dropped_missing: usize,
    pub train: LabeledSet,
    pub test: LabeledSet,
    pub balance: Option<BalanceReport>,
    pub selection: Option<SelectionCurve>,
    pub model: ScoringModel,
    pub logistic: LogisticModel,
    pub train_scores: Vec<Score>,
    pub test_scores: Vec<Score>,
    pub logistic_train: Vec<f64>,
    pub logistic_test: Vec<f64>,
    pub metrics: Vec<MetricsRow>,
    pub el: Vec<ElRow>,
    pub train_curve: ThresholdCurve,
    pub test_curve: ThresholdCurve,
    pub budget: Option<BudgetOutcome>,
}

impl RunOutcome {
    pub fn el_row(&self, split: &str, exposure: &str, model: &str) -> Option<&ElReport> {
        self.el
            .iter()
            .find(|r| r.split == split && r.exposure == exposure && r.model == model)
            .map(|r| &r.report)
    }

    pub fn metrics_row(&self, split: &str, model: &str) -> Option<&MetricsRow> {
        self.metrics.iter().find(|r| r.split == split && r.model == model)
    }
}

/// Loads, encodes, splits and (optionally) balances the data.
pub fn prepare(
    config: &RunConfig,
) -> std::result::Result<(LabeledSet, LabeledSet, Option<BalanceReport>, usize, usize), StageError> {
    let seeds = config.seeds();
    let schema = DatasetSchema::from_path(&config.schema).at(Stage::Load)?;
    let mut table = load_dataset(&config.data, &schema).at(Stage::Load)?;
    if let Some(n) = config.subsample {
        if n < table.n_rows() {
            table = table.subsample(n, seeds.subsample);
        }
    }
    let dropped = table.dropped_missing;
    let (x, y) = encode_features(&table, &schema).at(Stage::Encode)?;
    let n_rows = x.n_rows();
    log::info!("{}: {} rows, {} features", schema.name, n_rows, x.n_cols());
    let (train, test) = split(&x, &y, config.train_fraction, seeds.split).at(Stage::Split)?;
    let (train, balance) = if config.smote {
        let (set, report) = balance_set(&train, n_rows, seeds.smote).at(Stage::Balance)?;
        log::info!("{report}");
        (set, Some(report))
    } else {
        (train, None)
    };
    Ok((train, test, balance, n_rows, dropped))
}

/// Picks k (or uses the fixed one) and returns the best fit.
pub fn fit_model(
    config: &RunConfig,
    train: &LabeledSet,
) -> std::result::Result<(FittedGmm, Option<SelectionCurve>), StageError> {
    let fit_cfg = config.fit_config(config.seeds().kmeans);
    match config.k {
        Some(k) => {
            let (model, _) = fit_best(&train.x, k, &fit_cfg, N_RESTARTS).at(Stage::Fit)?;
            Ok((model, None))
        }
        None => {
            let ks: Vec<usize> = (config.k_min..=config.k_max.min(train.len())).collect();
            let curve = select_k(&train.x, &ks, &fit_cfg, config.criterion).at(Stage::Select)?;
            let model = curve.chosen_model().cloned().ok_or(StageError {
                stage: Stage::Select,
                source: Error::InvalidArgument("every candidate k failed to fit".into()),
            })?;
            log::info!("chose k = {}", model.params.n_components());
            Ok((model, Some(curve)))
        }
    }
}

fn logistic_scores(model: &LogisticModel, set: &LabeledSet) -> Result<Vec<f64>> {
    set.x.rows().map(|r| logistic_predict_proba(model, r)).collect()
}

/// Metrics of `scores` thresholded at `threshold`.
pub fn metrics_row(split: &str, model: &str, scores: &[f64], y: &LabelVector, threshold: f64) -> Result<MetricsRow> {
    let pred = LabelVector::new(scores.iter().map(|&p| classify(p, threshold)).collect())?;
    let cm = confusion(y, &pred)?;
    Ok(MetricsRow {
        split: split.into(),
        model: model.into(),
        report: metrics(&cm, scores, y)?,
    })
}

pub fn run_pipeline(config: &RunConfig) -> std::result::Result<RunOutcome, StageError> {
    config.validate().at(Stage::Config)?;
    let seeds = config.seeds();
    let (train, test, balance, n_rows, dropped_missing) = prepare(config)?;
    let (gmm, selection) = fit_model(config, &train)?;
    let model = ScoringModel::train(gmm, &train.x, &train.y, config.threshold).at(Stage::Fit)?;

    let train_scores = model.score_matrix(&train.x).at(Stage::Score)?;
    let test_scores = model.score_matrix(&test.x).at(Stage::Score)?;
    let logistic = logistic_fit(&train.x, &train.y, &LogisticConfig::default()).at(Stage::Evaluate)?;
    let logistic_train = logistic_scores(&logistic, &train).at(Stage::Evaluate)?;
    let logistic_test = logistic_scores(&logistic, &test).at(Stage::Evaluate)?;

    let payback = |s: &[Score]| s.iter().map(|s| s.payback).collect::<Vec<_>>();
    let default = |s: &[Score]| s.iter().map(|s| s.default).collect::<Vec<_>>();
    let (gmm_train, gmm_test) = (payback(&train_scores), payback(&test_scores));

    let mut metric_rows = Vec::new();
    for (split, set, gmm_p, lr_p) in [
        ("train", &train, &gmm_train, &logistic_train),
        ("test", &test, &gmm_test, &logistic_test),
    ] {
        metric_rows.push(metrics_row(split, "gmm", gmm_p, &set.y, config.threshold).at(Stage::Evaluate)?);
        metric_rows.push(metrics_row(split, "lr", lr_p, &set.y, config.threshold).at(Stage::Evaluate)?);
    }

    let fixed = config.fixed_portfolio().at(Stage::ElReport)?;
    let mut el = Vec::new();
    for (split, set, scores, lr_p, exp_seed) in [
        ("train", &train, &train_scores, &logistic_train, seeds.exposures_train),
        ("test", &test, &test_scores, &logistic_test, seeds.exposures_test),
    ] {
        let draws = sample_exposures(set.len(), config.exposure_mean, config.exposure_std, exp_seed)
            .at(Stage::ElReport)?;
        let sampled = PortfolioSpec::new(
            crate::risk::Exposure::PerLoan(draws),
            config.recovery,
            config.original_capital,
        )
        .at(Stage::ElReport)?;
        let gmm_pd = default(scores);
        let lr_pd: Vec<f64> = lr_p.iter().map(|p| 1.0 - p).collect();
        for (exposure, spec) in [("fixed", &fixed), ("normal", &sampled)] {
            for (name, pd) in [("gmm", &gmm_pd), ("lr", &lr_pd)] {
                el.push(ElRow {
                    split: split.into(),
                    exposure: exposure.into(),
                    model: name.into(),
                    report: el_report(pd, &set.y, spec).at(Stage::ElReport)?,
                });
            }
        }
    }

    let grid = config.grid().at(Stage::Threshold)?;
    let train_curve = approval_curve(&gmm_train, &grid, &fixed, Some(&train.y)).at(Stage::Threshold)?;
    let test_curve = approval_curve(&gmm_test, &grid, &fixed, Some(&test.y)).at(Stage::Threshold)?;

    let mut outcome = RunOutcome {
        config: config.clone(),
        seeds,
        n_rows,
        dropped_missing,
        train,
        test,
        balance,
        selection,
        model,
        logistic,
        train_scores,
        test_scores,
        logistic_train,
        logistic_test,
        metrics: metric_rows,
        el,
        train_curve,
        test_curve,
        budget: None,
    };

    // Artifacts are written before the budget check so an infeasible budget
    // still leaves the reports behind.
    let budget = config.loss_budget.map(|b| {
        invert_loss_budget(&outcome.train_curve, b, config.exposure, config.recovery).map(|choice| {
            let point = outcome
                .test_curve
                .points
                .iter()
                .find(|p| p.p_min == choice.p_min)
                .expect("train and test curves share a grid");
            BudgetOutcome {
                budget: b,
                train: choice,
                test_m: point.m,
                test_bound: point.loss_bound,
                test_realized_loss: point.realized_loss.unwrap_or(0.0),
            }
        })
    });
    outcome.budget = match &budget {
        Some(Ok(b)) => Some(b.clone()),
        _ => None,
    };
    if let Some(dir) = &config.output_dir {
        write_outputs(&outcome, dir).at(Stage::Write)?;
    }
    if let Some(Err(e)) = budget {
        return Err(StageError {
            stage: Stage::Threshold,
            source: e,
        });
    }
    Ok(outcome)
}

fn create(path: &Path) -> Result<std::io::BufWriter<std::fs::File>> {
    let f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(std::io::BufWriter::new(f))
}

fn write_with(path: &Path, f: impl FnOnce(&mut dyn Write) -> std::io::Result<()>) -> Result<()> {
    let mut w = create(path)?;
    f(&mut w).and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
}

#[derive(Serialize)]
struct Manifest<'a> {
    format: &'a str,
    version: u32,
    package_version: &'a str,
    config_sha256: String,
    config: RunConfig,
    seeds: StageSeeds,
    n_rows: usize,
    dropped_missing: usize,
    n_train: usize,
    n_test: usize,
    smote_generated: Option<usize>,
    chosen_k: usize,
    criterion: Option<Criterion>,
    gmm_iterations: usize,
    gmm_log_likelihood: f64,
    gmm_termination: crate::gmm::Termination,
    logistic_iterations: usize,
    logistic_converged: bool,
    budget: Option<&'a BudgetOutcome>,
    artifacts: Vec<&'a str>,
}

/// Writes every report of `outcome` into `dir`.
pub fn write_outputs(outcome: &RunOutcome, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut artifacts = Vec::new();
    let mut record = |name: &'static str| {
        artifacts.push(name);
        dir.join(name)
    };

    write_set_file(record("train.csv"), &outcome.train)?;
    write_set_file(record("test.csv"), &outcome.test)?;
    if let Some(curve) = &outcome.selection {
        curve.write_csv_file(record("selection.csv"))?;
    }
    outcome.model.save(record("model.json"))?;
    write_with(&record("cluster_table.csv"), |w| outcome.model.table.write_csv(w))?;
    let t = outcome.model.threshold;
    write_scores_file(record("scores_train.csv"), &outcome.train.orig_index, &outcome.train_scores, t)?;
    write_scores_file(record("scores_test.csv"), &outcome.test.orig_index, &outcome.test_scores, t)?;
    write_with(&record("metrics.csv"), |w| write_metrics(w, &outcome.metrics))?;
    write_with(&record("el_report.csv"), |w| write_el_rows(w, &outcome.el))?;
    outcome.train_curve.write_csv_file(record("threshold_train.csv"))?;
    outcome.test_curve.write_csv_file(record("threshold_test.csv"))?;

    let gmm = &outcome.model.gmm;
    let manifest = Manifest {
        format: MANIFEST_FORMAT,
        version: MANIFEST_VERSION,
        package_version: env!("CARGO_PKG_VERSION"),
        config_sha256: outcome.config.hash()?,
        config: outcome.config.canonical(),
        seeds: outcome.seeds,
        n_rows: outcome.n_rows,
        dropped_missing: outcome.dropped_missing,
        n_train: outcome.train.len(),
        n_test: outcome.test.len(),
        smote_generated: outcome.balance.as_ref().map(|b| b.generated),
        chosen_k: gmm.params.n_components(),
        criterion: outcome.selection.as_ref().map(|s| s.criterion),
        gmm_iterations: gmm.iterations,
        gmm_log_likelihood: gmm.log_likelihood,
        gmm_termination: gmm.termination,
        logistic_iterations: outcome.logistic.iterations,
        logistic_converged: outcome.logistic.converged,
        budget: outcome.budget.as_ref(),
        artifacts,
    };
    let text = serde_json::to_string_pretty(&manifest).map_err(|e| Error::ModelFile(e.to_string()))?;
    let path = dir.join("manifest.json");
    std::fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_matches_step() {
        let g = grid_from_step(0.01, 1.0).unwrap();
        assert_eq!(g.len(), 101);
        assert_eq!(g[57], 0.57);
        assert_eq!(*g.last().unwrap(), 1.0);
        assert!(grid_from_step(0.3, 1.0).is_err());
        let short = grid_from_step(0.25, 0.6).unwrap();
        assert_eq!(short, vec![0.0, 0.25, 0.5]);
    }

    #[test]
    fn config_round_trips_through_toml() {
        let cfg = RunConfig {
            schema: "s.toml".into(),
            data: "d.csv".into(),
            k: Some(4),
            loss_budget: Some(1e4),
            ..RunConfig::default()
        };
        let back = RunConfig::from_toml(&cfg.to_toml().unwrap()).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(back.hash().unwrap(), cfg.hash().unwrap());
    }

    #[test]
    fn config_rejects_unknown_keys_and_bad_values() {
        assert!(RunConfig::from_toml("schema = 's'\ndata = 'd'\nbogus = 1\n").is_err());
        assert!(RunConfig::from_toml("schema = 's'\ndata = 'd'\nthreshold = 1.0\n").is_err());
        assert!(RunConfig::from_toml("data = 'd'\n").is_err());
    }

    #[test]
    fn stage_seeds_are_distinct() {
        let s = StageSeeds::new(42);
        let all = [s.subsample, s.split, s.smote, s.kmeans, s.exposures_train, s.exposures_test];
        for i in 0..all.len() {
            for j in i + 1..all.len() {
                assert_ne!(all[i], all[j]);
            }
        }
    }
}
