//! Cluster pay-back rates and per-applicant scores.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dataio::{FeatureMatrix, LabelVector};
use crate::error::{Error, Result};
use crate::gmm::{e_step, from_versioned_json, to_versioned_json, FittedGmm, Mixture};

/// Clusters with less total responsibility than this fall back to the
/// global training pay-back rate.
pub const EMPTY_CLUSTER_MASS: f64 = 1e-10;
pub const DEFAULT_THRESHOLD: f64 = 0.5;

pub const SCORING_FORMAT: &str = "gmm-credit/scoring-model";
pub const SCORING_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterPdTable {
    pub payback: Vec<f64>,
    pub default: Vec<f64>,
    /// Responsibility mass contributed by good and bad training rows.
    pub good_mass: Vec<f64>,
    pub bad_mass: Vec<f64>,
    /// Hard-assignment (argmax posterior) counts, kept as a diagnostic.
    pub crisp_good: Vec<usize>,
    pub crisp_bad: Vec<usize>,
    /// Clusters whose rate was replaced by the global rate.
    pub fallback: Vec<bool>,
}

impl ClusterPdTable {
    pub fn n_clusters(&self) -> usize {
        self.payback.len()
    }

    pub fn mass(&self, j: usize) -> f64 {
        self.good_mass[j] + self.bad_mass[j]
    }

    /// Crisp good share of cluster `j`, `None` when no row is assigned.
    pub fn crisp_payback(&self, j: usize) -> Option<f64> {
        let total = self.crisp_good[j] + self.crisp_bad[j];
        (total > 0).then(|| self.crisp_good[j] as f64 / total as f64)
    }

    fn validate(&self) -> Result<()> {
        let k = self.payback.len();
        let lens = [
            self.default.len(),
            self.good_mass.len(),
            self.bad_mass.len(),
            self.crisp_good.len(),
            self.crisp_bad.len(),
            self.fallback.len(),
        ];
        if k == 0 || lens.iter().any(|&l| l != k) {
            return Err(Error::ModelFile("cluster table columns differ in length".into()));
        }
        for (p, d) in self.payback.iter().zip(&self.default) {
            if !(0.0..=1.0).contains(p) || !(0.0..=1.0).contains(d) || (p + d - 1.0).abs() > 1e-12 {
                return Err(Error::ModelFile(format!("invalid cluster probabilities {p}, {d}")));
            }
        }
        Ok(())
    }

    /// CSV with one row per cluster.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "cluster,payback,default,good_mass,bad_mass,crisp_good,crisp_bad,crisp_payback,fallback")?;
        for j in 0..self.n_clusters() {
            let crisp = self.crisp_payback(j).map(|p| p.to_string()).unwrap_or_default();
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{}",
                j,
                self.payback[j],
                self.default[j],
                self.good_mass[j],
                self.bad_mass[j],
                self.crisp_good[j],
                self.crisp_bad[j],
                crisp,
                self.fallback[j]
            )?;
        }
        Ok(())
    }
}

/// Responsibility-weighted share of good labels in each cluster.
pub fn cluster_payback_probs(model: &FittedGmm, x: &FeatureMatrix, y: &LabelVector) -> Result<ClusterPdTable> {
    if x.n_rows() != y.len() {
        return Err(Error::Dimension(format!("{} rows but {} labels", x.n_rows(), y.len())));
    }
    let r = e_step(x, &model.params)?;
    let k = r.n_components();
    let mut good_mass = vec![0.0; k];
    let mut bad_mass = vec![0.0; k];
    let mut crisp_good = vec![0; k];
    let mut crisp_bad = vec![0; k];
    for (row, label) in r.rows().zip(y.iter()) {
        let (mass, crisp) = if label == 1 {
            (&mut good_mass, &mut crisp_good)
        } else {
            (&mut bad_mass, &mut crisp_bad)
        };
        for (m, w) in mass.iter_mut().zip(row) {
            *m += w;
        }
        let top = row
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1).then(b.0.cmp(&a.0)))
            .map(|(j, _)| j)
            .unwrap_or(0);
        crisp[top] += 1;
    }

    let (bad, good) = y.class_counts();
    let global = good as f64 / (good + bad) as f64;
    let mut payback = Vec::with_capacity(k);
    let mut fallback = Vec::with_capacity(k);
    for j in 0..k {
        let mass = good_mass[j] + bad_mass[j];
        if mass < EMPTY_CLUSTER_MASS {
            log::warn!("cluster {j} has responsibility mass {mass:e}; using global pay-back rate {global}");
            payback.push(global);
            fallback.push(true);
        } else {
            payback.push((good_mass[j] / mass).clamp(0.0, 1.0));
            fallback.push(false);
        }
    }
    let default = payback.iter().map(|p| 1.0 - p).collect();
    Ok(ClusterPdTable {
        payback,
        default,
        good_mass,
        bad_mass,
        crisp_good,
        crisp_bad,
        fallback,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Score {
    pub payback: f64,
    pub default: f64,
}

/// 1 (approve) iff `p_payback >= threshold`.
pub fn classify(p_payback: f64, threshold: f64) -> u8 {
    u8::from(p_payback >= threshold)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoringModel {
    pub gmm: FittedGmm,
    pub table: ClusterPdTable,
    pub threshold: f64,
}

impl ScoringModel {
    pub fn new(gmm: FittedGmm, table: ClusterPdTable, threshold: f64) -> Result<Self> {
        let model = ScoringModel { gmm, table, threshold };
        model.validate()?;
        Ok(model)
    }

    /// Fits the cluster table on training data.
    pub fn train(gmm: FittedGmm, x: &FeatureMatrix, y: &LabelVector, threshold: f64) -> Result<Self> {
        let table = cluster_payback_probs(&gmm, x, y)?;
        Self::new(gmm, table, threshold)
    }

    fn validate(&self) -> Result<()> {
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "threshold {} outside (0, 1)",
                self.threshold
            )));
        }
        self.gmm.params.validate()?;
        self.table.validate()?;
        if self.table.n_clusters() != self.gmm.params.n_components() {
            return Err(Error::Dimension(format!(
                "{} cluster rates for {} components",
                self.table.n_clusters(),
                self.gmm.params.n_components()
            )));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.gmm.params.dim
    }

    fn check_dim(&self, d: usize) -> Result<()> {
        if d != self.dim() {
            return Err(Error::Dimension(format!("input has {d} features, model expects {}", self.dim())));
        }
        Ok(())
    }

    fn combine(&self, posterior: &[f64]) -> Score {
        debug_assert!((posterior.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        let dot = |v: &[f64]| posterior.iter().zip(v).map(|(a, b)| a * b).sum::<f64>();
        Score {
            payback: dot(&self.table.payback),
            default: dot(&self.table.default),
        }
    }

    pub fn score(&self, x: &[f64]) -> Result<Score> {
        self.check_dim(x.len())?;
        let mix = Mixture::new(&self.gmm.params)?;
        let mut post = vec![0.0; mix.n_components()];
        let mut scratch = vec![0.0; mix.dim()];
        mix.posterior_row(x, &mut post, &mut scratch);
        Ok(self.combine(&post))
    }

    pub fn payback_probability(&self, x: &[f64]) -> Result<f64> {
        self.score(x).map(|s| s.payback)
    }

    pub fn default_probability(&self, x: &[f64]) -> Result<f64> {
        self.score(x).map(|s| s.default)
    }

    pub fn score_matrix(&self, x: &FeatureMatrix) -> Result<Vec<Score>> {
        self.check_dim(x.n_cols())?;
        let mix = Mixture::new(&self.gmm.params)?;
        let mut post = vec![0.0; mix.n_components()];
        let mut scratch = vec![0.0; mix.dim()];
        Ok(x.rows()
            .map(|row| {
                mix.posterior_row(row, &mut post, &mut scratch);
                self.combine(&post)
            })
            .collect())
    }

    pub fn to_json(&self) -> Result<String> {
        to_versioned_json(SCORING_FORMAT, SCORING_VERSION, self)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let model: ScoringModel = from_versioned_json(SCORING_FORMAT, SCORING_VERSION, text)?;
        model.validate()?;
        Ok(model)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

/// Writes `orig_index,p_payback,p_default,label_at_D` sorted by `orig_index`.
pub fn write_scores<W: Write>(
    mut w: W,
    orig_index: &[usize],
    scores: &[Score],
    threshold: f64,
) -> std::io::Result<()> {
    if orig_index.len() != scores.len() {
        return Err(std::io::Error::new(
            std::io::ErrorKind::InvalidInput,
            format!("{} indices for {} scores", orig_index.len(), scores.len()),
        ));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by_key(|&i| orig_index[i]);
    let mut body = String::from("orig_index,p_payback,p_default,label_at_D\n");
    for i in order {
        let s = scores[i];
        body.push_str(&format!(
            "{},{},{},{}\n",
            orig_index[i],
            s.payback,
            s.default,
            classify(s.payback, threshold)
        ));
    }
    w.write_all(body.as_bytes())
}

pub fn write_scores_file(path: impl AsRef<Path>, orig_index: &[usize], scores: &[Score], threshold: f64) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_scores(std::io::BufWriter::new(file), orig_index, scores, threshold).map_err(|e| Error::io(path, e))
}
