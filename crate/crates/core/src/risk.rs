//! Expected loss, income and loss bounds, and approval-threshold curves.

use std::io::Write;
use std::path::Path;

use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::dataio::LabelVector;
use crate::error::{Error, Result};
use crate::seed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Exposure {
    Fixed(f64),
    PerLoan(Vec<f64>),
}

/// Loan amounts, recovery rate and capital lent per applicant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PortfolioSpec {
    pub exposure: Exposure,
    pub recovery: f64,
    /// Capital lent per approved applicant, used only for net profit.
    pub original_capital: f64,
}

impl PortfolioSpec {
    pub fn fixed(amount: f64, recovery: f64) -> Result<Self> {
        Self::new(Exposure::Fixed(amount), recovery, amount)
    }

    pub fn per_loan(amounts: Vec<f64>, recovery: f64) -> Result<Self> {
        let mean = amounts.iter().sum::<f64>() / amounts.len().max(1) as f64;
        Self::new(Exposure::PerLoan(amounts), recovery, mean)
    }

    pub fn new(exposure: Exposure, recovery: f64, original_capital: f64) -> Result<Self> {
        let spec = PortfolioSpec {
            exposure,
            recovery,
            original_capital,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.recovery) {
            return Err(Error::InvalidArgument(format!("recovery rate {} outside [0, 1]", self.recovery)));
        }
        if !(self.original_capital >= 0.0 && self.original_capital.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "original capital {} must be finite and non-negative",
                self.original_capital
            )));
        }
        let ok = match &self.exposure {
            Exposure::Fixed(m) => *m > 0.0 && m.is_finite(),
            Exposure::PerLoan(v) => !v.is_empty() && v.iter().all(|m| *m > 0.0 && m.is_finite()),
        };
        if !ok {
            return Err(Error::InvalidArgument("exposures must be finite and positive".into()));
        }
        Ok(())
    }

    fn check_len(&self, n: usize) -> Result<()> {
        match &self.exposure {
            Exposure::PerLoan(v) if v.len() != n => Err(Error::Dimension(format!(
                "{} exposures for {n} loans",
                v.len()
            ))),
            _ => Ok(()),
        }
    }

    pub fn exposure_of(&self, i: usize) -> f64 {
        match &self.exposure {
            Exposure::Fixed(m) => *m,
            Exposure::PerLoan(v) => v[i],
        }
    }

    /// The single loan amount `M` used by the bound formulas; the mean for
    /// per-loan exposures.
    pub fn nominal_exposure(&self) -> f64 {
        match &self.exposure {
            Exposure::Fixed(m) => *m,
            Exposure::PerLoan(v) => v.iter().sum::<f64>() / v.len() as f64,
        }
    }

    pub fn total_capital(&self, n: usize) -> f64 {
        match &self.exposure {
            Exposure::Fixed(m) => n as f64 * m,
            Exposure::PerLoan(v) => v.iter().sum(),
        }
    }
}

/// `Σ PD_i (1 − R) EAD_i`.
pub fn expected_loss_model(pds: &[f64], spec: &PortfolioSpec) -> Result<f64> {
    spec.check_len(pds.len())?;
    if let Some(p) = pds.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::InvalidArgument(format!("default probability {p} outside [0, 1]")));
    }
    let lgd = 1.0 - spec.recovery;
    Ok(pds
        .iter()
        .enumerate()
        .map(|(i, pd)| pd * lgd * spec.exposure_of(i))
        .sum())
}

/// Realised loss on the defaulters: `Σ (1 − y_i)(1 − R) EAD_i`.
pub fn expected_loss_actual(y: &LabelVector, spec: &PortfolioSpec) -> Result<f64> {
    spec.check_len(y.len())?;
    let lgd = 1.0 - spec.recovery;
    Ok(y.iter()
        .enumerate()
        .filter(|&(_, label)| label == 0)
        .map(|(i, _)| lgd * spec.exposure_of(i))
        .sum())
}

pub fn relative_el_error(el_model: f64, el_actual: f64) -> Result<f64> {
    if el_actual == 0.0 {
        return Err(Error::ZeroActualLoss);
    }
    Ok((el_model - el_actual) / el_actual)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElReport {
    pub total_capital: f64,
    pub el_model: f64,
    pub el_actual: f64,
    /// `None` when there is no actual loss to compare against.
    pub relative_error: Option<f64>,
}

pub fn el_report(pds: &[f64], y: &LabelVector, spec: &PortfolioSpec) -> Result<ElReport> {
    if pds.len() != y.len() {
        return Err(Error::Dimension(format!("{} probabilities for {} labels", pds.len(), y.len())));
    }
    let el_model = expected_loss_model(pds, spec)?;
    let el_actual = expected_loss_actual(y, spec)?;
    Ok(ElReport {
        total_capital: spec.total_capital(y.len()),
        el_model,
        el_actual,
        relative_error: relative_el_error(el_model, el_actual).ok(),
    })
}

/// `mM(R + p_min(1 − R))`.
pub fn income_lower_bound(m: usize, amount: f64, recovery: f64, p_min: f64) -> f64 {
    m as f64 * amount * (recovery + p_min * (1.0 - recovery))
}

/// `nM(1 − R) − M(1 − R) Σ p_i` for pay-back probabilities `p_i`.
pub fn total_expected_loss(paybacks: &[f64], amount: f64, recovery: f64) -> f64 {
    let lgd = amount * (1.0 - recovery);
    paybacks.len() as f64 * lgd - lgd * paybacks.iter().sum::<f64>()
}

/// `mM(1 − R)(1 − p_min)`.
pub fn loss_upper_bound(m: usize, amount: f64, recovery: f64, p_min: f64) -> f64 {
    m as f64 * amount * (1.0 - recovery) * (1.0 - p_min)
}

/// Upper bound per applicant, `𝓛(n)* / n`.
pub fn average_loss_bound(m: usize, n: usize, amount: f64, recovery: f64, p_min: f64) -> f64 {
    loss_upper_bound(m, amount, recovery, p_min) / n as f64
}

/// `0.00, 0.01, …, 1.00`.
pub fn default_grid() -> Vec<f64> {
    (0..=100).map(|i| i as f64 / 100.0).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdPoint {
    pub p_min: f64,
    pub m: usize,
    pub m_over_n_times_1_minus_pmin: f64,
    pub loss_bound: f64,
    pub income_bound: f64,
    pub avg_loss_bound: f64,
    /// Model expected loss over the approved applicants.
    pub expected_loss: f64,
    /// Model expected income over the approved applicants.
    pub expected_income: f64,
    /// Expected income minus the capital lent to the approved applicants.
    pub net_profit: f64,
    pub realized_loss: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdCurve {
    pub n: usize,
    pub amount: f64,
    pub recovery: f64,
    pub points: Vec<ThresholdPoint>,
}

impl ThresholdCurve {
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(
            w,
            "p_min,m,m_over_n_times_1_minus_pmin,loss_bound,income_bound,realized_loss,\
             avg_loss_bound,expected_loss,expected_income,net_profit"
        )?;
        for p in &self.points {
            let realized = p.realized_loss.map(|v| v.to_string()).unwrap_or_default();
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{},{}",
                p.p_min,
                p.m,
                p.m_over_n_times_1_minus_pmin,
                p.loss_bound,
                p.income_bound,
                realized,
                p.avg_loss_bound,
                p.expected_loss,
                p.expected_income,
                p.net_profit
            )?;
        }
        Ok(())
    }

    pub fn write_csv_file(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(std::io::BufWriter::new(file)).map_err(|e| Error::io(path, e))
    }
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument("empty p_min grid".into()));
    }
    if grid.iter().any(|p| !(0.0..=1.0).contains(p)) || grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidArgument("p_min grid must be ascending within [0, 1]".into()));
    }
    Ok(())
}

/// Approval counts and bounds for every `p_min` on the grid. Applicant `i` is
/// approved when `paybacks[i] >= p_min`.
pub fn approval_curve(
    paybacks: &[f64],
    grid: &[f64],
    spec: &PortfolioSpec,
    y: Option<&LabelVector>,
) -> Result<ThresholdCurve> {
    check_grid(grid)?;
    spec.check_len(paybacks.len())?;
    if let Some(y) = y {
        if y.len() != paybacks.len() {
            return Err(Error::Dimension(format!(
                "{} labels for {} scores",
                y.len(),
                paybacks.len()
            )));
        }
    }
    let n = paybacks.len();
    let amount = spec.nominal_exposure();
    let r = spec.recovery;
    let points = grid
        .iter()
        .map(|&p_min| {
            let mut m = 0;
            let mut expected_loss = 0.0;
            let mut expected_income = 0.0;
            let mut realized = 0.0;
            for (i, &p) in paybacks.iter().enumerate() {
                if p < p_min {
                    continue;
                }
                m += 1;
                let e = spec.exposure_of(i);
                expected_loss += e * (1.0 - r) * (1.0 - p);
                expected_income += e * (p + r * (1.0 - p));
                if y.is_some_and(|y| y.as_slice()[i] == 0) {
                    realized += e * (1.0 - r);
                }
            }
            ThresholdPoint {
                p_min,
                m,
                m_over_n_times_1_minus_pmin: m as f64 / n as f64 * (1.0 - p_min),
                loss_bound: loss_upper_bound(m, amount, r, p_min),
                income_bound: income_lower_bound(m, amount, r, p_min),
                avg_loss_bound: average_loss_bound(m, n, amount, r, p_min),
                expected_loss,
                expected_income,
                net_profit: expected_income - m as f64 * spec.original_capital,
                realized_loss: y.map(|_| realized),
            }
        })
        .collect();
    Ok(ThresholdCurve {
        n,
        amount,
        recovery: r,
        points,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BudgetChoice {
    pub p_min: f64,
    pub m: usize,
    pub bound: f64,
}

/// Smallest grid `p_min` whose loss bound fits within `budget`.
pub fn invert_loss_budget(curve: &ThresholdCurve, budget: f64, amount: f64, recovery: f64) -> Result<BudgetChoice> {
    if curve.points.is_empty() {
        return Err(Error::InvalidArgument("empty threshold curve".into()));
    }
    if !(budget >= 0.0) {
        return Err(Error::InvalidArgument(format!("budget {budget} must be non-negative")));
    }
    let mut min_bound = f64::INFINITY;
    for p in &curve.points {
        let bound = loss_upper_bound(p.m, amount, recovery, p.p_min);
        if bound <= budget {
            return Ok(BudgetChoice {
                p_min: p.p_min,
                m: p.m,
                bound,
            });
        }
        min_bound = min_bound.min(bound);
    }
    Err(Error::InfeasibleBudget { budget, min_bound })
}

/// `n` draws from `N(mean, std²)`; negative draws are discarded and redrawn.
pub fn sample_exposures(n: usize, mean: f64, std: f64, seed: u64) -> Result<Vec<f64>> {
    if !(mean > 0.0 && mean.is_finite()) || !(std >= 0.0 && std.is_finite()) {
        return Err(Error::InvalidArgument(format!("invalid exposure distribution N({mean}, {std})")));
    }
    let normal = Normal::new(mean, std).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let mut rng = seed::rng(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let v = normal.sample(&mut rng);
        if v >= 0.0 {
            out.push(v);
        }
    }
    Ok(out)
}

/// Money with two decimals and a relative error as a percentage with two
/// decimals; negative zero is printed as zero.
pub fn fmt_money(v: f64) -> String {
    fix_negative_zero(format!("{v:.2}"))
}

pub fn fmt_percent(ratio: Option<f64>) -> String {
    match ratio {
        Some(r) => fix_negative_zero(format!("{:.2}", r * 100.0)),
        None => "undefined".into(),
    }
}

fn fix_negative_zero(s: String) -> String {
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}
