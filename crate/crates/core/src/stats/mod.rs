//! Self-contained statistics kernel.
//!
//! Chi-square, Mann-Whitney U, t-tests, one-way ANOVA, Pearson
//! correlation, and Shannon entropy, with effect sizes throughout. No
//! external statistics dependency: the special functions live in
//! [`special`] and are validated against a frozen high-precision probe
//! grid ([`probes`]). All tests are two-sided.
//!
//! P-values smaller than 1e-300 are additionally reported in log10 form
//! (`TestResult::log10_p`) to survive f64 underflow.

pub mod probes;
pub mod special;

use serde::Serialize;

use crate::error::{Error, Result};

/// Threshold below which `log10_p` is populated alongside `p`.
const LOG_FORM_THRESHOLD: f64 = 1e-300;

/// Effect-size measure attached to a test result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EffectName {
    CramersV,
    CohensD,
    EtaSquared,
    R,
}

/// Outcome of a hypothesis test.
#[derive(Debug, Clone, Serialize)]
pub struct TestResult {
    pub statistic: f64,
    pub dof: Option<f64>,
    /// Two-sided p-value in [0, 1]; 0.0 after underflow (see `log10_p`).
    pub p: f64,
    /// log10 of the p-value, present when p < 1e-300.
    pub log10_p: Option<f64>,
    pub effect_size: Option<f64>,
    pub effect_name: Option<EffectName>,
}

impl TestResult {
    fn new(statistic: f64, dof: Option<f64>, p: f64, log10_p: Option<f64>) -> Self {
        TestResult {
            statistic,
            dof,
            p,
            log10_p,
            effect_size: None,
            effect_name: None,
        }
    }

    fn with_effect(mut self, size: f64, name: EffectName) -> Self {
        self.effect_size = Some(size);
        self.effect_name = Some(name);
        self
    }
}

/// Rectangular table of nonnegative counts with labels.
#[derive(Debug, Clone, Serialize)]
pub struct ContingencyTable {
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
    pub counts: Vec<Vec<f64>>,
}

impl ContingencyTable {
    pub fn new(
        row_labels: Vec<String>,
        col_labels: Vec<String>,
        counts: Vec<Vec<f64>>,
    ) -> Result<Self> {
        if counts.len() != row_labels.len() || counts.iter().any(|r| r.len() != col_labels.len()) {
            return Err(Error::InvalidInput(
                "contingency table shape does not match labels".into(),
            ));
        }
        if counts.iter().flatten().any(|&c| c < 0.0 || !c.is_finite()) {
            return Err(Error::InvalidInput(
                "contingency counts must be finite and nonnegative".into(),
            ));
        }
        Ok(ContingencyTable {
            row_labels,
            col_labels,
            counts,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.counts.len()
    }

    pub fn n_cols(&self) -> usize {
        self.col_labels.len()
    }

    pub fn total(&self) -> f64 {
        self.counts.iter().flatten().sum()
    }

    /// Drop all-zero rows and columns (they carry no information and
    /// would make expected counts zero).
    pub fn pruned(&self) -> ContingencyTable {
        let keep_rows: Vec<usize> = (0..self.n_rows())
            .filter(|&i| self.counts[i].iter().any(|&c| c > 0.0))
            .collect();
        let keep_cols: Vec<usize> = (0..self.n_cols())
            .filter(|&j| keep_rows.iter().any(|&i| self.counts[i][j] > 0.0))
            .collect();
        ContingencyTable {
            row_labels: keep_rows
                .iter()
                .map(|&i| self.row_labels[i].clone())
                .collect(),
            col_labels: keep_cols
                .iter()
                .map(|&j| self.col_labels[j].clone())
                .collect(),
            counts: keep_rows
                .iter()
                .map(|&i| keep_cols.iter().map(|&j| self.counts[i][j]).collect())
                .collect(),
        }
    }
}

fn two_sided_from_z(z: f64) -> (f64, Option<f64>) {
    let az = z.abs();
    let p = (2.0 * special::normal_sf(az)).min(1.0);
    if p < LOG_FORM_THRESHOLD {
        let log10_p = 2f64.log10() + special::log10_normal_sf(az);
        (p, Some(log10_p))
    } else {
        (p, None)
    }
}

/// Pearson chi-square test of independence with Cramér's V.
///
/// Requires at least a 2x2 table and strictly positive expected counts;
/// prune empty rows/columns first (`ContingencyTable::pruned`).
pub fn chi_square(table: &ContingencyTable) -> Result<TestResult> {
    let r = table.n_rows();
    let c = table.n_cols();
    if r < 2 || c < 2 {
        return Err(Error::Degenerate(format!(
            "chi-square needs at least 2x2, got {r}x{c}"
        )));
    }
    let n = table.total();
    if n <= 0.0 {
        return Err(Error::Degenerate("chi-square on empty table".into()));
    }
    let row_totals: Vec<f64> = table.counts.iter().map(|row| row.iter().sum()).collect();
    let col_totals: Vec<f64> = (0..c)
        .map(|j| table.counts.iter().map(|row| row[j]).sum())
        .collect();
    let mut statistic = 0.0;
    for (i, row_total) in row_totals.iter().enumerate() {
        for (j, col_total) in col_totals.iter().enumerate() {
            let expected = row_total * col_total / n;
            if expected <= 0.0 {
                return Err(Error::Degenerate(format!(
                    "zero expected count in cell ({}, {})",
                    table.row_labels[i], table.col_labels[j]
                )));
            }
            let diff = table.counts[i][j] - expected;
            statistic += diff * diff / expected;
        }
    }
    let dof = ((r - 1) * (c - 1)) as f64;
    let p = special::chi2_sf(statistic, dof);
    let log10_p = if p < LOG_FORM_THRESHOLD {
        Some(special::log10_chi2_sf(statistic, dof))
    } else {
        None
    };
    let k = (r.min(c) - 1) as f64;
    let v = (statistic / (n * k)).sqrt();
    Ok(TestResult::new(statistic, Some(dof), p, log10_p).with_effect(v, EffectName::CramersV))
}

/// Midranks of the pooled sample plus the tie-correction term
/// sum(t^3 - t) over tie groups.
fn midranks(values: &[f64]) -> (Vec<f64>, f64) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let mut ranks = vec![0.0; values.len()];
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && values[order[j]] == values[order[i]] {
            j += 1;
        }
        let rank = (i + j + 1) as f64 / 2.0;
        for &idx in &order[i..j] {
            ranks[idx] = rank;
        }
        let t = (j - i) as f64;
        tie_term += t * t * t - t;
        i = j;
    }
    (ranks, tie_term)
}

/// Mann-Whitney U test (two-sided, normal approximation with tie and
/// continuity corrections). Returns the U statistic of the first sample
/// with a rank-biserial effect size.
pub fn mann_whitney_u(a: &[f64], b: &[f64]) -> Result<TestResult> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InsufficientData(
            "mann_whitney_u requires non-empty samples".into(),
        ));
    }
    let n1 = a.len() as f64;
    let n2 = b.len() as f64;
    let pooled: Vec<f64> = a.iter().chain(b.iter()).copied().collect();
    let (ranks, tie_term) = midranks(&pooled);
    let r1: f64 = ranks[..a.len()].iter().sum();
    let u1 = r1 - n1 * (n1 + 1.0) / 2.0;
    let mean = n1 * n2 / 2.0;
    let n = n1 + n2;
    let var = n1 * n2 / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    let effect = 2.0 * u1 / (n1 * n2) - 1.0;
    if var <= 0.0 {
        // every value tied: no evidence either way
        return Ok(TestResult::new(u1, None, 1.0, None).with_effect(effect, EffectName::R));
    }
    let diff = u1 - mean;
    let z = if diff == 0.0 {
        0.0
    } else {
        (diff - 0.5 * diff.signum()) / var.sqrt()
    };
    let (p, log10_p) = two_sided_from_z(z);
    Ok(TestResult::new(u1, None, p, log10_p).with_effect(effect, EffectName::R))
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn sum_sq_dev(xs: &[f64], m: f64) -> f64 {
    xs.iter().map(|x| (x - m) * (x - m)).sum()
}

/// Which two-sample t-test to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TVariant {
    Student,
    Welch,
}

/// Two-sample t-test (two-sided) with Cohen's d on the pooled SD.
pub fn t_test(a: &[f64], b: &[f64], variant: TVariant) -> Result<TestResult> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::InsufficientData(
            "t_test requires n >= 2 in each sample".into(),
        ));
    }
    let n1 = a.len() as f64;
    let n2 = b.len() as f64;
    let m1 = mean(a);
    let m2 = mean(b);
    let ss1 = sum_sq_dev(a, m1);
    let ss2 = sum_sq_dev(b, m2);
    let v1 = ss1 / (n1 - 1.0);
    let v2 = ss2 / (n2 - 1.0);
    let pooled_var = (ss1 + ss2) / (n1 + n2 - 2.0);
    let pooled_sd = pooled_var.sqrt();
    let d = if pooled_sd > 0.0 {
        (m1 - m2) / pooled_sd
    } else {
        0.0
    };
    let (t, dof) = match variant {
        TVariant::Student => {
            let se = (pooled_var * (1.0 / n1 + 1.0 / n2)).sqrt();
            (if se > 0.0 { (m1 - m2) / se } else { 0.0 }, n1 + n2 - 2.0)
        }
        TVariant::Welch => {
            let se2 = v1 / n1 + v2 / n2;
            let dof = if se2 > 0.0 {
                se2 * se2 / ((v1 / n1).powi(2) / (n1 - 1.0) + (v2 / n2).powi(2) / (n2 - 1.0))
            } else {
                n1 + n2 - 2.0
            };
            (
                if se2 > 0.0 {
                    (m1 - m2) / se2.sqrt()
                } else {
                    0.0
                },
                dof,
            )
        }
    };
    if pooled_var == 0.0 {
        // both samples constant
        return if m1 == m2 {
            Ok(TestResult::new(0.0, Some(dof), 1.0, None).with_effect(0.0, EffectName::CohensD))
        } else {
            Ok(
                TestResult::new(f64::INFINITY * (m1 - m2).signum(), Some(dof), 0.0, None)
                    .with_effect(d, EffectName::CohensD),
            )
        };
    }
    let at = t.abs();
    let p = (2.0 * special::t_sf(at, dof)).min(1.0);
    let log10_p = if p < LOG_FORM_THRESHOLD {
        Some(2f64.log10() + special::log10_t_sf(at, dof))
    } else {
        None
    };
    Ok(TestResult::new(t, Some(dof), p, log10_p).with_effect(d, EffectName::CohensD))
}

/// One-way ANOVA with eta-squared.
pub fn anova(groups: &[Vec<f64>]) -> Result<TestResult> {
    if groups.len() < 2 {
        return Err(Error::InsufficientData("anova requires >= 2 groups".into()));
    }
    if groups.iter().any(|g| g.is_empty()) {
        return Err(Error::InsufficientData("anova group is empty".into()));
    }
    let k = groups.len() as f64;
    let n = groups.iter().map(|g| g.len()).sum::<usize>() as f64;
    if n <= k {
        return Err(Error::InsufficientData(
            "anova requires total n > number of groups".into(),
        ));
    }
    let grand = groups.iter().flatten().sum::<f64>() / n;
    let mut ss_between = 0.0;
    let mut ss_within = 0.0;
    for g in groups {
        let m = mean(g);
        ss_between += g.len() as f64 * (m - grand) * (m - grand);
        ss_within += sum_sq_dev(g, m);
    }
    let ss_total = ss_between + ss_within;
    if ss_total == 0.0 {
        return Ok(
            TestResult::new(0.0, Some(k - 1.0), 1.0, None).with_effect(0.0, EffectName::EtaSquared)
        );
    }
    let eta2 = ss_between / ss_total;
    let d1 = k - 1.0;
    let d2 = n - k;
    if ss_within == 0.0 {
        return Ok(TestResult::new(f64::INFINITY, Some(d1), 0.0, None)
            .with_effect(eta2, EffectName::EtaSquared));
    }
    let f = (ss_between / d1) / (ss_within / d2);
    let p = special::f_sf(f, d1, d2);
    Ok(TestResult::new(f, Some(d1), p, None).with_effect(eta2, EffectName::EtaSquared))
}

/// Pearson correlation with a two-sided p via the t transform.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<TestResult> {
    if x.len() != y.len() {
        return Err(Error::InvalidInput(
            "pearson inputs differ in length".into(),
        ));
    }
    if x.len() < 3 {
        return Err(Error::InsufficientData("pearson requires n >= 3".into()));
    }
    let n = x.len() as f64;
    let mx = mean(x);
    let my = mean(y);
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (xi, yi) in x.iter().zip(y) {
        sxy += (xi - mx) * (yi - my);
        sxx += (xi - mx) * (xi - mx);
        syy += (yi - my) * (yi - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::Degenerate("pearson input has zero variance".into()));
    }
    let r = (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0);
    let dof = n - 2.0;
    let p = if r.abs() >= 1.0 {
        0.0
    } else {
        let t = r.abs() * (dof / (1.0 - r * r)).sqrt();
        (2.0 * special::t_sf(t, dof)).min(1.0)
    };
    Ok(TestResult::new(r, Some(dof), p, None).with_effect(r, EffectName::R))
}

/// Shannon entropy in nats over category counts (zero counts skipped).
pub fn shannon_entropy(counts: &[u64]) -> Result<f64> {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return Err(Error::Degenerate("entropy of all-zero counts".into()));
    }
    let total = total as f64;
    Ok(counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / total;
            -p * p.ln()
        })
        .sum())
}
