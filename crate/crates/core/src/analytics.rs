//! Trait/performance statistics: single-trait Pearson correlations, the
//! paired-trait bivariate OLS with its weighted-combination correlation, and
//! a two-component PCA of trait vectors.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::psychometrics::TraitDim;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalyticsError {
    #[error("series lengths differ ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("series has zero variance")]
    ZeroVariance,
    #[error("unknown domain {0:?}")]
    UnknownDomain(String),
    #[error("no model ids shared between trait matrix and performance table")]
    JoinEmpty,
    #[error("paired-trait model needs two different traits")]
    SameTrait,
    #[error("design matrix is singular (collinear traits)")]
    Singular,
    #[error("column {0} has zero variance")]
    ZeroVarianceColumn(String),
    #[error("invalid table: {0}")]
    InvalidTable(String),
}

type Result<T> = std::result::Result<T, AnalyticsError>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraitMatrix {
    models: Vec<String>,
    values: Vec<[f64; 5]>,
}

impl TraitMatrix {
    pub fn new(models: Vec<String>, values: Vec<[f64; 5]>) -> Result<Self> {
        if models.len() != values.len() {
            return Err(AnalyticsError::InvalidTable("row count mismatch".into()));
        }
        if models.len() < 2 {
            return Err(AnalyticsError::InvalidTable("trait matrix needs at least 2 rows".into()));
        }
        check_unique(&models)?;
        for (m, row) in models.iter().zip(&values) {
            if let Some(v) = row.iter().find(|v| !(1.0..=5.0).contains(*v)) {
                return Err(AnalyticsError::InvalidTable(format!("{m}: trait value {v} outside [1, 5]")));
            }
        }
        Ok(TraitMatrix { models, values })
    }

    pub fn models(&self) -> &[String] {
        &self.models
    }

    pub fn rows(&self) -> &[[f64; 5]] {
        &self.values
    }

    pub fn column(&self, dim: TraitDim) -> Vec<f64> {
        self.values.iter().map(|r| r[dim.index()]).collect()
    }

    pub fn len(&self) -> usize {
        self.models.len()
    }

    pub fn is_empty(&self) -> bool {
        self.models.is_empty()
    }

    /// Copy without the listed model ids.
    pub fn without(&self, excluded: &[&str]) -> Result<TraitMatrix> {
        let (models, values) = self
            .models
            .iter()
            .zip(&self.values)
            .filter(|(m, _)| !excluded.contains(&m.as_str()))
            .map(|(m, v)| (m.clone(), *v))
            .unzip();
        TraitMatrix::new(models, values)
    }

    /// Comma-separated with header `model,O,C,E,A,N`; `#` lines are comments.
    pub fn from_csv(source: &str) -> Result<Self> {
        let (header, rows) = read_csv(source)?;
        if header != ["model", "O", "C", "E", "A", "N"] {
            return Err(AnalyticsError::InvalidTable(format!(
                "expected header model,O,C,E,A,N, got {}",
                header.join(",")
            )));
        }
        let mut models = Vec::with_capacity(rows.len());
        let mut values = Vec::with_capacity(rows.len());
        for (model, cells) in rows {
            let mut row = [0.0; 5];
            row.copy_from_slice(&cells);
            models.push(model);
            values.push(row);
        }
        TraitMatrix::new(models, values)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("model,O,C,E,A,N\n");
        for (m, row) in self.models.iter().zip(&self.values) {
            let cells: Vec<String> = row.iter().map(f64::to_string).collect();
            let _ = writeln!(out, "{m},{}", cells.join(","));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerformanceTable {
    models: Vec<String>,
    domains: Vec<String>,
    values: Vec<Vec<f64>>,
}

impl PerformanceTable {
    pub fn new(models: Vec<String>, domains: Vec<String>, values: Vec<Vec<f64>>) -> Result<Self> {
        if domains.is_empty() {
            return Err(AnalyticsError::InvalidTable("no domain columns".into()));
        }
        if models.len() != values.len() {
            return Err(AnalyticsError::InvalidTable("row count mismatch".into()));
        }
        check_unique(&models)?;
        check_unique(&domains)?;
        for (m, row) in models.iter().zip(&values) {
            if row.len() != domains.len() {
                return Err(AnalyticsError::InvalidTable(format!("{m}: wrong number of cells")));
            }
            if let Some(v) = row.iter().find(|v| !(0.0..=1.0).contains(*v)) {
                return Err(AnalyticsError::InvalidTable(format!("{m}: accuracy {v} outside [0, 1]")));
            }
        }
        Ok(PerformanceTable {
            models,
            domains,
            values,
        })
    }

    pub fn from_csv(source: &str) -> Result<Self> {
        let (header, rows) = read_csv(source)?;
        if header.first().map(String::as_str) != Some("model") {
            return Err(AnalyticsError::InvalidTable("header must start with `model`".into()));
        }
        let domains = header[1..].to_vec();
        let (models, values) = rows.into_iter().unzip();
        PerformanceTable::new(models, domains, values)
    }

    pub fn domains(&self) -> &[String] {
        &self.domains
    }

    pub fn models(&self) -> &[String] {
        &self.models
    }

    pub fn domain_index(&self, domain: &str) -> Result<usize> {
        self.domains
            .iter()
            .position(|d| d == domain)
            .ok_or_else(|| AnalyticsError::UnknownDomain(domain.to_string()))
    }

    /// Every accuracy multiplied by `factor`; used by invariance checks.
    pub fn scaled(&self, factor: f64) -> PerformanceTable {
        PerformanceTable {
            models: self.models.clone(),
            domains: self.domains.clone(),
            values: self.values.iter().map(|r| r.iter().map(|v| v * factor).collect()).collect(),
        }
    }

    fn lookup(&self) -> HashMap<&str, usize> {
        self.models.iter().enumerate().map(|(i, m)| (m.as_str(), i)).collect()
    }
}

fn check_unique(ids: &[String]) -> Result<()> {
    let mut seen = HashSet::new();
    match ids.iter().find(|id| !seen.insert(id.as_str())) {
        Some(dup) => Err(AnalyticsError::InvalidTable(format!("duplicate id {dup:?}"))),
        None => Ok(()),
    }
}

type CsvRows = (Vec<String>, Vec<(String, Vec<f64>)>);

fn read_csv(source: &str) -> Result<CsvRows> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(source.as_bytes());
    let bad = |e: csv::Error| AnalyticsError::InvalidTable(e.to_string());
    let header: Vec<String> = reader.headers().map_err(bad)?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(bad)?;
        let model = record.get(0).unwrap_or_default().to_string();
        let cells = record
            .iter()
            .skip(1)
            .map(|c| {
                c.parse::<f64>()
                    .map_err(|_| AnalyticsError::InvalidTable(format!("{model}: bad number {c:?}")))
            })
            .collect::<Result<Vec<f64>>>()?;
        if cells.len() + 1 != header.len() {
            return Err(AnalyticsError::InvalidTable(format!("{model}: wrong number of cells")));
        }
        rows.push((model, cells));
    }
    Ok((header, rows))
}

/// Rows of `traits` whose model id occurs in `perf`, in trait-matrix order.
pub struct Joined {
    pub models: Vec<String>,
    pub traits: Vec<[f64; 5]>,
    pub performance: Vec<f64>,
}

impl Joined {
    fn column(&self, dim: TraitDim) -> Vec<f64> {
        self.traits.iter().map(|r| r[dim.index()]).collect()
    }
}

pub fn join(traits: &TraitMatrix, perf: &PerformanceTable, domain: &str) -> Result<Joined> {
    let d = perf.domain_index(domain)?;
    let lookup = perf.lookup();
    let mut joined = Joined {
        models: Vec::new(),
        traits: Vec::new(),
        performance: Vec::new(),
    };
    for (m, row) in traits.models.iter().zip(&traits.values) {
        if let Some(&i) = lookup.get(m.as_str()) {
            joined.models.push(m.clone());
            joined.traits.push(*row);
            joined.performance.push(perf.values[i][d]);
        }
    }
    if joined.models.is_empty() {
        return Err(AnalyticsError::JoinEmpty);
    }
    Ok(joined)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Correlation {
    pub r: f64,
    pub n: usize,
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub fn pearson(x: &[f64], y: &[f64]) -> Result<Correlation> {
    if x.len() != y.len() {
        return Err(AnalyticsError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 3 {
        return Err(AnalyticsError::TooFewPoints { needed: 3, got: x.len() });
    }
    let (mx, my) = (mean(x), mean(y));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(AnalyticsError::ZeroVariance);
    }
    let r = (sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0);
    Ok(Correlation { r, n: x.len() })
}

/// One Pearson r per trait, O..N order, over rows joined by model id.
pub fn single_trait_correlations(
    traits: &TraitMatrix,
    perf: &PerformanceTable,
    domain: &str,
) -> Result<[Correlation; 5]> {
    let joined = join(traits, perf, domain)?;
    if joined.models.len() < 3 {
        return Err(AnalyticsError::TooFewPoints {
            needed: 3,
            got: joined.models.len(),
        });
    }
    let mut out = [Correlation { r: 0.0, n: 0 }; 5];
    for dim in TraitDim::ALL {
        out[dim.index()] = pearson(&joined.column(dim), &joined.performance)?;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OlsFit {
    pub domain: String,
    pub trait_j: TraitDim,
    pub trait_k: TraitDim,
    pub beta0: f64,
    pub beta_j: f64,
    pub beta_k: f64,
    pub rss: f64,
    /// corr(beta_j * T_j + beta_k * T_k, P).
    pub combo_rho: f64,
    pub n: usize,
}

/// Raw bivariate OLS `y = b0 + bj*xj + bk*xk` through the 2x2 centred
/// normal equations, solved in closed form.
pub fn ols_two(xj: &[f64], xk: &[f64], y: &[f64]) -> Result<(f64, f64, f64)> {
    let n = y.len();
    if xj.len() != n || xk.len() != n {
        return Err(AnalyticsError::LengthMismatch(xj.len().min(xk.len()), n));
    }
    if n < 4 {
        return Err(AnalyticsError::TooFewPoints { needed: 4, got: n });
    }
    let (mj, mk, my) = (mean(xj), mean(xk), mean(y));
    let (mut sjj, mut skk, mut sjk, mut sjy, mut sky) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for i in 0..n {
        let (dj, dk, dy) = (xj[i] - mj, xk[i] - mk, y[i] - my);
        sjj += dj * dj;
        skk += dk * dk;
        sjk += dj * dk;
        sjy += dj * dy;
        sky += dk * dy;
    }
    let det = sjj * skk - sjk * sjk;
    if sjj == 0.0 || skk == 0.0 || det <= 1e-12 * sjj * skk {
        return Err(AnalyticsError::Singular);
    }
    let bj = (skk * sjy - sjk * sky) / det;
    let bk = (sjj * sky - sjk * sjy) / det;
    let b0 = my - bj * mj - bk * mk;
    Ok((b0, bj, bk))
}

pub fn paired_trait_ols(
    traits: &TraitMatrix,
    perf: &PerformanceTable,
    domain: &str,
    j: TraitDim,
    k: TraitDim,
) -> Result<OlsFit> {
    if j == k {
        return Err(AnalyticsError::SameTrait);
    }
    let joined = join(traits, perf, domain)?;
    let (xj, xk, y) = (joined.column(j), joined.column(k), &joined.performance);
    let (beta0, beta_j, beta_k) = ols_two(&xj, &xk, y)?;
    let rss = (0..y.len())
        .map(|i| {
            let e = y[i] - (beta0 + beta_j * xj[i] + beta_k * xk[i]);
            e * e
        })
        .sum();
    let combo: Vec<f64> = xj.iter().zip(&xk).map(|(a, b)| beta_j * a + beta_k * b).collect();
    // A constant combination (both betas zero) carries no correlation.
    let combo_rho = match pearson(&combo, y) {
        Ok(c) => c.r.max(0.0),
        Err(AnalyticsError::ZeroVariance) if y.iter().any(|v| *v != y[0]) => 0.0,
        Err(e) => return Err(e),
    };
    Ok(OlsFit {
        domain: domain.to_string(),
        trait_j: j,
        trait_k: k,
        beta0,
        beta_j,
        beta_k,
        rss,
        combo_rho,
        n: y.len(),
    })
}

/// The ten unordered trait pairs; (k, j) fits the same model as (j, k).
pub fn trait_pairs() -> Vec<(TraitDim, TraitDim)> {
    let mut pairs = Vec::with_capacity(10);
    for (a, &j) in TraitDim::ALL.iter().enumerate() {
        for &k in &TraitDim::ALL[a + 1..] {
            pairs.push((j, k));
        }
    }
    pairs
}

pub fn paired_trait_sweep(traits: &TraitMatrix, perf: &PerformanceTable, domain: &str) -> Result<Vec<OlsFit>> {
    trait_pairs()
        .into_iter()
        .map(|(j, k)| paired_trait_ols(traits, perf, domain, j, k))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preprocessing {
    /// Covariance of mean-centred columns.
    Centered,
    /// Correlation matrix (centred, unit-variance columns).
    Standardized,
}

impl Preprocessing {
    pub fn name(self) -> &'static str {
        match self {
            Preprocessing::Centered => "centered",
            Preprocessing::Standardized => "standardized",
        }
    }
}

/// Symmetric eigendecomposition by cyclic Jacobi rotations.
///
/// Returns eigenvalues in descending order with matching eigenvectors as
/// columns. Sweeps stop once the off-diagonal Frobenius norm drops below
/// `1e-12` times the matrix norm.
pub fn jacobi_eigen(matrix: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = matrix.len();
    let mut a: Vec<Vec<f64>> = matrix.to_vec();
    let mut v: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| f64::from(u8::from(i == j))).collect()).collect();
    let norm = a.iter().flatten().map(|x| x * x).sum::<f64>().sqrt();
    let tol = 1e-12 * norm;
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum::<f64>()
            .sqrt();
        if off <= tol {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p][q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for row in a.iter_mut() {
                    let (akp, akq) = (row[p], row[q]);
                    row[p] = c * akp - s * akq;
                    row[q] = s * akp + c * akq;
                }
                let (row_p, row_q) = (a[p].clone(), a[q].clone());
                for k in 0..n {
                    a[p][k] = c * row_p[k] - s * row_q[k];
                    a[q][k] = s * row_p[k] + c * row_q[k];
                }
                for row in v.iter_mut() {
                    let (vkp, vkq) = (row[p], row[q]);
                    row[p] = c * vkp - s * vkq;
                    row[q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[y][y].total_cmp(&a[x][x]));
    let values = order.iter().map(|&i| a[i][i]).collect();
    let vectors = (0..n).map(|r| order.iter().map(|&i| v[r][i]).collect()).collect();
    (values, vectors)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaResult {
    pub preprocessing: Preprocessing,
    pub models: Vec<String>,
    /// `columns x k`; column `c` is component `c`.
    pub loadings: Vec<Vec<f64>>,
    /// `rows x k` projections of the preprocessed data.
    pub scores: Vec<Vec<f64>>,
    /// Fraction of total variance per retained component.
    pub variance_explained: Vec<f64>,
    /// All eigenvalues, descending.
    pub eigenvalues: Vec<f64>,
}

/// Preprocessed copy of `data` (rows x columns).
pub fn preprocess(data: &[Vec<f64>], preprocessing: Preprocessing, names: &[String]) -> Result<Vec<Vec<f64>>> {
    let n = data.len();
    let m = data.first().map_or(0, Vec::len);
    let mut out: Vec<Vec<f64>> = data.to_vec();
    for c in 0..m {
        let col_mean = data.iter().map(|r| r[c]).sum::<f64>() / n as f64;
        let var = data.iter().map(|r| (r[c] - col_mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
        if preprocessing == Preprocessing::Standardized && var == 0.0 {
            return Err(AnalyticsError::ZeroVarianceColumn(names.get(c).cloned().unwrap_or_else(|| c.to_string())));
        }
        let scale = match preprocessing {
            Preprocessing::Centered => 1.0,
            Preprocessing::Standardized => var.sqrt(),
        };
        for row in out.iter_mut() {
            row[c] = (row[c] - col_mean) / scale;
        }
    }
    Ok(out)
}

/// Top-`k` principal components of `data` (rows x columns). Within each
/// component the loading of largest magnitude is made positive.
pub fn principal_components(
    data: &[Vec<f64>],
    names: &[String],
    preprocessing: Preprocessing,
    k: usize,
) -> Result<PcaResult> {
    let n = data.len();
    if n < 3 {
        return Err(AnalyticsError::TooFewPoints { needed: 3, got: n });
    }
    let m = data[0].len();
    if data.iter().any(|r| r.len() != m) || k > m {
        return Err(AnalyticsError::InvalidTable("ragged data or too many components".into()));
    }
    let z = preprocess(data, preprocessing, names)?;
    let mut cov = vec![vec![0.0; m]; m];
    for (a, row_a) in cov.iter_mut().enumerate() {
        for (b, cell) in row_a.iter_mut().enumerate() {
            *cell = z.iter().map(|r| r[a] * r[b]).sum::<f64>() / (n as f64 - 1.0);
        }
    }
    let (values, vectors) = jacobi_eigen(&cov);
    let values: Vec<f64> = values.into_iter().map(|v| v.max(0.0)).collect();
    let total: f64 = values.iter().sum();
    if total == 0.0 {
        return Err(AnalyticsError::ZeroVariance);
    }
    let mut loadings = vec![vec![0.0; k]; m];
    for c in 0..k {
        let col: Vec<f64> = (0..m).map(|r| vectors[r][c]).collect();
        let pivot = col.iter().copied().fold(0.0f64, |acc, x| if x.abs() > acc.abs() { x } else { acc });
        let sign = if pivot < 0.0 { -1.0 } else { 1.0 };
        for r in 0..m {
            loadings[r][c] = sign * col[r];
        }
    }
    let scores = z
        .iter()
        .map(|row| (0..k).map(|c| (0..m).map(|r| row[r] * loadings[r][c]).sum()).collect())
        .collect();
    Ok(PcaResult {
        preprocessing,
        models: Vec::new(),
        loadings,
        scores,
        variance_explained: values[..k].iter().map(|v| v / total).collect(),
        eigenvalues: values,
    })
}

pub fn pca_2d(traits: &TraitMatrix, preprocessing: Preprocessing) -> Result<PcaResult> {
    let data: Vec<Vec<f64>> = traits.values.iter().map(|r| r.to_vec()).collect();
    let names: Vec<String> = TraitDim::ALL.iter().map(|d| d.code().to_string()).collect();
    let mut result = principal_components(&data, &names, preprocessing, 2)?;
    result.models = traits.models.clone();
    Ok(result)
}

impl PcaResult {
    /// `trait,PC1,PC2` rows.
    pub fn loadings_csv(&self) -> String {
        let mut out = String::from("trait,PC1,PC2\n");
        for (dim, row) in TraitDim::ALL.iter().zip(&self.loadings) {
            let _ = writeln!(out, "{},{},{}", dim.code(), row[0], row[1]);
        }
        out
    }

    /// `model,PC1,PC2` rows.
    pub fn scores_csv(&self) -> String {
        let mut out = String::from("model,PC1,PC2\n");
        for (m, row) in self.models.iter().zip(&self.scores) {
            let _ = writeln!(out, "{m},{},{}", row[0], row[1]);
        }
        out
    }
}

/// Correlation matrix for every domain, rows O..N.
pub fn correlation_matrix(traits: &TraitMatrix, perf: &PerformanceTable) -> Result<Vec<[Correlation; 5]>> {
    perf.domains
        .iter()
        .map(|d| single_trait_correlations(traits, perf, d))
        .collect()
}

/// `trait,<domain...>` with one row per trait.
pub fn correlation_csv(perf: &PerformanceTable, matrix: &[[Correlation; 5]]) -> String {
    let mut out = format!("trait,{}\n", perf.domains.join(","));
    for dim in TraitDim::ALL {
        let cells: Vec<String> = matrix.iter().map(|c| c[dim.index()].r.to_string()).collect();
        let _ = writeln!(out, "{},{}", dim.code(), cells.join(","));
    }
    out
}
