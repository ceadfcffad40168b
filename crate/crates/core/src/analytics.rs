//! Corpus-level analyses over classified TD instances: type distribution,
//! Spearman correlation between types across packages, yearly per-package
//! trends, compound annual growth and impact (bubble chart) data.

use std::collections::{BTreeMap, BTreeSet};

use chrono::Datelike;
use serde::{Deserialize, Serialize};

use crate::corpus::{RawComment, TdType};
use crate::pipeline::TdInstance;

#[derive(Clone, Debug, thiserror::Error, PartialEq)]
pub enum AnalyticsError {
    #[error("vectors differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("need at least 3 points, got {0}")]
    TooFewPoints(usize),
    #[error("a vector is constant, so the rank correlation is undefined")]
    ConstantVector,
    #[error("need at least 3 packages, got {0}")]
    TooFewPackages(usize),
    #[error("year {0} has no package count")]
    MissingYear(i32),
    #[error("instance {0:?} has no timestamp")]
    MissingTimestamp(String),
    #[error("year {0} is not in the series")]
    YearNotInSeries(i32),
    #[error("growth span must be at least one year ({first}..{last})")]
    InvalidSpan { first: i32, last: i32 },
    #[error("CAGR undefined for a first value of {0}")]
    UndefinedCagr(f64),
    #[error("inputs cover different TD types")]
    TypeMismatch,
}

pub type TypeCounts = BTreeMap<TdType, u64>;

fn zero_counts() -> TypeCounts {
    TdType::ALL.iter().map(|&t| (t, 0)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistributionRow {
    pub td_type: TdType,
    pub count: u64,
    pub percent: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistributionScope {
    /// A platform name, or `overall` for the pooled scope.
    pub scope: String,
    pub total: u64,
    pub rows: Vec<DistributionRow>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistributionTable {
    pub scopes: Vec<DistributionScope>,
}

pub const OVERALL: &str = "overall";

fn scope(name: &str, counts: &TypeCounts) -> DistributionScope {
    let total: u64 = counts.values().sum();
    let rows = TdType::ALL
        .iter()
        .map(|&t| {
            let count = counts.get(&t).copied().unwrap_or(0);
            DistributionRow {
                td_type: t,
                count,
                percent: if total == 0 { 0.0 } else { 100.0 * count as f64 / total as f64 },
            }
        })
        .collect();
    DistributionScope {
        scope: name.to_string(),
        total,
        rows,
    }
}

/// Per-platform scopes (sorted by name) followed by the pooled scope.
pub fn distribution_from_counts(per_platform: &BTreeMap<String, TypeCounts>) -> DistributionTable {
    let mut pooled = zero_counts();
    let mut scopes = Vec::new();
    for (platform, counts) in per_platform {
        for (t, c) in counts {
            *pooled.entry(*t).or_default() += c;
        }
        scopes.push(scope(platform, counts));
    }
    scopes.push(scope(OVERALL, &pooled));
    DistributionTable { scopes }
}

pub fn distribution(instances: &[TdInstance]) -> DistributionTable {
    let mut per_platform: BTreeMap<String, TypeCounts> = BTreeMap::new();
    for inst in instances {
        *per_platform
            .entry(inst.platform.clone())
            .or_insert_with(zero_counts)
            .entry(inst.td_type)
            .or_default() += 1;
    }
    distribution_from_counts(&per_platform)
}

impl DistributionTable {
    pub fn scope(&self, name: &str) -> Option<&DistributionScope> {
        self.scopes.iter().find(|s| s.scope == name)
    }

    pub fn percent(&self, scope: &str, t: TdType) -> Option<f64> {
        self.scope(scope)?.rows.iter().find(|r| r.td_type == t).map(|r| r.percent)
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["scope", "td_type", "count", "percent"]).expect("in-memory");
        for s in &self.scopes {
            for r in &s.rows {
                w.write_record([
                    s.scope.as_str(),
                    r.td_type.name(),
                    &r.count.to_string(),
                    &format!("{:.4}", r.percent),
                ])
                .expect("in-memory");
            }
        }
        into_string(w)
    }
}

fn into_string(w: csv::Writer<Vec<u8>>) -> String {
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8 fields")
}

/// Average ranks (1-based); tied values share the mean of their positions.
pub fn ranks(x: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut r = vec![0.0; x.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && x[order[j + 1]] == x[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            r[k] = avg;
        }
        i = j + 1;
    }
    r
}

fn pearson(a: &[f64], b: &[f64]) -> Result<f64, AnalyticsError> {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    if saa == 0.0 || sbb == 0.0 {
        return Err(AnalyticsError::ConstantVector);
    }
    Ok((sab / (saa * sbb).sqrt()).clamp(-1.0, 1.0))
}

/// Spearman's ρ: Pearson correlation of average ranks, exact under ties.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64, AnalyticsError> {
    if x.len() != y.len() {
        return Err(AnalyticsError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 3 {
        return Err(AnalyticsError::TooFewPoints(x.len()));
    }
    pearson(&ranks(x), &ranks(y))
}

/// Counts per package per type; every type present, zero-filled.
pub fn per_package_counts(instances: &[TdInstance]) -> BTreeMap<String, TypeCounts> {
    let mut out: BTreeMap<String, TypeCounts> = BTreeMap::new();
    for inst in instances {
        *out.entry(inst.package.clone())
            .or_insert_with(zero_counts)
            .entry(inst.td_type)
            .or_default() += 1;
    }
    out
}

/// Type × type Spearman matrix. Undefined cells (a constant column) are
/// `None`; the diagonal is always 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    pub labels: Vec<TdType>,
    pub values: Vec<Vec<Option<f64>>>,
}

pub fn correlation_matrix(
    per_package: &BTreeMap<String, TypeCounts>,
) -> Result<CorrelationMatrix, AnalyticsError> {
    if per_package.len() < 3 {
        return Err(AnalyticsError::TooFewPackages(per_package.len()));
    }
    let columns: Vec<Vec<f64>> = TdType::ALL
        .iter()
        .map(|t| {
            per_package
                .values()
                .map(|c| c.get(t).copied().unwrap_or(0) as f64)
                .collect()
        })
        .collect();
    let n = TdType::ALL.len();
    let mut values = vec![vec![None; n]; n];
    for i in 0..n {
        values[i][i] = Some(1.0);
        for j in (i + 1)..n {
            let rho = spearman(&columns[i], &columns[j]).ok();
            values[i][j] = rho;
            values[j][i] = rho;
        }
    }
    Ok(CorrelationMatrix {
        labels: TdType::ALL.to_vec(),
        values,
    })
}

impl CorrelationMatrix {
    pub fn get(&self, a: TdType, b: TdType) -> Option<f64> {
        let i = self.labels.iter().position(|&t| t == a)?;
        let j = self.labels.iter().position(|&t| t == b)?;
        self.values[i][j]
    }

    /// Mean of the defined off-diagonal cells of `t`'s row.
    pub fn mean_off_diagonal(&self, t: TdType) -> Option<f64> {
        let i = self.labels.iter().position(|&x| x == t)?;
        let cells: Vec<f64> = self.values[i]
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .filter_map(|(_, v)| *v)
            .collect();
        if cells.is_empty() {
            None
        } else {
            Some(cells.iter().sum::<f64>() / cells.len() as f64)
        }
    }

    /// Square CSV; undefined cells are empty.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let header: Vec<&str> = std::iter::once("td_type")
            .chain(self.labels.iter().map(|t| t.name()))
            .collect();
        w.write_record(&header).expect("in-memory");
        for (t, row) in self.labels.iter().zip(&self.values) {
            let cells: Vec<String> = std::iter::once(t.name().to_string())
                .chain(row.iter().map(|v| v.map(|x| format!("{x:.6}")).unwrap_or_default()))
                .collect();
            w.write_record(&cells).expect("in-memory");
        }
        into_string(w)
    }
}

/// How to count "packages in a year".
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PackageCountMode {
    /// Packages approved up to and including the year.
    #[default]
    Cumulative,
    /// Packages first seen in that year only.
    PerYear,
}

/// First year each package appears in the corpus.
pub fn package_first_years(comments: &[RawComment]) -> BTreeMap<String, i32> {
    let mut out: BTreeMap<String, i32> = BTreeMap::new();
    for c in comments {
        let y = c.created_at.year();
        out.entry(c.package.clone())
            .and_modify(|v| *v = (*v).min(y))
            .or_insert(y);
    }
    out
}

/// Package counts per year from first-appearance years, over every year
/// between the earliest and latest.
pub fn packages_by_year(first_years: &BTreeMap<String, i32>, mode: PackageCountMode) -> BTreeMap<i32, u64> {
    let mut new_per_year: BTreeMap<i32, u64> = BTreeMap::new();
    for &y in first_years.values() {
        *new_per_year.entry(y).or_default() += 1;
    }
    let (Some(&lo), Some(&hi)) = (new_per_year.keys().next(), new_per_year.keys().last()) else {
        return BTreeMap::new();
    };
    let mut running = 0;
    (lo..=hi)
        .map(|y| {
            let fresh = new_per_year.get(&y).copied().unwrap_or(0);
            running += fresh;
            (y, if mode == PackageCountMode::Cumulative { running } else { fresh })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrendPoint {
    pub year: i32,
    pub value: f64,
}

/// Average instances per package, per type per year.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrendSeries {
    pub series: BTreeMap<TdType, Vec<TrendPoint>>,
}

/// Instance counts per (type, year).
pub fn yearly_counts(instances: &[TdInstance]) -> Result<BTreeMap<(TdType, i32), u64>, AnalyticsError> {
    let mut out = BTreeMap::new();
    for inst in instances {
        let year = inst
            .created_at
            .ok_or_else(|| AnalyticsError::MissingTimestamp(inst.comment_id.clone()))?
            .year();
        *out.entry((inst.td_type, year)).or_default() += 1;
    }
    Ok(out)
}

/// `count(type, year) / packages_by_year[year]` for every year with a
/// positive package count.
pub fn trend_from_counts(
    counts: &BTreeMap<(TdType, i32), u64>,
    packages_by_year: &BTreeMap<i32, u64>,
) -> Result<TrendSeries, AnalyticsError> {
    for &(_, y) in counts.keys() {
        if packages_by_year.get(&y).copied().unwrap_or(0) == 0 {
            return Err(AnalyticsError::MissingYear(y));
        }
    }
    let series = TdType::ALL
        .iter()
        .map(|&t| {
            let points = packages_by_year
                .iter()
                .filter(|(_, &n)| n > 0)
                .map(|(&year, &n)| TrendPoint {
                    year,
                    value: counts.get(&(t, year)).copied().unwrap_or(0) as f64 / n as f64,
                })
                .collect();
            (t, points)
        })
        .collect();
    Ok(TrendSeries { series })
}

pub fn trend(
    instances: &[TdInstance],
    packages_by_year: &BTreeMap<i32, u64>,
) -> Result<TrendSeries, AnalyticsError> {
    trend_from_counts(&yearly_counts(instances)?, packages_by_year)
}

impl TrendSeries {
    pub fn value(&self, t: TdType, year: i32) -> Option<f64> {
        self.series.get(&t)?.iter().find(|p| p.year == year).map(|p| p.value)
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["td_type", "year", "per_package"]).expect("in-memory");
        for (t, points) in &self.series {
            for p in points {
                w.write_record([t.name(), &p.year.to_string(), &format!("{:.6}", p.value)])
                    .expect("in-memory");
            }
        }
        into_string(w)
    }
}

/// `100·((last/first)^(1/years) − 1)`; undefined unless `first > 0`.
pub fn cagr_percent(first: f64, last: f64, years: u32) -> Result<f64, AnalyticsError> {
    if !(first > 0.0) {
        return Err(AnalyticsError::UndefinedCagr(first));
    }
    Ok(100.0 * ((last / first).powf(1.0 / years as f64) - 1.0))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthRow {
    pub td_type: TdType,
    pub first_value: f64,
    pub last_value: f64,
    pub delta_occurrence: f64,
    /// `None` when the first-year value is zero.
    pub cagr_percent: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthStats {
    pub first_year: i32,
    pub last_year: i32,
    pub rows: Vec<GrowthRow>,
}

pub fn growth(series: &TrendSeries, first_year: i32, last_year: i32) -> Result<GrowthStats, AnalyticsError> {
    if last_year <= first_year {
        return Err(AnalyticsError::InvalidSpan {
            first: first_year,
            last: last_year,
        });
    }
    let years = (last_year - first_year) as u32;
    let mut rows = Vec::new();
    for &t in series.series.keys() {
        let first = series.value(t, first_year).ok_or(AnalyticsError::YearNotInSeries(first_year))?;
        let last = series.value(t, last_year).ok_or(AnalyticsError::YearNotInSeries(last_year))?;
        rows.push(GrowthRow {
            td_type: t,
            first_value: first,
            last_value: last,
            delta_occurrence: last - first,
            cagr_percent: cagr_percent(first, last, years).ok(),
        });
    }
    Ok(GrowthStats {
        first_year,
        last_year,
        rows,
    })
}

impl GrowthStats {
    pub fn row(&self, t: TdType) -> Option<&GrowthRow> {
        self.rows.iter().find(|r| r.td_type == t)
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["td_type", "first_value", "last_value", "delta_occurrence", "cagr_percent"])
            .expect("in-memory");
        for r in &self.rows {
            w.write_record([
                r.td_type.name().to_string(),
                format!("{:.6}", r.first_value),
                format!("{:.6}", r.last_value),
                format!("{:.6}", r.delta_occurrence),
                r.cagr_percent.map(|c| format!("{c:.4}")).unwrap_or_default(),
            ])
            .expect("in-memory");
        }
        into_string(w)
    }
}

/// Reference growth table (ΔOccurrence, growth %), combined platforms.
/// Display constants; the yearly inputs behind them are not available.
pub const REFERENCE_GROWTH: [(TdType, f64, f64); 10] = [
    (TdType::Documentation, 2.14, 5.41),
    (TdType::Build, 0.45, 3.78),
    (TdType::Requirement, 0.61, 3.42),
    (TdType::Architecture, -0.75, -7.15),
    (TdType::Design, 0.17, 0.52),
    (TdType::Usability, 0.05, 1.77),
    (TdType::Code, 0.74, 3.82),
    (TdType::Versioning, -0.03, -5.58),
    (TdType::Test, 1.28, 15.05),
    (TdType::Defect, 1.24, 5.84),
];

/// Reference per-type instance counts: (type, rOpenSci, BioConductor).
pub const REFERENCE_COUNTS: [(TdType, u64, u64); 10] = [
    (TdType::Documentation, 938, 2740),
    (TdType::Design, 740, 2287),
    (TdType::Defect, 511, 1202),
    (TdType::Code, 445, 1157),
    (TdType::Requirement, 406, 776),
    (TdType::Architecture, 293, 893),
    (TdType::Build, 259, 637),
    (TdType::Test, 199, 277),
    (TdType::Usability, 125, 119),
    (TdType::Versioning, 22, 71),
];

/// The reference counts as a per-platform map.
pub fn reference_platform_counts() -> BTreeMap<String, TypeCounts> {
    let mut out = BTreeMap::new();
    out.insert("ropensci".to_string(), REFERENCE_COUNTS.iter().map(|&(t, r, _)| (t, r)).collect());
    out.insert("bioconductor".to_string(), REFERENCE_COUNTS.iter().map(|&(t, _, b)| (t, b)).collect());
    out
}

/// One bubble: x = growth %, y = mean correlation with the other types,
/// size = total instances.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImpactPoint {
    pub td_type: TdType,
    pub growth_percent: Option<f64>,
    pub mean_correlation: Option<f64>,
    pub size: u64,
}

pub fn impact(
    growth: &GrowthStats,
    corr: &CorrelationMatrix,
    totals: &TypeCounts,
) -> Result<Vec<ImpactPoint>, AnalyticsError> {
    let g: BTreeSet<TdType> = growth.rows.iter().map(|r| r.td_type).collect();
    let c: BTreeSet<TdType> = corr.labels.iter().copied().collect();
    let s: BTreeSet<TdType> = totals.keys().copied().collect();
    if g != c || c != s {
        return Err(AnalyticsError::TypeMismatch);
    }
    Ok(corr
        .labels
        .iter()
        .map(|&t| ImpactPoint {
            td_type: t,
            growth_percent: growth.row(t).and_then(|r| r.cagr_percent),
            mean_correlation: corr.mean_off_diagonal(t),
            size: totals[&t],
        })
        .collect())
}

pub fn impact_to_csv(points: &[ImpactPoint]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["td_type", "growth_percent", "mean_correlation", "size"]).expect("in-memory");
    for p in points {
        w.write_record([
            p.td_type.name().to_string(),
            p.growth_percent.map(|x| format!("{x:.4}")).unwrap_or_default(),
            p.mean_correlation.map(|x| format!("{x:.6}")).unwrap_or_default(),
            p.size.to_string(),
        ])
        .expect("in-memory");
    }
    into_string(w)
}

/// Totals per type over all instances, zero-filled.
pub fn type_totals(instances: &[TdInstance]) -> TypeCounts {
    let mut out = zero_counts();
    for i in instances {
        *out.entry(i.td_type).or_default() += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn single_instance_is_everything() {
        let mut counts = BTreeMap::new();
        counts.insert("p".to_string(), [(TdType::Test, 1)].into_iter().collect());
        let d = distribution_from_counts(&counts);
        assert_eq!(d.percent("p", TdType::Test), Some(100.0));
        assert_eq!(d.percent(OVERALL, TdType::Code), Some(0.0));
    }

    #[test]
    fn empty_distribution_is_zero() {
        let d = distribution(&[]);
        assert_eq!(d.scopes.len(), 1);
        assert_eq!(d.scopes[0].total, 0);
    }

    #[test]
    fn spearman_monotone_cases() {
        assert_eq!(spearman(&[1.0, 2.0, 3.0], &[10.0, 20.0, 30.0]), Ok(1.0));
        assert_eq!(spearman(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]), Ok(-1.0));
        assert_eq!(spearman(&[1.0, 1.0, 1.0], &[3.0, 2.0, 1.0]), Err(AnalyticsError::ConstantVector));
        assert_eq!(spearman(&[1.0, 2.0], &[3.0, 2.0]), Err(AnalyticsError::TooFewPoints(2)));
    }

    #[test]
    fn average_ranks() {
        assert_eq!(ranks(&[10.0, 20.0, 20.0, 5.0]), vec![2.0, 3.5, 3.5, 1.0]);
    }

    #[test]
    fn equal_columns_correlate_fully() {
        let mut per = BTreeMap::new();
        for (i, n) in [3u64, 1, 4, 1, 5].into_iter().enumerate() {
            let mut c = zero_counts();
            c.insert(TdType::Code, n);
            c.insert(TdType::Design, n);
            c.insert(TdType::Test, i as u64);
            per.insert(format!("p{i}"), c);
        }
        let m = correlation_matrix(&per).unwrap();
        assert!((m.get(TdType::Code, TdType::Design).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(m.get(TdType::Build, TdType::Code), None);
        assert_eq!(m.get(TdType::Build, TdType::Build), Some(1.0));
    }

    #[test]
    fn trend_quotients() {
        let mut counts = BTreeMap::new();
        counts.insert((TdType::Documentation, 2017), 10);
        counts.insert((TdType::Documentation, 2018), 9);
        counts.insert((TdType::Test, 2018), 2);
        let pby: BTreeMap<i32, u64> = [(2017, 5), (2018, 6)].into_iter().collect();
        let s = trend_from_counts(&counts, &pby).unwrap();
        assert_eq!(s.value(TdType::Documentation, 2017), Some(2.0));
        assert_eq!(s.value(TdType::Documentation, 2018), Some(1.5));
        assert_eq!(s.value(TdType::Test, 2017), Some(0.0));
        assert_eq!(s.value(TdType::Test, 2018), Some(2.0 / 6.0));
        let short: BTreeMap<i32, u64> = [(2017, 5)].into_iter().collect();
        assert_eq!(trend_from_counts(&counts, &short), Err(AnalyticsError::MissingYear(2018)));
    }

    #[test]
    fn cagr_by_hand() {
        assert!((cagr_percent(100.0, 121.0, 2).unwrap() - 10.0).abs() < 1e-9);
        assert_eq!(cagr_percent(3.0, 3.0, 4), Ok(0.0));
        assert!(cagr_percent(0.0, 3.0, 1).is_err());
    }

    #[test]
    fn package_years() {
        let first: BTreeMap<String, i32> =
            [("a", 2016), ("b", 2016), ("c", 2018)].iter().map(|(k, v)| (k.to_string(), *v)).collect();
        let cum = packages_by_year(&first, PackageCountMode::Cumulative);
        assert_eq!(cum.into_iter().collect::<Vec<_>>(), vec![(2016, 2), (2017, 2), (2018, 3)]);
        let per = packages_by_year(&first, PackageCountMode::PerYear);
        assert_eq!(per[&2017], 0);
    }

    #[test]
    fn impact_of_zero_matrix() {
        let n = TdType::ALL.len();
        let corr = CorrelationMatrix {
            labels: TdType::ALL.to_vec(),
            values: (0..n)
                .map(|i| (0..n).map(|j| Some(if i == j { 1.0 } else { 0.0 })).collect())
                .collect(),
        };
        let growth = GrowthStats {
            first_year: 2016,
            last_year: 2020,
            rows: TdType::ALL
                .iter()
                .map(|&t| GrowthRow {
                    td_type: t,
                    first_value: 1.0,
                    last_value: 1.0,
                    delta_occurrence: 0.0,
                    cagr_percent: Some(0.0),
                })
                .collect(),
        };
        let pts = impact(&growth, &corr, &zero_counts()).unwrap();
        assert!(pts.iter().all(|p| p.mean_correlation == Some(0.0)));
        let mut partial = zero_counts();
        partial.remove(&TdType::Test);
        assert_eq!(impact(&growth, &corr, &partial), Err(AnalyticsError::TypeMismatch));
    }

    proptest! {
        #[test]
        fn spearman_symmetric_and_rank_invariant(
            pairs in prop::collection::vec((0u8..6, 0u8..6), 3..40)
        ) {
            let x: Vec<f64> = pairs.iter().map(|p| p.0 as f64).collect();
            let y: Vec<f64> = pairs.iter().map(|p| p.1 as f64).collect();
            let a = spearman(&x, &y);
            prop_assert_eq!(a.clone(), spearman(&y, &x));
            let fx: Vec<f64> = x.iter().map(|v| v.powi(3) + 2.0 * v).collect();
            let b = spearman(&fx, &y);
            match (a, b) {
                (Ok(a), Ok(b)) => prop_assert!((a - b).abs() < 1e-12),
                (a, b) => prop_assert_eq!(a, b),
            }
        }

        #[test]
        fn doubling_packages_halves_trend(
            cells in prop::collection::vec((0usize..10, 2015i32..2021, 0u64..50), 0..30),
            base in 1u64..40,
        ) {
            let counts: BTreeMap<(TdType, i32), u64> =
                cells.iter().map(|&(t, y, c)| ((TdType::ALL[t], y), c)).collect();
            let pby: BTreeMap<i32, u64> = (2015..2021).map(|y| (y, base + y as u64 % 3)).collect();
            let doubled: BTreeMap<i32, u64> = pby.iter().map(|(&y, &n)| (y, 2 * n)).collect();
            let a = trend_from_counts(&counts, &pby).unwrap();
            let b = trend_from_counts(&counts, &doubled).unwrap();
            for t in TdType::ALL {
                for y in 2015..2021 {
                    prop_assert_eq!(b.value(t, y).unwrap(), a.value(t, y).unwrap() / 2.0);
                }
            }
        }
    }
}
