//! Report families: frequency (count and cluster), calendar (month, ISO week,
//! day), time-of-day bands, and number-portability advice.
//!
//! Every report carries the resolved [`MiningConfig`] it was produced with.
//! Reals inside a report are quantized to four decimals at construction so
//! the canonical JSON form parses back to an identical [`Report`].

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use chrono::{DateTime, Datelike, NaiveDateTime};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::canonical::{quantize, to_canonical_string};
use crate::cluster::{kmeans, label_clusters, ClusterError, FeaturePoint};
use crate::config::{ConfigError, MiningConfig};
use crate::ingest::{CallRecord, SELF_NUMBER};
use crate::miner::{compute_duration, compute_tod, ParamVector};
use crate::provider::{ProviderResolver, UNKNOWN_PROVIDER};
use crate::store::LogStore;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ReportKind {
    FrequencyCount,
    FrequencyCluster,
    CalendarMV,
    CalendarWV,
    CalendarDV,
    TodMR,
    TodAR,
    TodER,
    MNP,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrequencyMode {
    Count,
    Cluster,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CalendarView {
    Month,
    Week,
    Day,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TodBand {
    Morning,
    Afternoon,
    Evening,
}

impl TodBand {
    pub const ALL: [TodBand; 3] = [TodBand::Morning, TodBand::Afternoon, TodBand::Evening];

    pub fn kind(self) -> ReportKind {
        match self {
            TodBand::Morning => ReportKind::TodMR,
            TodBand::Afternoon => ReportKind::TodAR,
            TodBand::Evening => ReportKind::TodER,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
}

/// One report line. Which optional columns appear depends on the kind:
///
/// | kind              | key        | count | label | value     | duration |
/// |-------------------|------------|-------|-------|-----------|----------|
/// | FrequencyCount    | contact    | calls |       |           |          |
/// | FrequencyCluster  | contact    | calls | `Lk`  | centroid  |          |
/// | Calendar*         | bucket     | calls |       |           |          |
/// | Tod*              | contact    | calls |       |           |          |
/// | MNP               | provider   | calls |       | index     | seconds  |
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub key: String,
    pub count: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duration: Option<u64>,
}

impl Row {
    fn count(key: impl Into<String>, count: u64) -> Self {
        Self {
            key: key.into(),
            count,
            label: None,
            value: None,
            duration: None,
        }
    }
}

/// Which traffic the portability index was computed from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TrafficBasis {
    /// Outgoing calls with a known callee.
    Outgoing,
    /// Answered incoming calls; used when no outgoing call names its callee.
    Incoming,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MnpAdvice {
    pub current_provider: String,
    pub per_provider_index: BTreeMap<String, f64>,
    pub best_alternative: Option<String>,
    pub advised: bool,
    pub threshold: f64,
    pub basis: TrafficBasis,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub kind: ReportKind,
    pub generated_at: i64,
    pub config_echo: MiningConfig,
    pub rows: Vec<Row>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub caveats: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub advice: Option<MnpAdvice>,
}

impl Report {
    fn new(kind: ReportKind, now: i64, config: MiningConfig, rows: Vec<Row>) -> Self {
        let mut report = Self {
            kind,
            generated_at: now,
            config_echo: config,
            rows,
            caveats: Vec::new(),
            advice: None,
        };
        report.quantize();
        report
    }

    fn quantize(&mut self) {
        self.config_echo.lambda = quantize(self.config_echo.lambda);
        self.config_echo.port_threshold = quantize(self.config_echo.port_threshold);
        for row in &mut self.rows {
            row.value = row.value.map(quantize);
        }
        if let Some(advice) = &mut self.advice {
            advice.threshold = quantize(advice.threshold);
            advice.per_provider_index.values_mut().for_each(|v| *v = quantize(*v));
        }
    }

    /// Sum of row counts.
    pub fn total_count(&self) -> u64 {
        self.rows.iter().map(|r| r.count).sum()
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ReportError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("cannot form {k} clusters from {distinct} distinct frequencies; lower --k to at most {distinct}")]
    TooManyClusters { k: usize, distinct: usize },
    #[error(transparent)]
    Cluster(ClusterError),
    #[error("no mined parameters for record {0}; mine with the same log and config")]
    MissingParams(u64),
    #[error("record {0}: timestamp outside the supported calendar range")]
    TimestampOutOfRange(u64),
    #[error("no analyzable traffic for the portability index")]
    EmptyTraffic,
}

impl From<ClusterError> for ReportError {
    fn from(e: ClusterError) -> Self {
        match e {
            ClusterError::TooManyClusters { k, distinct } => ReportError::TooManyClusters { k, distinct },
            other => ReportError::Cluster(other),
        }
    }
}

const SELF_KEY_CAVEAT: &str =
    "outgoing calls carry no peer_number; their frequency is pooled under SELF and per-callee counts are unavailable";

fn all_records(store: &LogStore) -> Vec<CallRecord> {
    store.iter().cloned().collect()
}

fn count_rows(counts: HashMap<&str, u64>) -> Vec<Row> {
    let mut rows: Vec<Row> = counts.into_iter().map(|(k, c)| Row::count(k, c)).collect();
    rows.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.key.cmp(&b.key)));
    rows
}

/// Calls per contact since the reference time.
///
/// Count mode sorts by count descending, then key. Cluster mode runs k-means
/// over the 1-D counts with `config.k` and `config.seed` and sorts by band
/// (`L1` first), then count descending, then key.
pub fn frequency_report(
    store: &LogStore,
    config: &MiningConfig,
    mode: FrequencyMode,
    now: i64,
) -> Result<Report, ReportError> {
    config.validate()?;
    let records = all_records(store);
    let config = config.resolved(&records);
    let t_r = config.t_r.unwrap_or(0);

    let mut counts: HashMap<&str, u64> = HashMap::new();
    for r in records.iter().filter(|r| r.start > t_r) {
        *counts.entry(r.contact_key()).or_default() += 1;
    }
    let pooled_self = counts.contains_key(SELF_NUMBER);
    let mut rows = count_rows(counts);

    let kind = match mode {
        FrequencyMode::Count => ReportKind::FrequencyCount,
        FrequencyMode::Cluster => {
            let points: Vec<FeaturePoint> = rows
                .iter()
                .map(|r| FeaturePoint::scalar(r.key.clone(), r.count as f64))
                .collect();
            if points.is_empty() {
                return Err(ReportError::TooManyClusters {
                    k: config.k,
                    distinct: 0,
                });
            }
            let clustering = kmeans(&points, config.k, config.seed)?;
            let labels = label_clusters(&clustering)?;
            let rank = |label: &str| label[1..].parse::<usize>().unwrap_or(usize::MAX);
            for row in &mut rows {
                let c = clustering.assignments[&row.key];
                row.label = Some(labels[c].clone());
                row.value = Some(clustering.centroids[c][0]);
            }
            rows.sort_by(|a, b| {
                rank(a.label.as_deref().unwrap_or(""))
                    .cmp(&rank(b.label.as_deref().unwrap_or("")))
                    .then(b.count.cmp(&a.count))
                    .then_with(|| a.key.cmp(&b.key))
            });
            ReportKind::FrequencyCluster
        }
    };
    let mut report = Report::new(kind, now, config, rows);
    if pooled_self {
        report.caveats.push(SELF_KEY_CAVEAT.to_owned());
    }
    Ok(report)
}

fn local_datetime(record: &CallRecord, tod: u64, utc_offset: i32) -> Result<NaiveDateTime, ReportError> {
    let secs = i64::try_from(tod)
        .ok()
        .and_then(|t| t.checked_add(i64::from(utc_offset) * 60))
        .ok_or(ReportError::TimestampOutOfRange(record.id))?;
    DateTime::from_timestamp(secs, 0)
        .map(|dt| dt.naive_utc())
        .ok_or(ReportError::TimestampOutOfRange(record.id))
}

pub fn calendar_bucket(local: &NaiveDateTime, view: CalendarView) -> String {
    match view {
        CalendarView::Month => format!("{:04}-{:02}", local.year(), local.month()),
        CalendarView::Week => {
            let week = local.iso_week();
            format!("{:04}-W{:02}", week.year(), week.week())
        }
        CalendarView::Day => format!("{:04}-{:02}-{:02}", local.year(), local.month(), local.day()),
    }
}

/// Calls per local calendar bucket of their midpoint, ascending by bucket.
/// Weeks follow ISO-8601 (`YYYY-Www`, weeks start on Monday).
pub fn calendar_report(
    store: &LogStore,
    config: &MiningConfig,
    view: CalendarView,
    now: i64,
) -> Result<Report, ReportError> {
    config.validate()?;
    let records = all_records(store);
    let mut buckets: BTreeMap<String, u64> = BTreeMap::new();
    for r in &records {
        let local = local_datetime(r, compute_tod(r), config.utc_offset)?;
        *buckets.entry(calendar_bucket(&local, view)).or_default() += 1;
    }
    let kind = match view {
        CalendarView::Month => ReportKind::CalendarMV,
        CalendarView::Week => ReportKind::CalendarWV,
        CalendarView::Day => ReportKind::CalendarDV,
    };
    let rows = buckets.into_iter().map(|(k, c)| Row::count(k, c)).collect();
    Ok(Report::new(kind, now, config.resolved(&records), rows))
}

/// Band for a local hour: morning from `b[0]`, afternoon from `b[1]`, evening
/// from `b[2]` through midnight until the next morning.
pub fn tod_band(hour: u32, boundaries: [u8; 3]) -> TodBand {
    let [m, a, e] = boundaries.map(u32::from);
    if (m..a).contains(&hour) {
        TodBand::Morning
    } else if (a..e).contains(&hour) {
        TodBand::Afternoon
    } else {
        TodBand::Evening
    }
}

/// Local hour of an epoch instant.
pub fn local_hour(epoch: u64, utc_offset: i32) -> u32 {
    let secs = i128::from(epoch) + i128::from(utc_offset) * 60;
    (secs.rem_euclid(86_400) / 3600) as u32
}

/// Morning, afternoon and evening reports, in that order. Each lists calls per
/// contact, count descending then key.
pub fn tod_report(
    store: &LogStore,
    params: &BTreeMap<u64, ParamVector>,
    config: &MiningConfig,
    now: i64,
) -> Result<Vec<Report>, ReportError> {
    config.validate()?;
    let records = all_records(store);
    let mut per_band: BTreeMap<TodBand, HashMap<&str, u64>> = BTreeMap::new();
    for r in &records {
        let p = params.get(&r.id).ok_or(ReportError::MissingParams(r.id))?;
        let band = tod_band(local_hour(p.tod, config.utc_offset), config.tod_boundaries);
        *per_band
            .entry(band)
            .or_default()
            .entry(p.frequency_key.as_str())
            .or_default() += 1;
    }
    let resolved = config.resolved(&records);
    Ok(TodBand::ALL
        .iter()
        .map(|&band| {
            let rows = count_rows(per_band.remove(&band).unwrap_or_default());
            Report::new(band.kind(), now, resolved.clone(), rows)
        })
        .collect())
}

#[derive(Debug, Clone, Default, PartialEq)]
struct Traffic {
    calls: u64,
    duration: u64,
}

/// Portability index per provider and the resulting advice.
///
/// `PI(p) = lambda * calls(p) / calls + (1 - lambda) * duration(p) / duration`.
/// When every analyzed call lasted zero seconds the duration share falls back
/// to the call share. The best alternative excludes the current provider and
/// `UNKNOWN`; ties go to the alphabetically first provider. Advice requires
/// the alternative's index to exceed the threshold strictly.
pub fn mnp_advice(
    store: &LogStore,
    resolver: &dyn ProviderResolver,
    config: &MiningConfig,
    current_provider: &str,
) -> Result<MnpAdvice, ReportError> {
    config.validate()?;
    let (basis, calls): (TrafficBasis, Vec<&CallRecord>) = {
        let outgoing: Vec<&CallRecord> = store.oc.iter().filter(|r| r.peer_number.is_some()).collect();
        if outgoing.is_empty() {
            (TrafficBasis::Incoming, store.ic.iter().collect())
        } else {
            (TrafficBasis::Outgoing, outgoing)
        }
    };
    let traffic = provider_traffic(&calls, resolver);
    let total_calls: u64 = traffic.values().map(|t| t.calls).sum();
    let total_duration: u64 = traffic.values().map(|t| t.duration).sum();
    if total_calls == 0 {
        return Err(ReportError::EmptyTraffic);
    }
    let lambda = config.lambda;
    let per_provider_index: BTreeMap<String, f64> = traffic
        .iter()
        .map(|(p, t)| {
            let call_share = t.calls as f64 / total_calls as f64;
            let duration_share = if total_duration == 0 {
                call_share
            } else {
                t.duration as f64 / total_duration as f64
            };
            (p.clone(), lambda * call_share + (1.0 - lambda) * duration_share)
        })
        .collect();

    let mut best_alternative: Option<(&String, f64)> = None;
    for (p, &pi) in &per_provider_index {
        if p == current_provider || p == UNKNOWN_PROVIDER {
            continue;
        }
        if best_alternative.is_none_or(|(_, b)| pi > b) {
            best_alternative = Some((p, pi));
        }
    }
    let advised = best_alternative.is_some_and(|(_, pi)| pi > config.port_threshold);
    Ok(MnpAdvice {
        current_provider: current_provider.to_owned(),
        best_alternative: best_alternative.map(|(p, _)| p.clone()),
        per_provider_index,
        advised,
        threshold: config.port_threshold,
        basis,
    })
}

fn provider_traffic(calls: &[&CallRecord], resolver: &dyn ProviderResolver) -> BTreeMap<String, Traffic> {
    let mut traffic: BTreeMap<String, Traffic> = BTreeMap::new();
    let mut cache: HashMap<&str, String> = HashMap::new();
    for r in calls {
        let key = r.contact_key();
        let provider = cache.entry(key).or_insert_with(|| resolver.resolve(key)).clone();
        let t = traffic.entry(provider).or_default();
        t.calls += 1;
        t.duration += compute_duration(r);
    }
    traffic
}

/// Portability report: one row per provider (calls, seconds, index) plus the
/// advice. Zero analyzable traffic yields an empty, unadvised report flagged
/// with a caveat.
pub fn mnp_report(
    store: &LogStore,
    resolver: &dyn ProviderResolver,
    config: &MiningConfig,
    current_provider: &str,
    now: i64,
) -> Result<Report, ReportError> {
    let records = all_records(store);
    let resolved = config.resolved(&records);
    let (advice, rows, mut caveats) = match mnp_advice(store, resolver, config, current_provider) {
        Ok(advice) => {
            let calls: Vec<&CallRecord> = match advice.basis {
                TrafficBasis::Outgoing => store.oc.iter().filter(|r| r.peer_number.is_some()).collect(),
                TrafficBasis::Incoming => store.ic.iter().collect(),
            };
            let traffic = provider_traffic(&calls, resolver);
            let rows = traffic
                .into_iter()
                .map(|(p, t)| Row {
                    value: Some(advice.per_provider_index[&p]),
                    duration: Some(t.duration),
                    ..Row::count(p, t.calls)
                })
                .collect();
            (advice, rows, Vec::new())
        }
        Err(ReportError::EmptyTraffic) => (
            MnpAdvice {
                current_provider: current_provider.to_owned(),
                per_provider_index: BTreeMap::new(),
                best_alternative: None,
                advised: false,
                threshold: config.port_threshold,
                basis: if store.oc.iter().any(|r| r.peer_number.is_some()) {
                    TrafficBasis::Outgoing
                } else {
                    TrafficBasis::Incoming
                },
            },
            Vec::new(),
            vec![ReportError::EmptyTraffic.to_string()],
        ),
        Err(e) => return Err(e),
    };
    if advice.basis == TrafficBasis::Incoming {
        caveats.insert(
            0,
            "degraded: no outgoing call carries a peer_number, so the index is computed from answered incoming calls"
                .to_owned(),
        );
    }
    let mut report = Report::new(ReportKind::MNP, now, resolved, rows);
    report.advice = Some(advice);
    report.caveats = caveats;
    report.quantize();
    Ok(report)
}

pub fn render(report: &Report, format: Format) -> Vec<u8> {
    match format {
        Format::Json => render_json(report),
        Format::Text => render_text(report).into_bytes(),
    }
}

/// Canonical JSON of any serializable value (reports, lists of reports,
/// parameter dumps).
pub fn render_json<T: Serialize + ?Sized>(value: &T) -> Vec<u8> {
    to_canonical_string(value)
        .expect("report types always serialize")
        .into_bytes()
}

fn fmt_real(x: f64) -> String {
    format!("{:.4}", quantize(x))
}

pub fn render_text(report: &Report) -> String {
    let mut out = String::new();
    writeln!(out, "# {:?} generated_at={}", report.kind, report.generated_at).unwrap();
    for c in &report.caveats {
        writeln!(out, "# note: {c}").unwrap();
    }
    if let Some(a) = &report.advice {
        writeln!(
            out,
            "# current={} best_alternative={} advised={} threshold={} basis={:?}",
            a.current_provider,
            a.best_alternative.as_deref().unwrap_or("-"),
            a.advised,
            fmt_real(a.threshold),
            a.basis
        )
        .unwrap();
    }

    let has_label = report.rows.iter().any(|r| r.label.is_some());
    let has_value = report.rows.iter().any(|r| r.value.is_some());
    let has_duration = report.rows.iter().any(|r| r.duration.is_some());
    let mut table: Vec<Vec<String>> = Vec::with_capacity(report.rows.len() + 1);
    let mut header = vec!["key".to_string(), "count".to_string()];
    if has_label {
        header.push("label".into());
    }
    if has_value {
        header.push(
            if report.kind == ReportKind::MNP {
                "index"
            } else {
                "centroid"
            }
            .into(),
        );
    }
    if has_duration {
        header.push("duration".into());
    }
    table.push(header);
    for r in &report.rows {
        let mut line = vec![r.key.clone(), r.count.to_string()];
        if has_label {
            line.push(r.label.clone().unwrap_or_default());
        }
        if has_value {
            line.push(r.value.map(fmt_real).unwrap_or_default());
        }
        if has_duration {
            line.push(r.duration.map(|d| d.to_string()).unwrap_or_default());
        }
        table.push(line);
    }
    let widths: Vec<usize> = (0..table[0].len())
        .map(|c| table.iter().map(|row| row[c].chars().count()).max().unwrap_or(0))
        .collect();
    for row in &table {
        let cells: Vec<String> = row
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(i, (cell, &w))| {
                if i == 0 {
                    format!("{cell:<w$}")
                } else {
                    format!("{cell:>w$}")
                }
            })
            .collect();
        writeln!(out, "{}", cells.join("  ").trim_end()).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::miner::mine_store;
    use crate::provider::PrefixTable;
    use crate::store::partition;

    // 2013-05-01 00:00:00 UTC
    const MAY_1_2013: u64 = 1_367_366_400;
    const HOUR: u64 = 3600;
    const DAY: u64 = 86_400;

    fn cfg() -> MiningConfig {
        MiningConfig {
            t_r: Some(0),
            ..Default::default()
        }
    }

    fn calls(spec: &[(&str, usize)]) -> Vec<CallRecord> {
        let mut out = Vec::new();
        for (number, n) in spec {
            for _ in 0..*n {
                let id = out.len() as u64;
                out.push(CallRecord::new(id, *number, "x", 1000 + id * 100, 1000 + id * 100 + 30));
            }
        }
        out
    }

    #[test]
    fn frequency_count_empty() {
        let r = frequency_report(&LogStore::default(), &cfg(), FrequencyMode::Count, 0).unwrap();
        assert!(r.rows.is_empty());
        assert_eq!(r.kind, ReportKind::FrequencyCount);
    }

    #[test]
    fn frequency_count_sorted() {
        let store = partition(&calls(&[("C", 2), ("A", 5), ("B", 2)])).unwrap();
        let r = frequency_report(&store, &cfg(), FrequencyMode::Count, 0).unwrap();
        let got: Vec<(&str, u64)> = r.rows.iter().map(|r| (r.key.as_str(), r.count)).collect();
        assert_eq!(got, vec![("A", 5), ("B", 2), ("C", 2)]);
    }

    #[test]
    fn frequency_respects_reference_time() {
        let store = partition(&calls(&[("A", 5)])).unwrap();
        // starts are 1000, 1100, ..., 1400
        let c = MiningConfig {
            t_r: Some(1200),
            ..Default::default()
        };
        let r = frequency_report(&store, &c, FrequencyMode::Count, 0).unwrap();
        assert_eq!(r.rows[0].count, 2);
    }

    #[test]
    fn frequency_cluster_bands() {
        let store = partition(&calls(&[("A", 9), ("B", 8), ("C", 1)])).unwrap();
        let c = MiningConfig { k: 2, ..cfg() };
        let r = frequency_report(&store, &c, FrequencyMode::Cluster, 0).unwrap();
        let got: Vec<(&str, &str)> = r
            .rows
            .iter()
            .map(|r| (r.key.as_str(), r.label.as_deref().unwrap()))
            .collect();
        assert_eq!(got, vec![("A", "L1"), ("B", "L1"), ("C", "L2")]);
        assert_eq!(r.rows[0].value, Some(8.5));
    }

    #[test]
    fn frequency_cluster_too_many() {
        let store = partition(&calls(&[("A", 2), ("B", 2)])).unwrap();
        let err = frequency_report(&store, &cfg(), FrequencyMode::Cluster, 0).unwrap_err();
        assert_eq!(err, ReportError::TooManyClusters { k: 3, distinct: 1 });
        assert!(err.to_string().contains("lower --k"));
    }

    #[test]
    fn self_pooling_is_flagged() {
        let store = partition(&calls(&[("SELF", 2), ("A", 1)])).unwrap();
        let r = frequency_report(&store, &cfg(), FrequencyMode::Count, 0).unwrap();
        assert_eq!(r.caveats.len(), 1);
    }

    #[test]
    fn calendar_views() {
        let records = vec![
            CallRecord::new(1, "a", "x", MAY_1_2013 + 10 * HOUR, MAY_1_2013 + 10 * HOUR + 60),
            CallRecord::new(2, "a", "x", MAY_1_2013 + 20 * HOUR, MAY_1_2013 + 20 * HOUR + 60),
            CallRecord::new(3, "a", "x", MAY_1_2013 + DAY + HOUR, MAY_1_2013 + DAY + HOUR + 60),
        ];
        let store = partition(&records).unwrap();
        let dv = calendar_report(&store, &cfg(), CalendarView::Day, 0).unwrap();
        let got: Vec<(&str, u64)> = dv.rows.iter().map(|r| (r.key.as_str(), r.count)).collect();
        assert_eq!(got, vec![("2013-05-01", 2), ("2013-05-02", 1)]);
        let mv = calendar_report(&store, &cfg(), CalendarView::Month, 0).unwrap();
        assert_eq!(mv.rows, vec![Row::count("2013-05", 3)]);
    }

    #[test]
    fn calendar_uses_midpoint_and_offset() {
        // 23:50 to 00:20 UTC: midpoint 00:05 on May 2.
        let start = MAY_1_2013 + 23 * HOUR + 50 * 60;
        let store = partition(&[CallRecord::new(1, "a", "x", start, start + 30 * 60)]).unwrap();
        let dv = calendar_report(&store, &cfg(), CalendarView::Day, 0).unwrap();
        assert_eq!(dv.rows[0].key, "2013-05-02");
        let west = MiningConfig {
            utc_offset: -60,
            ..cfg()
        };
        let dv = calendar_report(&store, &west, CalendarView::Day, 0).unwrap();
        assert_eq!(dv.rows[0].key, "2013-05-01");
    }

    #[test]
    fn iso_week_bucket() {
        // 2013-05-05 is a Sunday, still ISO week 18.
        let t = MAY_1_2013 + 4 * DAY + 12 * HOUR;
        let store = partition(&[CallRecord::new(1, "a", "x", t, t)]).unwrap();
        let wv = calendar_report(&store, &cfg(), CalendarView::Week, 0).unwrap();
        assert_eq!(wv.rows[0].key, "2013-W18");
    }

    #[test]
    fn tod_bands() {
        let b = [5, 12, 18];
        assert_eq!(tod_band(8, b), TodBand::Morning);
        assert_eq!(tod_band(2, b), TodBand::Evening);
        assert_eq!(tod_band(12, b), TodBand::Afternoon);
        assert_eq!(tod_band(18, b), TodBand::Evening);
        assert_eq!(tod_band(4, b), TodBand::Evening);
        assert_eq!(tod_band(5, b), TodBand::Morning);
        assert_eq!(local_hour(MAY_1_2013 + 8 * HOUR, 0), 8);
        assert_eq!(local_hour(MAY_1_2013 + HOUR, -120), 23);
        assert_eq!(local_hour(30 * 60, -60), 23);
    }

    #[test]
    fn tod_report_uniform_day() {
        // Ten calls at 00:00, 02:24, ..., 21:36 (every 2.4 h), zero length.
        let records: Vec<_> = (0..10)
            .map(|i| {
                let t = MAY_1_2013 + i * 8640;
                CallRecord::new(i, format!("n{i}"), "x", t, t + 2)
            })
            .collect();
        // Hours 0,2,4,7,9,12,14,16,19,21 -> MR {7,9}, AR {12,14,16}, ER rest.
        let store = partition(&records).unwrap();
        let params = mine_store(&store, &cfg(), &PrefixTable::new()).unwrap();
        let reports = tod_report(&store, &params, &cfg(), 0).unwrap();
        let sizes: Vec<u64> = reports.iter().map(Report::total_count).collect();
        assert_eq!(sizes, vec![2, 3, 5]);
        assert_eq!(
            reports.iter().map(|r| r.kind).collect::<Vec<_>>(),
            vec![ReportKind::TodMR, ReportKind::TodAR, ReportKind::TodER]
        );
    }

    #[test]
    fn tod_report_needs_params() {
        let store = partition(&calls(&[("A", 1)])).unwrap();
        let err = tod_report(&store, &BTreeMap::new(), &cfg(), 0).unwrap_err();
        assert_eq!(err, ReportError::MissingParams(0));
    }

    fn mnp_fixture() -> (LogStore, PrefixTable) {
        let mut records = Vec::new();
        for i in 0..8 {
            records.push(CallRecord::new(i, "SELF", "me", 1000 * i, 1000 * i + 50).with_peer("+919800000000"));
        }
        for i in 8..10 {
            records.push(CallRecord::new(i, "SELF", "me", 1000 * i, 1000 * i + 50).with_peer("+917000000000"));
        }
        let table = PrefixTable::from_pairs([("98", "P2"), ("70", "P1")]).unwrap();
        (partition(&records).unwrap(), table)
    }

    #[test]
    fn mnp_advises_dominant_alternative() {
        let (store, table) = mnp_fixture();
        let advice = mnp_advice(&store, &table, &cfg(), "P1").unwrap();
        assert!((advice.per_provider_index["P2"] - 0.8).abs() < 1e-12);
        assert!((advice.per_provider_index["P1"] - 0.2).abs() < 1e-12);
        assert_eq!(advice.best_alternative.as_deref(), Some("P2"));
        assert!(advice.advised);
        assert_eq!(advice.basis, TrafficBasis::Outgoing);

        let strict = MiningConfig {
            port_threshold: 1.0,
            ..cfg()
        };
        assert!(!mnp_advice(&store, &table, &strict, "P1").unwrap().advised);
    }

    #[test]
    fn mnp_all_current() {
        let (store, table) = mnp_fixture();
        let advice = mnp_advice(&store, &table, &cfg(), "P2").unwrap();
        assert_eq!(advice.best_alternative.as_deref(), Some("P1"));
        assert!(!advice.advised);

        let only_current = partition(&[CallRecord::new(1, "SELF", "me", 0, 10).with_peer("+919811111111")]).unwrap();
        let advice = mnp_advice(&only_current, &table, &cfg(), "P2").unwrap();
        assert_eq!(advice.per_provider_index["P2"], 1.0);
        assert_eq!(advice.best_alternative, None);
        assert!(!advice.advised);
    }

    #[test]
    fn mnp_empty_and_degraded() {
        let table = PrefixTable::from_pairs([("98", "P2")]).unwrap();
        assert_eq!(
            mnp_advice(&LogStore::default(), &table, &cfg(), "P1"),
            Err(ReportError::EmptyTraffic)
        );
        let r = mnp_report(&LogStore::default(), &table, &cfg(), "P1", 0).unwrap();
        assert!(r.rows.is_empty());
        assert!(!r.advice.as_ref().unwrap().advised);
        assert!(r.advice.as_ref().unwrap().per_provider_index.is_empty());

        let incoming = partition(&[CallRecord::new(1, "+919800000000", "a", 0, 10)]).unwrap();
        let r = mnp_report(&incoming, &table, &cfg(), "P1", 0).unwrap();
        assert_eq!(r.advice.as_ref().unwrap().basis, TrafficBasis::Incoming);
        assert!(r.caveats[0].starts_with("degraded"));
        assert!(r.advice.unwrap().advised);
    }

    #[test]
    fn mnp_zero_duration_falls_back_to_call_share() {
        let table = PrefixTable::from_pairs([("98", "P2"), ("70", "P1")]).unwrap();
        let records = vec![
            CallRecord::new(1, "SELF", "me", 5, 5).with_peer("9800"),
            CallRecord::new(2, "SELF", "me", 6, 6).with_peer("7000"),
        ];
        let advice = mnp_advice(&partition(&records).unwrap(), &table, &cfg(), "P1").unwrap();
        assert_eq!(advice.per_provider_index["P2"], 0.5);
    }

    #[test]
    fn json_render_is_stable_and_round_trips() {
        let (store, table) = mnp_fixture();
        let r = mnp_report(&store, &table, &cfg(), "P1", 7).unwrap();
        let a = render(&r, Format::Json);
        assert_eq!(a, render(&r, Format::Json));
        let back: Report = serde_json::from_slice(&a).unwrap();
        assert_eq!(back, r);

        let empty = frequency_report(&LogStore::default(), &cfg(), FrequencyMode::Count, 0).unwrap();
        let text = String::from_utf8(render(&empty, Format::Json)).unwrap();
        assert!(text.contains("\"rows\": []"));
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["kind"], "FrequencyCount");
    }

    #[test]
    fn text_render_is_aligned() {
        let store = partition(&calls(&[("A", 12), ("Bee", 2)])).unwrap();
        let r = frequency_report(&store, &cfg(), FrequencyMode::Count, 0).unwrap();
        let text = render_text(&r);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[1], "key  count");
        assert_eq!(lines[2], "A       12");
        assert_eq!(lines[3], "Bee      2");
    }
}
