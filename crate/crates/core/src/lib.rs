//! Call-log mining.
//!
//! The pipeline runs in this order:
//!
//! 1. [`ingest`] parses CSV or JSON-lines exports into [`CallRecord`]s.
//! 2. [`store`] partitions them into incoming, outgoing and missed stores.
//! 3. [`miner`] computes six parameters per call: time of day, duration,
//!    frequency, provider, boundary set and conference count.
//! 4. [`cluster`] runs seeded k-means over derived features.
//! 5. [`reporter`] renders frequency, calendar, time-of-day and portability
//!    reports as canonical JSON or text.
//!
//! [`eval`] reproduces the relevance-session arithmetic, and [`synth`]
//! generates deterministic test logs.

pub mod canonical;
pub mod cluster;
pub mod config;
pub mod eval;
pub mod ingest;
pub mod miner;
pub mod provider;
pub mod reporter;
pub mod store;
pub mod synth;

pub use cluster::{brute_force_optimal, kmeans, label_clusters, ClusterError, Clustering, FeaturePoint};
pub use config::{ConfigError, MiningConfig};
pub use eval::{summarize, EvalError, RelevanceSummary, SessionScore};
pub use ingest::{CallRecord, IngestError, ParseMode, ParseReport, SELF_NUMBER, UNKNOWN_NAME};
pub use miner::{mine_store, ParamVector};
pub use provider::{PrefixTable, PrefixTableError, ProviderResolver, UNKNOWN_PROVIDER};
pub use reporter::{
    calendar_report, frequency_report, mnp_advice, mnp_report, render, tod_report, CalendarView, Format, FrequencyMode,
    MnpAdvice, Report, ReportError, ReportKind, Row, TodBand,
};
pub use store::{partition, store_counts, Direction, LogStore, StoreCounts, StoreError};
pub use synth::{gen_synthetic, GeneratorProfile, PlantedCluster};
