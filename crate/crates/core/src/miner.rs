//! Per-call mining parameters: time of day, duration, frequency, provider,
//! boundary set and conference count.
//!
//! The single-record functions are straightforward scans. [`mine_store`]
//! computes the same values for a whole log using a start-time index, so the
//! window queries cost `O(log n + hits)` instead of `O(n)` each.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::config::{ConfigError, MiningConfig};
use crate::ingest::CallRecord;
use crate::provider::ProviderResolver;
use crate::store::{Direction, LogStore};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamVector {
    pub record_id: u64,
    pub direction: Direction,
    /// Representative instant, epoch seconds.
    pub tod: u64,
    pub duration: u64,
    /// Identity the frequency is counted under; `SELF` for outgoing calls
    /// without a known callee.
    pub frequency_key: String,
    pub frequency: u64,
    pub provider: String,
    pub boundary: BTreeSet<u64>,
    pub conference_count: u64,
}

/// Midpoint of the call, rounded down.
pub fn compute_tod(record: &CallRecord) -> u64 {
    let (a, b) = (record.start, record.end);
    (a & b) + ((a ^ b) >> 1)
}

pub fn compute_duration(record: &CallRecord) -> u64 {
    record.end.abs_diff(record.start)
}

/// Calls in `slice` counted under `key` that start strictly after `t_r`.
pub fn compute_frequency(slice: &[CallRecord], key: &str, t_r: u64) -> u64 {
    slice.iter().filter(|r| r.contact_key() == key && r.start > t_r).count() as u64
}

pub fn resolve_provider(record: &CallRecord, resolver: &dyn ProviderResolver) -> String {
    resolver.resolve(record.contact_key())
}

fn boundary_window(subject: &CallRecord, t_p: u64, t_f: u64) -> (u64, u64) {
    (subject.start.saturating_sub(t_p), subject.end.saturating_add(t_f))
}

/// Ids of other calls whose start lies in `[start - t_p, end + t_f]`.
pub fn compute_boundary(all: &[CallRecord], subject: &CallRecord, t_p: u64, t_f: u64) -> BTreeSet<u64> {
    let (lo, hi) = boundary_window(subject, t_p, t_f);
    all.iter()
        .filter(|r| r.id != subject.id && (lo..=hi).contains(&r.start))
        .map(|r| r.id)
        .collect()
}

/// Other calls whose start and end are both within `epsilon` of the subject's.
pub fn compute_conference_count(all: &[CallRecord], subject: &CallRecord, epsilon: u64) -> u64 {
    all.iter()
        .filter(|r| {
            r.id != subject.id && r.start.abs_diff(subject.start) <= epsilon && r.end.abs_diff(subject.end) <= epsilon
        })
        .count() as u64
}

/// All records sorted by start time, for window queries.
struct StartIndex<'a> {
    sorted: Vec<&'a CallRecord>,
}

impl<'a> StartIndex<'a> {
    fn new(records: impl Iterator<Item = &'a CallRecord>) -> Self {
        let mut sorted: Vec<&CallRecord> = records.collect();
        sorted.sort_by_key(|r| (r.start, r.id));
        Self { sorted }
    }

    fn starting_within(&self, lo: u64, hi: u64) -> &[&'a CallRecord] {
        let from = self.sorted.partition_point(|r| r.start < lo);
        let to = self.sorted.partition_point(|r| r.start <= hi);
        &self.sorted[from..to.max(from)]
    }
}

/// Mines every record of every store.
///
/// Frequency is counted within the record's own store; boundary and
/// conference scans run over the union, since a conference peer may sit in a
/// different store than the subject.
pub fn mine_store(
    store: &LogStore,
    config: &MiningConfig,
    resolver: &dyn ProviderResolver,
) -> Result<BTreeMap<u64, ParamVector>, ConfigError> {
    config.validate()?;
    let all: Vec<CallRecord> = store.iter().cloned().collect();
    let t_r = config.reference_time(&all);
    let index = StartIndex::new(store.iter());

    let mut frequencies: HashMap<(Direction, &str), u64> = HashMap::new();
    for (direction, record) in store.iter_with_direction() {
        if record.start > t_r {
            *frequencies.entry((direction, record.contact_key())).or_default() += 1;
        }
    }

    let mut providers: HashMap<&str, String> = HashMap::new();
    let mut out = BTreeMap::new();
    for (direction, record) in store.iter_with_direction() {
        let (lo, hi) = boundary_window(record, config.t_p, config.t_f);
        let boundary = index
            .starting_within(lo, hi)
            .iter()
            .filter(|r| r.id != record.id)
            .map(|r| r.id)
            .collect();

        let eps = config.epsilon;
        let conference_count = index
            .starting_within(record.start.saturating_sub(eps), record.start.saturating_add(eps))
            .iter()
            .filter(|r| r.id != record.id && r.end.abs_diff(record.end) <= eps)
            .count() as u64;

        let key = record.contact_key();
        let provider = providers.entry(key).or_insert_with(|| resolver.resolve(key)).clone();

        out.insert(
            record.id,
            ParamVector {
                record_id: record.id,
                direction,
                tod: compute_tod(record),
                duration: compute_duration(record),
                frequency_key: key.to_owned(),
                frequency: frequencies.get(&(direction, key)).copied().unwrap_or(0),
                provider,
                boundary,
                conference_count,
            },
        );
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::provider::PrefixTable;
    use crate::store::partition;
    use proptest::prelude::*;

    fn rec(id: u64, start: u64, end: u64) -> CallRecord {
        CallRecord::new(id, format!("+91{}", 9000 + id % 3), "n", start, end)
    }

    #[test]
    fn tod_examples() {
        assert_eq!(compute_tod(&rec(1, 1000, 1600)), 1300);
        assert_eq!(compute_tod(&rec(1, 77, 77)), 77);
        assert_eq!(compute_tod(&rec(1, 0, 1)), 0);
        assert_eq!(compute_tod(&rec(1, u64::MAX - 1, u64::MAX)), u64::MAX - 1);
    }

    #[test]
    fn duration_examples() {
        assert_eq!(compute_duration(&rec(1, 100, 160)), 60);
        assert_eq!(compute_duration(&rec(1, 5, 5)), 0);
        // Records built directly can still carry reversed timestamps.
        assert_eq!(compute_duration(&rec(1, 2000, 1000)), 1000);
    }

    #[test]
    fn frequency_examples() {
        assert_eq!(compute_frequency(&[], "N", 0), 0);
        let slice: Vec<_> = [10, 20, 30, 40, 50]
            .iter()
            .enumerate()
            .map(|(i, &s)| CallRecord::new(i as u64, "N", "n", s, s + 1))
            .collect();
        assert_eq!(compute_frequency(&slice, "N", 25), 3);
        assert_eq!(compute_frequency(&slice, "N", 50), 0);
        assert_eq!(compute_frequency(&slice, "M", 0), 0);
    }

    #[test]
    fn boundary_examples() {
        let subject = rec(0, 1000, 1100);
        assert!(compute_boundary(std::slice::from_ref(&subject), &subject, 100, 100).is_empty());

        let mut all = vec![subject.clone()];
        all.extend(
            [850, 950, 1150, 1250]
                .iter()
                .enumerate()
                .map(|(i, &s)| rec(i as u64 + 1, s, s + 10)),
        );
        assert_eq!(compute_boundary(&all, &subject, 100, 100), BTreeSet::from([2, 3]));

        let far = vec![subject.clone(), rec(9, 2000, 2010)];
        assert!(compute_boundary(&far, &subject, 0, 0).is_empty());
    }

    #[test]
    fn conference_examples() {
        let subject = rec(0, 1000, 1300);
        assert_eq!(compute_conference_count(std::slice::from_ref(&subject), &subject, 5), 0);
        let pair = vec![subject.clone(), rec(1, 1002, 1298)];
        assert_eq!(compute_conference_count(&pair, &subject, 5), 1);
        let all = vec![
            subject.clone(),
            rec(1, 1002, 1298),
            rec(2, 1000, 1400),
            rec(3, 996, 1304),
        ];
        assert_eq!(compute_conference_count(&all, &subject, 5), 2);
    }

    #[test]
    fn mine_empty_and_fixture() {
        let table = PrefixTable::new();
        let cfg = MiningConfig::default();
        assert!(mine_store(&LogStore::default(), &cfg, &table).unwrap().is_empty());

        let records = vec![
            CallRecord::new(1, "SELF", "Me", 100, 160),
            CallRecord::new(2, "+919876543210", "A", 500, 500),
            CallRecord::new(3, "+919876543211", "B", 500, 560),
        ];
        let mined = mine_store(&partition(&records).unwrap(), &cfg, &table).unwrap();
        assert_eq!(mined.len(), 3);
        for r in &records {
            assert_eq!(mined[&r.id].tod, compute_tod(r));
            assert_eq!(mined[&r.id].duration, compute_duration(r));
        }
        assert_eq!(mined[&1].frequency_key, "SELF");
    }

    #[test]
    fn frequency_is_per_store() {
        let records = vec![
            CallRecord::new(1, "+9198", "A", 100, 160),
            CallRecord::new(2, "+9198", "A", 200, 200),
            CallRecord::new(3, "+9198", "A", 300, 360),
        ];
        let cfg = MiningConfig {
            t_r: Some(0),
            ..Default::default()
        };
        let mined = mine_store(&partition(&records).unwrap(), &cfg, &PrefixTable::new()).unwrap();
        assert_eq!(mined[&1].frequency, 2);
        assert_eq!(mined[&2].frequency, 1);
    }

    #[test]
    fn invalid_config_is_rejected() {
        let cfg = MiningConfig {
            k: 0,
            ..Default::default()
        };
        assert!(mine_store(&LogStore::default(), &cfg, &PrefixTable::new()).is_err());
    }

    fn arb_log() -> impl Strategy<Value = Vec<CallRecord>> {
        prop::collection::vec((0u64..500, 0u64..40, 0u8..4), 0..60).prop_map(|raw| {
            raw.into_iter()
                .enumerate()
                .map(|(i, (start, len, who))| {
                    let number = if who == 0 {
                        "SELF".to_string()
                    } else {
                        format!("+91{who}")
                    };
                    CallRecord::new(i as u64, number, "n", start, start + len)
                })
                .collect()
        })
    }

    proptest! {
        #[test]
        fn conference_is_symmetric(log in arb_log(), eps in 0u64..10) {
            for a in &log {
                for b in &log {
                    let ab = compute_conference_count(&[a.clone(), b.clone()], a, eps);
                    let ba = compute_conference_count(&[a.clone(), b.clone()], b, eps);
                    prop_assert_eq!(ab, ba);
                }
            }
        }

        #[test]
        fn windows_are_monotone(log in arb_log(), tp in 0u64..50, tf in 0u64..50, eps in 0u64..10, grow in 1u64..20) {
            for s in &log {
                let small = compute_boundary(&log, s, tp, tf);
                let big = compute_boundary(&log, s, tp + grow, tf + grow);
                prop_assert!(small.is_subset(&big));
                prop_assert!(!small.contains(&s.id));
                prop_assert!(
                    compute_conference_count(&log, s, eps) <= compute_conference_count(&log, s, eps + grow)
                );
            }
        }

        #[test]
        fn frequency_is_additive(log in arb_log(), split in 0u64..500) {
            // Counts strictly after t_r split exactly at any intermediate cut.
            for key in ["SELF", "+911", "+912", "+913"] {
                let total = compute_frequency(&log, key, 0);
                let late = compute_frequency(&log, key, split);
                let early: Vec<_> = log.iter().filter(|r| r.start <= split).cloned().collect();
                prop_assert_eq!(compute_frequency(&early, key, 0) + late, total);
            }
        }

        #[test]
        fn mine_store_matches_per_record_operations(log in arb_log(), tp in 0u64..60, tf in 0u64..60, eps in 0u64..8) {
            let table = PrefixTable::from_pairs([("1", "P1"), ("2", "P2")]).unwrap().with_self_provider("P0");
            let cfg = MiningConfig { t_r: Some(100), t_p: tp, t_f: tf, epsilon: eps, ..Default::default() };
            let store = partition(&log).unwrap();
            let mined = mine_store(&store, &cfg, &table).unwrap();
            prop_assert_eq!(mined.len(), log.len());
            for (direction, r) in store.iter_with_direction() {
                let p = &mined[&r.id];
                prop_assert_eq!(p.tod, compute_tod(r));
                prop_assert_eq!(p.duration, compute_duration(r));
                prop_assert_eq!(p.frequency, compute_frequency(store.get(direction), r.contact_key(), 100));
                prop_assert_eq!(&p.provider, &resolve_provider(r, &table));
                prop_assert_eq!(&p.boundary, &compute_boundary(&log, r, tp, tf));
                prop_assert_eq!(p.conference_count, compute_conference_count(&log, r, eps));
            }
        }
    }
}
