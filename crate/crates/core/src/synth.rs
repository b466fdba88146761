//! Seeded synthetic call logs for tests, benchmarks and demos.
//!
//! Randomness comes from ChaCha8 seeded via `seed_from_u64`, so a profile
//! always yields the same log.

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{CallRecord, SELF_NUMBER, UNKNOWN_NAME};

/// 2013-05-01 00:00:00 UTC.
pub const DEFAULT_SPAN_START: u64 = 1_367_366_400;
/// Four weeks, which keeps every call inside the default 30-day reference window.
pub const DEFAULT_SPAN_LEN: u64 = 28 * 86_400;

/// Leading national digits cycled through by contact index.
pub const CONTACT_PREFIXES: [&str; 5] = ["98", "97", "70", "80", "90"];

/// Per-contact call counts drawn uniformly from `center ± spread` (at least 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlantedCluster {
    pub center: u32,
    pub spread: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorProfile {
    pub seed: u64,
    /// Total calls. Ignored when `planted_clusters` is non-empty: the planted
    /// per-contact counts then fix the total.
    pub n: usize,
    pub contacts: usize,
    /// Contact `i` belongs to cluster `i % planted_clusters.len()`.
    pub planted_clusters: Vec<PlantedCluster>,
    pub conference_rate: f64,
    pub missed_rate: f64,
    pub outgoing_rate: f64,
    pub time_span: (u64, u64),
}

impl Default for GeneratorProfile {
    fn default() -> Self {
        Self {
            seed: 42,
            n: 1000,
            contacts: 50,
            planted_clusters: Vec::new(),
            conference_rate: 0.02,
            missed_rate: 0.1,
            outgoing_rate: 0.4,
            time_span: (DEFAULT_SPAN_START, DEFAULT_SPAN_START + DEFAULT_SPAN_LEN),
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ProfileError {
    #[error("{0} must be a probability in [0, 1]")]
    BadProbability(&'static str),
    #[error("time span end precedes its start")]
    BadSpan,
    #[error("calls requested but no contacts to place them with")]
    NoContacts,
}

impl GeneratorProfile {
    pub fn validate(&self) -> Result<(), ProfileError> {
        for (name, p) in [
            ("conference_rate", self.conference_rate),
            ("missed_rate", self.missed_rate),
            ("outgoing_rate", self.outgoing_rate),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(ProfileError::BadProbability(name));
            }
        }
        if self.time_span.1 < self.time_span.0 {
            return Err(ProfileError::BadSpan);
        }
        let wants_calls = self.n > 0 || !self.planted_clusters.is_empty();
        if wants_calls && self.contacts == 0 {
            return Err(ProfileError::NoContacts);
        }
        Ok(())
    }

    /// Planted cluster index of each contact number, or empty without planting.
    pub fn planted_membership(&self) -> Vec<(String, usize)> {
        if self.planted_clusters.is_empty() {
            return Vec::new();
        }
        (0..self.contacts)
            .map(|i| (contact_number(i), i % self.planted_clusters.len()))
            .collect()
    }
}

pub fn contact_number(index: usize) -> String {
    format!("+91{}{:08}", CONTACT_PREFIXES[index % CONTACT_PREFIXES.len()], index)
}

fn call_counts(profile: &GeneratorProfile, rng: &mut ChaCha8Rng) -> Vec<usize> {
    if !profile.planted_clusters.is_empty() {
        return (0..profile.contacts)
            .map(|i| {
                let c = profile.planted_clusters[i % profile.planted_clusters.len()];
                let lo = i64::from(c.center) - i64::from(c.spread);
                let hi = i64::from(c.center) + i64::from(c.spread);
                rng.gen_range(lo..=hi).max(1) as usize
            })
            .collect();
    }
    let mut counts = vec![0usize; profile.contacts];
    if profile.n == 0 {
        return counts;
    }
    // Heavy-tailed popularity: a few contacts take most calls.
    let weights: Vec<f64> = (0..profile.contacts).map(|i| 1.0 / (i as f64 + 1.0)).collect();
    let dist = WeightedIndex::new(&weights).expect("weights are positive");
    for _ in 0..profile.n {
        counts[dist.sample(rng)] += 1;
    }
    counts
}

/// Builds a synthetic log, ordered by start time with ids `1..=len`.
///
/// Outgoing calls carry the callee in `peer_number`. A conference event pairs a
/// call with the next call to a different contact and pins that call's start
/// and end to within 2 s of the first. Missed calls have `start == end`.
pub fn gen_synthetic(profile: &GeneratorProfile) -> Result<Vec<CallRecord>, ProfileError> {
    profile.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(profile.seed);
    let counts = call_counts(profile, &mut rng);

    let mut slots: Vec<usize> = counts
        .iter()
        .enumerate()
        .flat_map(|(contact, &n)| std::iter::repeat_n(contact, n))
        .collect();
    slots.shuffle(&mut rng);

    let (lo, hi) = profile.time_span;
    struct Draft {
        contact: usize,
        start: u64,
        len: u64,
        outgoing: bool,
        missed: bool,
    }
    let mut drafts: Vec<Draft> = slots
        .into_iter()
        .map(|contact| {
            let outgoing = rng.gen_bool(profile.outgoing_rate);
            let missed = !outgoing && rng.gen_bool(profile.missed_rate);
            Draft {
                contact,
                start: rng.gen_range(lo..=hi),
                len: if missed { 0 } else { rng.gen_range(5..=1800) },
                outgoing,
                missed,
            }
        })
        .collect();
    drafts.sort_by_key(|d| (d.start, d.contact));

    let mut i = 0;
    while i + 1 < drafts.len() {
        if drafts[i].missed || !rng.gen_bool(profile.conference_rate) {
            i += 1;
            continue;
        }
        let Some(offset) = drafts[i + 1..].iter().position(|d| d.contact != drafts[i].contact) else {
            break;
        };
        let j = i + 1 + offset;
        let start = drafts[i].start + rng.gen_range(0..=2);
        let end = (drafts[i].start + drafts[i].len)
            .saturating_add_signed(rng.gen_range(-2..=2))
            .max(start);
        let peer = drafts.remove(j);
        drafts.insert(
            i + 1,
            Draft {
                start,
                len: end - start,
                missed: false,
                ..peer
            },
        );
        i += 2;
    }
    drafts.sort_by_key(|d| (d.start, d.contact));

    Ok(drafts
        .into_iter()
        .enumerate()
        .map(|(idx, d)| {
            let number = contact_number(d.contact);
            let name = if d.contact % 5 == 4 {
                UNKNOWN_NAME.to_owned()
            } else {
                format!("Contact {}", d.contact)
            };
            let end = if d.missed { d.start } else { d.start + d.len };
            let record = CallRecord {
                id: idx as u64 + 1,
                number: if d.outgoing {
                    SELF_NUMBER.to_owned()
                } else {
                    number.clone()
                },
                name,
                start: d.start,
                end,
                peer_number: None,
            };
            if d.outgoing {
                record.with_peer(number)
            } else {
                record
            }
        })
        .collect())
}
