//! Three-way partition of a call log into incoming, outgoing and missed stores.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::CallRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Direction {
    Incoming,
    Outgoing,
    Missed,
}

impl Direction {
    /// Rules apply in order: `SELF` number means outgoing, then equal
    /// start/end means missed, otherwise incoming. A zero-length outgoing call
    /// therefore stays outgoing.
    pub fn classify(record: &CallRecord) -> Self {
        if record.is_outgoing() {
            Direction::Outgoing
        } else if record.start == record.end {
            Direction::Missed
        } else {
            Direction::Incoming
        }
    }

    pub fn short_name(self) -> &'static str {
        match self {
            Direction::Incoming => "IC",
            Direction::Outgoing => "OC",
            Direction::Missed => "MC",
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StoreError {
    #[error("duplicate record id {0}")]
    DuplicateId(u64),
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct LogStore {
    pub ic: Vec<CallRecord>,
    pub oc: Vec<CallRecord>,
    pub mc: Vec<CallRecord>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct StoreCounts {
    pub ic: usize,
    pub oc: usize,
    pub mc: usize,
}

impl LogStore {
    pub fn get(&self, direction: Direction) -> &[CallRecord] {
        match direction {
            Direction::Incoming => &self.ic,
            Direction::Outgoing => &self.oc,
            Direction::Missed => &self.mc,
        }
    }

    pub fn len(&self) -> usize {
        self.ic.len() + self.oc.len() + self.mc.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Iterates all records, store by store (IC, then OC, then MC).
    pub fn iter(&self) -> impl Iterator<Item = &CallRecord> {
        self.ic.iter().chain(&self.oc).chain(&self.mc)
    }

    pub fn iter_with_direction(&self) -> impl Iterator<Item = (Direction, &CallRecord)> {
        self.ic
            .iter()
            .map(|r| (Direction::Incoming, r))
            .chain(self.oc.iter().map(|r| (Direction::Outgoing, r)))
            .chain(self.mc.iter().map(|r| (Direction::Missed, r)))
    }
}

pub fn partition(records: &[CallRecord]) -> Result<LogStore, StoreError> {
    let mut seen = HashSet::with_capacity(records.len());
    let mut store = LogStore::default();
    for record in records {
        if !seen.insert(record.id) {
            return Err(StoreError::DuplicateId(record.id));
        }
        let bucket = match Direction::classify(record) {
            Direction::Incoming => &mut store.ic,
            Direction::Outgoing => &mut store.oc,
            Direction::Missed => &mut store.mc,
        };
        bucket.push(record.clone());
    }
    Ok(store)
}

pub fn store_counts(store: &LogStore) -> StoreCounts {
    StoreCounts {
        ic: store.ic.len(),
        oc: store.oc.len(),
        mc: store.mc.len(),
    }
}
