//! Number-to-provider resolution.
//!
//! The resolver is a trait so a networked lookup can replace the local table
//! without touching the miner or the reports.

use std::collections::{BTreeSet, HashMap};
use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::ingest::SELF_NUMBER;

pub const UNKNOWN_PROVIDER: &str = "UNKNOWN";

/// Country codes stripped from `+`-prefixed numbers when none are configured.
pub const DEFAULT_COUNTRY_CODES: &[&str] = &["91"];

pub trait ProviderResolver {
    /// Provider name for `number`, or [`UNKNOWN_PROVIDER`].
    fn resolve(&self, number: &str) -> String;
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PrefixTableError {
    #[error("bad prefix table: line {line}: {reason}")]
    BadPrefixTable { line: usize, reason: String },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

fn bad(line: usize, reason: impl Into<String>) -> PrefixTableError {
    PrefixTableError::BadPrefixTable {
        line,
        reason: reason.into(),
    }
}

/// Longest-prefix table over national digit strings.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PrefixTable {
    entries: HashMap<String, String>,
    max_len: usize,
    country_codes: Vec<String>,
    self_provider: Option<String>,
}

impl PrefixTable {
    pub fn new() -> Self {
        Self {
            country_codes: DEFAULT_COUNTRY_CODES.iter().map(|s| s.to_string()).collect(),
            ..Self::default()
        }
    }

    /// Builds a table from `(prefix, provider)` pairs. Line numbers in errors
    /// count from 1 over the pairs.
    pub fn from_pairs<I, P, N>(pairs: I) -> Result<Self, PrefixTableError>
    where
        I: IntoIterator<Item = (P, N)>,
        P: AsRef<str>,
        N: AsRef<str>,
    {
        let mut table = Self::new();
        for (idx, (prefix, provider)) in pairs.into_iter().enumerate() {
            table.insert(prefix.as_ref(), provider.as_ref(), idx + 1)?;
        }
        Ok(table)
    }

    fn insert(&mut self, prefix: &str, provider: &str, line: usize) -> Result<(), PrefixTableError> {
        let prefix = prefix.trim();
        let provider = provider.trim();
        if prefix.is_empty() || !prefix.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad(line, format!("prefix `{prefix}` is not a digit string")));
        }
        if provider.is_empty() {
            return Err(bad(line, "provider is empty"));
        }
        if self.entries.insert(prefix.to_owned(), provider.to_owned()).is_some() {
            return Err(bad(line, format!("duplicate prefix `{prefix}`")));
        }
        self.max_len = self.max_len.max(prefix.len());
        Ok(())
    }

    /// Parses `prefix,provider` CSV text (header required).
    pub fn parse_str(text: &str) -> Result<Self, PrefixTableError> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .from_reader(text.as_bytes());
        let mut rows = reader.records();
        let header = rows
            .next()
            .ok_or_else(|| bad(1, "missing header `prefix,provider`"))?
            .map_err(|e| bad(1, e.to_string()))?;
        let names: Vec<&str> = header.iter().map(str::trim).collect();
        if names != ["prefix", "provider"] {
            return Err(bad(
                1,
                format!("expected header `prefix,provider`, found `{}`", names.join(",")),
            ));
        }
        let mut table = Self::new();
        for row in rows {
            let row = row.map_err(|e| bad(e.position().map_or(0, |p| p.line() as usize), e.to_string()))?;
            let line = row.position().map_or(0, |p| p.line() as usize);
            if row.len() == 1 && row[0].trim().is_empty() {
                continue;
            }
            if row.len() != 2 {
                return Err(bad(line, format!("expected 2 fields, found {}", row.len())));
            }
            table.insert(&row[0], &row[1], line)?;
        }
        Ok(table)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, PrefixTableError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| PrefixTableError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::parse_str(&text)
    }

    pub fn with_country_codes<I: IntoIterator<Item = S>, S: Into<String>>(mut self, codes: I) -> Self {
        self.country_codes = codes.into_iter().map(Into::into).collect();
        // Longest first so "1" never shadows "1868".
        self.country_codes
            .sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        self
    }

    /// Provider reported for `SELF` numbers.
    pub fn with_self_provider(mut self, provider: impl Into<String>) -> Self {
        self.self_provider = Some(provider.into());
        self
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn providers(&self) -> BTreeSet<&str> {
        self.entries.values().map(String::as_str).collect()
    }

    /// National digit string used for lookup: non-digits dropped, and for
    /// `+`-prefixed numbers a configured country code stripped.
    pub fn national_digits(&self, number: &str) -> String {
        let trimmed = number.trim();
        let digits: String = trimmed.chars().filter(char::is_ascii_digit).collect();
        if trimmed.starts_with('+') {
            if let Some(cc) = self.country_codes.iter().find(|cc| digits.starts_with(cc.as_str())) {
                return digits[cc.len()..].to_owned();
            }
        }
        digits
    }

    /// Longest matching prefix and its provider.
    pub fn longest_match(&self, digits: &str) -> Option<(&str, &str)> {
        let upper = self.max_len.min(digits.len());
        (1..=upper).rev().find_map(|len| {
            self.entries
                .get_key_value(&digits[..len])
                .map(|(p, n)| (p.as_str(), n.as_str()))
        })
    }
}

impl ProviderResolver for PrefixTable {
    fn resolve(&self, number: &str) -> String {
        if number == SELF_NUMBER {
            return self
                .self_provider
                .clone()
                .unwrap_or_else(|| UNKNOWN_PROVIDER.to_owned());
        }
        let digits = self.national_digits(number);
        self.longest_match(&digits)
            .map_or_else(|| UNKNOWN_PROVIDER.to_owned(), |(_, provider)| provider.to_owned())
    }
}
