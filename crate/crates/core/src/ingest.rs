//! Call-log parsing.
//!
//! Two export formats are accepted, and both produce the same [`ParseReport`]:
//!
//! * CSV with header `id,number,name,start,end` and an optional trailing
//!   `peer_number` column.
//! * JSON-lines, one object per line with the same keys.
//!
//! Timestamps are epoch seconds (UTC). A row whose `end` precedes its `start`
//! is normalized by swapping the two, and a warning is recorded.

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Number token marking an outgoing call (the current device placed it).
pub const SELF_NUMBER: &str = "SELF";
/// Name token for a caller not found in the contact book.
pub const UNKNOWN_NAME: &str = "Un-Known";

const CSV_HEADER: [&str; 5] = ["id", "number", "name", "start", "end"];
const PEER_COLUMN: &str = "peer_number";

/// One call-log entry.
///
/// `peer_number` is an extension to the five-field log item: the callee of an
/// outgoing call. The log item itself stores `SELF` for outgoing calls, which
/// leaves per-callee analysis impossible unless the export carries the callee.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CallRecord {
    pub id: u64,
    pub number: String,
    pub name: String,
    pub start: u64,
    pub end: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub peer_number: Option<String>,
}

impl CallRecord {
    pub fn new(id: u64, number: impl Into<String>, name: impl Into<String>, start: u64, end: u64) -> Self {
        Self {
            id,
            number: number.into(),
            name: name.into(),
            start,
            end,
            peer_number: None,
        }
    }

    pub fn with_peer(mut self, peer: impl Into<String>) -> Self {
        self.peer_number = Some(peer.into());
        self
    }

    pub fn is_outgoing(&self) -> bool {
        self.number == SELF_NUMBER
    }

    /// The identity this call is counted under: the caller for received calls,
    /// the callee for outgoing calls when known, otherwise `SELF`.
    pub fn contact_key(&self) -> &str {
        match (&self.peer_number, self.is_outgoing()) {
            (Some(peer), true) => peer,
            _ => &self.number,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseWarning {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ParseWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

/// Result of parsing one export file.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ParseReport {
    pub records: Vec<CallRecord>,
    pub warnings: Vec<ParseWarning>,
    /// Rows skipped in [`ParseMode::Lenient`]; always empty in strict mode.
    pub rejected: Vec<ParseWarning>,
    pub source: String,
}

/// How row-level errors are handled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ParseMode {
    /// The first malformed row aborts the parse.
    #[default]
    Strict,
    /// Malformed rows are collected in [`ParseReport::rejected`] and skipped.
    /// Duplicate ids and header problems still abort.
    Lenient,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum IngestError {
    #[error("line {line}: malformed row: {reason}")]
    MalformedRow { line: usize, reason: String },
    #[error("bad header: expected `id,number,name,start,end[,peer_number]`, found `{found}`")]
    BadHeader { found: String },
    #[error("duplicate id {id} on line {second_line} (first seen on line {first_line})")]
    DuplicateId {
        id: u64,
        first_line: usize,
        second_line: usize,
    },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

impl IngestError {
    fn malformed(line: usize, reason: impl Into<String>) -> Self {
        Self::MalformedRow {
            line,
            reason: reason.into(),
        }
    }
}

/// Outcome of [`parse_record`]: the normalized record plus whether its
/// timestamps were swapped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedRow {
    pub record: CallRecord,
    pub swapped: bool,
}

fn parse_uint(field: &str, what: &str, line: usize) -> Result<u64, IngestError> {
    let field = field.trim();
    if field.starts_with('-') {
        return Err(IngestError::malformed(line, format!("{what} is negative: `{field}`")));
    }
    field
        .parse::<u64>()
        .map_err(|_| IngestError::malformed(line, format!("{what} is not a non-negative integer: `{field}`")))
}

fn build_record(
    id: u64,
    number: &str,
    name: &str,
    start: u64,
    end: u64,
    peer: Option<&str>,
    line: usize,
) -> Result<ParsedRow, IngestError> {
    let number = number.trim();
    if number.is_empty() {
        return Err(IngestError::malformed(line, "number is empty"));
    }
    let name = match name.trim() {
        "" => UNKNOWN_NAME,
        n => n,
    };
    let (start, end, swapped) = if end < start {
        (end, start, true)
    } else {
        (start, end, false)
    };
    let peer_number = peer.map(str::trim).filter(|p| !p.is_empty()).map(str::to_owned);
    Ok(ParsedRow {
        record: CallRecord {
            id,
            number: number.to_owned(),
            name: name.to_owned(),
            start,
            end,
            peer_number,
        },
        swapped,
    })
}

/// Parses one ordered field list `[id, number, name, start, end]`, optionally
/// followed by a `peer_number` field.
pub fn parse_record<S: AsRef<str>>(row: &[S], line: usize) -> Result<ParsedRow, IngestError> {
    if row.len() < 5 {
        return Err(IngestError::malformed(
            line,
            format!("expected 5 fields, found {}", row.len()),
        ));
    }
    if row.len() > 6 {
        return Err(IngestError::malformed(
            line,
            format!("expected at most 6 fields, found {}", row.len()),
        ));
    }
    let id = parse_uint(row[0].as_ref(), "id", line)?;
    let start = parse_uint(row[3].as_ref(), "start", line)?;
    let end = parse_uint(row[4].as_ref(), "end", line)?;
    build_record(
        id,
        row[1].as_ref(),
        row[2].as_ref(),
        start,
        end,
        row.get(5).map(AsRef::as_ref),
        line,
    )
}

/// Accumulates rows while enforcing id uniqueness and collecting warnings.
struct Collector {
    mode: ParseMode,
    report: ParseReport,
    seen: HashMap<u64, usize>,
}

impl Collector {
    fn new(mode: ParseMode, source: String) -> Self {
        Self {
            mode,
            report: ParseReport {
                source,
                ..ParseReport::default()
            },
            seen: HashMap::new(),
        }
    }

    fn push(&mut self, line: usize, row: Result<ParsedRow, IngestError>) -> Result<(), IngestError> {
        let parsed = match row {
            Ok(parsed) => parsed,
            Err(IngestError::MalformedRow { line, reason }) if self.mode == ParseMode::Lenient => {
                self.report.rejected.push(ParseWarning { line, message: reason });
                return Ok(());
            }
            Err(e) => return Err(e),
        };
        if let Some(&first_line) = self.seen.get(&parsed.record.id) {
            return Err(IngestError::DuplicateId {
                id: parsed.record.id,
                first_line,
                second_line: line,
            });
        }
        self.seen.insert(parsed.record.id, line);
        if parsed.swapped {
            self.report.warnings.push(ParseWarning {
                line,
                message: format!("end precedes start for id {}; timestamps swapped", parsed.record.id),
            });
        }
        self.report.records.push(parsed.record);
        Ok(())
    }
}

/// Parses CSV text. `source` is only used for labelling the report.
pub fn parse_csv_str(text: &str, source: &str, mode: ParseMode) -> Result<ParseReport, IngestError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut rows = reader.records();

    let header = match rows.next() {
        Some(Ok(h)) => h,
        Some(Err(e)) => return Err(IngestError::BadHeader { found: e.to_string() }),
        None => return Err(IngestError::BadHeader { found: String::new() }),
    };
    let names: Vec<&str> = header.iter().map(str::trim).collect();
    let header_ok = names.len() >= 5
        && names[..5] == CSV_HEADER
        && (names.len() == 5 || (names.len() == 6 && names[5] == PEER_COLUMN));
    if !header_ok {
        return Err(IngestError::BadHeader { found: names.join(",") });
    }

    let mut collector = Collector::new(mode, source.to_owned());
    for row in rows {
        let row = row.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            IngestError::malformed(line, e.to_string())
        })?;
        let line = row.position().map_or(0, |p| p.line() as usize);
        if row.len() == 1 && row[0].trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = row.iter().collect();
        collector.push(line, parse_record(&fields, line))?;
    }
    Ok(collector.report)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonRow {
    id: Option<serde_json::Value>,
    number: Option<String>,
    name: Option<String>,
    start: Option<serde_json::Value>,
    end: Option<serde_json::Value>,
    #[serde(default)]
    peer_number: Option<String>,
}

fn json_uint(value: Option<serde_json::Value>, what: &str, line: usize) -> Result<u64, IngestError> {
    match value {
        None => Err(IngestError::malformed(line, format!("missing key `{what}`"))),
        Some(serde_json::Value::Number(n)) => match n.as_u64() {
            Some(v) => Ok(v),
            None if n.as_i64().is_some() => Err(IngestError::malformed(line, format!("{what} is negative: {n}"))),
            None => Err(IngestError::malformed(line, format!("{what} is not an integer: {n}"))),
        },
        Some(other) => Err(IngestError::malformed(
            line,
            format!("{what} is not an integer: {other}"),
        )),
    }
}

fn parse_json_line(text: &str, line: usize) -> Result<ParsedRow, IngestError> {
    let row: JsonRow = serde_json::from_str(text).map_err(|e| IngestError::malformed(line, e.to_string()))?;
    let id = json_uint(row.id, "id", line)?;
    let number = row
        .number
        .ok_or_else(|| IngestError::malformed(line, "missing key `number`"))?;
    let name = row
        .name
        .ok_or_else(|| IngestError::malformed(line, "missing key `name`"))?;
    let start = json_uint(row.start, "start", line)?;
    let end = json_uint(row.end, "end", line)?;
    build_record(id, &number, &name, start, end, row.peer_number.as_deref(), line)
}

/// Parses JSON-lines text. Blank lines are ignored.
pub fn parse_jsonl_str(text: &str, source: &str, mode: ParseMode) -> Result<ParseReport, IngestError> {
    let mut collector = Collector::new(mode, source.to_owned());
    for (idx, raw) in text.lines().enumerate() {
        if raw.trim().is_empty() {
            continue;
        }
        let line = idx + 1;
        collector.push(line, parse_json_line(raw, line))?;
    }
    Ok(collector.report)
}

fn read(path: &Path) -> Result<String, IngestError> {
    fs::read_to_string(path).map_err(|e| IngestError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

pub fn parse_csv(path: impl AsRef<Path>) -> Result<ParseReport, IngestError> {
    let path = path.as_ref();
    parse_csv_str(&read(path)?, &path.display().to_string(), ParseMode::Strict)
}

pub fn parse_jsonl(path: impl AsRef<Path>) -> Result<ParseReport, IngestError> {
    let path = path.as_ref();
    parse_jsonl_str(&read(path)?, &path.display().to_string(), ParseMode::Strict)
}

/// Picks the format from the content: JSON-lines when the first non-blank
/// character is `{`, CSV otherwise.
pub fn parse_auto_str(text: &str, source: &str, mode: ParseMode) -> Result<ParseReport, IngestError> {
    if text.trim_start().starts_with('{') {
        parse_jsonl_str(text, source, mode)
    } else {
        parse_csv_str(text, source, mode)
    }
}

pub fn parse_auto(path: impl AsRef<Path>) -> Result<ParseReport, IngestError> {
    let path = path.as_ref();
    parse_auto_str(&read(path)?, &path.display().to_string(), ParseMode::Strict)
}

/// Writes records as CSV. The `peer_number` column is emitted only when at
/// least one record carries a peer.
pub fn write_csv<W: Write>(records: &[CallRecord], out: W) -> std::io::Result<()> {
    let with_peer = records.iter().any(|r| r.peer_number.is_some());
    let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    let mut header: Vec<&str> = CSV_HEADER.to_vec();
    if with_peer {
        header.push(PEER_COLUMN);
    }
    writer.write_record(&header)?;
    for r in records {
        let mut row = vec![
            r.id.to_string(),
            r.number.clone(),
            r.name.clone(),
            r.start.to_string(),
            r.end.to_string(),
        ];
        if with_peer {
            row.push(r.peer_number.clone().unwrap_or_default());
        }
        writer.write_record(&row)?;
    }
    writer.flush()
}

pub fn write_jsonl<W: Write>(records: &[CallRecord], mut out: W) -> std::io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

pub fn to_csv_string(records: &[CallRecord]) -> String {
    let mut buf = Vec::new();
    write_csv(records, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("csv output is utf-8")
}

pub fn to_jsonl_string(records: &[CallRecord]) -> String {
    let mut buf = Vec::new();
    write_jsonl(records, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("json output is utf-8")
}
