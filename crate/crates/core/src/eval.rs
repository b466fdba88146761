//! Relevance-session arithmetic: per-session CRI/PRI/CII percentages reduced
//! to their means and the cumulative relevance (CRI + PRI).

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Allowed deviation of `cri + pri + cii` from 100, for rounded inputs.
pub const SUM_SLACK: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SessionScore {
    pub session_id: u32,
    pub cri: f64,
    pub pri: f64,
    pub cii: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelevanceSummary {
    pub sessions: usize,
    pub mean_cri: f64,
    pub mean_pri: f64,
    pub mean_cii: f64,
    pub cumulative: f64,
}

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("no sessions to summarize")]
    EmptyInput,
    #[error("session {session_id}: {reason}")]
    BadScore { session_id: u32, reason: String },
    #[error("sessions file line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

impl SessionScore {
    pub fn validate(&self) -> Result<(), EvalError> {
        let bad = |reason: String| {
            Err(EvalError::BadScore {
                session_id: self.session_id,
                reason,
            })
        };
        if self.session_id == 0 {
            return bad("session id must be positive".into());
        }
        for (name, v) in [("cri", self.cri), ("pri", self.pri), ("cii", self.cii)] {
            if !(0.0..=100.0).contains(&v) {
                return bad(format!("{name} = {v} outside [0, 100]"));
            }
        }
        let sum = self.cri + self.pri + self.cii;
        if (sum - 100.0).abs() > SUM_SLACK + 1e-9 {
            return bad(format!("cri + pri + cii = {sum}, expected 100 ± {SUM_SLACK}"));
        }
        Ok(())
    }
}

/// Means at full precision; rounding happens only when rendering.
pub fn summarize(sessions: &[SessionScore]) -> Result<RelevanceSummary, EvalError> {
    if sessions.is_empty() {
        return Err(EvalError::EmptyInput);
    }
    for s in sessions {
        s.validate()?;
    }
    let n = sessions.len() as f64;
    let mean = |f: fn(&SessionScore) -> f64| sessions.iter().map(f).sum::<f64>() / n;
    let mean_cri = mean(|s| s.cri);
    let mean_pri = mean(|s| s.pri);
    Ok(RelevanceSummary {
        sessions: sessions.len(),
        mean_cri,
        mean_pri,
        mean_cii: mean(|s| s.cii),
        cumulative: mean_cri + mean_pri,
    })
}

/// Parses `session_id,cri,pri,cii` CSV.
pub fn parse_sessions_str(text: &str) -> Result<Vec<SessionScore>, EvalError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| EvalError::Parse {
        line: 1,
        reason: e.to_string(),
    })?;
    if headers.iter().collect::<Vec<_>>() != ["session_id", "cri", "pri", "cii"] {
        return Err(EvalError::Parse {
            line: 1,
            reason: "expected header `session_id,cri,pri,cii`".into(),
        });
    }
    reader
        .deserialize::<SessionScore>()
        .map(|row| {
            row.map_err(|e| EvalError::Parse {
                line: e.position().map_or(0, |p| p.line() as usize),
                reason: e.to_string(),
            })
        })
        .collect()
}

pub fn load_sessions(path: impl AsRef<Path>) -> Result<Vec<SessionScore>, EvalError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| EvalError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_sessions_str(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const TABLE: &str = include_str!("../../../fixtures/sessions.csv");

    #[test]
    fn table_means() {
        let sessions = parse_sessions_str(TABLE).unwrap();
        assert_eq!(sessions.len(), 15);
        let s = summarize(&sessions).unwrap();
        // Column sums: CRI 1324.3, PRI 123.5, CII 52.2.
        assert!((s.mean_cri - 1324.3 / 15.0).abs() < 1e-9);
        assert!((s.mean_pri - 123.5 / 15.0).abs() < 1e-9);
        assert!((s.mean_cii - 3.48).abs() < 1e-9);
        assert!((s.cumulative - 96.52).abs() < 1e-9);
        assert_eq!(s.cumulative, s.mean_cri + s.mean_pri);
    }

    #[test]
    fn single_session() {
        let s = summarize(&[SessionScore {
            session_id: 1,
            cri: 100.0,
            pri: 0.0,
            cii: 0.0,
        }])
        .unwrap();
        assert_eq!(
            (s.mean_cri, s.mean_pri, s.mean_cii, s.cumulative),
            (100.0, 0.0, 0.0, 100.0)
        );
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(summarize(&[]), Err(EvalError::EmptyInput));
        let bad = [
            SessionScore {
                session_id: 1,
                cri: 101.0,
                pri: 0.0,
                cii: 0.0,
            },
            SessionScore {
                session_id: 1,
                cri: 50.0,
                pri: 20.0,
                cii: 20.0,
            },
            SessionScore {
                session_id: 0,
                cri: 100.0,
                pri: 0.0,
                cii: 0.0,
            },
            SessionScore {
                session_id: 1,
                cri: -1.0,
                pri: 1.0,
                cii: 100.0,
            },
        ];
        for s in bad {
            assert!(matches!(summarize(&[s]), Err(EvalError::BadScore { .. })), "{s:?}");
        }
        assert!(parse_sessions_str("id,cri,pri,cii\n1,1,1,98\n").is_err());
        assert!(matches!(
            parse_sessions_str("session_id,cri,pri,cii\n1,x,1,98\n"),
            Err(EvalError::Parse { line: 2, .. })
        ));
    }

    fn arb_session() -> impl Strategy<Value = SessionScore> {
        (1u32..100, 0.0f64..=100.0, 0.0f64..=1.0).prop_map(|(id, cri, split)| {
            let rest = 100.0 - cri;
            SessionScore {
                session_id: id,
                cri,
                pri: rest * split,
                cii: rest * (1.0 - split),
            }
        })
    }

    proptest! {
        #[test]
        fn order_does_not_matter(mut sessions in prop::collection::vec(arb_session(), 1..20)) {
            let a = summarize(&sessions).unwrap();
            sessions.reverse();
            let b = summarize(&sessions).unwrap();
            prop_assert!((a.mean_cri - b.mean_cri).abs() < 1e-9);
            prop_assert!((a.cumulative - b.cumulative).abs() < 1e-9);
        }

        #[test]
        fn mean_is_linear(sessions in prop::collection::vec(arb_session(), 1..20), c in 0.0f64..1.0) {
            let scaled: Vec<_> = sessions
                .iter()
                .map(|s| SessionScore { cri: s.cri * c, cii: s.cii + s.cri * (1.0 - c), ..*s })
                .collect();
            let a = summarize(&sessions).unwrap();
            let b = summarize(&scaled).unwrap();
            prop_assert!((b.mean_cri - c * a.mean_cri).abs() < 1e-9);
        }
    }
}
