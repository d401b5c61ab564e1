//! JSON serialization for certificates and verdicts.
//!
//! Certificates:
//! `{"type":"trace","trace":[ids]}` or
//! `{"type":"lps","segments":[{"path":[ids]}, {"cycle":[ids],"count":N}, ...]}`.
//!
//! Verdict objects carry a `"schema":"tvr/1"` marker, the outcome, the
//! certificate or witness when there is one, the caps the answer rests
//! on, and search statistics.

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::decide::{
    BoundedOutcome, BoundedVerdict, Certificate, NontermWitness, ReachOutcome, ReachVerdict,
    SearchStats, TermOutcome, TermVerdict,
};
use crate::lps::{CountedLps, LinearPathScheme, LpsError};
use crate::model::Trace;
use crate::scalar::Scalar;
use crate::model::Tvass;

pub const SCHEMA: &str = "tvr/1";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CertFileError {
    #[error("not a JSON object")]
    NotAnObject,
    #[error("missing or invalid field `{0}`")]
    BadField(&'static str),
    #[error("unknown certificate type `{0}`")]
    UnknownType(String),
    #[error("certificate has no segments")]
    Empty,
    #[error(transparent)]
    Lps(#[from] LpsError),
}

fn trace_json(trace: &Trace) -> Value {
    Value::Array(trace.0.iter().map(|id| Value::String(id.clone())).collect())
}

fn trace_from(value: &Value, field: &'static str) -> Result<Trace, CertFileError> {
    let arr = value.as_array().ok_or(CertFileError::BadField(field))?;
    let ids = arr
        .iter()
        .map(|v| v.as_str().map(|s| s.to_string()).ok_or(CertFileError::BadField(field)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Trace(ids))
}

pub fn certificate_json(cert: &Certificate) -> Value {
    match cert {
        Certificate::Trace(trace) => json!({ "type": "trace", "trace": trace_json(trace) }),
        Certificate::Lps(counted) => {
            if counted.scheme.is_empty() {
                return json!({ "type": "trace", "trace": [] });
            }
            let mut segments = Vec::new();
            let alphas = counted.scheme.alphas();
            let betas = counted.scheme.betas();
            for j in 0..alphas.len() {
                if !alphas[j].is_empty() {
                    segments.push(json!({ "path": trace_json(&alphas[j]) }));
                }
                if j < betas.len() {
                    segments.push(json!({
                        "cycle": trace_json(&betas[j]),
                        "count": counted.counts[j],
                    }));
                }
            }
            json!({ "type": "lps", "segments": segments })
        }
    }
}

pub fn parse_certificate<S: Scalar>(
    model: &Tvass<S>,
    value: &Value,
) -> Result<Certificate, CertFileError> {
    let obj = value.as_object().ok_or(CertFileError::NotAnObject)?;
    let kind = obj
        .get("type")
        .and_then(Value::as_str)
        .ok_or(CertFileError::BadField("type"))?;
    match kind {
        "trace" => {
            let trace = trace_from(obj.get("trace").ok_or(CertFileError::BadField("trace"))?, "trace")?;
            Ok(Certificate::Trace(trace))
        }
        "lps" => {
            let segments = obj
                .get("segments")
                .and_then(Value::as_array)
                .ok_or(CertFileError::BadField("segments"))?;
            if segments.is_empty() {
                return Err(CertFileError::Empty);
            }
            let mut alphas: Vec<Trace> = Vec::new();
            let mut betas: Vec<Trace> = Vec::new();
            let mut counts: Vec<u64> = Vec::new();
            let mut pending = Trace::empty();
            for seg in segments {
                let seg = seg.as_object().ok_or(CertFileError::NotAnObject)?;
                if let Some(path) = seg.get("path") {
                    pending = pending.concat(&trace_from(path, "path")?);
                } else if let Some(cycle) = seg.get("cycle") {
                    let count = seg
                        .get("count")
                        .and_then(Value::as_u64)
                        .ok_or(CertFileError::BadField("count"))?;
                    alphas.push(std::mem::replace(&mut pending, Trace::empty()));
                    betas.push(trace_from(cycle, "cycle")?);
                    counts.push(count);
                } else {
                    return Err(CertFileError::BadField("segment"));
                }
            }
            alphas.push(pending);
            let scheme = LinearPathScheme::new(model, alphas, betas)?;
            Ok(Certificate::Lps(CountedLps::new(scheme, counts)?))
        }
        other => Err(CertFileError::UnknownType(other.to_string())),
    }
}

fn stats_json(stats: &SearchStats) -> Value {
    json!({ "explored": stats.explored, "peak_frontier": stats.peak_frontier })
}

fn base_object(query: &str, outcome: &str, caps: &str, stats: &SearchStats) -> Map<String, Value> {
    let mut map = Map::new();
    map.insert("schema".into(), json!(SCHEMA));
    map.insert("query".into(), json!(query));
    map.insert("outcome".into(), json!(outcome));
    map.insert("caps".into(), json!(caps));
    map.insert("stats".into(), stats_json(stats));
    map
}

pub fn reach_verdict_json(verdict: &ReachVerdict) -> Value {
    let mut map = base_object(
        "reach",
        match &verdict.outcome {
            ReachOutcome::Reachable(_) => "REACHABLE",
            ReachOutcome::Unreachable => "UNREACHABLE",
            ReachOutcome::Unknown(_) => "UNKNOWN",
        },
        &verdict.caps,
        &verdict.stats,
    );
    match &verdict.outcome {
        ReachOutcome::Reachable(cert) => {
            map.insert("certificate".into(), certificate_json(cert));
        }
        ReachOutcome::Unknown(reason) => {
            map.insert("reason".into(), json!(reason));
        }
        ReachOutcome::Unreachable => {}
    }
    Value::Object(map)
}

pub fn bounded_verdict_json(verdict: &BoundedVerdict) -> Value {
    let mut map = base_object(
        "bounded",
        match &verdict.outcome {
            BoundedOutcome::Bounded { .. } => "BOUNDED",
            BoundedOutcome::Unbounded(_) => "UNBOUNDED",
            BoundedOutcome::Unknown(_) => "UNKNOWN",
        },
        &verdict.caps,
        &verdict.stats,
    );
    match &verdict.outcome {
        BoundedOutcome::Bounded { reachable } => {
            map.insert("reachable".into(), json!(reachable));
        }
        BoundedOutcome::Unbounded(witness) => {
            map.insert(
                "witness".into(),
                json!({
                    "prefix": trace_json(&witness.prefix),
                    "pump": trace_json(&witness.pump),
                }),
            );
        }
        BoundedOutcome::Unknown(reason) => {
            map.insert("reason".into(), json!(reason));
        }
    }
    Value::Object(map)
}

pub fn term_verdict_json(verdict: &TermVerdict) -> Value {
    let mut map = base_object(
        "terminates",
        match &verdict.outcome {
            TermOutcome::Terminating { .. } => "TERMINATING",
            TermOutcome::Nonterminating(_) => "NONTERMINATING",
            TermOutcome::Unknown(_) => "UNKNOWN",
        },
        &verdict.caps,
        &verdict.stats,
    );
    match &verdict.outcome {
        TermOutcome::Terminating { reachable } => {
            map.insert("reachable".into(), json!(reachable));
        }
        TermOutcome::Nonterminating(NontermWitness::Pump(w)) => {
            map.insert(
                "witness".into(),
                json!({
                    "kind": "pump",
                    "prefix": trace_json(&w.prefix),
                    "pump": trace_json(&w.pump),
                }),
            );
        }
        TermOutcome::Nonterminating(NontermWitness::Lasso(l)) => {
            map.insert(
                "witness".into(),
                json!({
                    "kind": "lasso",
                    "prefix": trace_json(&l.prefix),
                    "cycle": trace_json(&l.cycle),
                }),
            );
        }
        TermOutcome::Unknown(reason) => {
            map.insert("reason".into(), json!(reason));
        }
    }
    Value::Object(map)
}
