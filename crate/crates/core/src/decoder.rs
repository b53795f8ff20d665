//! Per-client decoding of a broadcast schedule.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instance::{side_info, ClientId, MessageId, ProblemInstance};
use crate::schemes::Transmission;

/// How a client treats messages it has already decoded.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DecodeMode {
    /// Every transmission is decoded against the original window only.
    #[default]
    Static,
    /// Decoded messages join the client's knowledge; the transmission list is
    /// replayed until nothing new can be decoded.
    Progressive,
}

impl fmt::Display for DecodeMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DecodeMode::Static => f.write_str("static"),
            DecodeMode::Progressive => f.write_str("progressive"),
        }
    }
}

impl FromStr for DecodeMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "static" => Ok(DecodeMode::Static),
            "progressive" => Ok(DecodeMode::Progressive),
            other => Err(format!(
                "unknown decode mode `{other}` (expected `static` or `progressive`)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("transmission {index}: {transmitter} does not hold {message}")]
    ConstraintViolation {
        index: usize,
        transmitter: ClientId,
        message: MessageId,
    },
    #[error("transmission {index}: {reason}")]
    Malformed { index: usize, reason: String },
}

/// The unique payload message outside `knowledge`, if there is exactly one.
pub fn decode_symbol(
    knowledge: &BTreeSet<MessageId>,
    payload: &BTreeSet<MessageId>,
) -> Option<MessageId> {
    let mut unknown = payload.iter().filter(|x| !knowledge.contains(x));
    match (unknown.next(), unknown.next()) {
        (Some(&x), None) => Some(x),
        _ => None,
    }
}

/// Outcome of running a schedule past every client.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodingReport {
    pub mode: DecodeMode,
    /// Distinct new messages recovered by each client.
    pub per_client_decoded: Vec<BTreeSet<MessageId>>,
    /// `R_i`: clients for which transmission `i` is the first to deliver a
    /// given new message. Sums to the total of `per_client_decoded` sizes.
    pub served_counts: Vec<usize>,
    /// Raw decode events per transmission, counting repeats of a message a
    /// client already recovered earlier.
    pub decode_events: Vec<usize>,
    pub demand: usize,
    pub satisfied: bool,
    pub n_used: usize,
}

impl DecodingReport {
    pub fn served_total(&self) -> usize {
        self.served_counts.iter().sum()
    }

    pub fn decode_event_total(&self) -> usize {
        self.decode_events.iter().sum()
    }

    pub fn min_decoded(&self) -> usize {
        self.per_client_decoded
            .iter()
            .map(BTreeSet::len)
            .min()
            .unwrap_or(0)
    }

    pub fn unsatisfied_clients(&self) -> Vec<ClientId> {
        self.per_client_decoded
            .iter()
            .enumerate()
            .filter(|(_, d)| d.len() < self.demand)
            .map(|(i, _)| ClientId(i))
            .collect()
    }
}

/// Checks that every transmission is well formed for `instance` and encodable
/// by its transmitter.
pub fn check_transmissions(
    instance: &ProblemInstance,
    transmissions: &[Transmission],
) -> Result<(), DecodeError> {
    for (index, t) in transmissions.iter().enumerate() {
        if t.transmitter.0 >= instance.c() {
            return Err(DecodeError::Malformed {
                index,
                reason: format!("transmitter {} outside C={}", t.transmitter, instance.c()),
            });
        }
        if t.payload.is_empty() {
            return Err(DecodeError::Malformed {
                index,
                reason: "empty payload".into(),
            });
        }
        if let Some(x) = t.payload.iter().find(|x| x.0 >= instance.m()) {
            return Err(DecodeError::Malformed {
                index,
                reason: format!("message {x} outside M={}", instance.m()),
            });
        }
        if let Some(&message) = t
            .payload
            .iter()
            .find(|&&x| !instance.holds(t.transmitter, x))
        {
            return Err(DecodeError::ConstraintViolation {
                index,
                transmitter: t.transmitter,
                message,
            });
        }
    }
    Ok(())
}

/// What each client decodes from each transmission against its original
/// window. Row per client, column per transmission.
pub fn static_grid(
    instance: &ProblemInstance,
    transmissions: &[Transmission],
) -> Vec<Vec<Option<MessageId>>> {
    instance
        .clients()
        .map(|client| {
            let window = side_info(instance, client);
            transmissions
                .iter()
                .map(|t| decode_symbol(&window, &t.payload))
                .collect()
        })
        .collect()
}

pub fn run_schedule(
    instance: &ProblemInstance,
    transmissions: &[Transmission],
    mode: DecodeMode,
) -> Result<DecodingReport, DecodeError> {
    check_transmissions(instance, transmissions)?;
    let n = transmissions.len();
    let mut served_counts = vec![0; n];
    let mut decode_events = vec![0; n];
    let mut per_client_decoded = Vec::with_capacity(instance.c());

    for client in instance.clients() {
        let window = side_info(instance, client);
        let mut decoded = BTreeSet::new();
        match mode {
            DecodeMode::Static => {
                for (j, t) in transmissions.iter().enumerate() {
                    if let Some(x) = decode_symbol(&window, &t.payload) {
                        decode_events[j] += 1;
                        if decoded.insert(x) {
                            served_counts[j] += 1;
                        }
                    }
                }
            }
            DecodeMode::Progressive => {
                let mut knowledge = window;
                loop {
                    let mut changed = false;
                    for (j, t) in transmissions.iter().enumerate() {
                        if let Some(x) = decode_symbol(&knowledge, &t.payload) {
                            knowledge.insert(x);
                            decoded.insert(x);
                            decode_events[j] += 1;
                            served_counts[j] += 1;
                            changed = true;
                        }
                    }
                    if !changed {
                        break;
                    }
                }
            }
        }
        per_client_decoded.push(decoded);
    }

    let satisfied = per_client_decoded.iter().all(|d| d.len() >= instance.s());
    Ok(DecodingReport {
        mode,
        per_client_decoded,
        served_counts,
        decode_events,
        demand: instance.s(),
        satisfied,
        n_used: n,
    })
}
