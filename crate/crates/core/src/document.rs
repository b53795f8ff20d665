//! JSON interchange for schedules.
//!
//! ```json
//! {
//!   "instance": { "M": 12, "C": 12, "K": 3, "S": 3 },
//!   "regime": "A",
//!   "transmissions": [ { "tx": 0, "xor": [1] }, ... ],
//!   "note": "optional free text"
//! }
//! ```

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instance::{ClientId, InstanceError, MessageId, ProblemInstance, WindowConvention};
use crate::schemes::{Schedule, Transmission};

#[derive(Debug, Error)]
pub enum DocumentError {
    #[error("malformed schedule document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid instance: {0}")]
    Instance(#[from] InstanceError),
    #[error("transmission {index}: {reason}")]
    Transmission { index: usize, reason: String },
    #[error("unknown regime `{0}`")]
    Regime(String),
}

fn is_default_convention(c: &WindowConvention) -> bool {
    *c == WindowConvention::default()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDoc {
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "C")]
    pub c: usize,
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "S")]
    pub s: usize,
    #[serde(default, skip_serializing_if = "is_default_convention")]
    pub convention: WindowConvention,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransmissionDoc {
    pub tx: usize,
    /// Message indices, strictly ascending.
    pub xor: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleDocument {
    pub instance: InstanceDoc,
    pub regime: String,
    pub transmissions: Vec<TransmissionDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl ScheduleDocument {
    pub fn from_schedule(schedule: &Schedule) -> Self {
        let inst = &schedule.instance;
        ScheduleDocument {
            instance: InstanceDoc {
                m: inst.m(),
                c: inst.c(),
                k: inst.k(),
                s: inst.s(),
                convention: inst.convention(),
            },
            regime: schedule.regime_label(),
            transmissions: schedule
                .transmissions
                .iter()
                .map(|t| TransmissionDoc {
                    tx: t.transmitter.0,
                    xor: t.payload.iter().map(|x| x.0).collect(),
                })
                .collect(),
            note: None,
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn parse(text: &str) -> Result<Self, DocumentError> {
        Ok(serde_json::from_str(text)?)
    }

    /// Pretty JSON with a trailing newline.
    pub fn render(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("document serializes");
        out.push('\n');
        out
    }

    pub fn instance(&self) -> Result<ProblemInstance, DocumentError> {
        let d = &self.instance;
        Ok(ProblemInstance::with_convention(
            d.m,
            d.c,
            d.k,
            d.s,
            d.convention,
        )?)
    }

    /// Structural validation only; whether transmitters hold their payloads
    /// is left to the decoder so the violation can be reported as such.
    pub fn to_schedule(&self) -> Result<Schedule, DocumentError> {
        let instance = self.instance()?;
        let regime = match self.regime.as_str() {
            "manual" | "oracle" => None,
            other => Some(
                other
                    .parse()
                    .map_err(|_| DocumentError::Regime(other.to_string()))?,
            ),
        };
        let mut transmissions = Vec::with_capacity(self.transmissions.len());
        for (index, t) in self.transmissions.iter().enumerate() {
            let fail = |reason: String| DocumentError::Transmission { index, reason };
            if t.tx >= instance.c() {
                return Err(fail(format!("tx {} outside C={}", t.tx, instance.c())));
            }
            if t.xor.is_empty() {
                return Err(fail("empty xor list".into()));
            }
            if !t.xor.windows(2).all(|w| w[0] < w[1]) {
                return Err(fail("xor indices must be strictly ascending".into()));
            }
            if let Some(x) = t.xor.iter().find(|&&x| x >= instance.m()) {
                return Err(fail(format!("message {x} outside M={}", instance.m())));
            }
            transmissions.push(Transmission::new(
                ClientId(t.tx),
                t.xor.iter().copied().map(MessageId),
            ));
        }
        Ok(Schedule {
            instance,
            transmissions,
            regime,
        })
    }
}
