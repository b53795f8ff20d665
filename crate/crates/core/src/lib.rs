//! Consecutive decentralized pliable index coding.
//!
//! `M` message classes are spread over `C` clients so that each client holds
//! a window of `K` consecutive classes. Clients take turns broadcasting XORs
//! of messages they hold until every client has decoded `S` classes it did
//! not have. This crate builds such broadcast schedules, decodes them client
//! by client, searches exhaustively for the shortest schedule on small
//! instances, and accounts for the transmissions and payload bits a schedule
//! saves when used to shuffle data classes between nodes.

pub mod cli;
pub mod decoder;
pub mod document;
pub mod error;
pub mod instance;
pub mod oracle;
pub mod schemes;
pub mod shuffle;
pub mod table;

pub use decoder::{decode_symbol, run_schedule, DecodeMode, DecodingReport};
pub use document::ScheduleDocument;
pub use error::{HasStatus, Status};
pub use instance::{
    classify_regime, side_info, ClientId, MessageId, ProblemInstance, Regime, WindowConvention,
};
pub use oracle::{brute_force_min, check_theorems, uncoded_min, OracleConfig, OracleResult};
pub use schemes::{construct, Schedule, SchemeError, Transmission};
pub use shuffle::{simulate_shuffle, ShuffleConfig, ShuffleReport};
