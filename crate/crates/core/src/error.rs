use thiserror::Error;

use crate::chain::AbsorptionSplit;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("graph is disconnected: vertex {unreached} is not reachable from vertex 0")]
    DisconnectedGraph { unreached: usize },

    #[error("invalid edge ({u}, {v}): {reason}")]
    InvalidEdge {
        u: usize,
        v: usize,
        reason: &'static str,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("row {row} of the transition matrix sums to {sum}, not 1")]
    NotStochastic { row: usize, sum: f64 },

    #[error("state {state} is inconsistent with the absorbing set")]
    InconsistentAbsorbing { state: usize },

    #[error("state {state} is out of range for a chain with {len} states")]
    InvalidState { state: usize, len: usize },

    #[error("chain has no transient states")]
    NoTransientStates,

    #[error("absorption from the start state is not certain (total probability {total})")]
    Divergent { split: AbsorptionSplit, total: f64 },

    #[error("schedule value {value} at index {index} lies outside [0, 1]")]
    ScheduleOutOfRange { index: u32, value: f64 },

    #[error("joint chain would have {states} states, above the cap of {cap}")]
    GraphTooLarge { states: usize, cap: usize },

    #[error(
        "partition is not lumpable: class {class} has states {first} and {second} \
         whose aggregated rows differ by {discrepancy:e}"
    )]
    NotLumpable {
        class: String,
        first: String,
        second: String,
        discrepancy: f64,
    },

    #[error("invalid start: cop and robber both start on vertex {0}")]
    InvalidStart(usize),

    #[error("unknown table `{0}`")]
    UnknownTable(String),

    #[error("malformed input: {0}")]
    Parse(String),
}
