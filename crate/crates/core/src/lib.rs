//! Markov-chain models of the tipsy cop and tipsy robber game.

pub mod chain;
pub mod closedform;
pub mod error;
pub mod families;
pub mod graph;
pub mod joint;
pub mod linalg;
pub mod montecarlo;
pub mod schedules;
pub mod spinner;
pub mod tables;

pub use chain::{
    absorption_split, expected_rounds, extract_transient, survival_curve, survival_probability,
    transition_probability, validate, AbsorptionSplit, Expectation, MarkovChain, TransientSystem,
};
pub use error::{Error, Result};
pub use graph::{build_graph, generate_family, parse_edge_list, Family, Graph};
pub use linalg::Matrix;
pub use spinner::{SpinnerFour, SpinnerThree};
pub use tables::{reproduce_table, TableReport, TABLE_IDS};
