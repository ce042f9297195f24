//! Experiment harness for the `submax` solvers: problem generators, MovieLens
//! ingestion, brute-force optimum oracles, and CSV/JSON trajectory output.

pub mod config;
pub mod experiment;
pub mod movierec;
pub mod oracles;
pub mod output;
pub mod summarization;
