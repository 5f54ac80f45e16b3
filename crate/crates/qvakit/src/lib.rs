//! Classical simulation and analysis toolkit for quantum variational
//! algorithms whose mixing unitaries are continuous-time quantum walks on
//! vertex-transitive graphs.

pub mod cli;
pub mod combinatorics;
pub mod error;
pub mod graphs;
pub mod metrics;
pub mod optimize;
pub mod problems;
pub mod qva;
pub mod walks;

pub use error::{QvaError, Result};
