//! Synchronous LOCAL/CONGEST simulation and distributed edge-coloring algorithms.

pub mod congest;
pub mod defective_ec;
pub mod error;
pub mod exact;
pub mod generate;
pub mod graph;
pub mod io;
pub mod list_ec;
pub mod lists;
pub mod orientation;
pub mod primitives;
pub mod protocol;
pub mod report;
pub mod sim;
pub mod token;
pub mod verify;

pub use error::{Error, Result};
pub use exact::Real;
pub use graph::{compute_stats, edge_degree, Bipartition, EdgeId, Graph, GraphStats, NodeId, Side};
pub use lists::{Color, ListAssignment, PartialColoring};
pub use sim::{ExecutionMode, RoundMetrics, Session};
pub use list_ec::{degree_plus_one_list_ec, AmplifyMode, ListOptions};
pub use report::{run, Algorithm, RunOutcome, RunReport, RunRequest};
pub use verify::{Verdict, Violation};
