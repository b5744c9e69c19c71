//! Solvers for the fault-tolerant path problem: find a cheapest edge set that
//! keeps `s` connected to `t` after any `k` of the faulty edges fail.

pub mod approx;
pub mod bipath;
pub mod cli;
pub mod dag;
pub mod document;
pub mod error;
pub mod flow;
pub mod frac;
pub mod gen;
pub mod instance;
pub mod oracle;
pub mod paths;
pub mod srp;

pub use error::{Error, Result};
pub use instance::{enumerate_scenarios, is_feasible, Edge, EdgeId, Instance, Scenario, Solution, Status, VertexId};
