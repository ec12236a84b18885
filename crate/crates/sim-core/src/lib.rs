//! System-level simulator of a high-speed-rail cellular scenario.
//!
//! The crate models a linear deployment of multi-sector sites along a rail
//! track, users moving in one direction at train speed, log-distance radio
//! with per-segment shadowing, and the A3/TTT handover state machine with a
//! load-triggered handover margin. One simulation run turns a single
//! `(HOM, TTT)` configuration into a [`KpiRecord`] of seven network KPIs.
//!
//! Runs are fully deterministic given [`SimConfig::seed`]; concurrent runs
//! share no mutable state.

pub mod config;
pub mod handover;
pub mod radio;
pub mod rng;
pub mod sim;
pub mod topology;

pub use config::{SimConfig, SimError, PER_USER_LOAD, TTT_VALUES_MS};
pub use handover::{a3_condition, advance_ttt, effective_hom, select_target, Neighbor, TttCandidate};
pub use radio::dbm_to_mw;
pub use sim::{run_simulation, KpiRecord, Simulation};
pub use topology::{build_topology, Cell, Topology};
