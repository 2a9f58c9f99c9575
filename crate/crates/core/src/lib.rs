// SPDX-License-Identifier: Apache-2.0

//! Non-adaptive Bellman-Ford relaxation schedules.
//!
//! * [`graph`]: digraphs, edges, simple paths and k-path enumeration.
//! * [`schedule`]: round-robin, Yen and randomized-Yen schedule generators.
//! * [`engine`]: exact execution of a schedule, a Floyd-Warshall oracle, and
//!   the 0/1 adversarial weights that expose a missing path.
//! * [`validity`]: path containment, exhaustive k-validity and witness search.
//! * [`factorization`]: matching families, permutation supersequences and the
//!   resulting lower bound on valid schedule length.
//! * [`reduction`]: the reduction from all-permutations supersequence to
//!   schedule validity.
//! * [`cli`]: the `relaxsched` command-line front end.

pub mod cli;
pub mod engine;
pub mod factorization;
pub mod graph;
pub mod reduction;
pub mod schedule;
pub mod validity;
