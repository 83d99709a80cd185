//! Dynamic local search for the maximum clique problem.
//!
//! The crate provides:
//!
//! * [`graph`]: an immutable undirected graph with a bit-matrix adjacency
//!   oracle and sorted adjacency lists, plus parsers and writers for the
//!   DIMACS clique formats (ASCII `p edge` and the packed binary format).
//! * [`vertex_set`]: a constant-time indexed vertex set used for the
//!   current clique and its neighbourhood sets.
//! * [`clique_state`]: the incremental search state — the current clique
//!   `C`, per-vertex counts `|N(v) ∩ C|`, and the derived improving and
//!   level sets.
//! * [`penalties`]: vertex penalties, the penalty-delay update rule, and
//!   availability-filtered minimum-penalty selection.
//! * [`solver`]: the DLS-MC search loop (expansion, plateau search,
//!   penalty updates, perturbation) with exact step accounting.
//! * [`oracle`]: an exact branch-and-bound maximum clique solver and a
//!   maximum clique enumerator for small graphs, used to validate the
//!   stochastic solver.
//! * [`bench`]: the experiment harness — run campaigns, run-time
//!   distributions, exponential-fit diagnostics, penalty-delay sweeps,
//!   instance rankings, and CSV/JSONL exports.
//!
//! # Quick start
//!
//! ```
//! use dlsmc::graph::Graph;
//! use dlsmc::solver::{solve, SolverConfig};
//!
//! // A 5-clique with a pendant vertex.
//! let g = Graph::parse_dimacs_ascii(
//!     "p edge 6 11\n\
//!      e 1 2\ne 1 3\ne 1 4\ne 1 5\ne 2 3\ne 2 4\ne 2 5\n\
//!      e 3 4\ne 3 5\ne 4 5\ne 5 6\n"
//!         .as_bytes(),
//! )
//! .unwrap()
//! .graph;
//!
//! let result = solve(&g, &SolverConfig { tcs: 5, pd: 1, max_steps: 1_000, seed: 7 }).unwrap();
//! assert!(result.success);
//! assert_eq!(result.clique.len(), 5);
//! ```

pub mod bench;
pub mod clique_state;
pub mod graph;
pub mod oracle;
pub mod penalties;
pub mod solver;
pub mod vertex_set;
