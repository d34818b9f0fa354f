//! Perfect matchings with prescribed color profiles in randomly colored
//! random bipartite graphs.
//!
//! The crate samples `G(n, n, p)` with i.i.d. edge colors, finds
//! monochromatic perfect matchings, moves between color profiles by
//! alternating-cycle recoloring, enumerates the exact profile set of small
//! instances, and runs seeded threshold sweeps.

pub mod audit;
pub mod constants;
pub mod expansion;
pub mod experiment;
pub mod format;
pub mod graph;
pub mod matcher;
pub mod oracle;
pub mod sampler;
pub mod seed;
pub mod walk;

pub use audit::{isolated_color_vertices, AuditError, SearchMode};
pub use constants::{default_constants, AsymptoticConstants};
pub use expansion::{expansion_trace, ExpansionTrace};
pub use experiment::{run_trial, sweep, ExperimentConfig, TrialRecord};
pub use format::{parse_graph, serialize_graph};
pub use graph::{profile_of, Color, ColorProfile, ColorSpec, ColoredBipartiteGraph, Edge, GraphError, Matching};
pub use matcher::{max_matching, monochromatic_perfect_matching, verify_matching, MatchError};
pub use oracle::{enumerate_mcp, enumerate_mcp_naive, has_profile, ProfileSet};
pub use sampler::{sample_graph, threshold_p, SampleParams};
pub use walk::{achieve_profile, apply_cycle, find_recoloring_cycle, recolor_step, AlternatingCycle, WalkFailure, WalkReport, WalkSuccess};
