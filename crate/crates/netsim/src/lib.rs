//! Tree-shaped sensor networks.
//!
//! * [`build_tree`] places nodes in the unit square and grows a tree from
//!   the sink at the centre under height and fan-out limits.
//! * [`path_length`] and [`all_pairs_stats`] compare hop counts when every
//!   message is relayed by the sink (orchestration) with the direct tree
//!   route (choreography).
//! * [`run_load_experiment`] pushes traffic through a tree in discrete
//!   rounds with a per-node forwarding capacity.

mod load;
mod paths;
mod topology;

pub use load::{run_load_experiment, Capacity, LoadReport, Traffic};
pub use paths::{all_pairs_stats, dominance_violations, path_length, route, Design, PathError, PathStats};
pub use topology::{build_tree, ParamError, TopologyParams, TreeTopology, SINK};
