//! Structure of sampled forests: the past of a vertex, the edge-by-edge
//! exploration of the origin's component with its conductance martingale,
//! and exact checks on small networks.

mod domination;
mod escape;
mod exploration;
mod martingale;
mod maxflow;
mod past;

pub use domination::{domination_check, DominationReport, EdgeSetLaw};
pub use escape::{escape_probability_bound_check, EscapeReport};
pub use exploration::{
    exploration_process, EdgeRule, ExplorationOptions, ExplorationOutcome, ExplorationStep,
    ExplorationTrace, Explorer,
};
pub use martingale::{martingale_check_exact, MartingaleReport, MartingaleRow, MAX_EXACT_EDGES};
pub use past::{euclidean_diameter, past_of, PastSummary};
