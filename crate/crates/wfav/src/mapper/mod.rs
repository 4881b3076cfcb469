//! Mapping of goal models to WFA-nets and the independent mapping audit.

mod blocks;
mod build;
mod trace;
mod verify;

pub use blocks::{identify_blocks, BlockError, BlockKind, BuildingBlock};
pub use build::{leaf_transition, map_to_net, transition_id, MappingError, SINK, SOURCE};
pub use trace::{model_digest, MappingTrace, TRACE_HEADER};
pub use verify::verify_mapping;
