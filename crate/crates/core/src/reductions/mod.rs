//! Certified instance generators for the hardness reductions: SAT to Batteries,
//! Batteries to grid embedding, 3-Partition to `3 x r` grid embedding, NAE-SAT to
//! trees of pathwidth 2, and the strip-packing adapter.

pub mod gadget;
pub mod naesat;
pub mod partition;
pub mod sat;
pub mod strip;

pub use gadget::{
    construct_batteries_witness, grid_frame, reduce_batteries_to_grid, BatteriesGraph, CoordinateGraph, GadgetLayout, GadgetRole, Side,
    WireMode,
};
pub use naesat::{construct_naesat_witness, reduce_naesat, NaeGraph};
pub use partition::{construct_3partition_witness, reduce_3partition, three_partition_brute_force, PartitionGraph};
pub use sat::{
    batteries_brute_force, placement_check, reduce_sat_to_batteries, BatteriesAnswer, BatteriesInstance, CnfFormula, Placement, PlacementCheck,
    Sign,
};
pub use strip::{strip_pack, StripPacking};

#[cfg(test)]
mod tests;
