//! Finite groups, finite group actions, orbits and stable partitions.

mod action;
pub mod catalog;
mod group;
mod partition;

pub use action::{GAction, Orbit, OrbitPartition, Validation};
pub use group::{enumerate_group, mod_inverse, Ambient, Elem, GroupModel, MulTable};
pub use partition::{is_stable, stable_refinement, PartitionOfSet};
