pub mod graph;
pub mod parameters;
pub mod ratio;
pub mod thin;
pub mod separators;
pub mod tree_partition;
pub mod td_frag;
pub mod gadgets;
