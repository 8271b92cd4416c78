pub mod arith;
pub mod counting;
pub mod levelgraph;
pub mod oracle;
pub mod partitions;
pub mod profile;
mod span;
pub mod subset;
pub mod verify;
