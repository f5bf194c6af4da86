//! Flavoured KLRW diagrams and their polynomial representation.

pub mod action;
pub mod diagram;
pub mod idempotent;
pub mod relations;

pub use action::{act, PolyVector};
pub use diagram::{straight_line, with_matching, Diagram, Event, Move};
