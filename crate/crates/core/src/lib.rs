#![allow(clippy::needless_range_loop)]

pub mod checks;
pub mod cli;
pub mod expr;
pub mod geometry;
pub mod lift;
pub mod linalg;
pub mod report;
pub mod structures;
pub mod weil;
