//! Moment-of-fluid interface tracking on uniform structured grids.

pub mod advection;
pub mod benchcases;
pub mod fields;
pub mod geometry;
pub mod reconstruction;
