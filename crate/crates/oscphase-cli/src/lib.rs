//! Benchmark and reproduction harness for the oscphase solver: the built-in
//! problems, their reference fixtures, and lambda-sweep drivers.

pub mod fixtures;
pub mod problems;
pub mod sweep;
