//! Surface model of the perfect derived category of a gentle algebra.

pub mod algebra;
pub mod cells;
pub mod cli;
pub mod curves;
pub mod cutting;
pub mod fuzz;
pub mod homs;
pub mod mutation;
pub mod oracle;
pub mod reduction;
pub mod serve;
pub mod session;
pub mod silting;
pub mod surface;
