//! Model files, bundled examples and the commands behind the `maxalg`
//! binary.

pub mod bundled;
pub mod commands;
pub mod model;
pub mod report;
pub mod reproduce;
