//! File formats, JSON output and the command-line front end for
//! [`psdorder_core`].

pub mod cli;
pub mod io;
pub mod model;
pub mod output;

pub use cli::run;
pub use psdorder_core;
