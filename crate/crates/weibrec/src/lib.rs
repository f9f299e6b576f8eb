//! File formats, reports and the command-line front end for
//! [`weibrec_core`].

pub mod cli;
pub mod io;
pub mod report;
