//! IO, search drivers and the command-line surface for the lattice toolkit.

pub mod formats;
pub mod oracle;
