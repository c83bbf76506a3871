//! Two-way finite automata with quantum and classical states: simulation,
//! m-truncated transfer operators, crossing sequences, language hardness
//! measures and numerical verification of the lower-bound machinery.

pub mod hardness;
pub mod langs;
pub mod machine;
pub mod quantum;
pub mod report;
pub mod serial;
pub mod transfer;
pub mod verification;
