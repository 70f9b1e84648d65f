//! Broadcast session calculus workbench.
//!
//! The crate implements a session calculus with unreliable broadcast
//! communication, its binary session type system, and its semantics by
//! translation into an instance of the broadcast psi-calculus. On top of
//! the two semantics sit executable checks for the metatheory: encoding
//! properties, subject reduction, and type safety.

pub mod names;
pub mod syntax;
pub mod parser;
pub mod printer;
pub mod subst;
pub mod normalize;

#[cfg(test)]
pub(crate) mod testgen;

pub use names::{Name, NameGen, ProcVar};
pub use parser::{parse_process, ParseError};
pub use printer::pretty;
pub use subst::{alpha_canonical, alpha_eq, substitute};
pub use syntax::{Accumulator, Endpoint, GatherPhase, Label, Polarity, Process};
