//! Interactive equational proof kernel.
//!
//! Goals are rewritten one step at a time: the user focuses a subterm, picks
//! a law from a ranked menu of matches, and the law is applied at the focus
//! until the strategy's target is reached. Finished proofs are promoted to
//! theorems and rendered as plain-text transcripts.

pub mod focus;
pub mod matcher;
pub mod proof;
pub mod script;
pub mod seed;
pub mod syntax;
pub mod term;
pub mod theory;
pub mod types;
