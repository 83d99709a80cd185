//! Compiles the guide in `book/` chapter by chapter, so that
//! `cargo test --doc` builds and runs every code snippet in it. The
//! rendered book and the checked snippets can never drift apart
//! because they are the same files.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/graphs.md")]
pub mod graphs {}

#[doc = include_str!("../../../book/src/search.md")]
pub mod search {}

#[doc = include_str!("../../../book/src/oracle.md")]
pub mod oracle {}

#[doc = include_str!("../../../book/src/experiments.md")]
pub mod experiments {}
