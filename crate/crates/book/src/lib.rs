//! The guide's chapters, compiled so their snippets run under `cargo test --doc`.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/realizations.md")]
pub mod realizations {}

#[doc = include_str!("../../../book/src/invariants.md")]
pub mod invariants {}

#[doc = include_str!("../../../book/src/regularity.md")]
pub mod regularity {}

#[doc = include_str!("../../../book/src/strata.md")]
pub mod strata {}

#[doc = include_str!("../../../book/src/fibres.md")]
pub mod fibres {}

#[doc = include_str!("../../../book/src/nilfibre.md")]
pub mod nilfibre {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
