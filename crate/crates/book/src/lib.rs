//! Runs the code blocks of the guide in `book/` as doctests.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/objective.md")]
pub mod objective {}

#[doc = include_str!("../../../book/src/lifting.md")]
pub mod lifting {}

#[doc = include_str!("../../../book/src/algorithm.md")]
pub mod algorithm {}

#[doc = include_str!("../../../book/src/diagnostics.md")]
pub mod diagnostics {}

#[doc = include_str!("../../../book/src/io.md")]
pub mod io {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
