//! Runs the guide's code blocks as doc-tests.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/instances.md")]
pub mod instances {}

#[doc = include_str!("../../../book/src/relaxations.md")]
pub mod relaxations {}

#[doc = include_str!("../../../book/src/separation.md")]
pub mod separation {}

#[doc = include_str!("../../../book/src/cutting-planes.md")]
pub mod cutting_planes {}

#[doc = include_str!("../../../book/src/global.md")]
pub mod global {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
