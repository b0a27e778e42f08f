//! The mdbook guide, smushed into one crate so `cargo test --doc` runs
//! every code block from the chapters. Each chapter is a module; a failing
//! doc-test names the chapter it came from.

#[doc = include_str!("../../../book/src/intro.md")]
pub mod intro {}

#[doc = include_str!("../../../book/src/exact-arithmetic.md")]
pub mod exact_arithmetic {}

#[doc = include_str!("../../../book/src/cantor-framework.md")]
pub mod cantor_framework {}

#[doc = include_str!("../../../book/src/certificates.md")]
pub mod certificates {}

#[doc = include_str!("../../../book/src/local-sets.md")]
pub mod local_sets {}

#[doc = include_str!("../../../book/src/littlewood.md")]
pub mod littlewood {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
