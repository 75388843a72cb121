//! The guide in `book/src` as doc-tests: each chapter becomes the docs of an
//! empty module, so `cargo test --doc -p chua-book` runs every listing.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/model.md")]
pub mod model {}
#[doc = include_str!("../../../book/src/describing-function.md")]
pub mod describing_function {}
#[doc = include_str!("../../../book/src/simulation.md")]
pub mod simulation {}
#[doc = include_str!("../../../book/src/lyapunov.md")]
pub mod lyapunov {}
#[doc = include_str!("../../../book/src/sweeps.md")]
pub mod sweeps {}
#[doc = include_str!("../../../book/src/circuits.md")]
pub mod circuits {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
