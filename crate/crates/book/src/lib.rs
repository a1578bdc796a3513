// Each chapter of the guide becomes a module so that `cargo test --doc`
// runs its code blocks and a failure names the chapter.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/rings.md")]
pub mod rings {}
#[doc = include_str!("../../../book/src/linalg.md")]
pub mod linalg {}
#[doc = include_str!("../../../book/src/codes.md")]
pub mod codes {}
#[doc = include_str!("../../../book/src/families.md")]
pub mod families {}
#[doc = include_str!("../../../book/src/cyclic.md")]
pub mod cyclic {}
#[doc = include_str!("../../../book/src/audits.md")]
pub mod audits {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
