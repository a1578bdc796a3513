//! Exact arithmetic for the ring tower `Z_{4^s} ⊂ A_{m-1} ⊂ R^{s,m}` and the
//! linear, cyclic, quasi-cyclic, simplex and MacDonald codes over it.
//!
//! * [`residue`]: `Z_{4^s}`, Lee weights and ring parameters.
//! * [`subset`]: `A_k = Z_{4^s}[v_1..v_k]/(v_i^2 - v_i)` with its zeta and
//!   Möbius transforms and the `η_S` idempotents.
//! * [`tower`]: `R^{s,m}`, the `κ` idempotents and the block decomposition.
//! * [`linalg`]: Howell forms over `Z_{2^k}`, spans, membership and duals.
//! * [`gray`]: the Gray map to `Z_{4^s}^{3·2^{m-1}}`.
//! * [`code`]: codes assembled from per-block component codes.
//! * [`families`]: lazy simplex and MacDonald generators.
//! * [`cyclic`]: `R^{s,m}[x]/(x^n - 1)`, τ idempotents and quasi-cyclic codes.
//! * [`verify`]: every audit in one report.
//!
//! ```
//! use ringcodes::residue::RingParams;
//! use ringcodes::tower::KappaSystem;
//!
//! let params = RingParams::new(4, 1)?;
//! let kappa = KappaSystem::new(params)?;
//! assert!(kappa.verify_pierce().all_pass());
//! # Ok::<(), ringcodes::Error>(())
//! ```

pub mod audit;
pub mod code;
pub mod cyclic;
pub mod error;
pub mod families;
pub mod formula;
pub mod gray;
pub mod linalg;
pub mod residue;
pub mod subset;
pub mod tower;
pub mod verify;
pub mod wire;

pub use audit::{AuditEntry, AuditReport, Status};
pub use code::{ComponentSpec, RCode};
pub use error::{Error, Result};
pub use residue::{Residue, RingParams, Zq};
pub use tower::{KappaSystem, TowerElement};
