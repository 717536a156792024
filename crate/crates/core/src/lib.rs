//! Set-based reachability for logical systems.
//!
//! Sets of binary vectors are represented in generator space, either as
//! [`LogicalZonotope`]s (independent generators) or as
//! [`PolyLogicalZonotope`]s (generators gated by shared Boolean factors,
//! which keeps dependencies between operands and makes every gate exact).
//! [`ExplicitSet`] enumerates points and serves as the reference semantics.

pub mod binvec;
pub mod cases;
pub mod error;
pub mod explicit;
pub mod logical;
pub mod model;
pub mod poly;
pub mod reach;
pub mod selftest;

pub use binvec::{BinaryMatrix, BinaryVector, Gate};
pub use error::{Error, Result};
pub use explicit::ExplicitSet;
pub use logical::LogicalZonotope;
pub use model::{eval_expr, parse_expr, Algebra, Expr, Mode, Model, SetValue};
pub use poly::{unique_id, FactorId, IdAllocator, PolyLogicalZonotope};
pub use reach::{reach, ReachOptions, ReachResult};

/// Default bound on the number of free binary choices enumerated when a set
/// is converted to points.
pub const DEFAULT_EVAL_CAP: usize = 24;
