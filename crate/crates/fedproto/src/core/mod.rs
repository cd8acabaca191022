//! Shared domain types: sparse interaction matrices, factor models, privatized
//! prototype sets, privacy budget ledgers, and seeded RNG streams.
//!
//! Everything here is an immutable value; operations are pure functions of
//! their inputs (including the RNG stream), so all types are safe to copy or
//! move across threads.

mod io;
mod ledger;
mod model;
mod ratings;
mod rng;

pub use io::{read_ratings, write_ratings};
pub use ledger::{CompositionRule, EntityId, Epsilon, LedgerEvent, PrivacyLedger};
pub use model::{FactorModel, PrototypeSet};
pub use ratings::{masked_rmse, rmse_over, MaskSemantics, SparseRatings};
pub use rng::RngStream;
