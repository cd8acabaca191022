//! Federated recommendations from differentially private prototypes.
//!
//! Each entity (hospital, site, ...) holds a private user×item interaction
//! matrix. Entities publish `k` ε-DP prototype rows instead of raw data; an
//! untrusted server pools the prototypes, learns a shared non-negative item
//! matrix, and broadcasts it back. Entities then fit user factors locally.
//! The whole exchange takes exactly two rounds of communication and the
//! released budget composes in parallel across entities.
//!
//! Module map:
//! - [`core`]: shared domain types (sparse ratings, factor models, privacy
//!   ledger, seeded RNG streams) and small matrix utilities.
//! - [`dp`]: Laplace / Gumbel noise and the exponential mechanism
//!   (single-sample and one-shot top-k).
//! - [`clustering`]: private prototype generation (random projection, private
//!   space partition, candidate selection, local swap, sparse recovery) and
//!   the non-private k-means / k-random baselines.
//! - [`factorization`]: regularized non-negative matrix factorization and the
//!   item/user sub-fits used by the protocol.
//! - [`federation`]: the simulated two-round protocol with transcript and
//!   budget auditing, plus the individual/central baselines.
//! - [`eval`]: test-split construction, masked RMSE and mean average
//!   percentile rank.
//! - [`data`]: synthetic Poisson generation, Movielens ingestion with ZIP
//!   federation keys, and a generic count-matrix loader.
//! - [`experiment`]: end-to-end regime runners shared by the CLI and the
//!   acceptance suite.

pub mod clustering;
pub mod core;
pub mod data;
pub mod dp;
pub mod error;
pub mod eval;
pub mod experiment;
pub mod factorization;
pub mod federation;

pub use error::{Error, Result};
