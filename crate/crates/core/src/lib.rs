//! Caching-aided coded multicast for multihop cellular cells.
//!
//! Terminals request contents from a Zipf catalog and keep what they receive
//! in small LRU/LFU caches. A helper serving a set of requests builds the
//! dependency graph between requests and cached side information, derives a
//! linear XOR index code from it (conflict-graph colouring plus short
//! disjoint cycles) and multicasts the codewords down shortest-path trees of
//! the D2D unit-disk graph. Every receiver peels its content out of the
//! codewords using its cache.
//!
//! Popularity and bound computations are generic over [`Scalar`] (`f32` or
//! `f64`); the `*64` aliases below fix the common double-precision case.

// `!(x > 0.0)` is used on purpose so that NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod cache;
pub mod coding;
pub mod error;
pub mod graphs;
pub mod num;
pub mod sim;
pub mod topology;
pub mod zipf;

pub use error::{Error, Result};
pub use num::Scalar;

pub type Catalog64 = zipf::Catalog<f64>;
pub type Catalog32 = zipf::Catalog<f32>;
pub type BoundParams64 = bounds::BoundParams<f64>;
pub type BoundParams32 = bounds::BoundParams<f32>;
pub type CycleFloor64 = bounds::CycleFloor<f64>;
