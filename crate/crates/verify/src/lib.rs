//! Home of the `acceptance` test target; see `tests/acceptance.rs`.
//!
//! Run it alone with `cargo test -p mcast-verify --test acceptance`.
