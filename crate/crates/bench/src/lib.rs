//! Criterion benchmarks for the core pipeline; see `benches/core.rs`.
//!
//! Run with `cargo bench -p hcr-bench`.
