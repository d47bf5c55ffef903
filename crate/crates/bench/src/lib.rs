//! Benchmark-only crate; see `benches/hellmann.rs`.
