//! Benchmark-only crate; see `benches/optimizer.rs`.
