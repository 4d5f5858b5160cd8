//! Benchmark-only crate; see `benches/pathloss.rs`.
