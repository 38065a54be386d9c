//! Criterion benchmarks for the `loopcount` crate; see `benches/`.
