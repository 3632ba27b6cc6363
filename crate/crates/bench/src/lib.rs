//! Criterion benchmarks for segal-core live under `benches/`.
