//! Criterion benchmarks for mobius-core; see `benches/`.
