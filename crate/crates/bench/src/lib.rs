//! Criterion benchmarks for the splinegabor numerics; see `benches/`.
