//! Criterion benchmarks for `ratdyn-core` live in `benches/`.
