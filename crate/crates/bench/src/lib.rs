//! Criterion benchmarks for the counting and bounds pipeline live in `benches/`.
