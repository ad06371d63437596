//! Criterion benchmarks for the plsigma pipeline; see `benches/pipeline.rs`.
