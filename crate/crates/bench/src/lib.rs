//! Criterion benchmarks for the hot kernels of `hnlz-core`; see `benches/`.
