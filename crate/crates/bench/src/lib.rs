//! Benchmarks for gifs-core live under `benches/`.
