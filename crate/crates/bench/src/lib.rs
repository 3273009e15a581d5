//! Benchmarks for bandrec; see `benches/`.
