//! Criterion benchmarks for `exdisc-core`; see `benches/`.
