//! Benchmark-only crate. The measurements live in `benches/engine.rs`
//! (run with `cargo bench -p reco-bench`); this library is intentionally
//! empty so the package carries no non-bench code.
