//! Benchmarks for wbcsvm live in `benches/`.

use wbcsvm::dataset::{load_wbc, LoadOptions};
use wbcsvm::{Dataset, WBC_DATA};

/// The cleaned bundled dataset.
pub fn wbc() -> Dataset {
    load_wbc(WBC_DATA.as_bytes(), LoadOptions::default()).expect("bundled data parses")
}
