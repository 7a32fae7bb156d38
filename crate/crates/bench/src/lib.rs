//! Shared fixtures for the benchmarks.

use liouville_core::InitialData;

/// Data with both `f1` and `f2` non-trivial.
pub fn general_data() -> InitialData {
    InitialData::parse("sin(x)", "cos(2*x)", 1.0).expect("valid data")
}

/// Zero data with `m = 2`, whose solution is `−2 log cosh t`.
pub fn constant_data() -> InitialData {
    InitialData::parse("0", "0", 2.0).expect("valid data")
}
