//! Holds the long-running acceptance suite (`cargo test -p nie-lab-validation`).
//! Kept in its own package so the suite runs after the unit and integration
//! tests of the other crates.
