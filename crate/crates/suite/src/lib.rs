//! Shared drivers for the end-to-end runs in `tests/`.

pub mod properties;
