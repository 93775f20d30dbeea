//! Acceptance battery for `gauss-chaos`; see `tests/acceptance.rs`.
