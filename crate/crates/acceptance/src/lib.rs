//! Acceptance checks for the workspace live in `tests/acceptance.rs`.
