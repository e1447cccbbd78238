//! Hybrid Java style linter for naming and documentation guidelines.
//!
//! Deterministic Checkstyle-equivalent checks run on every file; a
//! model-assisted path (remote provider, replayed responses, or the offline
//! lexicon-based analyzer) covers what patterns cannot express. The
//! [`harness`] module scores outputs against labeled ground truth.

pub mod augment;
pub mod baseline;
pub mod cache;
pub mod cli;
pub mod extractor;
pub mod finding;
pub mod harness;
pub mod naming;
pub mod report;
