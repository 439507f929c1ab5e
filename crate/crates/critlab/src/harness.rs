//! Experiment harness: placeholder.
