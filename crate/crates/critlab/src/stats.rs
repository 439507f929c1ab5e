//! Statistics helpers: placeholder.
