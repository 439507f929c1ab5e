//! Random-walk dynamics: placeholder.
