//! Simulation laboratory for the largest connected component of the critical
//! Erdős–Rényi random graph and its continuum scaling limit.
//!
//! The crate is organised around the two sides of the scaling picture:
//!
//! * discrete: [`graphgen`] samples `G(n,p)` in the critical window and
//!   extracts components, [`dfs`] encodes a component as an ordered tree plus
//!   surplus points, [`walk`] runs random walks, local times and time changes
//!   on components and their skeletons;
//! * continuum: [`excursion`] simulates reflected parabolic Brownian motion,
//!   tilted excursions and Poisson gluing, [`metric`] represents glued metric
//!   graphs with quotient distances and skeleton projections, [`resistance`]
//!   solves electrical networks and checks the metric/resistance comparison
//!   inequalities.
//!
//! [`harness`] drives the end-to-end experiments behind the `critlab` CLI and
//! is where Monte Carlo replicas fan out across threads (see [`par`]).

pub mod dfs;
pub mod excursion;
pub mod graphgen;
pub mod harness;
pub mod metric;
pub mod par;
pub mod resistance;
pub mod rng;
pub mod stats;
pub mod walk;
