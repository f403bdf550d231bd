//! Beam shaping for planar phased arrays: u-plane sampling domains,
//! array-factor evaluation, polynomial phase tapering, time-modulated
//! odd/even excitation and a Doppler radar simulation built on them.

pub mod af;
pub mod geometry;
pub mod metrics;
pub mod pto;
pub mod radar;
pub mod simplex;
pub mod tpt;
pub mod uplane;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
