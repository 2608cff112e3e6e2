//! Wall-clock abstraction.
//!
//! The core crate never reads a real clock. Anything with a time budget
//! (branch-and-bound, progressive hedging) takes a `&dyn Clock`; the host
//! binary passes a monotonic clock, tests pass [`NoClock`] or a scripted one.

/// Source of elapsed wall time in seconds.
pub trait Clock {
    /// Seconds elapsed since some fixed origin. Must be monotone.
    fn elapsed(&self) -> f64;
}

/// A clock frozen at zero: time budgets never expire.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoClock;

impl Clock for NoClock {
    fn elapsed(&self) -> f64 {
        0.0
    }
}
