//! Global computation limits, settable once at startup.

use std::sync::atomic::{AtomicI64, AtomicUsize, Ordering};

/// Default bound on permutation degrees and level sizes.
pub const DEFAULT_MAX_POINTS: usize = 100_000;
/// Default bound on group orders for element enumeration.
pub const DEFAULT_MAX_CLOSURE: usize = 1_000_000;
/// Default number of horospheres an orbit search may pass beyond the levels it compares.
pub const DEFAULT_SEARCH_DEPTH: usize = 2;
/// Default window radius above and depth below the basepoint.
pub const DEFAULT_WINDOW: i64 = 6;

static MAX_POINTS: AtomicUsize = AtomicUsize::new(0);
static MAX_CLOSURE: AtomicUsize = AtomicUsize::new(DEFAULT_MAX_CLOSURE);
static SEARCH_DEPTH: AtomicUsize = AtomicUsize::new(DEFAULT_SEARCH_DEPTH);
static WINDOW: AtomicI64 = AtomicI64::new(DEFAULT_WINDOW);

/// Maximum number of points; falls back to `SCALELAB_MAX_POINTS` then the default.
pub fn max_points() -> usize {
    let v = MAX_POINTS.load(Ordering::Relaxed);
    if v != 0 {
        return v;
    }
    let from_env = std::env::var("SCALELAB_MAX_POINTS")
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or(DEFAULT_MAX_POINTS);
    MAX_POINTS.store(from_env, Ordering::Relaxed);
    from_env
}

pub fn set_max_points(n: usize) {
    MAX_POINTS.store(n.max(1), Ordering::Relaxed);
}

pub fn max_closure() -> usize {
    MAX_CLOSURE.load(Ordering::Relaxed)
}

pub fn set_max_closure(n: usize) {
    MAX_CLOSURE.store(n.max(1), Ordering::Relaxed);
}

pub fn search_depth() -> usize {
    SEARCH_DEPTH.load(Ordering::Relaxed)
}

pub fn set_search_depth(n: usize) {
    SEARCH_DEPTH.store(n, Ordering::Relaxed);
}

/// Radius above and depth below `ṽ₀` used when no window is given.
pub fn default_window() -> i64 {
    WINDOW.load(Ordering::Relaxed)
}

pub fn set_default_window(n: i64) {
    WINDOW.store(n.max(0), Ordering::Relaxed);
}

pub(crate) fn check_points(what: &str, n: u128) -> crate::Result<()> {
    let limit = max_points() as u128;
    if n > limit {
        Err(crate::Error::limit(what, n, limit))
    } else {
        Ok(())
    }
}
